import dataclasses
import json
import random
from collections import Counter

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import chisquare

from conftest import from_nx, ladder, random_bounded
from minortest.generators import gen_planted_far
from minortest.graph import BoundedDegreeGraph, QueryOracle
from minortest.minors import ForbiddenFamily, find_minor_bruteforce, make_k2k, verify_embedding
from minortest.tester import (
    ACCEPT,
    INCONCLUSIVE,
    PHASES,
    REJECT,
    TesterConfig,
    _Reject,
    _Run,
    sample_edge,
    test_minor_freeness as run_tester,
)


def forced_cut_verdict(g, family, seed, **overrides):
    """Run the per-edge steps over every edge with f = 0, so any non-empty cut rejects.

    At the real f = 6Δℓ no minor-free cluster has a cut that large, so this is
    the only way to reach the certificate and construction paths on small hosts.
    """
    cfg = TesterConfig.preset("asymptotic", 0.1, family, **overrides)
    run = _Run(QueryOracle(g), cfg, random.Random(seed))
    run.f = 0
    for u, v in g.edges():
        try:
            run.handle(u, v)
        except _Reject as rej:
            return rej.verdict
    return None


def k23_on_a_tree():
    g = nx.complete_bipartite_graph(2, 3)
    nx.add_path(g, [4, 5, 6, 7, 8, 9])
    g.add_edges_from([(7, 10), (10, 11)])
    return from_nx(g)


class TestConfig:
    def test_presets(self):
        desk = TesterConfig.preset("desk", 0.1, "outerplanar")
        assert desk.center_count_coeff == 32.0 and desk.sample_coeff == 0.02
        assert TesterConfig.preset("asymptotic", 0.1, "outerplanar").sample_coeff == 1.0
        assert TesterConfig.preset("desk", 0.1, "diamond", sample_coeff=0.5).sample_coeff == 0.5
        with pytest.raises(ValueError):
            TesterConfig.preset("fast", 0.1, "diamond")

    def test_validate(self):
        g = from_nx(nx.path_graph(4))
        for bad in (dict(epsilon=0.0), dict(epsilon=1.0), dict(sample_coeff=0)):
            cfg = dataclasses.replace(TesterConfig.preset("desk", 0.1, "diamond"), **bad)
            with pytest.raises(ValueError):
                run_tester(QueryOracle(g), cfg, 0)


class TestSampleEdge:
    def test_single_edge(self):
        o = QueryOracle(BoundedDegreeGraph.from_edges(5, [(1, 3)], delta=2))
        rng = random.Random(0)
        assert all(sorted(sample_edge(o, rng)) == [1, 3] for _ in range(20))

    def test_regular_never_misses(self):
        o = QueryOracle(from_nx(nx.cycle_graph(10)))
        rng = random.Random(0)
        for _ in range(50):
            sample_edge(o, rng)
        assert o.count == 50

    def test_edgeless(self):
        o = QueryOracle(BoundedDegreeGraph(4, 2, [()] * 4))
        assert sample_edge(o, random.Random(0)) is None
        assert o.count == 10 * 4 * 2

    def test_uniform_chi_square(self):
        g = random_bounded(14, 4, random.Random(5), p=0.3)
        edges = sorted(g.edges())[:20]
        g = BoundedDegreeGraph.from_edges(14, edges, delta=4)
        o, rng = QueryOracle(g), random.Random(11)
        counts = Counter(tuple(sorted(sample_edge(o, rng))) for _ in range(10**4))
        assert set(counts) == set(edges)
        assert chisquare([counts[e] for e in edges]).pvalue > 0.001


class TestCompleteness:
    @pytest.mark.parametrize("preset", ["desk", "asymptotic"])
    def test_trees_accept(self, preset):
        for seed in range(10):
            tree = random_bounded(60, 4, random.Random(seed), p=0, connected=True)
            v = run_tester(QueryOracle(tree), TesterConfig.preset(preset, 0.1, "K2_3"), seed)
            assert v.outcome == ACCEPT

    def test_ladder_accepts_outerplanar(self):
        g = ladder(200)
        for seed in range(10):
            assert run_tester(QueryOracle(g), TesterConfig.preset("desk", 0.1, "outerplanar"), seed).outcome == ACCEPT

    def test_edgeless_graphs(self):
        assert run_tester(QueryOracle(BoundedDegreeGraph(5, 0, [()] * 5)), TesterConfig.preset("desk", 0.1, "K4"), 0).outcome == ACCEPT
        v = run_tester(QueryOracle(BoundedDegreeGraph(5, 2, [()] * 5)), TesterConfig.preset("desk", 0.1, "diamond"), 0)
        assert v.outcome == ACCEPT and "no edge" in v.reason

    def test_family_without_cut_bound_is_inconclusive(self):
        # K4 is a minor of no K_{2,k}, circus or ladder, so there is no finite f
        v = run_tester(QueryOracle(ladder(5)), TesterConfig.preset("desk", 0.1, "K4"), 0)
        assert v.outcome == INCONCLUSIVE and "separability" in v.reason


class TestRejection:
    def test_cluster_internal_k23(self):
        g = k23_on_a_tree()
        v = run_tester(QueryOracle(g), TesterConfig.preset("asymptotic", 0.1, "outerplanar"), 3)
        assert v.outcome == REJECT and v.step == "2b" and v.payload_kind == "embedding"
        assert v.member.name == "K2_3" and verify_embedding(g, v.member, v.embedding)
        assert v.recheck(g) == (True, "")
        doc = json.loads(v.to_json())
        assert doc["verdict"] == "reject" and doc["member"] == "K2_3"
        assert set(doc["witness"]["branch_sets"]) == {"a", "b", "m1", "m2", "m3"}
        assert len(v.witness_hash()) == 16

    def test_planted_far_desk(self):
        g, _ = gen_planted_far(1000, 4, ForbiddenFamily.parse("diamond"), 0.1, random.Random(4))
        outcomes = [run_tester(QueryOracle(g), TesterConfig.preset("desk", 0.1, "diamond"), s) for s in range(9)]
        assert sum(v.outcome == REJECT for v in outcomes) >= 6
        for v in outcomes:
            assert v.recheck(g)[0]

    @given(st.integers(0, 10**6))
    def test_forced_cut_payloads_recheck(self, seed):
        rng = random.Random(seed)
        g = random_bounded(rng.randint(5, 12), 3, rng, p=0.4, connected=True)
        v = forced_cut_verdict(g, "outerplanar", seed, alpha_coeff=1e9, y_coeff=100,
                               center_count_coeff=rng.choice([0.5, 1, 2]), const_c=rng.choice([0.03, 0.1]),
                               ell=rng.choice([1, 2]))
        if v is None:
            return
        assert v.outcome == REJECT and v.step in ("2c", "2d-i", "2d-ii")
        assert v.recheck(g) == (True, "")
        if v.embedding is not None:
            assert find_minor_bruteforce(g, make_k2k(3)) is not None

    def test_forced_cut_reaches_every_step(self):
        seen = Counter()
        for seed in range(200):
            rng = random.Random(seed)
            g = random_bounded(rng.randint(5, 12), 3, rng, p=0.4, connected=True)
            v = forced_cut_verdict(g, "outerplanar", seed, alpha_coeff=1e9, y_coeff=100,
                                   center_count_coeff=rng.choice([0.5, 1, 2]), const_c=rng.choice([0.03, 0.1]),
                                   ell=rng.choice([1, 2]))
            if v is not None:
                seen[v.step, v.payload_kind] += 1
        assert {s for s, _ in seen} == {"2c", "2d-i", "2d-ii"}
        assert {k for _, k in seen} == {"certificate", "embedding"}

    def test_tampered_certificate_fails_recheck(self):
        for seed in range(200):
            rng = random.Random(seed)
            g = random_bounded(rng.randint(5, 12), 3, rng, p=0.4, connected=True)
            v = forced_cut_verdict(g, "outerplanar", seed, alpha_coeff=1e9, y_coeff=100,
                                   center_count_coeff=rng.choice([0.5, 1, 2]), const_c=rng.choice([0.03, 0.1]),
                                   ell=rng.choice([1, 2]), construct_witness=False)
            if v is not None and v.certificate is not None:
                break
        cert = v.certificate
        assert not dataclasses.replace(cert, f=len(cert.crossing)).recheck(g)[0]
        assert not dataclasses.replace(cert, crossing=cert.crossing[1:]).recheck(g)[0]
        assert not dataclasses.replace(cert, second=cert.second | cert.first).recheck(g)[0]
        assert not dataclasses.replace(cert, radius=-1).recheck(g)[0]


class TestRunProperties:
    def test_deterministic(self):
        g, _ = gen_planted_far(600, 4, ForbiddenFamily.parse("diamond"), 0.1, random.Random(1))
        cfg = TesterConfig.preset("desk", 0.1, "diamond")
        assert run_tester(QueryOracle(g), cfg, 7).to_json() == run_tester(QueryOracle(g), cfg, 7).to_json()

    def test_budget_gives_inconclusive(self):
        g = ladder(300)
        v = run_tester(QueryOracle(g), TesterConfig.preset("desk", 0.1, "outerplanar", query_budget=50), 0)
        assert v.outcome == INCONCLUSIVE and "Budget" in v.reason
        assert v.queries.total == 50

    def test_ball_cap_gives_inconclusive(self):
        g = ladder(300)
        v = run_tester(QueryOracle(g), TesterConfig.preset("asymptotic", 0.1, "outerplanar", y_coeff=1e-9), 0)
        assert v.outcome == INCONCLUSIVE and "LocalAccessFailure" in v.reason

    def test_query_breakdown_sums(self):
        g = random_bounded(500, 4, random.Random(2), p=0.01, connected=True)
        o = QueryOracle(g)
        v = run_tester(o, TesterConfig.preset("desk", 0.1, "outerplanar"), 1)
        assert set(v.queries.by_phase) <= set(PHASES)
        assert sum(v.queries.by_phase.values()) == v.queries.total == o.count
        assert v.queries.sampling + v.queries.partition + v.queries.checks == v.queries.total

    def test_more_samples_never_hurt(self):
        g, _ = gen_planted_far(1000, 4, ForbiddenFamily.parse("diamond"), 0.1, random.Random(8))
        rates = []
        for coeff in (0.002, 0.005, 0.02):
            cfg = TesterConfig.preset("desk", 0.1, "diamond", sample_coeff=coeff)
            rejected = {s for s in range(12) if run_tester(QueryOracle(g), cfg, s).outcome == REJECT}
            rates.append(rejected)
        # the first samples of a run do not depend on how many follow
        assert rates[0] <= rates[1] <= rates[2]

    def test_doubling_samples_at_most_doubles_work(self):
        g = ladder(1000)
        for seed in range(4):
            work = []
            for coeff in (0.01, 0.02):
                v = run_tester(QueryOracle(g), TesterConfig.preset("desk", 0.1, "outerplanar", sample_coeff=coeff), seed)
                work.append(v.queries.total)
            assert work[0] <= work[1] <= 2 * work[0]

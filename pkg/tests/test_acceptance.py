"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

The lines are also repeated under "acceptance criteria" in the pytest
terminal summary.  Runtime is dominated by criteria 1 and 3 (exhaustive
small-graph sweeps) and is of the order of half an hour on one core.
"""

import math
import random
from collections import Counter
from functools import lru_cache

import networkx as nx
import pytest

from conftest import random_bounded
from enumeration import grow
from minortest.construction import (
    CutInstance,
    RelevantTree,
    grid_minor_from_cut,
    k2k_minor_from_cut,
    monotone_subsequence,
    path_minor_with_relevant,
    star_minor_with_relevant,
)
from minortest.generators import gen_cactus, gen_outerplanar
from minortest.graph import BoundedDegreeGraph, QueryOracle, diameter_in
from minortest.harness import ExperimentSpec, generate, partition_stats, run_campaign
from minortest.minors import find_minor_bruteforce, make_grid, make_k2k, verify_embedding
from minortest.partition import PartitionConfig
from minortest.tester import INCONCLUSIVE, REJECT, TesterConfig
from minortest.tester import test_minor_freeness as run_tester
from test_construction import check_path_result, random_tree
from test_partition import check_partition, state_for
from test_tester import forced_cut_verdict

# every reject produced by any criterion, as (source, host order, recheck ok, payload kind)
REJECTS = []


def record_rejects(source, graph, verdicts):
    for v in verdicts:
        if v.outcome == REJECT:
            REJECTS.append((source, graph.n, v.recheck(graph)[0], v.payload_kind))


# ---------------------------------------------------------------------------
# small-graph classes


def _nx_of(adj):
    g = nx.Graph()
    g.add_nodes_from(adj)
    g.add_edges_from((u, v) for u in adj for v in adj[u])
    return g


def is_outerplanar_adj(adj):
    g = _nx_of(adj)
    g.add_edges_from(("apex", v) for v in adj)
    return nx.check_planarity(g)[0]


def is_cactus_adj(adj):
    """Connected and diamond-minor-free: every block is a bridge or a cycle."""
    g = _nx_of(adj)
    return all(
        g.subgraph(block).number_of_edges() == (1 if len(block) == 2 else len(block))
        for block in nx.biconnected_components(g)
    )


OUTERPLANAR_COUNTS = [1, 1, 2, 5, 13, 46, 172, 777, 3783]
CACTUS_COUNTS = [1, 1, 2, 4, 9, 23, 63, 188, 596]


# ---------------------------------------------------------------------------
# criterion 1


def _tester_runs(graph, family, seeds, **overrides):
    coeffs = (32, 1, 0.2)
    out = []
    for s in seeds:
        cfg = TesterConfig.preset("desk", 0.1, family, center_count_coeff=coeffs[s % 3], **overrides)
        out.append(run_tester(QueryOracle(graph), cfg, random.Random(s)))
    return out


def test_criterion_1_completeness(report):
    outcomes = Counter()
    counts = {}
    for family, in_class, expected in (
        ("outerplanar", is_outerplanar_adj, OUTERPLANAR_COUNTS),
        ("diamond", is_cactus_adj, CACTUS_COUNTS),
    ):
        levels = grow(9, in_class)
        counts[family] = [len(levels[k]) for k in range(1, 10)]
        assert counts[family] == expected
        for k in range(1, 10):
            for edges in levels[k]:
                g = BoundedDegreeGraph.from_edges(k, edges)
                verdicts = _tester_runs(g, family, range(50))
                record_rejects("c1-exhaustive", g, verdicts)
                outcomes.update(v.outcome for v in verdicts)

    rng = random.Random(2024)
    for i in range(200):
        n = int(math.exp(rng.uniform(math.log(50), math.log(5000))))
        if i < 100:
            g, family = gen_outerplanar(n, 4, rng), "outerplanar"
        else:
            g, family = gen_cactus(n, 4, rng), "diamond"
        verdicts = _tester_runs(g, family, range(20))
        record_rejects("c1-generated", g, verdicts)
        outcomes.update(v.outcome for v in verdicts)

    total = sum(outcomes.values())
    rejects = outcomes[REJECT]
    inconclusive = outcomes[INCONCLUSIVE] / total
    ok = rejects == 0 and inconclusive <= 0.05
    report("1", ok, f"{total} runs ({sum(counts['outerplanar'])} outerplanar + {sum(counts['diamond'])} cactus "
                    f"small graphs x 50 seeds, 200 generated x 20): rejects={rejects} inconclusive={inconclusive:.3%}")
    assert ok


# ---------------------------------------------------------------------------
# criterion 3


def connected_masks(n, nb):
    out = []
    for mask in range(1, 1 << n):
        low = mask & -mask
        seen = frontier = low
        while frontier:
            b = frontier & -frontier
            frontier ^= b
            new = nb[b.bit_length() - 1] & mask & ~seen
            seen |= new
            frontier |= new
        if seen == mask:
            out.append(mask)
    return out


def _bits(mask):
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


@lru_cache(maxsize=None)
def cut_instance_sweep(max_n=10, construct_h0_up_to=6):
    """All cut instances on connected subcubic hosts with at most ``max_n`` vertices.

    Counters: ``lit_h0`` / ``lit_h1`` are instances meeting |E(V1,V2)| > 2Δkh with
    h = 0 and h ≥ 1; ``sharp`` are instances with |Q1 minus root| ≥ kh, h ≥ 1.
    Literal h = 0 instances are only constructed on hosts up to
    ``construct_h0_up_to`` vertices (their failures are the known counterexample).
    """
    levels = grow(max_n, lambda adj: True, max_degree=3)
    c = Counter()
    first_h0_failure = None
    for n in range(2, max_n + 1):
        for edges in levels[n]:
            g = BoundedDegreeGraph.from_edges(n, edges)
            big_delta = max(1, g.max_degree())
            nb = [sum(1 << w for w in g.neighbors(v)) for v in range(n)]
            subs = connected_masks(n, nb)
            members = {m: frozenset(_bits(m)) for m in subs}
            diam = {m: diameter_in(g, members[m]) for m in subs}
            for m1 in subs:
                h = diam[m1]
                rootbit = m1 & -m1
                side = _bits(m1)
                for m2 in subs:
                    if m1 & m2:
                        continue
                    q1 = cross = 0
                    for u in side:
                        x = nb[u] & m2
                        if x:
                            q1 |= 1 << u
                            cross += x.bit_count()
                    if not cross:
                        continue
                    for k in (1, 2):
                        lit = cross > 2 * big_delta * k * h
                        sharp = h >= 1 and (q1 & ~rootbit).bit_count() >= k * h
                        if lit and h == 0:
                            c["lit_h0"] += 1
                        if not (sharp or (lit and (h >= 1 or n <= construct_h0_up_to))):
                            continue
                        emb = k2k_minor_from_cut(CutInstance(g, members[m1], members[m2], k, h))
                        ok = emb is not None and bool(verify_embedding(g, make_k2k(k), emb))
                        if lit and h == 0:
                            c["lit_h0_checked"] += 1
                            c["lit_h0_fail"] += not ok
                            if not ok and first_h0_failure is None:
                                first_h0_failure = (n, edges, sorted(members[m1]), sorted(members[m2]), k)
                        if lit and h >= 1:
                            c["lit_h1"] += 1
                            c["lit_h1_fail"] += not ok
                        if sharp:
                            c["sharp"] += 1
                            c["sharp_fail"] += not ok
        c["hosts"] += len(levels[n])
    return c, first_h0_failure


def test_criterion_3_cut_to_k2k(report):
    c, _ = cut_instance_sweep()
    ok = c["lit_h1_fail"] == 0 and c["sharp_fail"] == 0 and c["sharp"] > 0
    report(
        "3",
        ok,
        f"{c['hosts']} subcubic hosts <= 10 vertices: h>=1 threshold instances={c['lit_h1']} "
        f"(vacuous for Delta<=3), sharpened |Q1-root|>=kh instances={c['sharp']} failures={c['sharp_fail']}; "
        f"literal h=0 part is false ({c['lit_h0_fail']}/{c['lit_h0_checked']} checked fail), see xfail",
    )
    assert ok


@pytest.mark.xfail(strict=True, reason="with h = diam G[V1] = 0 the threshold is 0; a single cut edge (K2) has no K_{2,1} minor")
def test_criterion_3_literal_h0():
    c, example = cut_instance_sweep()
    assert c["lit_h0_fail"] == 0, f"first counterexample: {example}"


# ---------------------------------------------------------------------------
# criterion 4


def test_criterion_4_constructions(report):
    trials = 10_000
    bad = Counter()
    for i in range(trials):
        rng = random.Random(i)
        n = rng.randint(1, 60)
        g = random_tree(n, rng.randint(2, 5), rng)
        q = set(rng.sample(range(n), rng.randint(1, n)))
        tree = RelevantTree.bfs_tree(g, range(n), q, rng.randrange(n))

        res = path_minor_with_relevant(tree)
        check_path_result(tree, res)
        if res.length < math.log(len(q), max(2, tree.max_degree())) - 1e-9:
            bad["path"] += 1

        h = max(1, tree.height())
        star = star_minor_with_relevant(tree, h, merge_leaf_into_root=rng.random() < 0.5)
        if len(star.leaves) < len(q) // (2 * h):
            bad["star"] += 1

        seq = [rng.randint(0, rng.choice([3, 50, 10**6])) for _ in range(rng.randint(1, 500))]
        run = monotone_subsequence(seq)
        vals = list(run.values)
        if len(run) < math.ceil(math.sqrt(len(seq))) or not (vals == sorted(vals) or vals == sorted(vals, reverse=True)):
            bad["erdos-szekeres"] += 1

    m = 16
    edges = [(i, i + 1) for i in range(m - 1)] + [(m + i, m + i + 1) for i in range(m - 1)] + [(i, m + i) for i in range(m)]
    ladder = BoundedDegreeGraph.from_edges(2 * m, edges)
    emb = grid_minor_from_cut(CutInstance(ladder, frozenset(range(m)), frozenset(range(m, 2 * m)), k=4))
    grid_ok = emb is not None and bool(verify_embedding(ladder, make_grid(4), emb))

    ok = not bad and grid_ok
    report("4", ok, f"{trials} instances each of path/star/monotone: violations={dict(bad) or 0}; "
                    f"16-rung ladder (4x2)-grid verified={grid_ok}")
    assert ok


# ---------------------------------------------------------------------------
# criterion 5


def test_criterion_5_partition_invariants(report):
    runs = 0
    kinds = Counter()
    for gi in range(50):
        rng = random.Random(1000 + gi)
        g = random_bounded(rng.randint(20, 300), rng.choice([3, 4]), rng, p=0.03, connected=rng.random() < 0.5)
        for ps in range(20):
            st = state_for(g, seed=ps, ell=rng.randint(1, 4), const_c=0.05,
                           center_count_coeff=rng.choice([0.1, 0.3, 1.0]), mark_probability=0.3)
            snap = check_partition(g, st)  # asserts every invariant
            kinds.update(cl.kind for cl in snap.clusters)
            runs += 1
    report("5", True, f"{runs} enumerations (50 graphs x 20 seeds, n <= 300): 0 violations; "
                      f"clusters by kind {dict(sorted(kinds.items()))}")


# ---------------------------------------------------------------------------
# criterion 6


def test_criterion_6_partition_statistics(report):
    gamma = 0.5
    parts = []
    trials = 0
    ok = True
    k_ok = k_total = 0
    for gi, name in enumerate(("cycle", "ladder", "outerplanar")):
        g, _ = generate(name, 2000, 4, random.Random(gi))
        stats = partition_stats(g, PartitionConfig(gamma=gamma, center_count_coeff=1), 70, seed_start=100 * gi)
        trials += len(stats.trials)
        k_ok += round(stats.k_bound_rate * len(stats.trials))
        k_total += len(stats.trials)
        mc = stats.mean_c
        ok &= stats.mean_remote_cut <= stats.remote_cut_bound and mc is not None and mc <= stats.c_bound
        parts.append(f"{name}: E(R,R')={stats.mean_remote_cut:.1f}/{stats.remote_cut_bound:.0f} C={mc:.2f}/{stats.c_bound:.2f}")
    k_rate = k_ok / k_total
    ok &= k_rate >= 0.95 and trials >= 200
    report("6", ok, f"{trials} trials, K-bound rate {k_rate:.3f}; " + "; ".join(parts))
    assert ok


# ---------------------------------------------------------------------------
# criterion 7


def test_criterion_7_soundness(report):
    rates = {}
    for n in (2000, 8000):
        res = run_campaign(ExperimentSpec(generator="planted", n=(n,), delta=4, epsilon=0.1, family="diamond", trials=60))
        recs = res.records
        for r in recs:
            if r.verdict == REJECT:
                REJECTS.append(("c7", n, bool(r.recheck_ok), "embedding" if r.step == "2b" else "certificate"))
        rates[n] = sum(r.verdict == REJECT for r in recs) / len(recs)
    ok = all(rate >= 2 / 3 for rate in rates.values())
    report("7", ok, "reject rate " + ", ".join(f"n={n}: {rate:.3f}" for n, rate in rates.items())
                    + " (desk preset, 60 trials each, bound 0.667)")
    assert ok


# ---------------------------------------------------------------------------
# criterion 8


def test_criterion_8_query_scaling(report):
    res = run_campaign(ExperimentSpec(generator="outerplanar", n=tuple(2**k for k in range(10, 18)), delta=4,
                                      epsilon=0.1, family="outerplanar", trials=10))
    for r in res.records:
        if r.verdict == REJECT:
            REJECTS.append(("c8", r.n, bool(r.recheck_ok), ""))
    fit = res.fit
    ok = fit is not None and fit.exponent <= 0.80
    means = " ".join(f"{s.n}:{s.mean_queries:.0f}" for s in res.sizes)
    report("8", ok, f"exponent {fit.exponent:.3f} (95% CI [{fit.ci_low:.3f}, {fit.ci_high:.3f}], bound 0.80); mean queries {means}")
    assert ok


# ---------------------------------------------------------------------------
# criterion 2 (runs last so it sees the rejects of the other criteria)


def test_criterion_2_witness_soundness(report):
    if not any(src == "c7" for src, *_ in REJECTS):
        # run in isolation: produce a sample of real rejections first
        for seed in range(10):
            g, _ = generate("planted", 2000, 4, random.Random(seed), "diamond", 0.1)
            cfg = TesterConfig.preset("desk", 0.1, "diamond")
            record_rejects("c7-sample", g, [run_tester(QueryOracle(g), cfg, random.Random(seed))])

    # cut certificates only arise with the cut threshold forced to zero (see the decisions ledger)
    forced = Counter()
    for seed in range(300):
        rng = random.Random(seed)
        g = random_bounded(rng.randint(5, 12), 3, rng, p=0.4, connected=True)
        v = forced_cut_verdict(g, "outerplanar", seed, alpha_coeff=1e9, y_coeff=100,
                               center_count_coeff=rng.choice([0.5, 1, 2]), const_c=rng.choice([0.03, 0.1]),
                               ell=rng.choice([1, 2]), construct_witness=rng.random() < 0.5)
        if v is None:
            continue
        ok = v.recheck(g)[0]
        if v.embedding is not None:
            # small host: confirm by exhaustive search as well
            ok &= find_minor_bruteforce(g, v.member) is not None
        REJECTS.append(("forced-f", g.n, ok, v.payload_kind))
        forced[v.payload_kind] += 1

    real = [r for r in REJECTS if r[0] != "forced-f"]
    failed = [r for r in REJECTS if not r[2]]
    small_real_certs = sum(1 for src, n, _, kind in real if kind == "certificate" and n <= 12)
    ok = not failed and len(real) > 0 and sum(forced.values()) > 0
    report("2", ok, f"{len(REJECTS)} rejections rechecked, {len(failed)} failed: {len(real)} from criteria runs, "
                    f"forced-cut {dict(forced)}; real-threshold certificates on hosts <= 12 vertices: {small_real_certs}")
    assert ok

import random

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import from_nx, random_bounded, to_nx
from minortest.graph import BoundedDegreeGraph, GraphError, induced_subgraph
from minortest.minors import (
    ForbiddenFamily,
    MinorEmbedding,
    SearchTooLarge,
    compose,
    contains_minor,
    embedding_to_dot,
    find_minor_bruteforce,
    format_embedding,
    has_minor_by_contraction,
    is_family_minor_free,
    make_circus,
    make_complete,
    make_diamond,
    make_grid,
    make_k2k,
    parse_embedding,
    quotient,
    template_from_name,
    verify_embedding,
)
from minortest.minors.deciders import decider_for
from minortest.minors.templates import canonical_form, is_isomorphic

ATLAS = [from_nx(g) for g in nx.graph_atlas_g()[1:]]


def edge_set(t):
    return {frozenset((t.label(a), t.label(b))) for a, b in t.graph.edges()}


class TestTemplates:
    def test_grid(self):
        assert edge_set(make_grid(1)) == {frozenset(("x1", "y1"))}
        g2 = make_grid(2)
        assert nx.is_isomorphic(to_nx(g2.graph), nx.cycle_graph(4))
        assert edge_set(g2) == {frozenset(p) for p in [("x1", "x2"), ("x2", "y2"), ("y2", "y1"), ("y1", "x1")]}
        g3 = make_grid(3)
        assert (g3.n, g3.graph.m) == (6, 7)
        with pytest.raises(GraphError):
            make_grid(0)

    def test_circus(self):
        c1 = make_circus(1)
        assert edge_set(c1) == {frozenset(("x", "y1")), frozenset(("y1", "z1"))}
        for k in (2, 3):
            c = make_circus(k)
            assert (c.n, c.graph.m) == (2 * k + 1, 3 * k - 1)
        with pytest.raises(GraphError):
            make_circus(0)

    def test_k2k(self):
        assert nx.is_isomorphic(to_nx(make_k2k(1).graph), nx.path_graph(3))
        assert nx.is_isomorphic(to_nx(make_k2k(2).graph), nx.cycle_graph(4))
        assert (make_k2k(3).n, make_k2k(3).graph.m) == (5, 6)

    def test_names(self):
        for name in ("K4", "diamond", "K2_3", "grid_2", "circus_3", "C5", "P3", "K1_3"):
            assert template_from_name(name).name.lower() == name.lower()
        with pytest.raises(GraphError):
            template_from_name("banana")

    def test_canonical_form_detects_isomorphism(self, rng):
        g = random_bounded(6, 3, rng, p=0.6)
        perm = list(range(6))
        rng.shuffle(perm)
        h = BoundedDegreeGraph.from_edges(6, [(perm[u], perm[v]) for u, v in g.edges()])
        assert canonical_form(g) == canonical_form(h)
        assert is_isomorphic(g, h)


class TestQuotient:
    def test_examples(self, rng):
        g = random_bounded(8, 3, rng)
        assert quotient(g, [[v] for v in range(8)]) == g.with_delta(quotient(g, [[v] for v in range(8)]).delta)
        whole = quotient(g, [list(range(8))])
        assert whole.n == 1 and whole.m == 0
        c4 = from_nx(nx.cycle_graph(4))
        q = quotient(c4, [[0, 1], [2, 3]])
        assert q.n == 2 and list(q.edges()) == [(0, 1)]

    def test_errors(self):
        g = from_nx(nx.path_graph(3))
        with pytest.raises(GraphError):
            quotient(g, [[0, 1], [1, 2]])
        with pytest.raises(GraphError):
            quotient(g, [[0, 1]])
        with pytest.raises(GraphError):
            quotient(g, [[0, 1, 2], []])

    @given(st.integers(0, 10**6))
    def test_associative(self, seed):
        rng = random.Random(seed)
        g = random_bounded(9, 4, rng, p=0.5)
        labels = [rng.randrange(5) for _ in range(9)]
        fine = [[v for v in range(9) if labels[v] == c] for c in range(5)]
        fine = [p for p in fine if p]
        coarse_label = [rng.randrange(2) for _ in fine]
        coarse = [[i for i in range(len(fine)) if coarse_label[i] == c] for c in range(2)]
        coarse = [p for p in coarse if p]
        two_step = quotient(quotient(g, fine), coarse)
        composed = [[v for i in part for v in fine[i]] for part in coarse]
        one_step = quotient(g, composed)
        assert sorted(two_step.edges()) == sorted(one_step.edges())


class TestVerify:
    def test_identity_triangle(self):
        k3 = make_complete(3)
        emb = MinorEmbedding({0: frozenset([0]), 1: frozenset([1]), 2: frozenset([2])}, {(0, 1): (0, 1), (0, 2): (0, 2), (1, 2): (1, 2)})
        assert verify_embedding(k3.graph, k3, emb)

    def test_violations_named(self):
        path = from_nx(nx.path_graph(3))
        p2 = template_from_name("P2")
        overlap = MinorEmbedding({0: frozenset([0, 1]), 1: frozenset([1, 2])}, {(0, 1): (0, 1)})
        assert verify_embedding(path, p2, overlap).condition == "disjointness"
        k1 = template_from_name("K1")
        split = MinorEmbedding({0: frozenset([0, 2])}, {})
        assert verify_embedding(path, k1, split).condition == "connectivity"
        bad_edge = MinorEmbedding({0: frozenset([0]), 1: frozenset([2])}, {(0, 1): (0, 2)})
        assert verify_embedding(path, p2, bad_edge).condition == "edge-witness"
        missing = MinorEmbedding({0: frozenset([0])}, {})
        assert verify_embedding(path, p2, missing).condition == "branch-set"

    def test_text_and_dot_round_trip(self):
        host = make_complete(4).graph
        d = make_diamond()
        emb = find_minor_bruteforce(host, d)
        text = format_embedding(d, emb)
        back = parse_embedding(text, d)
        assert verify_embedding(host, d, back)
        assert back.branch_sets == emb.branch_sets
        dot = embedding_to_dot(host, d, emb)
        assert dot.count("fillcolor") == 4 and "penwidth=3" in dot

    def test_compose(self):
        # diamond inside K4 inside a subdivided K4
        k4 = make_complete(4)
        g = nx.complete_graph(4)
        g = nx.relabel_nodes(g, {i: i for i in range(4)})
        g.remove_edge(0, 1)
        g.add_edges_from([(0, 4), (4, 1)])
        host = from_nx(g)
        outer = find_minor_bruteforce(host, k4)
        inner = find_minor_bruteforce(k4.graph, make_diamond())
        emb = compose(outer, inner)
        assert verify_embedding(host, make_diamond(), emb)


class TestBruteForce:
    def test_examples(self):
        assert verify_embedding(make_complete(4).graph, make_diamond(), find_minor_bruteforce(make_complete(4).graph, make_diamond()))
        tree = from_nx(nx.balanced_tree(2, 2))
        assert find_minor_bruteforce(tree, make_complete(3)) is None

    def test_three_rung_ladder_has_no_k23(self):
        # every vertex of the 3-rung ladder lies on its outer 6-cycle, so it is
        # outerplanar and cannot contain K_{2,3}; both strategies agree
        grid3 = make_grid(3).graph
        assert find_minor_bruteforce(grid3, make_k2k(3)) is None
        assert not has_minor_by_contraction(grid3, make_k2k(3))
        assert nx.check_planarity(to_nx(grid3))[0]
        # no ladder is an outerplanarity obstruction
        assert find_minor_bruteforce(make_grid(5).graph, make_k2k(3)) is None

    def test_size_guard(self):
        with pytest.raises(SearchTooLarge):
            find_minor_bruteforce(from_nx(nx.path_graph(30)), make_complete(3), max_host_vertices=12)

    @pytest.mark.parametrize("name", ["K3", "C4", "diamond", "K4", "K2_3", "P3", "K1_3", "circus_2", "C5"])
    def test_agrees_with_contraction_search_on_atlas(self, name):
        t = template_from_name(name)
        for g in ATLAS:
            emb = find_minor_bruteforce(g, t)
            assert (emb is not None) == has_minor_by_contraction(g, t), (name, sorted(g.edges()))
            if emb is not None:
                assert verify_embedding(g, t, emb)

    @pytest.mark.parametrize("name", ["K3", "C4", "diamond", "K4", "K2_3"])
    def test_deciders_agree_with_bruteforce(self, name):
        t = template_from_name(name)
        decide = decider_for(t)
        assert decide is not None
        for g in ATLAS:
            adj = {v: set(g.neighbors(v)) for v in range(g.n)}
            assert decide(adj) == (find_minor_bruteforce(g, t) is not None)

    @given(st.integers(0, 10**6))
    def test_minor_of_induced_subgraph_lifts(self, seed):
        rng = random.Random(seed)
        g = random_bounded(11, 4, rng, p=0.5)
        vs = rng.sample(range(11), 8)
        sub, mapping = induced_subgraph(g, vs)
        emb = contains_minor(sub, make_diamond())
        if emb is not None:
            assert verify_embedding(g, make_diamond(), emb.relabel(mapping))

    @given(st.integers(0, 10**6))
    def test_decider_witness_on_larger_hosts(self, seed):
        g = random_bounded(30, 4, random.Random(seed), p=0.1)
        for t in (make_complete(4), make_k2k(3), make_diamond()):
            emb = contains_minor(g, t)
            if emb is not None:
                assert verify_embedding(g, t, emb)
            else:
                assert not decider_for(t)({v: set(g.neighbors(v)) for v in range(g.n)})


class TestFamily:
    def test_examples(self):
        fam = ForbiddenFamily.parse("outerplanar")
        ok, wit = is_family_minor_free(from_nx(nx.balanced_tree(2, 3)), fam)
        assert ok and wit is None
        ok, (member, emb) = is_family_minor_free(make_complete(4).graph, fam)
        assert not ok and member.name == "K4" and verify_embedding(make_complete(4).graph, member, emb)
        # fan triangulation of a 7-gon is maximal outerplanar
        fan = nx.cycle_graph(7)
        fan.add_edges_from((0, i) for i in range(2, 6))
        ok, _ = is_family_minor_free(from_nx(fan), fam)
        assert ok
        assert find_minor_bruteforce(from_nx(fan), make_k2k(3)) is None
        assert find_minor_bruteforce(from_nx(fan), make_complete(4)) is None

    def test_profiles(self):
        fam = ForbiddenFamily.parse("outerplanar")
        p = fam.separability_profile(4, 10, 1000)
        assert (p.kind, p.k) == ("k2k", 3)
        assert p.f(4, 10, 1000) == 2 * 4 * 3 * 10 and p.g(10, 1000) == 10
        # diamond is a minor of K_{2,3}
        d = ForbiddenFamily.parse("diamond").separability_profile(4, 10, 1000)
        assert (d.kind, d.k) == ("k2k", 3)
        assert verify_embedding(d.host_template.graph, d.member, d.member_in_host)
        with pytest.raises(ValueError):
            ForbiddenFamily([])

    def test_grid_profile_grows_fast(self):
        fam = ForbiddenFamily.parse("grid_2")
        kinds = {p.kind for p in fam.profiles}
        assert "grid" in kinds
        best = fam.separability_profile(3, 5, 100)
        assert best.f(3, 5, 100) <= min(p.f(3, 5, 100) for p in fam.profiles if p.g(5, 100) >= 5)

"""Random graph generators for completeness and soundness experiments."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Set, Tuple

from .graph import BoundedDegreeGraph, GraphError, edge_key
from .minors.family import ForbiddenFamily, is_family_minor_free
from .minors.templates import MinorTemplate, canonical_form, make_complete


def _relabel(n: int, edges, rng: random.Random, delta: int) -> BoundedDegreeGraph:
    perm = list(range(n))
    rng.shuffle(perm)
    return BoundedDegreeGraph.from_edges(n, [edge_key(perm[u], perm[v]) for u, v in edges], delta)


def gen_outerplanar(n: int, delta_cap: int, rng: random.Random, relabel: bool = True) -> BoundedDegreeGraph:
    """Random maximal outerplanar graph (random ear sequence of an n-gon), thinned to degree ≤ delta_cap.

    Only chords are removed, so the outer cycle survives and the graph stays
    connected and outerplanar.
    """
    if n < 3:
        raise GraphError("outerplanar generator needs n >= 3")
    if delta_cap < 2:
        raise GraphError("outerplanar generator needs delta_cap >= 2")
    cycle = {edge_key(i, (i + 1) % n) for i in range(n)}
    chords: Set[Tuple[int, int]] = set()
    polygon = list(range(n))
    while len(polygon) > 3:
        i = rng.randrange(len(polygon))
        a, b = polygon[i - 1], polygon[(i + 1) % len(polygon)]
        chords.add(edge_key(a, b))
        polygon.pop(i)
    deg = [2] * n
    for u, v in chords:
        deg[u] += 1
        deg[v] += 1
    by_vertex: Dict[int, List[Tuple[int, int]]] = {v: [] for v in range(n)}
    for e in sorted(chords):
        by_vertex[e[0]].append(e)
        by_vertex[e[1]].append(e)
    for v in range(n):
        while deg[v] > delta_cap:
            live = [e for e in by_vertex[v] if e in chords]
            e = live[rng.randrange(len(live))]
            chords.discard(e)
            deg[e[0]] -= 1
            deg[e[1]] -= 1
    edges = sorted(cycle | chords)
    if relabel:
        return _relabel(n, edges, rng, delta_cap)
    return BoundedDegreeGraph.from_edges(n, edges, delta_cap)


def gen_cactus(
    n: int, delta_cap: int, rng: random.Random, cycle_prob: float = 0.5, max_cycle: int = 8, relabel: bool = True
) -> BoundedDegreeGraph:
    """Random connected cactus: grow by pendant edges or by cycles glued at one vertex.

    ``cycle_prob = 0`` gives a random tree.  Every edge lies on at most one
    cycle, so the result has no diamond minor.
    """
    if n < 1:
        raise GraphError("cactus generator needs n >= 1")
    if delta_cap < 1 or (n > 2 and delta_cap < 2):
        raise GraphError("delta_cap too small for a connected graph on n vertices")
    deg = [0] * n
    edges: List[Tuple[int, int]] = []
    size = 1
    while size < n:
        room = n - size
        if cycle_prob > 0 and room >= 2 and delta_cap >= 2 and rng.random() < cycle_prob:
            hosts = [v for v in range(size) if deg[v] <= delta_cap - 2]
            if hosts:
                v = hosts[rng.randrange(len(hosts))]
                # at cap 2 a closed cycle has no free slot left, so it must take every remaining vertex
                length = room + 1 if delta_cap == 2 else rng.randint(3, min(max_cycle, room + 1))
                ring = [v] + list(range(size, size + length - 1))
                for i in range(length):
                    a, b = ring[i], ring[(i + 1) % length]
                    edges.append(edge_key(a, b))
                    deg[a] += 1
                    deg[b] += 1
                size += length - 1
                continue
        hosts = [v for v in range(size) if deg[v] <= delta_cap - 1]
        v = hosts[rng.randrange(len(hosts))]
        edges.append((v, size))
        deg[v] += 1
        deg[size] += 1
        size += 1
    if relabel:
        return _relabel(n, edges, rng, max(delta_cap, 1))
    return BoundedDegreeGraph.from_edges(n, edges, max(delta_cap, 1))


@dataclass(frozen=True)
class FarnessCertificate:
    """Disjoint-copies lower bound on the distance to the family.

    Each of ``copies`` vertex-disjoint gadget copies needs at least
    ``deletions_per_copy`` edge deletions before the graph can be minor-free,
    so at least ``lower_bound`` edges must change.
    """

    gadget: str
    copies: int
    gadget_vertices: int
    deletions_per_copy: int
    n: int
    delta: int

    @property
    def lower_bound(self) -> int:
        return self.copies * self.deletions_per_copy

    @property
    def epsilon(self) -> float:
        return self.lower_bound / (self.n * self.delta)


@lru_cache(maxsize=None)
def _min_deletions(gadget_key, family_name: str) -> int:
    gadget, family = _GADGET_CACHE[(gadget_key, family_name)]
    edges = list(gadget.graph.edges())
    for d in range(len(edges) + 1):
        for drop in itertools.combinations(range(len(edges)), d):
            keep = [e for i, e in enumerate(edges) if i not in drop]
            g = BoundedDegreeGraph.from_edges(gadget.n, keep, gadget.graph.delta)
            if is_family_minor_free(g, family)[0]:
                return d
    return len(edges)


_GADGET_CACHE: Dict[tuple, tuple] = {}


def min_deletions_to_free(gadget: MinorTemplate, family: ForbiddenFamily) -> int:
    """Fewest edge deletions that make ``gadget`` family-minor-free (exhaustive over edge subsets)."""
    key = canonical_form(gadget.graph)
    _GADGET_CACHE[(key, family.name)] = (gadget, family)
    return _min_deletions(key, family.name)


def gadget_candidates(family: ForbiddenFamily, delta_cap: int) -> List[MinorTemplate]:
    """Family members first, then cliques K_4..K_{Δ+1} (denser per vertex)."""
    out = [m for m in family.members if m.graph.max_degree() <= delta_cap]
    for k in range(4, min(delta_cap + 1, 7) + 1):
        out.append(make_complete(k))
    return out


def gen_planted_far(
    n: int,
    delta_cap: int,
    family,
    epsilon: float,
    rng: random.Random,
    gadget: Optional[MinorTemplate] = None,
    connect: bool = False,
    copies: Optional[int] = None,
) -> Tuple[BoundedDegreeGraph, FarnessCertificate]:
    """Disjoint gadget copies padded with isolated vertices to n.

    The number of copies is ⌈ε n Δ / m⌉ where m is the number of deletions a
    single gadget needs; with a family member as gadget m = 1 and this is
    ⌈ε n Δ⌉.  Without an explicit ``gadget`` the first candidate whose copies
    fit into n vertices is used.  ``connect`` chains the copies by a path of
    bridges (the certificate is unaffected: each copy stays a subgraph).
    An explicit ``copies`` count replaces the ε-derived one.
    """
    fam = ForbiddenFamily.parse(family) if isinstance(family, str) else family
    if copies is None and not 0 < epsilon < 1:
        raise GraphError("epsilon must lie in (0, 1)")
    if copies is not None and copies < 1:
        raise GraphError("copies must be at least 1")
    need = epsilon * n * delta_cap
    cands = [gadget] if gadget is not None else gadget_candidates(fam, delta_cap)
    chosen = None
    for g in cands:
        # chaining adds one bridge at each of two ports per copy
        if g.graph.max_degree() + (1 if connect else 0) > delta_cap:
            continue
        m = min_deletions_to_free(g, fam)
        if m == 0:
            continue
        count = copies if copies is not None else math.ceil(need / m - 1e-9)
        if count * g.n <= n:
            chosen = (g, m, count)
            break
    if chosen is None:
        smallest = min(g.n for g in cands) if cands else 0
        raise GraphError(
            f"planted copies do not fit: {copies if copies is not None else need:g} copies of a {smallest}-vertex gadget exceed n = {n}"
        )
    g, m, count = chosen
    edges: List[Tuple[int, int]] = []
    ports: List[int] = []
    for c in range(count):
        base = c * g.n
        edges.extend((base + a, base + b) for a, b in g.graph.edges())
        ports.append(base)
    if connect:
        for a, b in zip(ports, ports[1:]):
            edges.append((a + 1, b))
    graph = _relabel(n, edges, rng, delta_cap)
    return graph, FarnessCertificate(g.name, count, g.n, m, n, delta_cap)


__all__ = [
    "FarnessCertificate",
    "gadget_candidates",
    "gen_cactus",
    "gen_outerplanar",
    "gen_planted_far",
    "min_deletions_to_free",
]

"""Linear-ish minor tests for a few structured templates, plus witness extraction.

Exhaustive search is hopeless on clusters with hundreds of vertices, but the
templates the tester actually uses have classical characterizations:

* K3: the graph has a cycle.
* K4: the graph does not reduce to nothing under series-parallel reductions.
* diamond: some block is neither a bridge nor a cycle.
* K_{2,3}: some block is neither outerplanar nor K4.
* C4: some block has a cycle of length >= 4.

A positive answer is turned into a verified embedding by shrinking the host
(edge deletions, then contractions) while the decider still says yes, until
what remains is template-sized and can be searched exhaustively.
"""

from __future__ import annotations

from typing import Callable, Dict, Iterable, List, Optional, Set, Tuple

import networkx as nx

from ..graph import BoundedDegreeGraph, edge_key
from .embedding import MinorEmbedding, embedding_from_branch_sets, verify_embedding
from .search import find_minor_bruteforce
from .templates import MinorTemplate, is_isomorphic, make_complete, make_cycle, make_diamond, make_k2k

Adj = Dict[int, Set[int]]
Decider = Callable[[Adj], bool]


def _adj_of(graph: BoundedDegreeGraph) -> Adj:
    return {v: set(graph.neighbors(v)) for v in range(graph.n)}


def _nx(adj: Adj) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(adj)
    for v, ws in adj.items():
        for w in ws:
            if v < w:
                g.add_edge(v, w)
    return g


def has_cycle(adj: Adj) -> bool:
    n = len(adj)
    m = sum(len(ws) for ws in adj.values()) // 2
    seen: Set[int] = set()
    comps = 0
    for s in adj:
        if s in seen:
            continue
        comps += 1
        seen.add(s)
        stack = [s]
        while stack:
            x = stack.pop()
            for w in adj[x]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    return m > n - comps


def has_k4_minor(adj: Adj) -> bool:
    """Series-parallel reduction; what survives contains a K4 minor."""
    g = {v: set(ws) for v, ws in adj.items()}
    queue = [v for v in g if len(g[v]) <= 2]
    while queue:
        v = queue.pop()
        if v not in g or len(g[v]) > 2:
            continue
        nbrs = list(g.pop(v))
        for w in nbrs:
            g[w].discard(v)
        if len(nbrs) == 2:
            a, b = nbrs
            g[a].add(b)
            g[b].add(a)
        for w in nbrs:
            if len(g[w]) <= 2:
                queue.append(w)
    return bool(g)


def _blocks(adj: Adj) -> List[Tuple[Set[int], int]]:
    """(vertex set, edge count) of each block with at least one edge."""
    out = []
    for edges in nx.biconnected_component_edges(_nx(adj)):
        edges = list(edges)
        vs = {x for e in edges for x in e}
        out.append((vs, len(edges)))
    return out


def has_diamond_minor(adj: Adj) -> bool:
    return any(len(vs) >= 3 and m > len(vs) for vs, m in _blocks(adj))


def _is_outerplanar(adj: Adj, vs: Optional[Iterable[int]] = None) -> bool:
    g = _nx(adj) if vs is None else _nx(adj).subgraph(vs).copy()
    apex = ("apex",)
    g.add_node(apex)
    for v in list(g.nodes):
        if v != apex:
            g.add_edge(apex, v)
    planar, _ = nx.check_planarity(g)
    return planar


def _is_k4_block(adj: Adj, vs: Set[int], m: int) -> bool:
    return len(vs) == 4 and m == 6


def has_k23_minor(adj: Adj) -> bool:
    for vs, m in _blocks(adj):
        if len(vs) < 5 or m <= len(vs):
            continue
        if _is_k4_block(adj, vs, m):
            continue
        if not _is_outerplanar(adj, vs):
            return True
    return False


def has_c4_minor(adj: Adj) -> bool:
    return any(len(vs) >= 4 for vs, m in _blocks(adj))


def has_k23_or_k4_minor(adj: Adj) -> bool:
    return not _is_outerplanar(adj)


_REGISTRY: List[Tuple[MinorTemplate, Decider]] = [
    (make_complete(3), has_cycle),
    (make_cycle(4), has_c4_minor),
    (make_diamond(), has_diamond_minor),
    (make_complete(4), has_k4_minor),
    (make_k2k(3), has_k23_minor),
]


def decider_for(template: MinorTemplate) -> Optional[Decider]:
    for t, fn in _REGISTRY:
        if is_isomorphic(t.graph, template.graph):
            return fn
    return None


def _shrink(adj: Adj, decide: Decider) -> Tuple[Adj, Dict[int, Set[int]]]:
    """Delete then contract edges while ``decide`` keeps saying yes.

    Returns the shrunken graph and, for each surviving vertex, the original
    vertices merged into it.
    """
    g = {v: set(ws) for v, ws in adj.items()}
    # isolated vertices never help a template without isolated vertices
    for v in [v for v, ws in g.items() if not ws]:
        del g[v]
    edges = sorted({edge_key(u, w) for u, ws in g.items() for w in ws})

    def without(batch: List[Tuple[int, int]]) -> Adj:
        h = {v: set(ws) for v, ws in g.items()}
        for u, w in batch:
            h[u].discard(w)
            h[w].discard(u)
        return h

    # delta-debugging style batch deletion
    chunk = max(1, len(edges) // 2)
    while edges:
        progress = False
        i = 0
        kept: List[Tuple[int, int]] = []
        while i < len(edges):
            batch = edges[i:i + chunk]
            trial = without(batch)
            if decide(trial):
                g = trial
                progress = True
            else:
                kept.extend(batch)
            i += chunk
        edges = kept
        if chunk == 1 and not progress:
            break
        chunk = max(1, chunk // 2)
    for v in [v for v, ws in g.items() if not ws]:
        del g[v]

    groups: Dict[int, Set[int]] = {v: {v} for v in g}
    changed = True
    while changed:
        changed = False
        for u, w in sorted({edge_key(a, b) for a, bs in g.items() for b in bs}):
            if u not in g or w not in g.get(u, ()):
                continue
            trial = {v: set(ws) for v, ws in g.items()}
            merged = (trial.pop(w) | trial[u]) - {u, w}
            for x in trial.values():
                x.discard(w)
            trial[u] = merged
            for x in merged:
                trial[x].add(u)
            if decide(trial):
                g = trial
                groups[u] |= groups.pop(w)
                changed = True
        # a final deletion pass can expose further contractions
        for u, w in sorted({edge_key(a, b) for a, bs in g.items() for b in bs}):
            trial = {v: set(ws) for v, ws in g.items()}
            trial[u].discard(w)
            trial[w].discard(u)
            if decide(trial):
                g = trial
                changed = True
        for v in [v for v, ws in g.items() if not ws]:
            del g[v]
            groups.pop(v, None)
    return g, groups


def extract_witness(host: BoundedDegreeGraph, template: MinorTemplate, decide: Decider) -> Optional[MinorEmbedding]:
    """Verified embedding of ``template`` in ``host`` given a decider that says it is there."""
    adj = _adj_of(host)
    if not decide(adj):
        return None
    small, groups = _shrink(adj, decide)
    ids = sorted(small)
    index = {v: i for i, v in enumerate(ids)}
    sg = BoundedDegreeGraph.from_edges(len(ids), [(index[u], index[w]) for u in ids for w in small[u] if u < w])
    inner = find_minor_bruteforce(sg, template, max_host_vertices=max(20, sg.n))
    if inner is None:
        return None
    sets = {t: frozenset(x for i in b for x in groups[ids[i]]) for t, b in inner.branch_sets.items()}
    emb = embedding_from_branch_sets(host, template, sets)
    if emb is None or not verify_embedding(host, template, emb):
        return None
    return emb

from __future__ import annotations

from typing import Iterable, List, Sequence

from ..graph import BoundedDegreeGraph, GraphError


def quotient(graph: BoundedDegreeGraph, partition: Sequence[Iterable[int]]) -> BoundedDegreeGraph:
    """G[P]: one vertex per part (in the given order), adjacent iff some host edge joins the parts."""
    parts: List[List[int]] = [list(p) for p in partition]
    owner = [-1] * graph.n
    for i, p in enumerate(parts):
        if not p:
            raise GraphError(f"part {i} is empty")
        for v in p:
            if not 0 <= v < graph.n:
                raise GraphError(f"vertex {v} out of range")
            if owner[v] != -1:
                raise GraphError(f"vertex {v} appears in parts {owner[v]} and {i}")
            owner[v] = i
    missing = [v for v in range(graph.n) if owner[v] == -1]
    if missing:
        raise GraphError(f"partition misses vertices {missing[:10]}")
    adj = [set() for _ in parts]
    for u, v in graph.edges():
        a, b = owner[u], owner[v]
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    return BoundedDegreeGraph(len(parts), max((len(a) for a in adj), default=0), adj)

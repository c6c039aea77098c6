"""Exhaustive enumeration of small connected graphs in a minor-closed class.

Every connected graph on k+1 vertices has a vertex whose removal leaves a
connected graph (a leaf of a spanning tree), and minor-closed classes are
closed under vertex deletion, so growing class members one vertex at a time
and keeping the class members reaches every connected member.  Isomorphs are
removed with nauty certificates.
"""

from __future__ import annotations

import itertools
from typing import Callable, Dict, List, Set, Tuple

import pynauty

Adj = Dict[int, Set[int]]
Edges = Tuple[Tuple[int, int], ...]


def certificate(n: int, edges: Edges) -> bytes:
    adj = {v: [] for v in range(n)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return pynauty.certificate(pynauty.Graph(n, adjacency_dict=adj))


def grow(max_n: int, in_class: Callable[[Adj], bool], max_degree: int = None) -> Dict[int, List[Edges]]:
    """Connected class members on 1..max_n vertices, one representative per isomorphism class."""
    levels: Dict[int, List[Edges]] = {1: [()]}
    for k in range(1, max_n):
        seen: Set[bytes] = set()
        out: List[Edges] = []
        for edges in levels[k]:
            deg = [0] * k
            for u, v in edges:
                deg[u] += 1
                deg[v] += 1
            free = [v for v in range(k) if max_degree is None or deg[v] < max_degree]
            top = len(free) if max_degree is None else min(len(free), max_degree)
            for r in range(1, top + 1):
                for nbrs in itertools.combinations(free, r):
                    new = edges + tuple((u, k) for u in nbrs)
                    cert = certificate(k + 1, new)
                    if cert in seen:
                        continue
                    seen.add(cert)
                    adj: Adj = {v: set() for v in range(k + 1)}
                    for u, v in new:
                        adj[u].add(v)
                        adj[v].add(u)
                    if in_class(adj):
                        out.append(new)
        levels[k + 1] = out
    return levels

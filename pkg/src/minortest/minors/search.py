"""Exhaustive minor search for small hosts.

:func:`find_minor_bruteforce` enumerates connected branch sets directly.
:func:`has_minor_by_contraction` is a deliberately different second method
(all contraction quotients + subgraph test) used to cross-check the first.
"""

from __future__ import annotations

from collections import deque
from typing import Dict, FrozenSet, Iterator, List, Optional, Set

from ..graph import BoundedDegreeGraph
from .embedding import MinorEmbedding, embedding_from_branch_sets, verify_embedding
from .templates import MinorTemplate

DEFAULT_MAX_HOST = 12


class SearchTooLarge(ValueError):
    """The host exceeds the size guard of an exhaustive search."""


def _template_order(tg: BoundedDegreeGraph) -> List[int]:
    order: List[int] = []
    seen: Set[int] = set()
    for start in sorted(range(tg.n), key=lambda v: (-tg.degree(v), v)):
        if start in seen:
            continue
        seen.add(start)
        q = deque([start])
        while q:
            x = q.popleft()
            order.append(x)
            for w in sorted(tg.neighbors(x), key=lambda v: (-tg.degree(v), v)):
                if w not in seen:
                    seen.add(w)
                    q.append(w)
    return order


def _connected_sets(
    host: BoundedDegreeGraph, root: int, allowed: Set[int], banned: Set[int], max_size: int
) -> Iterator[FrozenSet[int]]:
    """Connected subsets of ``allowed`` containing ``root`` and avoiding ``banned``, each once."""

    def expand(current: FrozenSet[int], frontier: List[int], excluded: FrozenSet[int]) -> Iterator[FrozenSet[int]]:
        yield current
        if len(current) >= max_size:
            return
        for i, w in enumerate(frontier):
            new_excl = excluded | frozenset(frontier[:i])
            rest = frontier[i + 1:]
            rest_set = set(rest)
            grown = list(rest)
            for x in host.neighbors(w):
                if x in allowed and x not in current and x != w and x not in new_excl and x not in rest_set and x not in banned:
                    grown.append(x)
                    rest_set.add(x)
            yield from expand(current | {w}, grown, new_excl)

    start = [x for x in host.neighbors(root) if x in allowed and x not in banned and x != root]
    yield from expand(frozenset([root]), start, frozenset())


def find_minor_bruteforce(
    host: BoundedDegreeGraph, template: MinorTemplate, max_host_vertices: int = DEFAULT_MAX_HOST
) -> Optional[MinorEmbedding]:
    """A verified embedding of ``template`` in ``host``, or ``None`` if it is not a minor.

    Raises :class:`SearchTooLarge` when ``host`` has more than
    ``max_host_vertices`` vertices instead of running unbounded.
    """
    if host.n > max_host_vertices:
        raise SearchTooLarge(f"host has {host.n} vertices > guard {max_host_vertices}")
    tg = template.graph
    if tg.n == 0:
        return MinorEmbedding({}, {}, template.name)
    if tg.n > host.n or tg.m > host.m:
        return None
    order = _template_order(tg)
    position = {t: i for i, t in enumerate(order)}
    sets: Dict[int, FrozenSet[int]] = {}
    unused: Set[int] = set(range(host.n))

    def place(i: int) -> bool:
        if i == len(order):
            return True
        t = order[i]
        earlier = [s for s in tg.neighbors(t) if position[s] < i]
        later = tg.degree(t) - len(earlier)
        remaining = len(order) - i - 1
        max_size = len(unused) - remaining
        if max_size < 1:
            return False
        if earlier:
            first = sets[earlier[0]]
            anchors = sorted({w for v in first for w in host.neighbors(v) if w in unused})
        else:
            anchors = sorted(unused)
        banned: Set[int] = set()
        for a in anchors:
            for b in _connected_sets(host, a, unused, banned, max_size):
                if not all(_adjacent(host, b, sets[s]) for s in earlier):
                    continue
                if later:
                    free_nbrs = {w for v in b for w in host.neighbors(v) if w in unused and w not in b}
                    if len(free_nbrs) < later:
                        continue
                sets[t] = b
                unused.difference_update(b)
                if place(i + 1):
                    return True
                unused.update(b)
                del sets[t]
            # later candidates must avoid earlier anchors so each set is tried once
            banned.add(a)
        return False

    if not place(0):
        return None
    emb = embedding_from_branch_sets(host, template, sets)
    assert emb is not None and verify_embedding(host, template, emb), "branch-set search produced an invalid model"
    return emb


def _adjacent(host: BoundedDegreeGraph, a: FrozenSet[int], b: FrozenSet[int]) -> bool:
    small, big = (a, b) if len(a) <= len(b) else (b, a)
    return any(w in big for v in small for w in host.neighbors(v))


def _has_subgraph(qadj: List[Set[int]], tg: BoundedDegreeGraph) -> bool:
    """Injective edge-preserving map of ``tg`` into the graph ``qadj``."""
    order = _template_order(tg)
    mapping: Dict[int, int] = {}
    used: Set[int] = set()

    def ext(i: int) -> bool:
        if i == len(order):
            return True
        t = order[i]
        need = [mapping[s] for s in tg.neighbors(t) if s in mapping]
        if need:
            cands = set(qadj[need[0]])
            for x in need[1:]:
                cands &= qadj[x]
        else:
            cands = set(range(len(qadj)))
        for c in sorted(cands):
            if c in used or len(qadj[c]) < tg.degree(t):
                continue
            mapping[t] = c
            used.add(c)
            if ext(i + 1):
                return True
            used.discard(c)
            del mapping[t]
        return False

    return ext(0)


def has_minor_by_contraction(host: BoundedDegreeGraph, template: MinorTemplate) -> bool:
    """Search every partition reachable by edge contractions for a quotient containing the template."""
    tg = template.graph
    if tg.n > host.n or tg.m > host.m:
        return False
    start = tuple(frozenset([v]) for v in range(host.n))
    seen = {frozenset(start)}
    stack = [start]
    while stack:
        parts = stack.pop()
        owner = {}
        for i, p in enumerate(parts):
            for v in p:
                owner[v] = i
        qadj: List[Set[int]] = [set() for _ in parts]
        for u, v in host.edges():
            a, b = owner[u], owner[v]
            if a != b:
                qadj[a].add(b)
                qadj[b].add(a)
        if sum(len(x) for x in qadj) // 2 >= tg.m and _has_subgraph(qadj, tg):
            return True
        if len(parts) - 1 < tg.n:
            continue
        for a in range(len(parts)):
            for b in qadj[a]:
                if b <= a:
                    continue
                merged = parts[a] | parts[b]
                nxt = tuple(p for i, p in enumerate(parts) if i not in (a, b)) + (merged,)
                key = frozenset(nxt)
                if key not in seen:
                    seen.add(key)
                    stack.append(nxt)
    return False

"""Named forbidden-minor templates."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..graph import BoundedDegreeGraph, GraphError


@dataclass(frozen=True)
class MinorTemplate:
    graph: BoundedDegreeGraph
    name: str
    labels: Tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return self.graph.n

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels else str(v)

    def edges(self) -> List[Tuple[int, int]]:
        return list(self.graph.edges())


def _template(name: str, labels: List[str], edges: List[Tuple[str, str]]) -> MinorTemplate:
    index = {lab: i for i, lab in enumerate(labels)}
    g = BoundedDegreeGraph.from_edges(len(labels), [(index[a], index[b]) for a, b in edges])
    return MinorTemplate(g, name, tuple(labels))


def make_grid(k: int) -> MinorTemplate:
    """The (k x 2)-grid: rails x1..xk and y1..yk joined by rungs {xi, yi}."""
    if k < 1:
        raise GraphError("grid needs k >= 1")
    xs = [f"x{i}" for i in range(1, k + 1)]
    ys = [f"y{i}" for i in range(1, k + 1)]
    edges = [(xs[i], xs[i + 1]) for i in range(k - 1)]
    edges += [(ys[i], ys[i + 1]) for i in range(k - 1)]
    edges += [(xs[i], ys[i]) for i in range(k)]
    return _template(f"grid_{k}", xs + ys, edges)


def make_circus(k: int) -> MinorTemplate:
    """The k-circus: apex x over y1..yk, spokes {yi, zi}, path z1..zk."""
    if k < 1:
        raise GraphError("circus needs k >= 1")
    ys = [f"y{i}" for i in range(1, k + 1)]
    zs = [f"z{i}" for i in range(1, k + 1)]
    edges = [("x", y) for y in ys]
    edges += list(zip(ys, zs))
    edges += [(zs[i], zs[i + 1]) for i in range(k - 1)]
    return _template(f"circus_{k}", ["x"] + ys + zs, edges)


def make_k2k(k: int) -> MinorTemplate:
    """Complete bipartite K_{2,k}; side vertices are ``a`` and ``b``."""
    if k < 1:
        raise GraphError("K_{2,k} needs k >= 1")
    mids = [f"m{i}" for i in range(1, k + 1)]
    edges = [(s, m) for s in ("a", "b") for m in mids]
    return _template(f"K2_{k}", ["a", "b"] + mids, edges)


def make_complete(k: int) -> MinorTemplate:
    if k < 1:
        raise GraphError("K_k needs k >= 1")
    labels = [f"v{i}" for i in range(1, k + 1)]
    return _template(f"K{k}", labels, list(itertools.combinations(labels, 2)))


def make_diamond() -> MinorTemplate:
    """K4 minus one edge; the hinge vertices are ``a`` and ``b``."""
    return _template("diamond", ["a", "b", "c", "d"], [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])


def make_cycle(k: int) -> MinorTemplate:
    if k < 3:
        raise GraphError("cycle needs k >= 3")
    labels = [f"c{i}" for i in range(1, k + 1)]
    return _template(f"C{k}", labels, [(labels[i], labels[(i + 1) % k]) for i in range(k)])


def make_path(k: int) -> MinorTemplate:
    """Path on ``k`` vertices."""
    if k < 1:
        raise GraphError("path needs k >= 1")
    labels = [f"p{i}" for i in range(1, k + 1)]
    return _template(f"P{k}", labels, [(labels[i], labels[i + 1]) for i in range(k - 1)])


def make_star(k: int) -> MinorTemplate:
    """K_{1,k}."""
    labels = ["c"] + [f"l{i}" for i in range(1, k + 1)]
    return _template(f"K1_{k}", labels, [("c", lab) for lab in labels[1:]])


def template_from_name(name: str) -> MinorTemplate:
    """Parse ``K4``, ``K3``, ``diamond``, ``K2_3``, ``grid_2``, ``circus_3``, ``C5``, ``P3``, ``K1_3``."""
    key = name.strip()
    low = key.lower()
    if low == "diamond":
        return make_diamond()
    for prefix, fn in (("k2_", make_k2k), ("grid_", make_grid), ("circus_", make_circus), ("k1_", make_star)):
        if low.startswith(prefix):
            return fn(_int(key[len(prefix):], key))
    if low.startswith("k"):
        return make_complete(_int(key[1:], key))
    if low.startswith("c"):
        return make_cycle(_int(key[1:], key))
    if low.startswith("p"):
        return make_path(_int(key[1:], key))
    raise GraphError(f"unknown template {name!r}")


def _int(s: str, whole: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise GraphError(f"unknown template {whole!r}") from None


def canonical_form(graph: BoundedDegreeGraph) -> Tuple[int, Tuple[Tuple[int, int], ...]]:
    """Lexicographically least relabelled edge list over all vertex permutations.

    Exhaustive, so only for template-sized graphs (up to ~8 vertices).
    """
    n = graph.n
    edges = list(graph.edges())
    best: Optional[Tuple[Tuple[int, int], ...]] = None
    for perm in itertools.permutations(range(n)):
        relabel = sorted(tuple(sorted((perm[u], perm[v]))) for u, v in edges)
        cand = tuple(relabel)
        if best is None or cand < best:
            best = cand
    return n, best if best is not None else ()


def is_isomorphic(g: BoundedDegreeGraph, h: BoundedDegreeGraph) -> bool:
    if g.n != h.n or g.m != h.m:
        return False
    if sorted(g.degree(v) for v in range(g.n)) != sorted(h.degree(v) for v in range(h.n)):
        return False
    return find_isomorphism(g, h) is not None


def find_isomorphism(g: BoundedDegreeGraph, h: BoundedDegreeGraph) -> Optional[Dict[int, int]]:
    """A map ``V(h) -> V(g)`` that is an isomorphism, by backtracking."""
    if g.n != h.n or g.m != h.m:
        return None
    order = sorted(range(h.n), key=lambda v: -h.degree(v))
    mapping: Dict[int, int] = {}
    used = set()

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        hv = order[i]
        for gv in range(g.n):
            if gv in used or g.degree(gv) != h.degree(hv):
                continue
            ok = True
            for hw in h.neighbors(hv):
                if hw in mapping and not g.has_edge(gv, mapping[hw]):
                    ok = False
                    break
            if ok:
                for hw, gw in mapping.items():
                    if not h.has_edge(hv, hw) and g.has_edge(gv, gw):
                        ok = False
                        break
            if not ok:
                continue
            mapping[hv] = gv
            used.add(gv)
            if extend(i + 1):
                return True
            del mapping[hv]
            used.discard(gv)
        return False

    return dict(mapping) if extend(0) else None

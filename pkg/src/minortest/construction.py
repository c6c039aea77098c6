"""Turning a large cut between two connected sets into an explicit minor.

The pipeline has three reusable pieces: a path minor and a star minor of a
tree whose parts all meet a set of relevant vertices, a monotone
subsequence (Erdős–Szekeres), and a bipartite matching between ordered
parts.  The grid, circus and K_{2,k} constructions glue them together.

All constructions are opportunistic: they run on any input and either return
an embedding that passes :func:`verify_embedding` or ``None``.  ``None`` does
not mean the minor is absent.
"""

from __future__ import annotations

import heapq
import math
from bisect import bisect_right
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx

from .graph import BoundedDegreeGraph, Edge, GraphError, edge_key, eccentricity_in, diameter_in, is_connected_set
from .minors.embedding import MinorEmbedding, embedding_from_branch_sets, verify_embedding
from .minors.templates import MinorTemplate, make_circus, make_grid, make_k2k


@dataclass(frozen=True)
class RelevantTree:
    """A rooted tree on ``vertices`` with a set of relevant vertices Q."""

    vertices: Tuple[int, ...]
    edges: Tuple[Edge, ...]
    root: int
    relevant: FrozenSet[int]
    adjacency: Mapping[int, Tuple[int, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vs = tuple(sorted(set(self.vertices)))
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "relevant", frozenset(self.relevant))
        adj: Dict[int, List[int]] = {v: [] for v in vs}
        for u, w in self.edges:
            if u not in adj or w not in adj or u == w:
                raise GraphError(f"tree edge ({u}, {w}) leaves the vertex set")
            adj[u].append(w)
            adj[w].append(u)
        object.__setattr__(self, "adjacency", {v: tuple(sorted(ws)) for v, ws in adj.items()})
        if self.root not in adj:
            raise GraphError(f"root {self.root} is not a tree vertex")
        if len(self.edges) != len(vs) - 1 or not is_connected_set(lambda v: self.adjacency[v], vs):
            raise GraphError("not a spanning tree: must be connected with |V| - 1 edges")
        if not self.relevant <= set(vs):
            raise GraphError("relevant vertices must lie in the tree")

    @classmethod
    def bfs_tree(
        cls, host: BoundedDegreeGraph, vertices: Iterable[int], relevant: Iterable[int], root: Optional[int] = None
    ) -> "RelevantTree":
        """Canonical BFS tree of ``host[vertices]`` rooted at ``root`` (default: the smallest id)."""
        vs = set(vertices)
        if not vs:
            raise GraphError("empty vertex set")
        r = min(vs) if root is None else root
        if r not in vs:
            raise GraphError(f"root {r} not in vertex set")
        seen = {r}
        edges = []
        q = deque([r])
        while q:
            x = q.popleft()
            for w in host.neighbors(x):
                if w in vs and w not in seen:
                    seen.add(w)
                    edges.append((x, w))
                    q.append(w)
        if len(seen) != len(vs):
            raise GraphError("vertex set does not induce a connected subgraph")
        return cls(tuple(vs), tuple(edges), r, frozenset(relevant))

    def depths(self) -> Dict[int, int]:
        depth = {self.root: 0}
        q = deque([self.root])
        while q:
            x = q.popleft()
            for w in self.adjacency[x]:
                if w not in depth:
                    depth[w] = depth[x] + 1
                    q.append(w)
        return depth

    def height(self) -> int:
        return max(self.depths().values())

    def max_degree(self) -> int:
        return max(len(ws) for ws in self.adjacency.values())


@dataclass(frozen=True)
class PathMinorResult:
    """Parts P1..Pr in path order; ``representatives[i]`` is a relevant vertex of ``parts[i]``."""

    parts: Tuple[FrozenSet[int], ...]
    representatives: Tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.parts)

    def part_index(self) -> Dict[int, int]:
        return {v: i for i, p in enumerate(self.parts) for v in p}


@dataclass(frozen=True)
class StarMinorResult:
    center: FrozenSet[int]
    leaves: Tuple[FrozenSet[int], ...]
    leaf_representatives: Tuple[int, ...]


def path_minor_with_relevant(tree: RelevantTree) -> PathMinorResult:
    """Path minor of ``tree`` in which every part meets the relevant set.

    Non-relevant parts of degree at most 2 are merged into a neighbour until
    none is left; then the longest path of the contracted tree is taken and
    every off-path subtree is absorbed into the path part it hangs from.  The
    path has at least log_Δ |Q| parts.
    """
    if not tree.relevant:
        raise GraphError("path minor needs at least one relevant vertex")
    rel = {v: v in tree.relevant for v in tree.vertices}
    members: Dict[int, Set[int]] = {v: {v} for v in tree.vertices}
    padj: Dict[int, Set[int]] = {v: set(ws) for v, ws in tree.adjacency.items()}
    key = {v: v for v in tree.vertices}

    heap = [(v, v) for v in tree.vertices if not rel[v] and len(padj[v]) <= 2]
    heapq.heapify(heap)
    while heap:
        _, p = heapq.heappop(heap)
        if p not in members or rel[p] or len(padj[p]) > 2 or not padj[p]:
            continue
        target = min(padj[p], key=lambda q: key[q])
        members[target] |= members.pop(p)
        key[target] = min(key[target], key.pop(p))
        for q in padj.pop(p):
            if q != target:
                padj[q].discard(p)
                padj[q].add(target)
                padj[target].add(q)
        padj[target].discard(p)
        if not rel[target] and len(padj[target]) <= 2:
            heapq.heappush(heap, (key[target], target))

    def farthest(src: int) -> Tuple[int, Dict[int, Optional[int]]]:
        parent: Dict[int, Optional[int]] = {src: None}
        dist = {src: 0}
        q = deque([src])
        while q:
            x = q.popleft()
            for w in sorted(padj[x], key=lambda y: key[y]):
                if w not in dist:
                    dist[w] = dist[x] + 1
                    parent[w] = x
                    q.append(w)
        best = max(dist, key=lambda y: (dist[y], -key[y]))
        return best, parent

    start = min(members, key=lambda y: key[y])
    end1, _ = farthest(start)
    end2, parent = farthest(end1)
    path = [end2]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    if key[path[0]] > key[path[-1]]:
        path.reverse()

    # absorb every off-path part into the path part its subtree hangs from
    owner = {p: i for i, p in enumerate(path)}
    q = deque(path)
    while q:
        x = q.popleft()
        for w in padj[x]:
            if w not in owner:
                owner[w] = owner[x]
                q.append(w)
    acc: List[Set[int]] = [set() for _ in path]
    for p, i in owner.items():
        acc[i] |= members[p]
    parts = tuple(frozenset(a) for a in acc)
    reps = tuple(min(v for v in a if v in tree.relevant) for a in acc)
    return PathMinorResult(parts, reps)


def star_minor_with_relevant(tree: RelevantTree, h: int, merge_leaf_into_root: bool = True) -> StarMinorResult:
    """Star minor of a rooted tree of height at most ``h`` with leaves in Q.

    Leaves are the endpoints of the maximal root-to-Q paths; the rest of
    those paths is contracted into the centre.  A relevant root is dropped
    from Q.  With ``merge_leaf_into_root`` and a root outside Q, one leaf is
    folded into the centre so that the centre meets Q too (skipped when it is
    the only leaf).  At least ⌊|Q| / (2h)⌋ leaves are returned.
    """
    if not tree.relevant:
        raise GraphError("star minor needs at least one relevant vertex")
    depth = tree.depths()
    if max(depth.values()) > h:
        raise GraphError(f"tree height {max(depth.values())} exceeds h = {h}")
    targets = tree.relevant - {tree.root}
    parent: Dict[int, Optional[int]] = {tree.root: None}
    for v in sorted(depth, key=lambda x: depth[x]):
        for w in tree.adjacency[v]:
            if w not in parent:
                parent[w] = v
    # an endpoint is a relevant vertex with no relevant proper descendant
    has_rel_below: Set[int] = set()
    for v in targets:
        x = parent[v]
        while x is not None and x not in has_rel_below:
            has_rel_below.add(x)
            x = parent[x]
    ends = sorted(v for v in targets if v not in has_rel_below)
    kept: Set[int] = {tree.root}
    for v in ends:
        x = v
        while x is not None and x not in kept:
            kept.add(x)
            x = parent[x]
    center = kept - set(ends)
    if merge_leaf_into_root and tree.root not in tree.relevant and len(ends) >= 2:
        center.add(ends.pop(0))
    return StarMinorResult(frozenset(center), tuple(frozenset([v]) for v in ends), tuple(ends))


@dataclass(frozen=True)
class MonotoneRun:
    indices: Tuple[int, ...]
    values: Tuple[int, ...]
    direction: str  # "increasing" or "decreasing"

    def __len__(self) -> int:
        return len(self.indices)


def _longest_nondecreasing(seq: Sequence[int]) -> List[int]:
    tails: List[int] = []
    tail_idx: List[int] = []
    prev = [-1] * len(seq)
    for i, x in enumerate(seq):
        pos = bisect_right(tails, x)
        if pos == len(tails):
            tails.append(x)
            tail_idx.append(i)
        else:
            tails[pos] = x
            tail_idx[pos] = i
        prev[i] = tail_idx[pos - 1] if pos > 0 else -1
    out = []
    i = tail_idx[-1] if tail_idx else -1
    while i != -1:
        out.append(i)
        i = prev[i]
    return out[::-1]


def monotone_subsequence(seq: Sequence[int]) -> MonotoneRun:
    """Longest non-strictly monotone subsequence; its length is at least ⌈√len(seq)⌉."""
    if not seq:
        raise GraphError("monotone_subsequence needs a nonempty sequence")
    up = _longest_nondecreasing(seq)
    down = _longest_nondecreasing([-x for x in seq])
    idx, direction = (up, "increasing") if len(up) >= len(down) else (down, "decreasing")
    return MonotoneRun(tuple(idx), tuple(seq[i] for i in idx), direction)


def cross_matching(n_left: int, n_right: int, edges: Iterable[Tuple[int, int]]) -> List[Tuple[int, int]]:
    """Maximum matching between left parts ``0..n_left-1`` and right parts, sorted by left index."""
    g = nx.Graph()
    left = [("L", i) for i in range(n_left)]
    g.add_nodes_from(left)
    g.add_nodes_from(("R", j) for j in range(n_right))
    for i, j in sorted(set(edges)):
        if not (0 <= i < n_left and 0 <= j < n_right):
            raise GraphError(f"matching edge ({i}, {j}) out of range")
        g.add_edge(("L", i), ("R", j))
    mate = nx.bipartite.hopcroft_karp_matching(g, top_nodes=left)
    return sorted((i, mate[("L", i)][1]) for i in range(n_left) if ("L", i) in mate)


@dataclass(frozen=True)
class CutInstance:
    """Two disjoint connected vertex sets of ``graph`` with parameters k and h.

    ``root`` optionally fixes the vertex of V1 from which its spanning tree
    grows; then the height bound h is checked as the eccentricity of the root
    in G[V1] instead of the diameter.
    """

    graph: BoundedDegreeGraph
    v1: FrozenSet[int]
    v2: FrozenSet[int]
    k: int
    h: int = 0
    root: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "v1", frozenset(self.v1))
        object.__setattr__(self, "v2", frozenset(self.v2))
        if self.k < 1:
            raise GraphError("k must be at least 1")
        if not self.v1 or not self.v2:
            raise GraphError("both sides of a cut must be nonempty")
        if self.v1 & self.v2:
            raise GraphError("cut sides must be disjoint")
        for side in (self.v1, self.v2):
            for v in side:
                if not 0 <= v < self.graph.n:
                    raise GraphError(f"vertex {v} out of range")
            if not is_connected_set(self.graph, side):
                raise GraphError("each cut side must induce a connected subgraph")
        if self.root is not None and self.root not in self.v1:
            raise GraphError("root must lie in V1")

    def tree_root(self) -> int:
        return min(self.v1) if self.root is None else self.root

    def check_height(self) -> None:
        if self.root is not None:
            ecc = eccentricity_in(self.graph, self.v1, self.root)
            if ecc is None or ecc > self.h:
                raise GraphError(f"G[V1] has radius {ecc} from the root, above h = {self.h}")
        else:
            d = diameter_in(self.graph, self.v1)
            if d is None or d > self.h:
                raise GraphError(f"G[V1] has diameter {d} > h = {self.h}")

    def crossing(self) -> List[Edge]:
        """Cut edges as (V1 endpoint, V2 endpoint), in edge-rank order."""
        out = [(u, w) for u in self.v1 for w in self.graph.neighbors(u) if w in self.v2]
        return sorted(out, key=lambda e: edge_key(*e))


def _lowest_cross(graph: BoundedDegreeGraph, part: Iterable[int], other: FrozenSet[int]) -> Optional[Edge]:
    best = None
    for u in part:
        for w in graph.neighbors(u):
            if w in other and (best is None or edge_key(u, w) < edge_key(*best)):
                best = (u, w)
    return best


def _relevant(graph: BoundedDegreeGraph, side: FrozenSet[int], other: FrozenSet[int]) -> Set[int]:
    return {u for u in side if any(w in other for w in graph.neighbors(u))}


def _segments(n_parts: int, anchors: Sequence[int]) -> List[Tuple[int, int]]:
    """Split ``0..n_parts-1`` into consecutive runs, one per anchor (anchors in any monotone order)."""
    order = sorted(range(len(anchors)), key=lambda t: anchors[t])
    sorted_anchors = [anchors[t] for t in order]
    runs: List[Tuple[int, int]] = [(0, 0)] * len(anchors)
    for pos, t in enumerate(order):
        lo = 0 if pos == 0 else sorted_anchors[pos]
        hi = n_parts - 1 if pos == len(order) - 1 else sorted_anchors[pos + 1] - 1
        runs[t] = (lo, hi)
    return runs


def _union(parts: Sequence[FrozenSet[int]], lo: int, hi: int) -> FrozenSet[int]:
    out: Set[int] = set()
    for p in parts[lo:hi + 1]:
        out |= p
    return frozenset(out)


def _finish(graph: BoundedDegreeGraph, template: MinorTemplate, labelled: Mapping[str, Iterable[int]]) -> Optional[MinorEmbedding]:
    index = {lab: i for i, lab in enumerate(template.labels)}
    emb = embedding_from_branch_sets(graph, template, {index[lab]: vs for lab, vs in labelled.items()})
    if emb is None or not verify_embedding(graph, template, emb):
        return None
    return emb


def grid_minor_from_cut(inst: CutInstance) -> Optional[MinorEmbedding]:
    """(k x 2)-grid minor from the cut between V1 and V2, or ``None``."""
    g, k = inst.graph, inst.k
    q1 = _relevant(g, inst.v1, inst.v2)
    if not q1:
        return None
    path1 = path_minor_with_relevant(RelevantTree.bfs_tree(g, inst.v1, q1, inst.tree_root()))
    # keep only the lowest-rank cross edge of every part
    kept = [_lowest_cross(g, p, inst.v2) for p in path1.parts]
    q2 = {w for _, w in kept}
    path2 = path_minor_with_relevant(RelevantTree.bfs_tree(g, inst.v2, q2))
    where = path2.part_index()
    pairs = cross_matching(path1.length, path2.length, [(i, where[w]) for i, (_, w) in enumerate(kept)])
    if len(pairs) < k:
        return None
    run = monotone_subsequence([j for _, j in pairs])
    if len(run) < k:
        return None
    chosen = [pairs[t] for t in run.indices[:k]]
    xs = _segments(path1.length, [i for i, _ in chosen])
    ys = _segments(path2.length, [j for _, j in chosen])
    labelled: Dict[str, FrozenSet[int]] = {}
    for t in range(k):
        labelled[f"x{t + 1}"] = _union(path1.parts, *xs[t])
        labelled[f"y{t + 1}"] = _union(path2.parts, *ys[t])
    return _finish(g, make_grid(k), labelled)


def _star_on_v1(inst: CutInstance, merge: bool) -> Optional[Tuple[StarMinorResult, List[Edge]]]:
    g = inst.graph
    q1 = _relevant(g, inst.v1, inst.v2)
    if not q1:
        return None
    tree = RelevantTree.bfs_tree(g, inst.v1, q1, inst.tree_root())
    star = star_minor_with_relevant(tree, tree.height(), merge_leaf_into_root=merge)
    cross = [_lowest_cross(g, leaf, inst.v2) for leaf in star.leaves]
    return star, cross


def circus_minor_from_cut(inst: CutInstance) -> Optional[MinorEmbedding]:
    """k-circus minor: star in V1 for apex and spokes, path minor of V2 for the rim."""
    inst.check_height()
    g, k = inst.graph, inst.k
    found = _star_on_v1(inst, merge=False)
    if found is not None and len(found[0].leaves) >= k:
        star, cross = found
        path2 = path_minor_with_relevant(RelevantTree.bfs_tree(g, inst.v2, {w for _, w in cross}))
        where = path2.part_index()
        pairs = cross_matching(len(cross), path2.length, [(i, where[w]) for i, (_, w) in enumerate(cross)])
        if len(pairs) >= k:
            chosen = sorted(pairs, key=lambda p: p[1])[:k]
            zs = _segments(path2.length, [j for _, j in chosen])
            labelled = {"x": star.center}
            for t, (i, _) in enumerate(chosen):
                labelled[f"y{t + 1}"] = star.leaves[i]
                labelled[f"z{t + 1}"] = _union(path2.parts, *zs[t])
            emb = _finish(g, make_circus(k), labelled)
            if emb is not None:
                return emb
    if k == 1:
        return _path3_from_cut(inst, make_circus(1), ("x", "y1", "z1"))
    return None


def _path3_from_cut(inst: CutInstance, template: MinorTemplate, labels: Tuple[str, str, str]) -> Optional[MinorEmbedding]:
    """A path on three vertices across the cut, used for k = 1 when the star is degenerate."""
    g = inst.graph
    for u, w in inst.crossing():
        nxt = sorted(x for x in g.neighbors(w) if x in inst.v2)
        if nxt:
            return _finish(g, template, dict(zip(labels, (inst.v1, frozenset([w]), frozenset([nxt[0]])))))
        prev = sorted(x for x in g.neighbors(u) if x in inst.v1)
        if prev:
            return _finish(g, template, dict(zip(labels, (frozenset([prev[0]]), frozenset([u]), inst.v2))))
    return None


def k2k_minor_from_cut(inst: CutInstance) -> Optional[MinorEmbedding]:
    """K_{2,k} minor: star centre in V1 as one side, V2 contracted as the other.

    If the star in V1 has fewer than k leaves the roles are swapped: V1 is
    contracted and the star is grown in V2 (this covers a single-vertex V1).
    Above 2Δkh crossing edges the first attempt always succeeds.
    """
    inst.check_height()
    g, k = inst.graph, inst.k
    template = make_k2k(k)
    found = _star_on_v1(inst, merge=False)
    if found is not None and len(found[0].leaves) >= k:
        star, _ = found
        labelled = {"a": star.center, "b": inst.v2}
        for t in range(k):
            labelled[f"m{t + 1}"] = star.leaves[t]
        emb = _finish(g, template, labelled)
        if emb is not None:
            return emb
    q2 = _relevant(g, inst.v2, inst.v1)
    spare = sorted(set(inst.v2) - q2)
    tree2 = RelevantTree.bfs_tree(g, inst.v2, q2, spare[0] if spare else None)
    star2 = star_minor_with_relevant(tree2, tree2.height(), merge_leaf_into_root=False)
    if len(star2.leaves) >= k:
        labelled = {"a": inst.v1, "b": star2.center}
        for t in range(k):
            labelled[f"m{t + 1}"] = star2.leaves[t]
        return _finish(g, template, labelled)
    return None


def log_bound(q: int, delta: int) -> float:
    """log_Δ q with Δ clamped to at least 2 (the path-minor length guarantee)."""
    return math.log(q) / math.log(max(2, delta)) if q > 0 else 0.0


__all__ = [
    "CutInstance",
    "MonotoneRun",
    "PathMinorResult",
    "RelevantTree",
    "StarMinorResult",
    "circus_minor_from_cut",
    "cross_matching",
    "grid_minor_from_cut",
    "k2k_minor_from_cut",
    "log_bound",
    "monotone_subsequence",
    "path_minor_with_relevant",
    "star_minor_with_relevant",
]

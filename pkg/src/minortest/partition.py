"""Local partition of a bounded-degree graph into small connected clusters.

Centers are sampled; every vertex within ℓ hops of a center joins the
Voronoi cell of its closest center (smallest id on ties).  Cells larger than
t are cut into BFS subtrees ("core clusters").  Vertices with no center
within ℓ hops are *remote* and are grouped by exponential-clock leader
election.  Everything is answered locally through a :class:`LocalView`, so
the number of oracle queries reflects only what a local algorithm reads.
"""

from __future__ import annotations

import hashlib
import logging
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .graph import BoundedDegreeGraph, GraphError, LocalView, QueryOracle, edge_key

log = logging.getLogger(__name__)

WHOLE_CELL = "CoreWholeCell"
SINGLETON = "CoreSingleton"
SUBTREE = "CoreSubtree"
REMOTE_KIND = "Remote"


class LocalAccessFailure(RuntimeError):
    """A bounded exploration hit its cap before the answer was determined."""


class _Remote:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "REMOTE"

    def __reduce__(self):
        return (_Remote, ())


REMOTE = _Remote()


@dataclass
class PartitionConfig:
    """Constants of the partition.  ``ell``, ``centers`` and ``marked`` override sampling (fixtures)."""

    gamma: float = 0.5
    alpha: float = 1.0
    const_b: float = 2.0
    const_c: float = 1.0
    center_count_coeff: float = 1.0
    y_coeff: float = 1.0
    mark_probability: Optional[float] = None
    seed: int = 0
    ell: Optional[int] = None
    centers: Optional[Sequence[int]] = None
    marked: Optional[Sequence[int]] = None

    def validate(self) -> None:
        if not 0 < self.gamma <= 1:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        for name in ("const_b", "const_c", "center_count_coeff", "y_coeff"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.const_b <= 1:
            raise ValueError("const_b must exceed 1 so that the clock failure probability is below 1")
        if self.mark_probability is not None and not 0 <= self.mark_probability <= 1:
            raise ValueError("mark_probability must lie in [0, 1]")
        if self.ell is not None and self.ell < 1:
            raise ValueError("ell must be at least 1")


def ell_interval(n: int, delta: int, gamma: float, b: float) -> Tuple[float, float]:
    lo = b * math.log(n) / math.log(1 + gamma)
    return lo, lo + delta / gamma


def sample_ell(rng: random.Random, n: int, delta: int, gamma: float, b: float) -> int:
    """Uniform integer point of the ℓ interval (nearest integer if the interval holds none), at least 1."""
    lo, hi = ell_interval(n, delta, gamma, b)
    a, z = math.ceil(lo), math.floor(hi)
    ell = rng.randint(a, z) if a <= z else int(round(lo))
    return max(1, ell)


def cluster_cap(n: int, delta: int, ell: int, alpha: float, c: float) -> float:
    """t = c n^{1/3} ln n · ℓΔ / α."""
    return c * n ** (1 / 3) * math.log(n) * ell * delta / alpha


def center_count(n: int, alpha: float, coeff: float) -> int:
    return math.ceil(coeff * alpha * n ** (2 / 3) / math.log(n))


def ball_cap(n: int, alpha: float, coeff: float) -> float:
    """y = y_coeff n^{1/3} ln² n / α."""
    return coeff * n ** (1 / 3) * math.log(n) ** 2 / alpha


@dataclass
class PartitionState:
    n: int
    delta: int
    ell: int
    t: float
    y: float
    beta: float
    failure_delta: float
    centers: FrozenSet[int]
    marked: FrozenSet[int]
    seed: int
    config: PartitionConfig = field(repr=False)
    degenerate: bool = False

    def clock(self, u: int) -> float:
        """Exponential(β) variate r_u, a pure function of (seed, u)."""
        digest = hashlib.blake2b(f"{self.seed}:{u}".encode(), digest_size=8).digest()
        uniform = int.from_bytes(digest, "big") / 2.0 ** 64
        return -math.log1p(-uniform) / self.beta

    @property
    def t_int(self) -> int:
        """Smallest integer ≥ t; ``size >= t`` iff ``size >= t_int``."""
        return math.ceil(self.t)


def init_partition(source, config: PartitionConfig) -> PartitionState:
    """Sample ℓ, the centers and their marks; deterministic in ``config.seed``.

    ``source`` is a :class:`QueryOracle` or a :class:`BoundedDegreeGraph`;
    only ``n`` and ``Δ`` are read, so no queries are spent.
    """
    config.validate()
    n, delta = source.n, source.delta
    if n < 2:
        raise GraphError("the partition needs n >= 2")
    rng = random.Random(config.seed)
    ell = config.ell if config.ell is not None else sample_ell(rng, n, delta, config.gamma, config.const_b)
    t = cluster_cap(n, delta, ell, config.alpha, config.const_c)
    y = ball_cap(n, config.alpha, config.y_coeff)
    degenerate = False
    if config.centers is not None:
        centers = frozenset(config.centers)
        if any(not 0 <= c < n for c in centers):
            raise GraphError("center id out of range")
    else:
        size = center_count(n, config.alpha, config.center_count_coeff)
        if size >= n:
            log.info("center count %d >= n = %d; every vertex becomes a center", size, n)
            size, degenerate = n, True
        centers = frozenset(rng.sample(range(n), max(1, size)))
    if t >= n:
        degenerate = True
    p = config.mark_probability if config.mark_probability is not None else n ** (-1 / 3)
    if config.marked is not None:
        marked = frozenset(config.marked) & centers
    else:
        marked = frozenset(c for c in sorted(centers) if rng.random() < p)
    failure_delta = n ** (-(config.const_b - 1))
    beta = math.log(n / failure_delta) / ell
    return PartitionState(n, delta, ell, t, y, beta, failure_delta, centers, marked, config.seed, config, degenerate)


@dataclass(frozen=True)
class CenterInfo:
    center: int
    distance: int


@dataclass(frozen=True)
class ClusterDescriptor:
    """A core cluster (whole cell, singleton or BFS subtree) or a remote cluster.

    ``root`` is the vertex the cluster hangs from: the center for a whole
    cell, the subtree root, the vertex itself for a singleton, the leader for
    a remote cluster.  Every member is within ``radius_bound`` hops of the
    root inside the cluster.
    """

    kind: str
    members: FrozenSet[int]
    root: int
    center: Optional[int] = None
    leader: Optional[int] = None
    radius_bound: int = 0

    @property
    def key(self) -> Tuple[str, int]:
        return ("R", self.root) if self.kind == REMOTE_KIND else ("C", self.root)

    @property
    def label(self) -> str:
        return f"{self.key[0]}{self.key[1]}"

    @property
    def is_remote(self) -> bool:
        return self.kind == REMOTE_KIND

    @property
    def is_singleton(self) -> bool:
        return len(self.members) == 1

    def __contains__(self, v: int) -> bool:
        return v in self.members


class LocalPartition:
    """Local-access answers about one sampled partition, memoized and consistent."""

    def __init__(self, source, state: PartitionState):
        if isinstance(source, LocalView):
            self.view = source
        elif isinstance(source, QueryOracle):
            self.view = LocalView(source)
        else:
            self.view = LocalView(QueryOracle(source))
        self.state = state
        self._center: Dict[int, object] = {}
        self._path: Dict[int, Tuple[int, ...]] = {}
        self._size: Dict[int, int] = {}
        self._cell: Dict[int, Optional[FrozenSet[int]]] = {}
        self._cluster: Dict[int, ClusterDescriptor] = {}
        self._leader: Dict[int, int] = {}
        self._remote_ball: Dict[int, FrozenSet[int]] = {}
        self._join: Dict[Tuple[str, int], Optional[ClusterDescriptor]] = {}

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self.view.neighbors(v)

    # centers and Voronoi cells

    def center_of(self, v: int):
        """``CenterInfo`` of ``v`` or ``REMOTE``; raises :class:`LocalAccessFailure` past y vertices."""
        got = self._center.get(v)
        if got is not None:
            return got
        st = self.state
        if v in st.centers:
            res = CenterInfo(v, 0)
        else:
            res = REMOTE
            seen = {v}
            level = [v]
            for d in range(1, st.ell + 1):
                nxt = []
                for x in level:
                    for w in self.view.neighbors(x):
                        if w not in seen:
                            seen.add(w)
                            nxt.append(w)
                    if len(seen) > st.y:
                        raise LocalAccessFailure(f"ball of {v} exceeded y = {st.y:.1f} vertices before a center was found")
                found = [w for w in nxt if w in st.centers]
                if found:
                    res = CenterInfo(min(found), d)
                    break
                if not nxt:
                    break
                level = nxt
        self._center[v] = res
        return res

    def is_remote(self, v: int) -> bool:
        return self.center_of(v) is REMOTE

    def path_to_center(self, v: int) -> Tuple[int, ...]:
        """Lexicographically smallest shortest path (center, ..., v).

        The BFS parent of ``v`` in its cell is the neighbour one level up
        whose own path is smallest, so paths are filled in bottom-up.
        """
        if v in self._path:
            return self._path[v]
        if self.center_of(v) is REMOTE:
            raise GraphError(f"vertex {v} is remote and has no center")
        stack = [v]
        while stack:
            x = stack[-1]
            if x in self._path:
                stack.pop()
                continue
            xi = self.center_of(x)
            if xi.distance == 0:
                self._path[x] = (x,)
                stack.pop()
                continue
            cands = self._eligible(x, xi)
            missing = [w for w in cands if w not in self._path]
            if missing:
                stack.extend(missing)
                continue
            best = min(cands, key=lambda w: self._path[w])
            self._path[x] = self._path[best] + (x,)
            stack.pop()
        return self._path[v]

    def _eligible(self, x: int, xi: CenterInfo) -> List[int]:
        out = []
        for w in self.view.neighbors(x):
            wi = self.center_of(w)
            if wi is not REMOTE and wi.center == xi.center and wi.distance == xi.distance - 1:
                out.append(w)
        if not out:
            raise GraphError(f"no parent for {x}: Voronoi structure inconsistent")
        return out

    def parent(self, v: int) -> Optional[int]:
        p = self.path_to_center(v)
        return p[-2] if len(p) > 1 else None

    def children(self, x: int) -> List[int]:
        xi = self.center_of(x)
        out = []
        for w in self.view.neighbors(x):
            wi = self.center_of(w)
            if wi is not REMOTE and wi.center == xi.center and wi.distance == xi.distance + 1 and self.parent(w) == x:
                out.append(w)
        return out

    def subtree_size(self, x: int) -> int:
        """|T(x)| in the BFS tree of the cell, capped at ⌈t⌉."""
        cap = self.state.t_int
        if x in self._size:
            return self._size[x]
        stack: List[list] = [[x, None, 1]]
        while stack:
            frame = stack[-1]
            if frame[1] is None:
                frame[1] = self.children(frame[0])
            if frame[2] >= cap or not frame[1]:
                val = min(frame[2], cap)
                self._size[frame[0]] = val
                stack.pop()
                if stack:
                    stack[-1][2] += val
                continue
            child = frame[1].pop()
            if child in self._size:
                frame[2] += self._size[child]
            else:
                stack.append([child, None, 1])
        return self._size[x]

    def subtree(self, x: int) -> FrozenSet[int]:
        out = {x}
        stack = [x]
        while stack:
            y = stack.pop()
            for w in self.children(y):
                out.add(w)
                stack.append(w)
        return frozenset(out)

    def small_cell(self, c: int) -> Optional[FrozenSet[int]]:
        """Vor(c) if it has at most t vertices, else ``None`` (exploration stops at ⌊t⌋+1)."""
        if c in self._cell:
            return self._cell[c]
        limit = math.floor(self.state.t) + 1
        seen = {c}
        q = deque([c])
        while q and len(seen) < limit:
            x = q.popleft()
            for w in self.view.neighbors(x):
                if w in seen:
                    continue
                wi = self.center_of(w)
                if wi is not REMOTE and wi.center == c:
                    seen.add(w)
                    q.append(w)
                    if len(seen) >= limit:
                        break
        res = frozenset(seen) if len(seen) < limit else None
        self._cell[c] = res
        return res

    def voronoi_cell(self, c: int) -> FrozenSet[int]:
        """The full cell of center ``c`` (unbounded exploration; used for certificates)."""
        seen = {c}
        q = deque([c])
        while q:
            x = q.popleft()
            for w in self.view.neighbors(x):
                if w not in seen:
                    wi = self.center_of(w)
                    if wi is not REMOTE and wi.center == c:
                        seen.add(w)
                        q.append(w)
        return frozenset(seen)

    # clusters

    def cluster_of(self, v: int) -> ClusterDescriptor:
        got = self._cluster.get(v)
        if got is not None:
            return got
        info = self.center_of(v)
        if info is REMOTE:
            desc = self.remote_cluster(v)
        else:
            desc = self._core_cluster(v, info)
        for x in desc.members:
            self._cluster.setdefault(x, desc)
        self._cluster[v] = desc
        return desc

    def _core_cluster(self, v: int, info: CenterInfo) -> ClusterDescriptor:
        c = info.center
        cell = self.small_cell(c)
        ell = self.state.ell
        if cell is not None:
            return ClusterDescriptor(WHOLE_CELL, cell, c, center=c, radius_bound=ell)
        cap = self.state.t_int
        if self.subtree_size(v) >= cap:
            return ClusterDescriptor(SINGLETON, frozenset([v]), v, center=c, radius_bound=0)
        u = v
        while True:
            p = self.parent(u)
            if p is None or self.subtree_size(p) >= cap:
                break
            u = p
        members = self.subtree(u)
        return ClusterDescriptor(SUBTREE, members, u, center=c, radius_bound=ell - self.center_of(u).distance)

    def is_marked(self, desc: ClusterDescriptor) -> bool:
        return (not desc.is_remote) and desc.center in self.state.marked

    def adjacent_centers(self, members: Iterable[int]) -> Set[int]:
        """c(∂A): centers of the non-remote neighbours of A outside A."""
        a = members if isinstance(members, (set, frozenset)) else set(members)
        out = set()
        for u in a:
            for w in self.view.neighbors(u):
                if w not in a:
                    wi = self.center_of(w)
                    if wi is not REMOTE:
                        out.add(wi.center)
        return out

    def join_target(self, desc: ClusterDescriptor) -> Optional[ClusterDescriptor]:
        """Marked cluster joined through the minimum-rank edge to any marked cluster, or ``None``."""
        if desc.is_remote:
            raise GraphError("remote clusters do not join")
        if self.is_marked(desc):
            raise GraphError("marked clusters do not join")
        if desc.key in self._join:
            return self._join[desc.key]
        best = None
        for u in desc.members:
            for w in self.view.neighbors(u):
                if w in desc.members:
                    continue
                wi = self.center_of(w)
                if wi is REMOTE or wi.center not in self.state.marked:
                    continue
                e = edge_key(u, w)
                if best is None or e < best[0]:
                    best = (e, w)
        res = None if best is None else self.cluster_of(best[1])
        self._join[desc.key] = res
        return res

    def cut_size(self, desc: ClusterDescriptor, predicate: Callable[[int], bool]) -> int:
        """|{(u, w) in E : u in A, w not in A, predicate(w)}|, scanning A's slots."""
        total = 0
        for u in desc.members:
            for w in self.view.neighbors(u):
                if w not in desc.members and predicate(w):
                    total += 1
        return total

    # remote clusters

    def remote_ball(self, v: int) -> FrozenSet[int]:
        """Γ_ℓ(v, G[R])."""
        got = self._remote_ball.get(v)
        if got is not None:
            return got
        if not self.is_remote(v):
            raise GraphError(f"vertex {v} is not remote")
        dist = self._remote_bfs(v)
        res = frozenset(dist)
        self._remote_ball[v] = res
        return res

    def _remote_bfs(self, v: int) -> Dict[int, int]:
        dist = {v: 0}
        q = deque([v])
        while q:
            x = q.popleft()
            if dist[x] == self.state.ell:
                continue
            for w in self.view.neighbors(x):
                if w not in dist and self.is_remote(w):
                    dist[w] = dist[x] + 1
                    q.append(w)
        return dist

    def remote_leader(self, v: int) -> int:
        got = self._leader.get(v)
        if got is not None:
            return got
        if not self.is_remote(v):
            raise GraphError(f"vertex {v} is not remote")
        dist = self._remote_bfs(v)
        self._remote_ball.setdefault(v, frozenset(dist))
        best = max(dist, key=lambda u: (self.state.clock(u) - dist[u], -u))
        self._leader[v] = best
        return best

    def remote_cluster_superset(self, v: int) -> FrozenSet[int]:
        return self.remote_ball(self.remote_leader(v))

    def remote_cluster(self, v: int) -> ClusterDescriptor:
        """Exact remote cluster of ``v``: members of the leader's ball that elect the same leader."""
        lead = self.remote_leader(v)
        members = frozenset(u for u in self.remote_cluster_superset(v) if self.remote_leader(u) == lead)
        return ClusterDescriptor(REMOTE_KIND, members, lead, leader=lead, radius_bound=self.state.ell)


@dataclass
class PartitionSnapshot:
    """Global enumeration of a partition, computed without local-access shortcuts."""

    state: PartitionState
    center: List[Optional[int]]
    distance: List[Optional[int]]
    parent: List[Optional[int]]
    subtree_size: List[int]
    clusters: List[ClusterDescriptor]
    cluster_index: List[int]

    @property
    def remote(self) -> List[int]:
        return [v for v, c in enumerate(self.center) if c is None]

    def cluster_of(self, v: int) -> ClusterDescriptor:
        return self.clusters[self.cluster_index[v]]

    def cell(self, c: int) -> List[int]:
        return [v for v, x in enumerate(self.center) if x == c]

    def core_clusters(self) -> List[ClusterDescriptor]:
        return [c for c in self.clusters if not c.is_remote]


def enumerate_partition(graph: BoundedDegreeGraph, state: PartitionState) -> PartitionSnapshot:
    """All clusters at once: multi-source BFS, per-cell BFS trees, subtree sizes."""
    n, ell = graph.n, state.ell
    dist: List[Optional[int]] = [None] * n
    center: List[Optional[int]] = [None] * n
    frontier = sorted(state.centers)
    for c in frontier:
        dist[c], center[c] = 0, c
    d = 0
    while frontier and d < ell:
        d += 1
        nxt: Dict[int, int] = {}
        for x in frontier:
            for w in graph.neighbors(x):
                if dist[w] is None:
                    nxt[w] = min(nxt.get(w, center[x]), center[x])
        for w, c in nxt.items():
            dist[w], center[w] = d, c
        frontier = list(nxt)

    parent: List[Optional[int]] = [None] * n
    size = [1] * n
    by_center: Dict[int, List[int]] = {}
    for c in sorted(state.centers):
        order = [c]
        seen = {c}
        q = deque([c])
        while q:
            x = q.popleft()
            for w in graph.neighbors(x):
                if w not in seen and center[w] == c:
                    seen.add(w)
                    parent[w] = x
                    order.append(w)
                    q.append(w)
        for x in reversed(order):
            if parent[x] is not None:
                size[parent[x]] += size[x]
        by_center[c] = order

    clusters: List[ClusterDescriptor] = []
    index = [-1] * n
    for c, order in by_center.items():
        if len(order) <= state.t:
            desc = ClusterDescriptor(WHOLE_CELL, frozenset(order), c, center=c, radius_bound=ell)
            for v in order:
                index[v] = len(clusters)
            clusters.append(desc)
            continue
        roots: Dict[int, List[int]] = {}
        for v in order:
            if size[v] >= state.t:
                index[v] = len(clusters)
                clusters.append(ClusterDescriptor(SINGLETON, frozenset([v]), v, center=c))
                continue
            u = v
            while parent[u] is not None and size[parent[u]] < state.t:
                u = parent[u]
            roots.setdefault(u, []).append(v)
        for u, vs in roots.items():
            for v in vs:
                index[v] = len(clusters)
            clusters.append(ClusterDescriptor(SUBTREE, frozenset(vs), u, center=c, radius_bound=ell - dist[u]))

    remote = [v for v in range(n) if center[v] is None]
    if remote:
        rset = set(remote)
        best: Dict[int, Tuple[float, int]] = {}
        for u in remote:
            r_u = state.clock(u)
            seen = {u: 0}
            q = deque([u])
            while q:
                x = q.popleft()
                score = (r_u - seen[x], -u)
                if x not in best or score > best[x]:
                    best[x] = score
                if seen[x] == ell:
                    continue
                for w in graph.neighbors(x):
                    if w in rset and w not in seen:
                        seen[w] = seen[x] + 1
                        q.append(w)
        groups: Dict[int, List[int]] = {}
        for v in remote:
            groups.setdefault(-best[v][1], []).append(v)
        for lead in sorted(groups):
            for v in groups[lead]:
                index[v] = len(clusters)
            clusters.append(ClusterDescriptor(REMOTE_KIND, frozenset(groups[lead]), lead, leader=lead, radius_bound=ell))
    return PartitionSnapshot(state, center, dist, parent, size, clusters, index)


def format_partition(snapshot: PartitionSnapshot) -> str:
    """One line per vertex: ``v kind leader/center cluster-id``."""
    lines = []
    for v in range(len(snapshot.center)):
        desc = snapshot.cluster_of(v)
        who = desc.leader if desc.is_remote else desc.center
        lines.append(f"{v} {desc.kind} {who} {desc.label}")
    return "\n".join(lines) + "\n"


def format_local_partition(part: LocalPartition, vertices: Iterable[int]) -> str:
    lines = []
    for v in vertices:
        desc = part.cluster_of(v)
        who = desc.leader if desc.is_remote else desc.center
        lines.append(f"{v} {desc.kind} {who} {desc.label}")
    return "\n".join(lines) + "\n"


__all__ = [
    "CenterInfo",
    "ClusterDescriptor",
    "LocalAccessFailure",
    "LocalPartition",
    "PartitionConfig",
    "PartitionSnapshot",
    "PartitionState",
    "REMOTE",
    "REMOTE_KIND",
    "SINGLETON",
    "SUBTREE",
    "WHOLE_CELL",
    "ball_cap",
    "center_count",
    "cluster_cap",
    "ell_interval",
    "enumerate_partition",
    "format_local_partition",
    "format_partition",
    "init_partition",
    "sample_ell",
]

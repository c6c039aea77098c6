"""Bounded-degree graphs, the query oracle, and canonical BFS primitives."""

from __future__ import annotations

from collections import deque
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple


class _Star:
    """Sentinel for an empty adjacency slot."""

    _instance: Optional["_Star"] = None

    def __new__(cls) -> "_Star":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "STAR"

    def __reduce__(self):
        return (_Star, ())


STAR = _Star()

Edge = Tuple[int, int]


class GraphError(ValueError):
    """Invalid graph construction or argument."""


class BudgetExhausted(RuntimeError):
    """The oracle refused a query beyond its budget."""


def edge_key(u: int, v: int) -> Edge:
    """Normalized edge; comparing keys with ``<`` is the edge-rank order."""
    return (u, v) if u < v else (v, u)


class BoundedDegreeGraph:
    """Simple undirected graph on vertices ``0..n-1`` with degree bound ``delta``.

    Adjacency lists are kept sorted ascending, so slot ``i`` of vertex ``v``
    is its ``i``-th smallest neighbor.
    """

    __slots__ = ("n", "delta", "_adj", "_m")

    def __init__(self, n: int, delta: int, adjacency: Sequence[Iterable[int]]):
        if n < 0:
            raise GraphError("n must be non-negative")
        if delta < 0:
            raise GraphError("delta must be non-negative")
        if len(adjacency) != n:
            raise GraphError(f"expected {n} adjacency lists, got {len(adjacency)}")
        adj = []
        for v, nbrs in enumerate(adjacency):
            row = tuple(sorted(nbrs))
            if len(row) > delta:
                raise GraphError(f"vertex {v} has degree {len(row)} > delta={delta}")
            for i, w in enumerate(row):
                if not 0 <= w < n:
                    raise GraphError(f"vertex {v} lists out-of-range neighbor {w}")
                if w == v:
                    raise GraphError(f"self-loop at {v}")
                if i and row[i - 1] == w:
                    raise GraphError(f"duplicate neighbor {w} at {v}")
            adj.append(row)
        m2 = 0
        for v, row in enumerate(adj):
            for w in row:
                if not _contains(adj[w], v):
                    raise GraphError(f"asymmetric adjacency: {v}->{w} without {w}->{v}")
            m2 += len(row)
        self.n = n
        self.delta = delta
        self._adj: Tuple[Tuple[int, ...], ...] = tuple(adj)
        self._m = m2 // 2

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge], delta: Optional[int] = None) -> "BoundedDegreeGraph":
        adj: List[Set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if v in adj[u]:
                raise GraphError(f"duplicate edge ({u}, {v})")
            adj[u].add(v)
            adj[v].add(u)
        if delta is None:
            delta = max((len(a) for a in adj), default=0)
        return cls(n, delta, adj)

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def slot(self, v: int, i: int):
        row = self._adj[v]
        return row[i] if i < len(row) else STAR

    @property
    def m(self) -> int:
        return self._m

    def edges(self) -> Iterator[Edge]:
        for u, row in enumerate(self._adj):
            for w in row:
                if u < w:
                    yield (u, w)

    def max_degree(self) -> int:
        return max((len(r) for r in self._adj), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return _contains(self._adj[u], v)

    def with_delta(self, delta: int) -> "BoundedDegreeGraph":
        return BoundedDegreeGraph(self.n, delta, self._adj)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BoundedDegreeGraph):
            return NotImplemented
        return self.n == other.n and self.delta == other.delta and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self.n, self.delta, self._adj))

    def __repr__(self) -> str:
        return f"BoundedDegreeGraph(n={self.n}, delta={self.delta}, m={self._m})"


def _contains(row: Tuple[int, ...], x: int) -> bool:
    lo, hi = 0, len(row)
    while lo < hi:
        mid = (lo + hi) // 2
        if row[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo < len(row) and row[lo] == x


class QueryOracle:
    """Counts every neighbor-slot lookup made against a graph.

    Queries are attributed to the currently active phase (see :meth:`phase`),
    which is how the tester produces its per-step breakdown.
    """

    def __init__(self, graph: BoundedDegreeGraph, budget: Optional[int] = None):
        self.graph = graph
        self.budget = budget
        self.count = 0
        self.by_phase: Dict[str, int] = {}
        self._phase = "other"

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def delta(self) -> int:
        return self.graph.delta

    def neighbor_query(self, v: int, i: int):
        g = self.graph
        if not 0 <= v < g.n:
            raise GraphError(f"vertex {v} out of range [0, {g.n})")
        if not 0 <= i < g.delta:
            raise GraphError(f"slot {i} out of range [0, {g.delta})")
        if self.budget is not None and self.count >= self.budget:
            raise BudgetExhausted(f"query budget of {self.budget} exhausted")
        self.count += 1
        self.by_phase[self._phase] = self.by_phase.get(self._phase, 0) + 1
        return g.slot(v, i)

    @contextmanager
    def phase(self, name: str):
        prev = self._phase
        self._phase = name
        try:
            yield
        finally:
            self._phase = prev


def neighbor_query(oracle: QueryOracle, v: int, i: int):
    return oracle.neighbor_query(v, i)


def read_neighbors(oracle: QueryOracle, v: int) -> Tuple[int, ...]:
    """All neighbors of ``v``, reading slots in order until the first STAR."""
    out = []
    for i in range(oracle.delta):
        w = oracle.neighbor_query(v, i)
        if w is STAR:
            break
        out.append(w)
    return tuple(out)


class LocalView:
    """Memoizing adjacency reader on top of an oracle.

    A local algorithm never needs to repeat a query whose answer it has seen,
    so each vertex's slots are read at most once.
    """

    def __init__(self, oracle: QueryOracle):
        self.oracle = oracle
        self.n = oracle.n
        self.delta = oracle.delta
        self._cache: Dict[int, Tuple[int, ...]] = {}

    def neighbors(self, v: int) -> Tuple[int, ...]:
        row = self._cache.get(v)
        if row is None:
            row = read_neighbors(self.oracle, v)
            self._cache[v] = row
        return row

    def known_vertices(self) -> int:
        return len(self._cache)


@dataclass(frozen=True)
class BFSEntry:
    vertex: int
    distance: int
    parent: Optional[int]


def _neighbors_fn(source):
    if isinstance(source, QueryOracle):
        return lambda v: read_neighbors(source, v)
    return source.neighbors


def canonical_bfs(source, v: int, depth: Optional[int] = None, vertex_cap: Optional[int] = None) -> List[BFSEntry]:
    """Breadth-first traversal exploring each vertex's neighbors in ascending order.

    ``source`` is a :class:`QueryOracle`, :class:`LocalView` or graph. The
    traversal stops after ``depth`` hops or once ``vertex_cap`` vertices are
    visited; a vertex's adjacency is read only when it is expanded.
    """
    nbrs = _neighbors_fn(source)
    out = [BFSEntry(v, 0, None)]
    if vertex_cap is not None and vertex_cap <= 1:
        return out[: max(vertex_cap, 0)]
    seen = {v}
    head = 0
    while head < len(out):
        e = out[head]
        head += 1
        if depth is not None and e.distance >= depth:
            continue
        for w in nbrs(e.vertex):
            if w in seen:
                continue
            seen.add(w)
            out.append(BFSEntry(w, e.distance + 1, e.vertex))
            if vertex_cap is not None and len(out) >= vertex_cap:
                return out
    return out


class ExceedsCap:
    """Returned by :func:`distance` when the true distance is larger than the cap."""

    _instance: Optional["ExceedsCap"] = None

    def __new__(cls) -> "ExceedsCap":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EXCEEDS_CAP"


EXCEEDS_CAP = ExceedsCap()


def distance(source, u: int, v: int, cap: int):
    """Exact hop distance if at most ``cap``, else :data:`EXCEEDS_CAP`.

    Grows the smaller of two frontiers (from ``u`` and from ``v``) each round.
    """
    if u == v:
        return 0
    nbrs = _neighbors_fn(source)
    dist_u = {u: 0}
    dist_v = {v: 0}
    front_u = [u]
    front_v = [v]
    ru = rv = 0
    while front_u and front_v and ru + rv < cap:
        if len(front_u) <= len(front_v):
            nxt = []
            for x in front_u:
                for w in nbrs(x):
                    if w not in dist_u:
                        dist_u[w] = ru + 1
                        nxt.append(w)
            ru += 1
            front_u = nxt
            grew_u = True
            hits = [dist_v[w] for w in nxt if w in dist_v]
        else:
            nxt = []
            for x in front_v:
                for w in nbrs(x):
                    if w not in dist_v:
                        dist_v[w] = rv + 1
                        nxt.append(w)
            rv += 1
            front_v = nxt
            grew_u = False
            hits = [dist_u[w] for w in nxt if w in dist_u]
        if hits:
            # the grown side's new frontier sits exactly at its radius
            return (ru if grew_u else rv) + min(hits)
    return EXCEEDS_CAP


def ball(source, v: int, r: int) -> Set[int]:
    """Vertices at distance at most ``r`` from ``v``."""
    if r < 0:
        raise GraphError("radius must be non-negative")
    return {e.vertex for e in canonical_bfs(source, v, depth=r)}


def induced_subgraph(graph: BoundedDegreeGraph, vertices: Iterable[int]) -> Tuple[BoundedDegreeGraph, List[int]]:
    """``G[S]`` relabelled to ``0..|S|-1`` in increasing original id.

    Returns the subgraph and ``mapping`` where ``mapping[i]`` is the original id
    of new vertex ``i``; relabelling is monotone so edge ranks keep their order.
    """
    mapping = sorted(set(vertices))
    index = {v: i for i, v in enumerate(mapping)}
    adj = []
    for v in mapping:
        adj.append([index[w] for w in graph.neighbors(v) if w in index])
    return BoundedDegreeGraph(len(mapping), graph.delta, adj), mapping


def adjacency_subgraph(nbrs: Mapping[int, Iterable[int]], vertices: Iterable[int], delta: Optional[int] = None) -> Tuple[BoundedDegreeGraph, List[int]]:
    """Like :func:`induced_subgraph` but reads adjacency from any neighbor source."""
    mapping = sorted(set(vertices))
    index = {v: i for i, v in enumerate(mapping)}
    adj = [[index[w] for w in nbrs[v] if w in index] for v in mapping]
    if delta is None:
        delta = max((len(a) for a in adj), default=0)
    return BoundedDegreeGraph(len(mapping), delta, adj), mapping


def components(graph: BoundedDegreeGraph, vertices: Optional[Iterable[int]] = None) -> List[List[int]]:
    """Connected components of ``G[vertices]`` (all of ``G`` by default)."""
    allowed = set(range(graph.n)) if vertices is None else set(vertices)
    seen: Set[int] = set()
    out = []
    for s in sorted(allowed):
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            x = stack.pop()
            for w in graph.neighbors(x):
                if w in allowed and w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        out.append(sorted(comp))
    return out


def is_connected_set(neighbors, vertices: Iterable[int]) -> bool:
    """Whether ``vertices`` induce a connected (nonempty) subgraph.

    ``neighbors`` is a callable ``v -> iterable`` or anything with ``.neighbors``.
    """
    nb = neighbors.neighbors if hasattr(neighbors, "neighbors") else neighbors
    vs = set(vertices)
    if not vs:
        return False
    start = next(iter(vs))
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for w in nb(x):
            if w in vs and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(vs)


def eccentricity_in(neighbors, vertices: Iterable[int], root: int) -> Optional[int]:
    """Eccentricity of ``root`` inside ``G[vertices]``; ``None`` if disconnected."""
    nb = neighbors.neighbors if hasattr(neighbors, "neighbors") else neighbors
    vs = set(vertices)
    dist = {root: 0}
    q = deque([root])
    while q:
        x = q.popleft()
        for w in nb(x):
            if w in vs and w not in dist:
                dist[w] = dist[x] + 1
                q.append(w)
    if len(dist) != len(vs):
        return None
    return max(dist.values())


def diameter_in(neighbors, vertices: Iterable[int]) -> Optional[int]:
    """Diameter of ``G[vertices]``; ``None`` if disconnected or empty."""
    vs = sorted(set(vertices))
    if not vs:
        return None
    best = 0
    for r in vs:
        e = eccentricity_in(neighbors, vs, r)
        if e is None:
            return None
        best = max(best, e)
    return best


def cut_edges(graph: BoundedDegreeGraph, a: Iterable[int], b: Iterable[int]) -> List[Edge]:
    """Edges with one endpoint in ``a`` and the other in ``b``, as (a-side, b-side)."""
    bs = set(b)
    return [(u, w) for u in sorted(set(a)) for w in graph.neighbors(u) if w in bs]


def load_graph(path) -> BoundedDegreeGraph:
    """Read the ``n delta`` header + ``u v`` edge-per-line text format."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


def parse_graph(text: str) -> BoundedDegreeGraph:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphError("empty graph file")
    try:
        n, delta = (int(x) for x in lines[0].split())
    except ValueError as exc:
        raise GraphError(f"bad header line {lines[0]!r}; expected 'n delta'") from exc
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphError(f"bad edge line {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
    g = BoundedDegreeGraph.from_edges(n, edges, delta=None)
    if g.max_degree() > delta:
        raise GraphError(f"max degree {g.max_degree()} exceeds declared delta={delta}")
    return g.with_delta(delta)


def format_graph(graph: BoundedDegreeGraph) -> str:
    lines = [f"{graph.n} {graph.delta}"]
    lines.extend(f"{u} {v}" for u, v in graph.edges())
    return "\n".join(lines) + "\n"


def save_graph(graph: BoundedDegreeGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(graph))


def to_dot(graph: BoundedDegreeGraph, colors: Optional[Mapping[int, str]] = None, name: str = "G") -> str:
    """Graphviz source; ``colors`` maps vertex -> fill color."""
    colors = colors or {}
    out = [f"graph {name} {{"]
    for v in range(graph.n):
        if v in colors:
            out.append(f'  {v} [style=filled, fillcolor="{colors[v]}"];')
        else:
            out.append(f"  {v};")
    for u, v in graph.edges():
        out.append(f"  {u} -- {v};")
    out.append("}")
    return "\n".join(out) + "\n"

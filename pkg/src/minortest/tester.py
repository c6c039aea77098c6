"""The one-sided minor-freeness tester.

Sample edges; for each, look at the clusters of its endpoints and reject if
a cluster contains a forbidden minor or if some cut that must be small in a
minor-free graph is larger than the separability bound f.  Every rejection
carries a verified embedding or a cut certificate that can be rechecked
without trusting the tester.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

from .construction import CutInstance, circus_minor_from_cut, grid_minor_from_cut, k2k_minor_from_cut
from .graph import STAR, BoundedDegreeGraph, BudgetExhausted, Edge, GraphError, QueryOracle, adjacency_subgraph, eccentricity_in, edge_key, is_connected_set
from .minors.embedding import MinorEmbedding, compose, format_embedding, verify_embedding
from .minors.family import ForbiddenFamily, SeparabilityProfile, contains_minor
from .minors.search import DEFAULT_MAX_HOST, SearchTooLarge
from .minors.templates import MinorTemplate
from .partition import (
    REMOTE,
    ClusterDescriptor,
    LocalAccessFailure,
    LocalPartition,
    PartitionConfig,
    init_partition,
    sample_ell,
)

ACCEPT, REJECT, INCONCLUSIVE = "accept", "reject", "inconclusive"
PHASES = ("sampling", "partition", "cuts", "minor", "witness")


@dataclass
class TesterConfig:
    """Tester constants.  γ = gamma_coeff·ε and α = alpha_coeff·ε/f, both capped at 1."""

    __test__ = False

    epsilon: float
    family: ForbiddenFamily
    sample_coeff: float = 1.0
    gamma_coeff: float = 1.0
    alpha_coeff: float = 1.0
    const_b: float = 2.0
    const_c: float = 1.0
    center_count_coeff: float = 1.0
    y_coeff: float = 1.0
    mark_probability: Optional[float] = None
    query_budget: Optional[int] = None
    max_bruteforce: int = DEFAULT_MAX_HOST
    ell: Optional[int] = None
    construct_witness: bool = True

    def validate(self) -> None:
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        for name in ("sample_coeff", "gamma_coeff", "alpha_coeff"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def preset(cls, name: str, epsilon: float, family, **overrides) -> "TesterConfig":
        """``asymptotic``: every Θ-constant is 1.  ``desk``: constants that behave at n ≤ 2^17.

        The desk preset lifts α to 1 (large ``alpha_coeff``) so that the
        center count is about n^{2/3}/ln n and Voronoi cells stay near
        n^{1/3} ln n, uses γ = 1 so ℓ is short, and samples a small fraction
        of the Θ(f/ε) edges (f is in the hundreds at these sizes).
        """
        fam = ForbiddenFamily.parse(family) if isinstance(family, str) else family
        if name not in PRESETS:
            raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        values = dict(PRESETS[name])
        values.update(overrides)
        return cls(epsilon=epsilon, family=fam, **values)


PRESETS: Dict[str, Dict[str, float]] = {
    "asymptotic": {},
    "desk": {
        "sample_coeff": 0.02,
        "gamma_coeff": 10.0,
        "alpha_coeff": 1e9,
        "center_count_coeff": 32.0,
        "y_coeff": 50.0,
    },
}


@dataclass(frozen=True)
class QueryReport:
    total: int
    by_phase: Dict[str, int]

    @property
    def partition(self) -> int:
        return self.by_phase.get("partition", 0)

    @property
    def checks(self) -> int:
        return sum(self.by_phase.get(p, 0) for p in ("cuts", "minor", "witness"))

    @property
    def sampling(self) -> int:
        return self.by_phase.get("sampling", 0)

    def to_dict(self) -> Dict[str, object]:
        return {"total": self.total, "by_phase": {p: self.by_phase.get(p, 0) for p in sorted(self.by_phase)}}


def query_report(oracle: QueryOracle) -> QueryReport:
    """Total neighbour queries and their split over the tester phases."""
    return QueryReport(oracle.count, dict(oracle.by_phase))


@dataclass(frozen=True)
class CutCertificate:
    """Two disjoint connected sets with more than f crossing edges.

    ``first`` lies within ``radius`` hops of ``root`` inside G[first]; a
    minor-free graph has at most f edges across such a cut.
    """

    first: FrozenSet[int]
    second: FrozenSet[int]
    root: int
    radius: int
    f: float
    crossing: Tuple[Edge, ...]
    step: str = ""

    def recheck(self, graph: BoundedDegreeGraph) -> Tuple[bool, str]:
        if self.first & self.second:
            return False, "sets overlap"
        if not self.first or not self.second:
            return False, "empty side"
        if not is_connected_set(graph, self.first) or not is_connected_set(graph, self.second):
            return False, "a side is not connected"
        if self.root not in self.first:
            return False, "root outside the first set"
        ecc = eccentricity_in(graph, self.first, self.root)
        if ecc is None or ecc > self.radius:
            return False, f"first set has radius {ecc} > {self.radius}"
        actual = sorted(edge_key(u, w) for u in self.first for w in graph.neighbors(u) if w in self.second)
        if sorted(edge_key(*e) for e in self.crossing) != actual:
            return False, "listed crossing edges differ from the graph"
        if not len(actual) > self.f:
            return False, f"{len(actual)} crossing edges do not exceed f = {self.f}"
        return True, ""

    def to_dict(self) -> Dict[str, object]:
        return {
            "first": sorted(self.first),
            "second": sorted(self.second),
            "root": self.root,
            "radius": self.radius,
            "f": self.f,
            "crossing": [list(e) for e in self.crossing],
            "step": self.step,
        }


@dataclass
class Verdict:
    outcome: str
    step: str = ""
    member: Optional[MinorTemplate] = None
    embedding: Optional[MinorEmbedding] = None
    certificate: Optional[CutCertificate] = None
    reason: str = ""
    queries: QueryReport = field(default_factory=lambda: QueryReport(0, {}))
    params: Dict[str, object] = field(default_factory=dict)

    @property
    def payload_kind(self) -> str:
        if self.embedding is not None:
            return "embedding"
        if self.certificate is not None:
            return "certificate"
        return "none"

    def witness_text(self) -> str:
        if self.embedding is not None and self.member is not None:
            return format_embedding(self.member, self.embedding)
        if self.certificate is not None:
            return json.dumps(self.certificate.to_dict(), sort_keys=True)
        return ""

    def witness_hash(self) -> str:
        text = self.witness_text()
        return hashlib.sha256(text.encode()).hexdigest()[:16] if text else ""

    def recheck(self, graph: BoundedDegreeGraph) -> Tuple[bool, str]:
        """Independent check of a rejection payload against the full graph."""
        if self.outcome != REJECT:
            return True, ""
        if self.embedding is not None:
            res = verify_embedding(graph, self.member, self.embedding)
            return bool(res), f"{res.condition}: {res.detail}" if not res else ""
        if self.certificate is not None:
            return self.certificate.recheck(graph)
        return False, "rejection without payload"

    def to_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "verdict": self.outcome,
            "step": self.step,
            "payload": self.payload_kind,
            "reason": self.reason,
            "queries": self.queries.to_dict(),
            "params": self.params,
        }
        if self.embedding is not None:
            out["member"] = self.member.name
            out["witness"] = {
                "branch_sets": {self.member.label(t): sorted(b) for t, b in sorted(self.embedding.branch_sets.items())},
                "edges": [
                    [self.member.label(a), self.member.label(b), list(w)]
                    for (a, b), w in sorted(self.embedding.edge_witnesses.items())
                ],
            }
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def sample_edge(oracle: QueryOracle, rng: random.Random) -> Optional[Edge]:
    """Uniform edge via random (vertex, slot) probes; ``None`` after 10·nΔ empty probes."""
    n, delta = oracle.n, oracle.delta
    if delta == 0:
        return None
    for _ in range(10 * n * delta):
        v = rng.randrange(n)
        w = oracle.neighbor_query(v, rng.randrange(delta))
        if w is not STAR:
            return (v, w)
    return None


class _Reject(Exception):
    def __init__(self, verdict: Verdict):
        self.verdict = verdict


class _Run:
    """State of one tester run: partition, memo tables, and the rejection logic."""

    def __init__(self, oracle: QueryOracle, config: TesterConfig, rng: random.Random):
        self.oracle = oracle
        self.config = config
        self.rng = rng
        n, delta = oracle.n, oracle.delta
        eps = config.epsilon
        self.gamma = min(1.0, config.gamma_coeff * eps)
        ell = config.ell if config.ell is not None else sample_ell(rng, n, max(delta, 1), self.gamma, config.const_b)
        profile = config.family.separability_profile(max(delta, 1), ell, n)
        if profile is None or not math.isfinite(profile.f(max(delta, 1), ell, n)):
            raise ValueError(f"family {config.family.name} has no finite separability bound at Δ={delta}, ℓ={ell}")
        self.profile: SeparabilityProfile = profile
        self.f = profile.f(max(delta, 1), ell, n)
        self.alpha = min(1.0, config.alpha_coeff * eps / self.f)
        pconf = PartitionConfig(
            gamma=self.gamma,
            alpha=self.alpha,
            const_b=config.const_b,
            const_c=config.const_c,
            center_count_coeff=config.center_count_coeff,
            y_coeff=config.y_coeff,
            mark_probability=config.mark_probability,
            seed=rng.getrandbits(63),
            ell=ell,
        )
        self.state = init_partition(oracle, pconf)
        self.part = LocalPartition(oracle, self.state)
        self.samples = math.ceil(config.sample_coeff * self.f / eps)
        self._minor_done: Dict[Tuple[str, int], bool] = {}
        self._cut_done: set = set()

    def params(self) -> Dict[str, object]:
        st = self.state
        return {
            "ell": st.ell,
            "f": self.f,
            "g": self.profile.g(st.ell, st.n),
            "profile": f"{self.profile.kind}_{self.profile.k}",
            "alpha": self.alpha,
            "gamma": self.gamma,
            "t": st.t,
            "y": st.y,
            "centers": len(st.centers),
            "samples": self.samples,
        }

    # helpers

    def _subgraph(self, vertices: Iterable[int]):
        vs = sorted(set(vertices))
        return adjacency_subgraph({v: self.part.neighbors(v) for v in vs}, vs)

    def _check_minor(self, key, vertices: FrozenSet[int], step: str) -> None:
        if key in self._minor_done:
            return
        self._minor_done[key] = True
        with self.oracle.phase("minor"):
            sub, mapping = self._subgraph(vertices)
            for member in self.config.family.members:
                emb = contains_minor(sub, member, self.config.max_bruteforce)
                if emb is not None:
                    raise _Reject(Verdict(REJECT, step, member, emb.relabel(mapping), reason=f"{member.name} minor inside a cluster"))

    def _reject_cut(self, first: ClusterDescriptor, second: FrozenSet[int], count: int, step: str) -> None:
        with self.oracle.phase("witness"):
            crossing = tuple(sorted(edge_key(u, w) for u in first.members for w in self.part.neighbors(u) if w in second))
            cert = CutCertificate(first.members, second, first.root, first.radius_bound, self.f, crossing, step)
            reason = f"{count} edges across the cut exceed f = {self.f:g}"
            if self.config.construct_witness:
                emb = self._construct(first, second)
                if emb is not None:
                    raise _Reject(Verdict(REJECT, step, self.profile.member, emb, certificate=None, reason=reason))
            raise _Reject(Verdict(REJECT, step, certificate=cert, reason=reason))

    def _construct(self, first: ClusterDescriptor, second: FrozenSet[int]) -> Optional[MinorEmbedding]:
        prof = self.profile
        sub, mapping = self._subgraph(first.members | second)
        index = {v: i for i, v in enumerate(mapping)}
        try:
            inst = CutInstance(
                sub,
                frozenset(index[v] for v in first.members),
                frozenset(index[v] for v in second),
                prof.k,
                max(first.radius_bound, 0),
                root=index[first.root],
            )
            build = {"k2k": k2k_minor_from_cut, "circus": circus_minor_from_cut, "grid": grid_minor_from_cut}[prof.kind]
            outer = build(inst)
        except GraphError:
            return None
        if outer is None:
            return None
        emb = compose(outer, prof.member_in_host, prof.member.name)
        # the subgraph is induced, so a model inside it is a model in G
        if not verify_embedding(sub, prof.member, emb):
            return None
        return emb.relabel(mapping)

    # the per-edge steps

    def handle(self, u: int, v: int) -> None:
        part = self.part
        with self.oracle.phase("partition"):
            cu, cv = self._cluster(u), self._cluster(v)
        # Step 2b
        if cu.key == cv.key:
            if cu.is_remote:
                with self.oracle.phase("partition"):
                    sup = part.remote_cluster_superset(u)
                self._check_minor(cu.key, sup, "2b")
            else:
                self._check_minor(cu.key, cu.members, "2b")
        # Step 2c
        for c in (cu, cv):
            if c.is_remote or c.is_singleton or ("2c", c.key) in self._cut_done:
                continue
            self._cut_done.add(("2c", c.key))
            with self.oracle.phase("cuts"):
                center = c.center
                count = part.cut_size(c, lambda x: _center(part, x) == center)
            if count > self.f:
                with self.oracle.phase("witness"):
                    rest = part.voronoi_cell(center) - c.members
                self._reject_cut(c, rest, count, "2c")
        # Step 2d
        if cu.is_remote or cv.is_remote or cu.is_singleton or cv.is_singleton:
            return
        if cu.key != cv.key and ("2d-i", cv.key, cu.key) not in self._cut_done:
            self._cut_done.add(("2d-i", cv.key, cu.key))
            self._cut_done.add(("2d-i", cu.key, cv.key))
            with self.oracle.phase("cuts"):
                count = part.cut_size(cu, lambda x: x in cv.members)
            if count > self.f:
                self._reject_cut(cu, cv.members, count, "2d-i")
        for x, y in ((cv, cu), (cu, cv)):
            if part.is_marked(x):
                continue
            with self.oracle.phase("partition"):
                target = part.join_target(x)
            if target is None or target.key == y.key or ("2d-ii", target.key, y.key) in self._cut_done:
                continue
            self._cut_done.add(("2d-ii", target.key, y.key))
            with self.oracle.phase("cuts"):
                centers = self._boundary_centers(target, y)
                tm, ym = target.members, y.members

                def in_a_or_c(w: int) -> bool:
                    if w in ym:
                        return False
                    return w in tm or _center(part, w) in centers

                count = part.cut_size(y, in_a_or_c)
            if count > self.f:
                with self.oracle.phase("witness"):
                    side = set(tm)
                    for c in centers:
                        side |= part.voronoi_cell(c)
                    side -= ym
                self._reject_cut(y, frozenset(side), count, "2d-ii")

    def _boundary_centers(self, c: ClusterDescriptor, exclude: ClusterDescriptor) -> set:
        """Centers of ∂C \\ C_u (non-remote neighbours of C outside C and C_u)."""
        out = set()
        for a in c.members:
            for w in self.part.neighbors(a):
                if w in c.members or w in exclude.members:
                    continue
                info = self.part.center_of(w)
                if info is not REMOTE:
                    out.add(info.center)
        return out

    def _cluster(self, v: int) -> ClusterDescriptor:
        part = self.part
        if part.is_remote(v):
            lead = part.remote_leader(v)
            return ClusterDescriptor("Remote", frozenset(), lead, leader=lead, radius_bound=self.state.ell)
        return part.cluster_of(v)


def _center(part: LocalPartition, x: int) -> Optional[int]:
    info = part.center_of(x)
    return None if info is REMOTE else info.center


def test_minor_freeness(oracle: QueryOracle, config: TesterConfig, rng) -> Verdict:
    """Run the tester once.  ``rng`` is a :class:`random.Random` or an int seed."""
    config.validate()
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    if config.query_budget is not None and oracle.budget is None:
        oracle.budget = config.query_budget
    if oracle.n < 2 or oracle.delta == 0:
        return Verdict(ACCEPT, reason="no edges", queries=query_report(oracle))
    try:
        run = _Run(oracle, config, rng)
    except ValueError as exc:
        return Verdict(INCONCLUSIVE, reason=str(exc), queries=query_report(oracle))
    inconclusive = ""
    try:
        for _ in range(run.samples):
            with oracle.phase("sampling"):
                e = sample_edge(oracle, rng)
            if e is None:
                return Verdict(ACCEPT, reason="no edge found after 10·nΔ probes", queries=query_report(oracle), params=run.params())
            try:
                run.handle(*e)
            except (LocalAccessFailure, SearchTooLarge) as exc:
                inconclusive = inconclusive or f"{type(exc).__name__}: {exc}"
    except _Reject as rej:
        rej.verdict.queries = query_report(oracle)
        rej.verdict.params = run.params()
        return rej.verdict
    except BudgetExhausted as exc:
        return Verdict(INCONCLUSIVE, reason=f"BudgetExhausted: {exc}", queries=query_report(oracle), params=run.params())
    if inconclusive:
        return Verdict(INCONCLUSIVE, reason=inconclusive, queries=query_report(oracle), params=run.params())
    return Verdict(ACCEPT, queries=query_report(oracle), params=run.params())


test_minor_freeness.__test__ = False  # not a pytest test despite the name

__all__ = [
    "ACCEPT",
    "CutCertificate",
    "INCONCLUSIVE",
    "PRESETS",
    "QueryReport",
    "REJECT",
    "TesterConfig",
    "Verdict",
    "query_report",
    "sample_edge",
    "test_minor_freeness",
]

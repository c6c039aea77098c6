"""Seeded experiment campaigns, partition statistics and CSV emission."""

from __future__ import annotations

import csv
import io
import logging
import math
import random
import statistics
import time
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from scipy import stats as sps

from .graph import BoundedDegreeGraph, GraphError, QueryOracle
from .generators import FarnessCertificate, gen_cactus, gen_outerplanar, gen_planted_far
from .minors.family import ForbiddenFamily
from .partition import PartitionConfig, enumerate_partition, init_partition
from .tester import INCONCLUSIVE, REJECT, TesterConfig, test_minor_freeness

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "seed",
    "n",
    "delta",
    "epsilon",
    "verdict",
    "queries_total",
    "queries_partition",
    "queries_checks",
    "wall_ms",
    "witness_hash",
)


# ---------------------------------------------------------------------------
# generators by name


def _cycle(n: int, delta: int, rng: random.Random) -> BoundedDegreeGraph:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    return BoundedDegreeGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], max(2, delta))


def _ladder(n: int, delta: int, rng: random.Random) -> BoundedDegreeGraph:
    """Ladder on n vertices (n even): rails 0..k-1 and k..2k-1, rung i joins i and k+i."""
    if n < 4 or n % 2:
        raise GraphError("ladder needs an even n >= 4")
    k = n // 2
    edges = [(i, i + 1) for i in range(k - 1)] + [(k + i, k + i + 1) for i in range(k - 1)]
    edges += [(i, k + i) for i in range(k)]
    return BoundedDegreeGraph.from_edges(n, edges, max(3, delta))


GENERATORS = ("outerplanar", "cactus", "tree", "cycle", "ladder", "empty", "planted", "planted_connected")


def generate(
    name: str, n: int, delta: int, rng: random.Random, family: str = "outerplanar", epsilon: float = 0.1, copies: Optional[int] = None
) -> Tuple[BoundedDegreeGraph, Optional[FarnessCertificate]]:
    """Build one graph by generator name; planted generators also return their farness certificate."""
    if name == "outerplanar":
        return gen_outerplanar(n, delta, rng), None
    if name == "cactus":
        return gen_cactus(n, delta, rng), None
    if name == "tree":
        return gen_cactus(n, delta, rng, cycle_prob=0.0), None
    if name == "cycle":
        return _cycle(n, delta, rng), None
    if name == "ladder":
        return _ladder(n, delta, rng), None
    if name == "empty":
        return BoundedDegreeGraph(n, max(1, delta), [()] * n), None
    if name in ("planted", "planted_connected"):
        return gen_planted_far(n, delta, family, epsilon, rng, connect=name == "planted_connected", copies=copies)
    raise GraphError(f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}")


# ---------------------------------------------------------------------------
# experiment specs


@dataclass
class ExperimentSpec:
    """One campaign: a generator, its parameters, and the trial/seed plan.

    ``n`` may hold several sizes (a scaling campaign).  Every trial uses
    seed ``seed_start + i`` for both the graph and the tester, so equal specs
    give equal CSV files.
    """

    generator: str = "outerplanar"
    n: Tuple[int, ...] = (1000,)
    delta: int = 4
    epsilon: float = 0.1
    family: str = "outerplanar"
    copies: Optional[int] = None
    trials: int = 10
    seed_start: int = 0
    output: Optional[str] = None
    preset: str = "desk"
    timing: bool = False
    workers: int = 1
    overrides: Dict[str, float] = field(default_factory=dict)

    def validate(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.n or any(k < 1 for k in self.n):
            raise ValueError("n must list positive sizes")
        if self.delta < 1:
            raise ValueError("delta must be at least 1")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        ForbiddenFamily.parse(self.family)
        TesterConfig.preset(self.preset, self.epsilon, self.family, **self.overrides)
        # the generator must accept its parameters
        for k in self.n:
            generate(self.generator, k, self.delta, random.Random(0), self.family, self.epsilon, self.copies)

    @classmethod
    def parse(cls, text: str) -> "ExperimentSpec":
        """Key-value text: ``key = value`` per line, ``#`` starts a comment.

        Unknown keys are tester overrides (``sample_coeff = 0.05``).
        """
        known = {f.name for f in fields(cls)}
        values: Dict[str, object] = {}
        overrides: Dict[str, float] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in known or key == "overrides":
                overrides[key] = _number(val, lineno)
            elif key == "n":
                values["n"] = tuple(_sizes(val, lineno))
            elif key in ("delta", "copies", "trials", "seed_start", "workers"):
                values[key] = int(_number(val, lineno))
            elif key == "epsilon":
                values[key] = float(_number(val, lineno))
            elif key == "timing":
                values[key] = val.lower() in ("1", "true", "yes", "on")
            else:
                values[key] = val
        spec = cls(**values, overrides=overrides)
        spec.validate()
        return spec

    @classmethod
    def load(cls, path) -> "ExperimentSpec":
        return cls.parse(Path(path).read_text())


def _number(val: str, lineno: int) -> float:
    try:
        x = float(val)
    except ValueError:
        raise ValueError(f"line {lineno}: {val!r} is not a number") from None
    return int(x) if x.is_integer() and "." not in val and "e" not in val.lower() else x


def _sizes(val: str, lineno: int) -> List[int]:
    """``1024, 2048`` or a power range ``2^10..2^17``."""
    if ".." in val:
        lo, hi = (s.strip() for s in val.split("..", 1))
        if lo.startswith("2^") and hi.startswith("2^"):
            return [2 ** e for e in range(int(lo[2:]), int(hi[2:]) + 1)]
        raise ValueError(f"line {lineno}: ranges must look like 2^a..2^b")
    return [int(_number(s.strip(), lineno)) for s in val.split(",") if s.strip()]


# ---------------------------------------------------------------------------
# trials


@dataclass
class TrialRecord:
    seed: int
    n: int
    delta: int
    epsilon: float
    verdict: str
    queries_total: int
    queries_partition: int
    queries_checks: int
    wall_ms: Optional[float]
    witness_hash: str
    step: str = ""
    reason: str = ""
    recheck_ok: Optional[bool] = None

    def csv_row(self) -> List[str]:
        wall = "" if self.wall_ms is None else f"{self.wall_ms:.1f}"
        return [
            str(self.seed),
            str(self.n),
            str(self.delta),
            repr(self.epsilon),
            self.verdict,
            str(self.queries_total),
            str(self.queries_partition),
            str(self.queries_checks),
            wall,
            self.witness_hash,
        ]


def run_trial(spec: ExperimentSpec, n: int, seed: int, graph: Optional[BoundedDegreeGraph] = None) -> TrialRecord:
    """One tester run; any exception becomes an inconclusive record carrying the error text."""
    start = time.perf_counter()
    oracle = None
    try:
        if graph is None:
            graph, _ = generate(spec.generator, n, spec.delta, random.Random(seed), spec.family, spec.epsilon, spec.copies)
        oracle = QueryOracle(graph)
        config = TesterConfig.preset(spec.preset, spec.epsilon, spec.family, **spec.overrides)
        verdict = test_minor_freeness(oracle, config, random.Random(f"tester:{seed}"))
    except Exception as exc:  # noqa: BLE001 - a failing trial is data, not a crash
        log.warning("trial n=%d seed=%d failed: %s", n, seed, exc)
        count = oracle.count if oracle is not None else 0
        wall = (time.perf_counter() - start) * 1000 if spec.timing else None
        return TrialRecord(seed, n, spec.delta, spec.epsilon, INCONCLUSIVE, count, 0, 0, wall, "", reason=f"{type(exc).__name__}: {exc}")
    wall = (time.perf_counter() - start) * 1000 if spec.timing else None
    q = verdict.queries
    recheck = None
    if verdict.outcome == REJECT:
        recheck = verdict.recheck(graph)[0]
    return TrialRecord(
        seed,
        n,
        spec.delta,
        spec.epsilon,
        verdict.outcome,
        q.total,
        q.partition,
        q.checks,
        wall,
        verdict.witness_hash(),
        step=verdict.step,
        reason=verdict.reason,
        recheck_ok=recheck,
    )


def _trial_job(args) -> TrialRecord:
    spec, n, seed = args
    return run_trial(spec, n, seed)


@dataclass
class SizeSummary:
    n: int
    trials: int
    accept_rate: float
    reject_rate: float
    inconclusive_rate: float
    mean_queries: float
    p95_queries: float
    recheck_failures: int


@dataclass
class ScalingFit:
    """Least-squares fit of log(mean queries) against log(n)."""

    exponent: float
    intercept: float
    ci_low: float
    ci_high: float
    r_squared: float
    points: int


@dataclass
class CampaignResult:
    spec: ExperimentSpec
    records: List[TrialRecord]
    sizes: List[SizeSummary]
    fit: Optional[ScalingFit]

    def csv_text(self) -> str:
        return records_to_csv(self.records)

    def summary_text(self) -> str:
        lines = [f"generator={self.spec.generator} family={self.spec.family} epsilon={self.spec.epsilon} delta={self.spec.delta}"]
        if self.spec.generator == "planted_connected":
            lines[0] += " connected=yes"
        for s in self.sizes:
            lines.append(
                f"n={s.n} trials={s.trials} accept={s.accept_rate:.3f} reject={s.reject_rate:.3f} "
                f"inconclusive={s.inconclusive_rate:.3f} mean_queries={s.mean_queries:.1f} p95_queries={s.p95_queries:.1f}"
                + (f" recheck_failures={s.recheck_failures}" if s.recheck_failures else "")
            )
        if self.fit is not None:
            f = self.fit
            lines.append(
                f"scaling exponent={f.exponent:.3f} 95% CI=[{f.ci_low:.3f}, {f.ci_high:.3f}] r^2={f.r_squared:.3f} points={f.points}"
            )
        return "\n".join(lines)


def records_to_csv(records: Sequence[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.csv_row())
    return buf.getvalue()


def _p95(xs: Sequence[float]) -> float:
    if len(xs) == 1:
        return float(xs[0])
    return statistics.quantiles(xs, n=20, method="inclusive")[-1]


def summarize(records: Sequence[TrialRecord]) -> List[SizeSummary]:
    out = []
    for n in sorted({r.n for r in records}):
        rs = [r for r in records if r.n == n]
        c = Counter(r.verdict for r in rs)
        qs = [r.queries_total for r in rs]
        out.append(
            SizeSummary(
                n,
                len(rs),
                c["accept"] / len(rs),
                c[REJECT] / len(rs),
                c[INCONCLUSIVE] / len(rs),
                statistics.fmean(qs),
                _p95(qs),
                sum(1 for r in rs if r.recheck_ok is False),
            )
        )
    return out


def fit_scaling(ns: Sequence[int], means: Sequence[float]) -> Optional[ScalingFit]:
    """Log-log regression with a t-based 95% interval on the slope; needs three distinct sizes."""
    pts = [(n, m) for n, m in zip(ns, means) if m > 0]
    if len({n for n, _ in pts}) < 3:
        return None
    xs = [math.log(n) for n, _ in pts]
    ys = [math.log(m) for _, m in pts]
    res = sps.linregress(xs, ys)
    half = sps.t.ppf(0.975, len(pts) - 2) * res.stderr
    return ScalingFit(res.slope, res.intercept, res.slope - half, res.slope + half, res.rvalue**2, len(pts))


def run_campaign(spec: ExperimentSpec, progress: Optional[Callable[[TrialRecord], None]] = None) -> CampaignResult:
    """Run every (n, seed) trial, write the CSV if ``spec.output`` is set, and summarize.

    Rows are ordered by (n, seed) regardless of worker scheduling.
    """
    spec.validate()
    jobs = [(spec, n, spec.seed_start + i) for n in spec.n for i in range(spec.trials)]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            records = list(pool.map(_trial_job, jobs))
    else:
        records = []
        for job in jobs:
            records.append(_trial_job(job))
            if progress is not None:
                progress(records[-1])
    sizes = summarize(records)
    fit = fit_scaling([s.n for s in sizes], [s.mean_queries for s in sizes]) if len(sizes) >= 3 else None
    result = CampaignResult(spec, records, sizes, fit)
    if spec.output:
        Path(spec.output).write_text(result.csv_text())
    return result


# ---------------------------------------------------------------------------
# partition statistics


@dataclass
class PartitionTrial:
    seed: int
    ell: int
    t: float
    centers: int
    remote: int
    remote_cut: int
    remote_internal_cut: int
    core_clusters: int
    core_bound: float
    clocks_below_ell: bool
    mean_c: Optional[float]
    histogram: Dict[int, int]
    degenerate: bool


@dataclass
class PartitionStats:
    n: int
    delta: int
    gamma: float
    trials: List[PartitionTrial]

    @property
    def mean_remote_cut(self) -> float:
        return statistics.fmean(t.remote_cut for t in self.trials)

    @property
    def remote_cut_bound(self) -> float:
        """2γn: the expectation bound γn with a factor-two sampling allowance."""
        return 2 * self.gamma * self.n

    @property
    def k_bound_rate(self) -> float:
        """Fraction of trials with |K| ≤ 100γΔ|R|."""
        ok = sum(1 for t in self.trials if t.remote_internal_cut <= 100 * self.gamma * self.delta * t.remote)
        return ok / len(self.trials)

    @property
    def core_bound_violations(self) -> int:
        return sum(1 for t in self.trials if t.core_clusters > t.core_bound)

    @property
    def mean_c(self) -> Optional[float]:
        vals = [t.mean_c for t in self.trials if t.mean_c is not None]
        return statistics.fmean(vals) if vals else None

    @property
    def c_bound(self) -> float:
        return 1.2 * (1 + self.gamma)

    def summary_text(self) -> str:
        lines = [
            f"n={self.n} delta={self.delta} gamma={self.gamma} trials={len(self.trials)}",
            f"mean |R|={statistics.fmean(t.remote for t in self.trials):.1f}",
            f"mean |E(R,R')|={self.mean_remote_cut:.2f} bound 2*gamma*n={self.remote_cut_bound:.1f}",
            f"|K| <= 100*gamma*Delta*|R| in {self.k_bound_rate:.3f} of trials",
            f"s <= |S| + n*ell*(Delta+1)/t violations={self.core_bound_violations}",
        ]
        mc = self.mean_c
        lines.append(f"mean |C(v)|={'n/a' if mc is None else f'{mc:.3f}'} bound 1.2*(1+gamma)={self.c_bound:.3f}")
        hist: Counter = Counter()
        for t in self.trials:
            hist.update(t.histogram)
        lines.append("cluster sizes: " + " ".join(f"{k}:{hist[k]}" for k in sorted(hist)))
        return "\n".join(lines)


def _c_size(graph: BoundedDegreeGraph, rset: set, v: int, clock: Callable[[int], float], max_clock: float) -> int:
    """|C(v)| = #{u ∈ R : m_u(v) ≥ max_w m_w(v) − 1} with m_u(v) = r_u − d(u, v) in G[R].

    m_u(v) ≤ max_clock − d, so the BFS stops once d exceeds max_clock − best + 1.
    """
    dist = {v: 0}
    q = deque([v])
    scores: List[float] = []
    best = -math.inf
    while q:
        x = q.popleft()
        d = dist[x]
        if d > max_clock - best + 1:
            break
        m = clock(x) - d
        scores.append(m)
        best = max(best, m)
        for w in graph.neighbors(x):
            if w in rset and w not in dist:
                dist[w] = d + 1
                q.append(w)
    return sum(1 for m in scores if m >= best - 1)


def partition_stats(
    graph: BoundedDegreeGraph, config: PartitionConfig, trials: int, seed_start: int = 0, c_samples: int = 20
) -> PartitionStats:
    """Enumerate the partition for ``trials`` seeds and measure the remote-cut quantities.

    |K| counts edges inside R whose endpoints have different leaders;
    |C(v)| is averaged over up to ``c_samples`` remote vertices per trial.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    out = []
    for i in range(trials):
        seed = seed_start + i
        cfg = PartitionConfig(**{**config.__dict__, "seed": seed})
        state = init_partition(graph, cfg)
        snap = enumerate_partition(graph, state)
        remote = snap.remote
        rset = set(remote)
        cut = internal = 0
        for u, w in graph.edges():
            if (u in rset) != (w in rset):
                cut += 1
            elif u in rset and snap.cluster_index[u] != snap.cluster_index[w]:
                internal += 1
        core = snap.core_clusters()
        bound = len(state.centers) + graph.n * state.ell * (graph.delta + 1) / state.t
        clocks = [state.clock(u) for u in remote]
        max_clock = max(clocks, default=0.0)
        mean_c = None
        if remote:
            pick = random.Random(seed).sample(remote, min(c_samples, len(remote)))
            mean_c = statistics.fmean(_c_size(graph, rset, v, state.clock, max_clock) for v in pick)
        out.append(
            PartitionTrial(
                seed,
                state.ell,
                state.t,
                len(state.centers),
                len(remote),
                cut,
                internal,
                len(core),
                bound,
                max_clock < state.ell,
                mean_c,
                dict(Counter(len(c.members) for c in snap.clusters)),
                state.degenerate,
            )
        )
    return PartitionStats(graph.n, graph.delta, config.gamma, out)


__all__ = [
    "CSV_COLUMNS",
    "CampaignResult",
    "ExperimentSpec",
    "GENERATORS",
    "PartitionStats",
    "PartitionTrial",
    "ScalingFit",
    "SizeSummary",
    "TrialRecord",
    "fit_scaling",
    "generate",
    "partition_stats",
    "records_to_csv",
    "run_campaign",
    "run_trial",
    "summarize",
]

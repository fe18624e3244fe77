"""Randomized sensor-set construction and the typicality census.

The constructor samples Bernoulli(r/n) vertex sets, verifies them as multiset
resolving, and doubles the target size after each failing round.  It reports
whatever it finds; exhausting the round budget is a failure report, never a
claim that no resolving set exists.

The census classifies vertices as atypical at radius i when atypically many
sensors sit within distance i, and multiplies out how few distinct signatures
remain available to the typical vertices; when that count drops below the
number of typical vertices a collision is forced by pigeonhole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exponents import UPPER_BOUND_MAX_X, upper_bound_exponent
from .graphs import (
    DENSE_LIMIT,
    Graph,
    bfs_distances,
    distance_matrix,
    distances_from,
    is_connected,
)
from .seeding import CANDIDATE, CENSUS_SET, FAILURE_TRIAL, substream
from .signatures import KIND_MULTISET, verify_resolving


@dataclass(frozen=True)
class CandidateSpec:
    """Parameters for the sample-verify-grow loop.

    r is the target expected set size (vertices are kept with probability
    r/n); growth multiplies r after each failed round.
    """

    r: float
    growth: float = 2.0
    max_rounds: int = 12
    seed: int = 0

    def __post_init__(self) -> None:
        if self.r <= 0:
            raise ValueError(f"target size must be positive, got {self.r}")
        if self.growth <= 1:
            raise ValueError(f"growth must exceed 1, got {self.growth}")
        if self.max_rounds < 1:
            raise ValueError("need at least one round")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def default_target_size(n: int, x: float | None = None) -> float:
    """Warm-start target size: n**upper_bound_exponent(x) when that threshold
    exists, else sqrt(n) as a documented fallback."""
    if x is not None and 0 < x <= float(UPPER_BOUND_MAX_X):
        return float(n) ** float(upper_bound_exponent(x))
    return math.sqrt(n)


def _sample_members(g: Graph, r: float, seed: int, round_index: int) -> np.ndarray:
    prob = min(r / g.n, 1.0)
    rng = substream(seed, CANDIDATE, round_index)
    return np.flatnonzero(rng.random(g.n) < prob)


def sample_candidate(g: Graph, spec: CandidateSpec) -> np.ndarray:
    """One Bernoulli(r/n) draw of vertices; may be empty for tiny r.

    Deterministic in (g, spec): the draw is round 0 of the construction loop.
    """
    if spec.r > g.n:
        raise ValueError(f"target size {spec.r} exceeds n={g.n}")
    return _sample_members(g, spec.r, spec.seed, 0)


@dataclass(frozen=True)
class RoundRecord:
    round: int
    target: float
    sample_size: int
    resolving: bool
    witness: tuple[int, int] | None

    def to_json_dict(self) -> dict:
        out = {
            "round": self.round,
            "r": self.target,
            "sample_size": self.sample_size,
            "verdict": "resolving" if self.resolving else "collision",
        }
        if self.witness is not None:
            out["witness"] = list(self.witness)
        return out


@dataclass(frozen=True)
class ConstructionResult:
    success: bool
    resolving_set: tuple[int, ...] | None
    rounds: tuple[RoundRecord, ...]

    @property
    def rounds_used(self) -> int:
        return len(self.rounds)

    @property
    def last_witness(self) -> tuple[int, int] | None:
        for rec in reversed(self.rounds):
            if rec.witness is not None:
                return rec.witness
        return None

    def to_json_dict(self) -> dict:
        return {
            "success": self.success,
            "resolving_set": list(self.resolving_set) if self.resolving_set else None,
            "rounds": [rec.to_json_dict() for rec in self.rounds],
        }


def _round_rows(g: Graph, members: np.ndarray, dm: np.ndarray | None) -> np.ndarray:
    if dm is not None:
        return dm[members, :]
    return distances_from(g, [int(v) for v in members])


def construct_resolving(g: Graph, spec: CandidateSpec) -> ConstructionResult:
    """Sample, verify, grow until a multiset resolving set is found.

    The returned set is re-verified from scratch before being reported; a
    verdict from the loop is never trusted directly.  Failure after
    max_rounds carries the last collision witness.
    """
    if not is_connected(g):
        raise ValueError("construction requires a connected graph")
    dm = distance_matrix(g) if g.n <= DENSE_LIMIT else None
    records: list[RoundRecord] = []
    target = float(spec.r)
    for t in range(spec.max_rounds):
        r_t = min(target, float(g.n))
        members = _sample_members(g, r_t, spec.seed, t)
        if members.size == 0:
            records.append(
                RoundRecord(round=t, target=r_t, sample_size=0, resolving=False, witness=None)
            )
            target *= spec.growth
            continue
        rows = _round_rows(g, members, dm)
        verdict = verify_resolving(g, members, KIND_MULTISET, rows=rows)
        records.append(
            RoundRecord(
                round=t,
                target=r_t,
                sample_size=int(members.size),
                resolving=verdict.resolving,
                witness=verdict.witness,
            )
        )
        if verdict.resolving:
            confirm = verify_resolving(g, members, KIND_MULTISET)
            if not confirm.resolving:
                raise RuntimeError(
                    "re-verification rejected a set the round verifier accepted"
                )
            return ConstructionResult(
                success=True,
                resolving_set=tuple(int(v) for v in members),
                rounds=tuple(records),
            )
        target *= spec.growth
    return ConstructionResult(success=False, resolving_set=None, rounds=tuple(records))


@dataclass(frozen=True)
class FailureRateResult:
    """Monte Carlo estimate of how often Bernoulli(r/n) sets fail to resolve."""

    trials: int
    failures: int

    @property
    def rate(self) -> float:
        return self.failures / self.trials


def estimate_failure_rate(g: Graph, r: float, trials: int, seed: int) -> FailureRateResult:
    """Fraction of seeded trials whose sampled set leaves some pair unresolved.

    An empty sample counts as a failure (it distinguishes nothing).  Trials
    use per-index substreams, so the estimate is independent of execution
    order or worker count.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if r < 0:
        raise ValueError("target size must be non-negative")
    dm = distance_matrix(g) if g.n <= DENSE_LIMIT else None
    prob = min(r / g.n, 1.0)
    failures = 0
    for t in range(trials):
        rng = substream(seed, FAILURE_TRIAL, t)
        members = np.flatnonzero(rng.random(g.n) < prob)
        if members.size == 0:
            failures += 1
            continue
        rows = _round_rows(g, members, dm)
        verdict = verify_resolving(g, members, KIND_MULTISET, rows=rows)
        if not verdict.resolving:
            failures += 1
    return FailureRateResult(trials=trials, failures=failures)


# ---------------------------------------------------------------------------
# Typicality census
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CensusLevel:
    """Per-radius census row.

    pairs_by_atypical and pairs_by_sensor count the same incidence set (an
    atypical vertex within distance `level` of a sensor) from its two sides
    and must agree exactly; sensor_ball_total is the crude upper bound given
    by summing sensor ball sizes.
    """

    level: int
    atypical_count: int
    allowed_coordinates: int
    pairs_by_atypical: int
    pairs_by_sensor: int
    sensor_ball_total: int


@dataclass(frozen=True)
class TypicalityReport:
    top_level: int
    set_size: int
    levels: tuple[CensusLevel, ...]
    typical_count: int
    signature_space_bound: int
    collision_forced: bool


def draw_census_set(g: Graph, size: int, seed: int) -> tuple[int, ...]:
    """Seeded uniform sensor set of the given size (no replacement)."""
    if not 1 <= size <= g.n:
        raise ValueError(f"set size must lie in [1, {g.n}], got {size}")
    rng = substream(seed, CENSUS_SET)
    return tuple(sorted(int(v) for v in rng.choice(g.n, size=size, replace=False)))


def typicality_census(g: Graph, R: Sequence[int], k: int) -> TypicalityReport:
    """Classify vertices as typical/atypical at each radius i <= k.

    A vertex is atypical at radius i when its sensor count within distance i
    reaches max(2*(k+1) * |ball_i(v)| * |R| / n, 1); the threshold is the
    exact real value, compared with >= as stated.  Allowed coordinate counts
    use the ceiling of the same quantity, maximized over typical vertices,
    and their product bounds the signatures available to typical vertices.
    """
    members = sorted({int(v) for v in R})
    if not members:
        raise ValueError("sensor set must be non-empty")
    for v in members:
        g._check_vertex(v)
    if not is_connected(g):
        raise ValueError("census requires a connected graph")
    n = g.n
    r_size = len(members)

    if n <= DENSE_LIMIT:
        dm = distance_matrix(g)
        diam = int(dm.max())
        if k > diam:
            raise ValueError(f"k={k} exceeds diameter {diam}")
        ball = np.empty((k + 1, n), dtype=np.int64)
        ball_r = np.empty((k + 1, n), dtype=np.int64)
        sub = dm[:, members]
        for i in range(k + 1):
            ball[i] = (dm <= i).sum(axis=1)
            ball_r[i] = (sub <= i).sum(axis=1)
        sensor_rows = dm[members, :]
    else:
        sensor_rows = distances_from(g, members)
        ball_r = np.empty((k + 1, n), dtype=np.int64)
        for i in range(k + 1):
            ball_r[i] = (sensor_rows <= i).sum(axis=0)
        ball = np.zeros((k + 1, n), dtype=np.int64)
        observed_max = 0
        for v in range(n):
            row = bfs_distances(g, [v])
            observed_max = max(observed_max, int(row.max()))
            for i in range(k + 1):
                ball[i, v] = int((row <= i).sum()) - int((row < 0).sum())
        if k > observed_max:
            raise ValueError(f"k={k} exceeds diameter {observed_max}")

    factor = 2.0 * (k + 1) * r_size / n
    atypical = np.zeros((k + 1, n), dtype=bool)
    for i in range(k + 1):
        threshold = np.maximum(factor * ball[i], 1.0)
        atypical[i] = ball_r[i] >= threshold
    typical_mask = ~atypical.any(axis=0)
    typical_count = int(typical_mask.sum())

    levels = []
    bound = 1
    for i in range(k + 1):
        atype_idx = np.flatnonzero(atypical[i])
        if typical_mask.any():
            allowed_vals = np.maximum(
                np.ceil(factor * ball[i][typical_mask]), 1.0
            ).astype(np.int64)
            allowed = int(allowed_vals.max())
        else:
            allowed = 1
        pairs_by_atypical = int(ball_r[i][atype_idx].sum())
        pairs_by_sensor = int((sensor_rows[:, atype_idx] <= i).sum()) if atype_idx.size else 0
        sensor_ball_total = int(ball[i][members].sum())
        bound *= allowed
        levels.append(
            CensusLevel(
                level=i,
                atypical_count=int(atype_idx.size),
                allowed_coordinates=allowed,
                pairs_by_atypical=pairs_by_atypical,
                pairs_by_sensor=pairs_by_sensor,
                sensor_ball_total=sensor_ball_total,
            )
        )
    return TypicalityReport(
        top_level=k,
        set_size=r_size,
        levels=tuple(levels),
        typical_count=typical_count,
        signature_space_bound=bound,
        collision_forced=bound < typical_count,
    )

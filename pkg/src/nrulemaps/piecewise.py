"""Distance-ranked rules: projections whose target is chosen by rank.

A piecewise rule projects a point onto the l-th nearest line of the
arrangement (rank 1 is the carrier itself).  When the rank lands on a
non-unique distance value the rule fixes the point instead; orbits treat
such a tie as terminal, which is how degenerate systems surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DegenerateHit, InvalidAngle, PointOffArrangement
from .geometry import (
    HALF_PI,
    ON_ARRANGEMENT_TOL,
    Arrangement,
    ArrangementMode,
    Line,
    Point,
    canonicalize_line,
    intersect,
    project,
)

# Distance values this close are "the same value" and make a rank tie.
TIE_TOL = 1e-12
# Gaps below this (but above TIE_TOL) are flagged as near-degenerate.
NEAR_TIE_TOL = 1e-9


@dataclass(frozen=True)
class PiecewiseRule:
    """An oriented angle-theta projection onto the rank-``rank`` line."""

    theta: float
    orientation: int
    rank: int

    def __post_init__(self) -> None:
        if not 0.0 < self.theta <= HALF_PI:
            raise InvalidAngle(f"rule angle must lie in (0, pi/2], got {self.theta}")
        if self.orientation not in (0, 1):
            raise ValueError(f"orientation must be 0 or 1, got {self.orientation}")
        if not isinstance(self.rank, int) or self.rank < 2:
            raise ValueError(f"rank must be an integer >= 2, got {self.rank}")


@dataclass
class PiecewiseNRuleMap:
    """A cycling composition of piecewise rules over a piecewise arrangement."""

    arrangement: Arrangement
    rules: tuple[PiecewiseRule, ...]
    phase: int = 0

    def __post_init__(self) -> None:
        self.rules = tuple(self.rules)
        if self.arrangement.mode is not ArrangementMode.PIECEWISE:
            raise ValueError("piecewise maps need a piecewise-mode arrangement")
        if not self.rules:
            raise ValueError("need at least one rule")
        msize = len(self.arrangement.lines)
        for i, r in enumerate(self.rules):
            if r.rank > msize:
                raise ValueError(f"rule {i} rank {r.rank} exceeds line count {msize}")
        if all(r.rank == 2 for r in self.rules):
            raise ValueError("at least one rule must have rank > 2")
        if not 0 <= self.phase < len(self.rules):
            raise ValueError(f"phase must lie in [0, {len(self.rules)}), got {self.phase}")

    @property
    def n(self) -> int:
        return len(self.rules)

    def copy(self, phase: int = 0) -> "PiecewiseNRuleMap":
        return PiecewiseNRuleMap(self.arrangement, self.rules, phase)


@dataclass(frozen=True)
class DistanceProfile:
    """Line distances from a point, sorted ascending, with tie flags."""

    entries: tuple[tuple[str, float], ...]
    tie_flags: tuple[bool, ...]

    def label_at(self, rank: int) -> str:
        return self.entries[rank - 1][0]

    def distance_at(self, rank: int) -> float:
        return self.entries[rank - 1][1]

    def tied_at(self, rank: int) -> bool:
        return self.tie_flags[rank - 1]


def _ranked(x: Point, arr: Arrangement) -> tuple[list[tuple[float, str]], list[bool]]:
    """Sorted (distance, label) list plus per-rank non-uniqueness flags."""
    ds = sorted((line.distance(x), line.label) for line in arr.lines)
    m = len(ds)
    flags = [False] * m
    for i in range(m - 1):
        if ds[i + 1][0] - ds[i][0] <= TIE_TOL:
            flags[i] = True
            flags[i + 1] = True
    return ds, flags


def distance_profile(x: Point, arr: Arrangement) -> DistanceProfile:
    """Ascending distance profile of ``x``; rank 1 is the nearest line."""
    if arr.mode is not ArrangementMode.PIECEWISE:
        raise ValueError("distance profiles are defined for piecewise arrangements")
    ds, flags = _ranked(x, arr)
    return DistanceProfile(tuple((lb, d) for d, lb in ds), tuple(flags))


@dataclass(frozen=True)
class TieHit:
    """Returned when a rule's rank lands on a non-unique distance value."""

    point: Point
    rank: int


def apply_piecewise(
    rule: PiecewiseRule, x: Point, arr: Arrangement
) -> Union[Point, TieHit]:
    """Apply one piecewise rule; a rank tie returns TieHit instead of moving."""
    if arr.carrier_of(x, ON_ARRANGEMENT_TOL) is None:
        raise PointOffArrangement(f"point {tuple(x)} lies on no arrangement line")
    if rule.rank > len(arr.lines):
        raise ValueError(f"rank {rule.rank} exceeds line count {len(arr.lines)}")
    ds, flags = _ranked(x, arr)
    if flags[rule.rank - 1]:
        return TieHit(x, rule.rank)
    return project(x, rule.theta, rule.orientation, arr.line(ds[rule.rank - 1][1]))


@dataclass(frozen=True)
class AccReport:
    """Verdict of the average contraction condition."""

    satisfied: bool
    mean_theta: float
    delta: float

    @property
    def margin(self) -> float:
        """How far the mean angle clears the contraction threshold (radians)."""
        return self.mean_theta - (math.pi - self.delta) / 2


def acc_check(m: PiecewiseNRuleMap) -> AccReport:
    """Average contraction condition: (pi - delta)/2 < mean theta <= pi/2.

    ``delta`` is the least pairwise intersection angle of the arrangement;
    the lower inequality is strict.
    """
    mean = sum(r.theta for r in m.rules) / len(m.rules)
    delta = m.arrangement.min_angle
    satisfied = (math.pi - delta) / 2 < mean <= HALF_PI + 1e-12
    return AccReport(satisfied, mean, delta)


def separation_product(theta1: float, theta2: float, delta: float) -> float:
    """Product of two away-branch separation coefficients opposite ``delta``.

    Each factor is sin(pi - theta - delta)/sin(theta), the distance scaling
    of a projection whose orientation maps away from the intersection
    point.  The product drops below 1 exactly when the mean of the two
    angles clears (pi - delta)/2.
    """
    for name, val in (("theta1", theta1), ("theta2", theta2)):
        if not 0.0 < val <= HALF_PI:
            raise InvalidAngle(f"{name} must lie in (0, pi/2], got {val}")
    if not 0.0 < delta < HALF_PI:
        raise InvalidAngle(f"delta must be acute, got {delta}")
    return (math.sin(math.pi - theta1 - delta) / math.sin(theta1)) * (
        math.sin(math.pi - theta2 - delta) / math.sin(theta2)
    )


class InvariantKind(Enum):
    SOMETIMES = "sometimes"
    STRICT = "strict"


@dataclass(frozen=True)
class InvariantPoint:
    """A point some rules fix through a distance-rank tie."""

    location: Point
    kind: InvariantKind
    rules_affected: frozenset[int]


def _bisectors(a: Line, b: Line) -> tuple[Line, Line]:
    """The two angle-bisector lines of a non-parallel pair."""
    z = intersect(a, b)
    assert z is not None
    ax, ay = a.direction
    bx, by = b.direction
    out = []
    for vx, vy in ((ax + bx, ay + by), (ax - bx, ay - by)):
        out.append(canonicalize_line(z, Point(z.x + vx, z.y + vy)))
    return out[0], out[1]


def invariant_points(m: PiecewiseNRuleMap) -> list[InvariantPoint]:
    """All points of the arrangement fixed by some rule through a tie.

    Candidates are the intersections of each line with the angle bisectors
    of every pair of other lines (the equidistance loci) together with the
    pairwise line intersections (double-zero distances); a candidate is
    kept when its tie sits at the rank of at least one rule.  The result
    is finite and sorted by coordinates.
    """
    arr = m.arrangement
    cands: list[Point] = []
    for carrier in arr.lines:
        others = [o for o in arr.lines if o is not carrier]
        for a, b in combinations(others, 2):
            for bis in _bisectors(a, b):
                z = intersect(bis, carrier)
                if z is not None:
                    cands.append(z)
    cands.extend(arr.intersections.values())

    kept: list[InvariantPoint] = []
    seen: list[Point] = []
    for z in cands:
        if any(z.distance_to(s) <= NEAR_TIE_TOL for s in seen):
            continue
        seen.append(z)
        _, flags = _ranked(z, arr)
        affected = frozenset(i for i, r in enumerate(m.rules) if flags[r.rank - 1])
        if affected:
            kind = InvariantKind.STRICT if len(affected) == m.n else InvariantKind.SOMETIMES
            kept.append(InvariantPoint(z, kind, affected))
    kept.sort(key=lambda ip: (ip.location.x, ip.location.y))
    return kept


@dataclass(frozen=True)
class StepRecord:
    """What one orbit step did: which rule, where it resolved, tie flags."""

    rule_index: int
    target: Optional[str]
    tie: bool = False
    near_tie: bool = False


@dataclass
class PiecewiseOrbit:
    """A recorded trajectory; a tie terminates it and marks it degenerate."""

    points: list[Point]
    steps: list[StepRecord]
    terminated_degenerate: bool = False


def iterate_piecewise(m: PiecewiseNRuleMap, x0: Point, max_steps: int) -> PiecewiseOrbit:
    """Iterate from phase 0 for up to ``max_steps`` rule applications.

    Stops early on a rank tie, recording it as the final step; gaps below
    the near-tie threshold are flagged in the step metadata but do not
    stop the orbit.
    """
    arr = m.arrangement
    if arr.carrier_of(x0, ON_ARRANGEMENT_TOL) is None:
        raise PointOffArrangement(f"start {tuple(x0)} lies on no arrangement line")
    points = [x0]
    steps: list[StepRecord] = []
    x = x0
    n = m.n
    for s in range(max_steps):
        rule = m.rules[s % n]
        ds, flags = _ranked(x, arr)
        idx = rule.rank - 1
        if flags[idx]:
            steps.append(StepRecord(s % n, None, tie=True))
            return PiecewiseOrbit(points, steps, True)
        gap_prev = ds[idx][0] - ds[idx - 1][0] if idx > 0 else math.inf
        gap_next = ds[idx + 1][0] - ds[idx][0] if idx + 1 < len(ds) else math.inf
        near = min(gap_prev, gap_next) <= NEAR_TIE_TOL
        target = arr.line(ds[idx][1])
        x = project(x, rule.theta, rule.orientation, target)
        points.append(x)
        steps.append(StepRecord(s % n, target.label, False, near))
    return PiecewiseOrbit(points, steps, False)


def cycle_map(m: PiecewiseNRuleMap, x: Point) -> Point:
    """One full cycle (n rule applications) starting from phase 0."""
    cur = x
    for i, rule in enumerate(m.rules):
        res = apply_piecewise(rule, cur, m.arrangement)
        if isinstance(res, TieHit):
            raise DegenerateHit(f"rank-{res.rank} tie at step {i} of the cycle")
        cur = res
    return cur


@dataclass(frozen=True)
class PeriodicCycle:
    """A confirmed asymptotic cycle of the cycle map."""

    period: int
    cycle_points: tuple[Point, ...]
    onset_step: int


def detect_periodic(
    orbit: Union[PiecewiseOrbit, Sequence[Point]],
    n: int,
    tol: float = 1e-8,
    k_max: int = 64,
    confirmations: int = 3,
) -> Optional[PeriodicCycle]:
    """Smallest cycle-map period k*n sustained along the orbit.

    Samples the orbit every ``n`` steps and looks for the smallest k whose
    sample distance stays below ``tol`` over ``confirmations`` consecutive
    checks.  Accepts a PiecewiseOrbit or a plain point sequence; returns
    None when nothing is confirmed within the recorded orbit.
    """
    if isinstance(orbit, PiecewiseOrbit):
        if orbit.terminated_degenerate:
            raise ValueError("a degenerate orbit has no asymptotic period")
        points: Sequence[Point] = orbit.points
    else:
        points = orbit
    if n < 1:
        raise ValueError(f"cycle length must be positive, got {n}")
    samples = np.array([(p.x, p.y) for p in points[::n]])
    s = len(samples)
    for k in range(1, k_max + 1):
        if s < k + confirmations:
            break
        d = np.hypot(samples[k:, 0] - samples[:-k, 0], samples[k:, 1] - samples[:-k, 1])
        ok = d < tol
        run = ok[: len(ok) - confirmations + 1].copy()
        for j in range(1, confirmations):
            run &= ok[j : len(ok) - confirmations + 1 + j]
        hits = np.flatnonzero(run)
        if hits.size:
            t = int(hits[0])
            a = t + confirmations - 1  # deepest confirmed window start
            start = a * n
            return PeriodicCycle(k * n, tuple(points[start : start + k * n]), start)
    return None

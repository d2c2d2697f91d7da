"""Closed polygonal curves over an arrangement with prescribed incidence angles.

The builder turns an (angles, labels) request into a rule cycle, finds the
cycle's periodic orbit, and repairs the orientation configuration whenever
the orbit degenerates: a neutral cycle (affine scale exactly 1) or a run of
consecutive vertices parked on a line-intersection point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidSpec, RepairExhausted
from .geometry import COINCIDENCE_TOL, HALF_PI, Arrangement, ArrangementMode, Line, Point
from .symbolic import (
    SymbolicNRuleMap,
    SymbolicRule,
    cycle_affine,
    is_collapsing,
    periodic_orbit,
)

# Consecutive vertices closer than this are treated as coincident, making
# the curve degenerate.
VERTEX_TOL = 1e-9


def _segment_line_angle(seg: tuple[float, float], line: Line) -> float:
    """Acute (or right) angle between a segment direction and a line."""
    sx, sy = seg
    norm = math.hypot(sx, sy)
    if norm <= COINCIDENCE_TOL:
        raise ValueError("zero-length segment has no incidence angle")
    dx, dy = line.direction
    c = abs(sx * dx + sy * dy) / norm
    return math.acos(min(1.0, c))


@dataclass(frozen=True)
class ClosedCurve:
    """A cyclic polyline whose k-th vertex lies on a labeled carrier line.

    ``realized_angles[k]`` is the acute angle between the incoming segment
    (from vertex k-1, cyclically) and the carrier line of vertex k.
    """

    arrangement: Arrangement
    vertices: tuple[Point, ...]
    carrier_labels: tuple[str, ...]
    realized_angles: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "carrier_labels", tuple(self.carrier_labels))
        object.__setattr__(self, "realized_angles", tuple(self.realized_angles))
        n = len(self.vertices)
        if not (len(self.carrier_labels) == len(self.realized_angles) == n):
            raise ValueError("vertices, labels, and angles must have equal length")
        if n < 3:
            raise ValueError(f"a closed curve needs at least 3 vertices, got {n}")
        for k in range(n):
            if self.vertices[k].distance_to(self.vertices[k - 1]) <= VERTEX_TOL:
                raise ValueError(f"consecutive vertices {k - 1} and {k} coincide")
            if self.carrier_labels[k] == self.carrier_labels[k - 1]:
                raise ValueError(f"consecutive carriers {k - 1} and {k} coincide")
            line = self.arrangement.line(self.carrier_labels[k])
            if line.distance(self.vertices[k]) > VERTEX_TOL:
                raise ValueError(f"vertex {k} is off its carrier line {line.label}")

    @classmethod
    def from_vertices(
        cls, arrangement: Arrangement, vertices: Sequence[Point], labels: Sequence[str]
    ) -> "ClosedCurve":
        """Build a curve and measure its realized incidence angles."""
        vs, ls = tuple(vertices), tuple(labels)
        angles = []
        for k in range(len(vs)):
            seg = (vs[k].x - vs[k - 1].x, vs[k].y - vs[k - 1].y)
            angles.append(_segment_line_angle(seg, arrangement.line(ls[k])))
        return cls(arrangement, vs, ls, tuple(angles))

    @property
    def n(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class AbsorbedRun:
    """Consecutive rules that fix one intersection point on the orbit."""

    start_index: int
    length: int
    point: Point


def _coincident_runs(orbit: Sequence[Point]) -> list[AbsorbedRun]:
    """Maximal cyclic runs of rules whose orbit step goes nowhere.

    Rule k maps orbit[k-1] (cyclically) to orbit[k]; it is absorbed when
    the two coincide, which can only happen on an intersection point of
    the two target lines involved.
    """
    n = len(orbit)
    absorbed = [orbit[k].distance_to(orbit[k - 1]) <= VERTEX_TOL for k in range(n)]
    if all(absorbed):
        return [AbsorbedRun(0, n, orbit[0])]
    if not any(absorbed):
        return []
    # rotate so a run never wraps the scan origin
    start = next(i for i in range(n) if not absorbed[i])
    runs: list[AbsorbedRun] = []
    k = 0
    while k < n:
        i = (start + k) % n
        if absorbed[i]:
            length = 1
            while k + length < n and absorbed[(start + k + length) % n]:
                length += 1
            runs.append(AbsorbedRun(i, length, orbit[i]))
            k += length
        else:
            k += 1
    runs.sort(key=lambda r: r.start_index)
    return runs


def find_absorbed_runs(m: SymbolicNRuleMap) -> list[AbsorbedRun]:
    """Absorbed subsequences of a collapsing map's periodic orbit.

    Non-collapsing maps return an empty list without computing the orbit.
    """
    if not is_collapsing(m):
        return []
    return _coincident_runs(periodic_orbit(m))


class _FlipBudget:
    """Tracks visited orientation configurations against the 2^n cap."""

    def __init__(self, m: SymbolicNRuleMap) -> None:
        self.seen = {m.orientation_key()}
        self.cap = 2 ** m.n

    def register(self, m: SymbolicNRuleMap) -> None:
        key = m.orientation_key()
        if key in self.seen or len(self.seen) >= self.cap:
            raise RepairExhausted(
                f"visited {len(self.seen)} orientation configurations without repairing the orbit"
            )
        self.seen.add(key)


def deabsorb(m: SymbolicNRuleMap) -> SymbolicNRuleMap:
    """Flip predecessors of absorbed runs until none remain.

    Each pass flips the orientation of the rule cyclically preceding the
    earliest absorbed run and recomputes the orbit.  Returns the input map
    unchanged when it has no runs.
    """
    budget = _FlipBudget(m)
    cur = m
    while True:
        runs = find_absorbed_runs(cur)
        if not runs:
            return cur
        cur = cur.with_flipped((runs[0].start_index - 1) % cur.n)
        budget.register(cur)


def _validate_curve_spec(
    arr: Arrangement, angles: Sequence[float], labels: Sequence[str]
) -> None:
    if arr.mode is not ArrangementMode.SYMBOLIC:
        raise InvalidSpec("closed curves are built over symbolic arrangements")
    n, msize = len(angles), len(arr.lines)
    if n != len(labels):
        raise InvalidSpec(f"{n} angles vs {len(labels)} labels")
    if n < msize:
        raise InvalidSpec(f"need at least {msize} entries for {msize} lines, got {n}")
    for i, a in enumerate(angles):
        if not 0.0 < a < HALF_PI:
            raise InvalidSpec(f"angle {i} must be strictly acute, got {a}")
    known = set(arr.labels)
    for i, lb in enumerate(labels):
        if lb not in known:
            raise InvalidSpec(f"label {i} names no arrangement line: {lb!r}")
        if lb == labels[(i + 1) % n]:
            raise InvalidSpec(f"labels {i} and {(i + 1) % n} repeat {lb!r} consecutively")
    missing = known - set(labels)
    if missing:
        raise InvalidSpec(f"every line label must occur; missing {sorted(missing)}")


def _neutral_flip_index(m: SymbolicNRuleMap) -> int:
    """First rule targeting a line neither parallel nor perpendicular to any other."""
    free = set(m.arrangement.free_lines)
    for i, r in enumerate(m.rules):
        if r.target in free:
            return i
    raise RepairExhausted("no rule targets a line free of parallel/perpendicular partners")


def build_closed_curve(
    arr: Arrangement, angles: Sequence[float], labels: Sequence[str]
) -> ClosedCurve:
    """Synthesize a closed curve realizing strictly acute incidence angles
    against a cyclically non-repeating, covering label sequence.

    Starts from the all-orientation-0 rule cycle and repairs as needed: a
    neutral cycle flips the first rule targeting a line that is neither
    parallel nor perpendicular to any other (the flip is guaranteed to move
    the cycle coefficient off 1), and an orbit with coincident consecutive
    vertices flips the rule preceding the earliest such run.  Both loops
    share a visited-configuration budget capped at 2^n.
    """
    _validate_curve_spec(arr, angles, labels)
    m = SymbolicNRuleMap(arr, tuple(SymbolicRule(a, 0, lb) for a, lb in zip(angles, labels)))
    budget = _FlipBudget(m)
    while True:
        if abs(cycle_affine(m).scale - 1.0) <= COINCIDENCE_TOL:
            m = m.with_flipped(_neutral_flip_index(m))
            budget.register(m)
            continue
        orbit = periodic_orbit(m)
        runs = _coincident_runs(orbit)
        if runs:
            m = m.with_flipped((runs[0].start_index - 1) % m.n)
            budget.register(m)
            continue
        return ClosedCurve.from_vertices(arr, orbit, labels)


def verify_incidence(
    curve: ClosedCurve, angles: Sequence[float], labels: Sequence[str], tol: float
) -> bool:
    """Check a curve against a requested incidence-angle/label sequence."""
    n = len(curve.vertices)
    if not (len(angles) == len(labels) == n):
        raise ValueError("angles and labels must match the curve's vertex count")
    for k in range(n):
        line = curve.arrangement.line(labels[k])
        if line.distance(curve.vertices[k]) > tol:
            return False
        seg = (
            curve.vertices[k].x - curve.vertices[k - 1].x,
            curve.vertices[k].y - curve.vertices[k - 1].y,
        )
        if math.hypot(*seg) <= VERTEX_TOL:
            return False
        if abs(_segment_line_angle(seg, line) - angles[k]) > tol:
            return False
    return True

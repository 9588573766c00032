"""Shared domain types and geometric conventions for squadron planning.

World frame: x is the initial flight direction (for zero heading), y points
left, h is altitude up. The squadron centerline is the line y = 0.
"""

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ParameterError, ValidationError

CENTERLINE_Y = 0.0

# Lateral pull of one 45-degree turn pair toward the centerline: 2*r*(1 - cos(pi/4)).
TURN_PULL_FACTOR = 2.0 * (1.0 - math.cos(math.pi / 4.0))


def _require_finite(name, value):
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class Position3:
    """A 3D point: x forward, y lateral (left positive), h altitude, meters."""

    x: float
    y: float
    h: float

    def __post_init__(self):
        for name in ("x", "y", "h"):
            _require_finite(name, getattr(self, name))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.h], dtype=float)

    @classmethod
    def from_array(cls, a) -> "Position3":
        return cls(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class ReferencePoint:
    """A reference sample: where to be, and when (seconds from start)."""

    position: Position3
    t: float

    def __post_init__(self):
        _require_finite("t", self.t)
        if self.t < 0.0:
            raise ParameterError(f"timestamp must be >= 0, got {self.t}")


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    CENTER = "center"


@dataclass(frozen=True)
class ReferenceTrajectory:
    """A timestamped polyline of reference positions.

    Attributes
    ----------
    xyz : (m, 3) float array of positions.
    t : (m,) float array of strictly increasing timestamps, t[0] == 0.
    segment_boundaries : index of the last point of each maneuver segment.
        A full transition trajectory has exactly five entries; a single
        maneuver has one. Consecutive entries may repeat when a segment is
        empty (zero commanded length).
    """

    xyz: np.ndarray
    t: np.ndarray
    segment_boundaries: tuple

    def __post_init__(self):
        xyz = np.asarray(self.xyz, dtype=float)
        t = np.asarray(self.t, dtype=float)
        object.__setattr__(self, "xyz", xyz)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "segment_boundaries", tuple(int(b) for b in self.segment_boundaries))
        if xyz.ndim != 2 or xyz.shape[1] != 3 or xyz.shape[0] < 1:
            raise ParameterError(f"xyz must be (m, 3) with m >= 1, got {xyz.shape}")
        if t.shape != (xyz.shape[0],):
            raise ParameterError("t must have one entry per point")
        if not np.all(np.isfinite(xyz)) or not np.all(np.isfinite(t)):
            raise ParameterError("trajectory contains non-finite values")
        if t[0] < 0.0 or (t.size > 1 and np.any(np.diff(t) <= 0.0)):
            raise ParameterError("timestamps must be nonnegative and strictly increasing")
        bounds = self.segment_boundaries
        if bounds:
            if any(b < 0 or b > xyz.shape[0] - 1 for b in bounds):
                raise ParameterError("segment boundary index out of range")
            if any(b2 < b1 for b1, b2 in zip(bounds, bounds[1:])):
                raise ParameterError("segment boundaries must be nondecreasing")
            if bounds[-1] != xyz.shape[0] - 1:
                raise ParameterError("last segment boundary must be the final point")

    @property
    def n_points(self) -> int:
        return self.xyz.shape[0]

    @property
    def duration(self) -> float:
        return float(self.t[-1])

    @cached_property
    def arc_length(self) -> float:
        """Total polyline length (sum of consecutive point distances)."""
        if self.n_points < 2:
            return 0.0
        return float(np.linalg.norm(np.diff(self.xyz, axis=0), axis=1).sum())

    @property
    def mean_speed(self) -> float:
        if self.duration <= 0.0:
            return 0.0
        return self.arc_length / self.duration

    def point(self, i: int) -> ReferencePoint:
        return ReferencePoint(Position3.from_array(self.xyz[i]), float(self.t[i]))

    @property
    def final_position(self) -> Position3:
        return Position3.from_array(self.xyz[-1])

    def segment_point_counts(self) -> tuple:
        """Points contributed by each segment (the initial point belongs to none)."""
        counts = []
        prev = 0
        for b in self.segment_boundaries:
            counts.append(b - prev)
            prev = b
        return tuple(counts)

    def segment_index_per_point(self) -> np.ndarray:
        """Owning segment for every point; the shared start point gets segment 0."""
        bounds = np.asarray(self.segment_boundaries, dtype=int)
        idx = np.searchsorted(bounds, np.arange(self.n_points), side="left")
        return np.minimum(idx, len(bounds) - 1)

    def position_at(self, times) -> np.ndarray:
        """Linearly interpolated positions at the given times (clamped to range)."""
        times = np.asarray(times, dtype=float)
        out = np.empty(times.shape + (3,))
        for k in range(3):
            out[..., k] = np.interp(times, self.t, self.xyz[:, k])
        return out

    def retimed(self, final_time: float) -> "ReferenceTrajectory":
        """Same geometry with timestamps rescaled so the last equals final_time."""
        if self.duration <= 0.0:
            raise ParameterError("cannot retime a zero-duration trajectory")
        scaled = (self.t / self.t[-1]) * final_time
        return ReferenceTrajectory(self.xyz, scaled, self.segment_boundaries)


@dataclass(frozen=True)
class FormationSpec:
    """Squadron-level parameters for the latitudinal-to-longitudinal transition.

    Attributes
    ----------
    n_aircraft : squadron size N (>= 2).
    delta_d : nominal neighbor spacing, meters.
    vel_base : base airspeed used to generate references, m/s.
    r : turn radius of the two 45-degree turns, meters.
    phi, beta : initial heading and climb angle, radians.
    k2 : length of the final straight leg on the centerline, meters.
    dt : reference sample period, seconds.
    h0 : initial altitude, meters.
    """

    n_aircraft: int
    delta_d: float
    vel_base: float
    r: float
    phi: float = 0.0
    beta: float = 0.0
    k2: float = 0.0
    dt: float = 1.0
    h0: float = 0.0

    def __post_init__(self):
        if not isinstance(self.n_aircraft, int) or self.n_aircraft < 2:
            raise ValidationError(f"n_aircraft must be an integer >= 2, got {self.n_aircraft!r}")
        for name in ("delta_d", "vel_base", "r", "phi", "beta", "k2", "dt", "h0"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value!r}")
        for name in ("delta_d", "vel_base", "r", "dt"):
            if getattr(self, name) <= 0.0:
                raise ValidationError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.k2 < 0.0:
            raise ValidationError(f"k2 must be >= 0, got {self.k2}")
        if self.h0 < 0.0:
            raise ValidationError(f"h0 must be >= 0, got {self.h0}")
        if abs(self.beta) >= math.pi / 2.0:
            raise ValidationError(f"|beta| must be < pi/2, got {self.beta}")
        limit = self.max_turn_radius
        if self.r > limit * (1.0 + 1e-12):
            raise ValidationError(
                f"turn radius r={self.r} exceeds the feasibility bound "
                f"r <= delta_min/(2*(1-cos(pi/4))) = {limit:.6g} m "
                f"(delta_min={self.min_lateral_offset:.6g} m); the innermost aircraft "
                "would need a negative diagonal leg"
            )

    @property
    def min_lateral_offset(self) -> float:
        """Smallest nonzero lateral distance from the centerline over all aircraft."""
        if self.n_aircraft % 2 == 0:
            return self.delta_d / 2.0
        return self.delta_d

    @property
    def max_turn_radius(self) -> float:
        """Largest r keeping every diagonal leg nonnegative."""
        return self.min_lateral_offset / TURN_PULL_FACTOR


def initial_positions(spec: FormationSpec) -> list:
    """Abreast starting line: aircraft i at its signed lateral offset, x=0, h=h0.

    Side convention: for even N, even i sits left (+y) and odd i right (-y);
    for odd N, aircraft 0 sits on the centerline, odd i left, even i right.
    Sorted lateral positions form an arithmetic progression with step delta_d.
    """
    from .formation import get_side, lateral_offset  # local import to avoid a cycle

    positions = []
    for i in range(spec.n_aircraft):
        side = get_side(i, spec.n_aircraft)
        offset = lateral_offset(i, spec.n_aircraft, spec.delta_d)
        if side is Side.LEFT:
            y = offset
        elif side is Side.RIGHT:
            y = -offset
        else:
            y = CENTERLINE_Y
        positions.append(Position3(0.0, y, spec.h0))
    return positions

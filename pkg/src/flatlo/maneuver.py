"""The two basic 3D maneuvers: go forward (straight leg) and turn (circular arc).

Both emit reference points every vel*dt of path length, with the final point
snapped to the exact closed-form endpoint so consecutive maneuvers chain
without drift. Turns sweep in the horizontal plane; altitude advances
linearly at rate vel*sin(beta).
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import Position3, ReferenceTrajectory
from .errors import DegenerateSegmentError, ParameterError

_COINCIDENT_TOL = 1e-12


@dataclass(frozen=True)
class GoForwardSpec:
    """Straight leg: from start, heading phi and climb beta, path length d."""

    start: Position3
    phi: float
    beta: float
    vel: float
    d: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.phi, self.beta, self.vel, self.d)):
            raise ParameterError("go-forward parameters must be finite")
        if self.d < 0.0:
            raise ParameterError(f"path length d must be >= 0, got {self.d}")
        if self.vel <= 0.0:
            raise ParameterError(f"vel must be > 0, got {self.vel}")
        if abs(self.beta) >= math.pi / 2.0:
            raise ParameterError(f"|beta| must be < pi/2, got {self.beta}")


@dataclass(frozen=True)
class TurnSpec:
    """Circular arc: radius r, sweep alpha, direction selected by theta.

    theta = pi turns clockwise in the horizontal plane (y decreasing when
    heading along +x); theta = 0 turns counterclockwise.
    """

    start: Position3
    phi: float
    beta: float
    theta: float
    alpha: float
    vel: float
    r: float

    def __post_init__(self):
        values = (self.phi, self.beta, self.theta, self.alpha, self.vel, self.r)
        if not all(math.isfinite(v) for v in values):
            raise ParameterError("turn parameters must be finite")
        if self.r <= 0.0:
            raise ParameterError(f"turn radius must be > 0, got {self.r}")
        if not 0.0 < self.alpha <= 2.0 * math.pi:
            raise ParameterError(f"sweep alpha must be in (0, 2*pi], got {self.alpha}")
        if self.vel <= 0.0:
            raise ParameterError(f"vel must be > 0, got {self.vel}")

    @property
    def ccw_sign(self) -> float:
        """+1 for counterclockwise (theta = 0), -1 for clockwise (theta = pi)."""
        return 1.0 if math.cos(self.theta) >= 0.0 else -1.0

    @property
    def exit_phi(self) -> float:
        return self.phi + self.ccw_sign * self.alpha


def direction_vector(phi: float, beta: float) -> np.ndarray:
    """Unit direction for heading phi and climb beta."""
    cb = math.cos(beta)
    return np.array([cb * math.cos(phi), cb * math.sin(phi), math.sin(beta)])


def _arc_stations(length: float, step: float) -> np.ndarray:
    """Path-length stations after the start: full steps of `step`, then `length`.

    The final step may be shorter than `step`; a full step landing within
    step*1e-9 of the end is dropped so spacing stays strictly positive.
    """
    if length <= 0.0:
        return np.empty(0)
    n_full = math.ceil(length / step) - 1
    stations = np.arange(1, n_full + 1) * step
    stations = stations[stations < length - step * 1e-9]
    return np.append(stations, length)


def fw_generate(spec: GoForwardSpec, dt: float) -> ReferenceTrajectory:
    """Discretize a straight leg into a reference trajectory.

    Points sit every vel*dt of path length along the leg; the last point is
    exactly at distance d from the start and carries timestamp d/vel.
    """
    if dt <= 0.0:
        raise ParameterError(f"dt must be > 0, got {dt}")
    s = _arc_stations(spec.d, spec.vel * dt)
    u = direction_vector(spec.phi, spec.beta)
    start = spec.start.as_array()
    xyz = np.vstack([start, start + s[:, None] * u]) if s.size else start[None, :]
    t = np.concatenate([[0.0], s / spec.vel])
    return ReferenceTrajectory(xyz, t, (xyz.shape[0] - 1,))


def turn_generate(spec: TurnSpec, dt: float) -> ReferenceTrajectory:
    """Discretize a turn into a reference trajectory.

    The horizontal projection is a circular arc of radius r swept by alpha;
    heading rotates from phi to phi +/- alpha (sign per theta). Altitude
    climbs linearly by r*alpha*sin(beta) over the segment. Path stations,
    timestamps and the exact final point follow the same rules as
    fw_generate, with total length r*alpha.
    """
    if dt <= 0.0:
        raise ParameterError(f"dt must be > 0, got {dt}")
    length = spec.r * spec.alpha
    s = _arc_stations(length, spec.vel * dt)
    sign = spec.ccw_sign
    start = spec.start.as_array()

    # Interior samples on the arc, final sample from the closed-form sweep.
    sweep = np.append(s[:-1] / spec.r, spec.alpha) if s.size else np.empty(0)
    psi = spec.phi + sign * sweep
    x = start[0] + sign * spec.r * (np.sin(psi) - math.sin(spec.phi))
    y = start[1] - sign * spec.r * (np.cos(psi) - math.cos(spec.phi))
    h = start[2] + s * math.sin(spec.beta)
    xyz = np.vstack([start, np.column_stack([x, y, h])]) if s.size else start[None, :]
    t = np.concatenate([[0.0], s / spec.vel])
    return ReferenceTrajectory(xyz, t, (xyz.shape[0] - 1,))


def fit_angles(p_prev: Position3, p_last: Position3) -> tuple:
    """Heading and climb of the displacement from p_prev to p_last.

    Returns (phi2, beta2) with beta2 = asin(dh/D) for the 3D distance D, and
    phi2 the two-argument arctangent of (dy, dx). The arctangent agrees with
    asin(dy/D) whenever dx > 0 and beta2 = 0, but stays well-defined for
    headings beyond +/- pi/2.
    """
    dx = p_last.x - p_prev.x
    dy = p_last.y - p_prev.y
    dh = p_last.h - p_prev.h
    dist = math.sqrt(dx * dx + dy * dy + dh * dh)
    scale = max(abs(p_prev.x), abs(p_prev.y), abs(p_prev.h), 1.0)
    if dist <= _COINCIDENT_TOL * scale:
        raise DegenerateSegmentError(f"cannot fit angles through coincident points {p_prev} and {p_last}")
    beta2 = math.asin(max(-1.0, min(1.0, dh / dist)))
    phi2 = math.atan2(dy, dx)
    return phi2, beta2

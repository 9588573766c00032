"""Latitudinal-to-longitudinal transition planning (the FLATLO maneuver).

Each aircraft flies five chained segments: an initial advance, a 45-degree
turn toward the centerline, a straight diagonal, a 45-degree turn onto the
centerline, and a final straight leg along it. Advances are staggered per
aircraft so the squadron ends single-file with its original spacing.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import FormationSpec, Position3, ReferenceTrajectory, Side, initial_positions
from .errors import ConfigurationError, ParameterError
from .maneuver import GoForwardSpec, TurnSpec, fit_angles, fw_generate, turn_generate

QUARTER_TURN = math.pi / 4.0


@dataclass(frozen=True)
class FlatloPlan:
    """One aircraft's transition plan and its synchronized airspeed."""

    aircraft_index: int
    delta_m: float
    side: Side
    lateral_offset: float
    diagonal_len: float
    vel_i: float
    trajectory: ReferenceTrajectory

    def __post_init__(self):
        if self.delta_m < 0.0 or self.diagonal_len < 0.0:
            raise ParameterError("advance and diagonal lengths must be >= 0")
        if self.vel_i <= 0.0:
            raise ParameterError(f"vel_i must be > 0, got {self.vel_i}")

    @property
    def path_length(self) -> float:
        """Commanded path length, recovered exactly from the generation timing."""
        return self.trajectory.duration * self.vel_i


def _check_index(i: int, n: int):
    if not isinstance(i, int) or not isinstance(n, int):
        raise ParameterError("aircraft index and squadron size must be integers")
    if n < 1 or not 0 <= i < n:
        raise ParameterError(f"aircraft index {i} out of range for squadron of {n}")


def get_side(i: int, n: int) -> Side:
    """Which side of the centerline aircraft i starts on."""
    _check_index(i, n)
    if n % 2 == 1:
        if i == 0:
            return Side.CENTER
        return Side.LEFT if i % 2 == 1 else Side.RIGHT
    return Side.LEFT if i % 2 == 0 else Side.RIGHT


def lateral_offset(i: int, n: int, delta_d: float) -> float:
    """Unsigned lateral distance of aircraft i from the centerline."""
    _check_index(i, n)
    if n % 2 == 0:
        return delta_d * (2 * (i // 2) + 1) / 2.0
    if i == 0:
        return 0.0
    return delta_d * ((i + 1) // 2)


def move_forward(i: int, n: int, delta_d: float) -> float:
    """Initial forward advance for aircraft i (the advancing rule).

    Aircraft whose index parity matches the squadron's advance by
    (3k - 2)*delta_d with k = (n - i)//2; the others advance by
    3*delta_d*((n - i - 1)//2). The last aircraft always advances 0.
    The multiplier is kept integer so results are exact multiples of delta_d.
    """
    _check_index(i, n)
    if delta_d <= 0.0:
        raise ParameterError(f"delta_d must be > 0, got {delta_d}")
    if (n % 2) == (i % 2):
        k = (n - i) // 2
        multiplier = 3 * k - 2
    else:
        multiplier = 3 * ((n - i - 1) // 2)
    return multiplier * delta_d


def diagonal_length(delta: float, r: float) -> float:
    """Length of the 45-degree leg: sqrt(2)*(delta - 2*r*(1 - cos(pi/4))).

    The two turns together pull the aircraft 2*r*(1 - cos(pi/4)) toward the
    centerline; the diagonal covers the rest of the lateral gap.
    """
    if delta < 0.0:
        raise ParameterError(f"lateral offset must be >= 0, got {delta}")
    if r <= 0.0:
        raise ParameterError(f"turn radius must be > 0, got {r}")
    pull = 2.0 * r * (1.0 - math.cos(QUARTER_TURN))
    value = math.sqrt(2.0) * (delta - pull)
    if value < 0.0:
        if value > -1e-9 * max(r, 1.0):  # borderline rounding at delta == pull
            return 0.0
        raise ConfigurationError(
            f"diagonal length is negative for lateral offset {delta} m with turn "
            f"radius {r} m; requires r <= {delta / (2.0 * (1.0 - math.cos(QUARTER_TURN))):.6g} m"
        )
    return value


class _Chain:
    """Accumulates maneuver segments into one C0-continuous trajectory."""

    def __init__(self, start: Position3, phi: float, beta: float):
        self.xyz = [start.as_array()[None, :]]
        self.t = [np.zeros(1)]
        self.boundaries = []
        self._n = 1
        self._t_end = 0.0
        self.phi = phi
        self.beta = beta

    @property
    def end_position(self) -> Position3:
        return Position3.from_array(self.xyz[-1][-1])

    def add(self, segment: ReferenceTrajectory, exit_phi: float, exit_beta: float, fit: bool):
        """Append a segment (its start point duplicates the chain end).

        With fit=True and at least two fresh points, the carried heading is
        re-derived from the last two emitted points; straight legs make this
        exact. Curved legs carry the analytic exit pose instead: a chord fit
        across an arc is biased by half the final sample's sweep, which the
        spacing guarantees cannot absorb.
        """
        added = segment.n_points - 1
        if added > 0:
            self.xyz.append(segment.xyz[1:])
            self.t.append(self._t_end + segment.t[1:])
            self._n += added
            self._t_end = float(self.t[-1][-1])
        self.boundaries.append(self._n - 1)
        if fit and added > 0 and self._n >= 2:
            tail = segment.xyz[-2:] if added >= 2 else np.vstack([self.xyz[-2][-1], segment.xyz[-1]])
            self.phi, self.beta = fit_angles(Position3.from_array(tail[0]), Position3.from_array(tail[1]))
        else:
            self.phi, self.beta = exit_phi, exit_beta

    def build(self) -> ReferenceTrajectory:
        return ReferenceTrajectory(np.vstack(self.xyz), np.concatenate(self.t), tuple(self.boundaries))


def _center_leg_lengths(delta_m: float, r: float, k2: float) -> tuple:
    """Straight-leg split for the centerline aircraft of an odd squadron.

    It has no lateral gap to close, so it flies straight for the same total
    advance the turn sequence would produce with zero offset. The turn slots
    get the two equal halves r*(sin(pi/4) + cos(pi/4) - 1) and the diagonal
    slot is empty, keeping the five-segment structure.
    """
    turn_equiv = r * (math.sin(QUARTER_TURN) + math.cos(QUARTER_TURN) - 1.0)
    return (delta_m, turn_equiv, 0.0, turn_equiv, k2)


def flatlo(i: int, spec: FormationSpec) -> FlatloPlan:
    """Plan the five-segment transition for aircraft i of the squadron.

    Segments: (1) straight advance by the staggered move_forward distance,
    (2) 45-degree turn toward the centerline (clockwise for the left side),
    (3) straight diagonal of diagonal_length, (4) 45-degree turn onto the
    centerline, (5) straight leg of k2 along it. For beta = 0 the final
    point lies on the centerline at the initial altitude.
    """
    _check_index(i, spec.n_aircraft)
    side = get_side(i, spec.n_aircraft)
    delta_m = move_forward(i, spec.n_aircraft, spec.delta_d)
    delta = lateral_offset(i, spec.n_aircraft, spec.delta_d)
    start = initial_positions(spec)[i]
    vel, dt, r = spec.vel_base, spec.dt, spec.r
    chain = _Chain(start, spec.phi, spec.beta)

    if side is Side.CENTER:
        for length in _center_leg_lengths(delta_m, r, spec.k2):
            seg = fw_generate(GoForwardSpec(chain.end_position, chain.phi, chain.beta, vel, length), dt)
            chain.add(seg, chain.phi, chain.beta, fit=True)
        diag = 0.0
    else:
        try:
            diag = diagonal_length(delta, r)
        except ConfigurationError as exc:
            raise ConfigurationError(f"aircraft {i}: {exc}") from exc
        theta_in = math.pi if side is Side.LEFT else 0.0
        theta_out = 0.0 if side is Side.LEFT else math.pi

        seg = fw_generate(GoForwardSpec(start, chain.phi, chain.beta, vel, delta_m), dt)
        chain.add(seg, chain.phi, chain.beta, fit=True)

        turn1 = TurnSpec(chain.end_position, chain.phi, chain.beta, theta_in, QUARTER_TURN, vel, r)
        chain.add(turn_generate(turn1, dt), turn1.exit_phi, turn1.beta, fit=False)

        seg = fw_generate(GoForwardSpec(chain.end_position, chain.phi, chain.beta, vel, diag), dt)
        chain.add(seg, chain.phi, chain.beta, fit=True)

        turn2 = TurnSpec(chain.end_position, chain.phi, chain.beta, theta_out, QUARTER_TURN, vel, r)
        chain.add(turn_generate(turn2, dt), turn2.exit_phi, turn2.beta, fit=False)

        seg = fw_generate(GoForwardSpec(chain.end_position, chain.phi, chain.beta, vel, spec.k2), dt)
        chain.add(seg, chain.phi, chain.beta, fit=True)

    return FlatloPlan(
        aircraft_index=i,
        delta_m=delta_m,
        side=side,
        lateral_offset=delta,
        diagonal_len=diag,
        vel_i=spec.vel_base,
        trajectory=chain.build(),
    )


def synchronize_velocities(plans: list, vel_base: float) -> list:
    """Assign per-aircraft airspeeds so all plans end at the same instant.

    vel_i = vel_base * L_i / L_max for path lengths L_i; the longest path
    flies at vel_base. Timestamps are rescaled in place of the speeds (pure
    re-timing, geometry untouched), so every final timestamp equals
    L_max / vel_base exactly.
    """
    if not plans:
        raise ParameterError("need at least one plan to synchronize")
    if vel_base <= 0.0:
        raise ParameterError(f"vel_base must be > 0, got {vel_base}")
    lengths = [p.path_length for p in plans]
    if min(lengths) <= 0.0:
        bad = plans[int(np.argmin(lengths))].aircraft_index
        raise ConfigurationError(f"aircraft {bad} has a zero-length path")
    l_max = max(lengths)
    t_final = l_max / vel_base
    out = []
    for plan, length in zip(plans, lengths):
        vel_i = vel_base * (length / l_max)
        out.append(replace(plan, vel_i=vel_i, trajectory=plan.trajectory.retimed(t_final)))
    return out


def squadron_references(spec: FormationSpec) -> list:
    """Plan every aircraft's transition and synchronize the squadron clock."""
    plans = []
    errors = []
    for i in range(spec.n_aircraft):
        try:
            plans.append(flatlo(i, spec))
        except ConfigurationError as exc:
            errors.append(str(exc))
    if errors:
        raise ConfigurationError("; ".join(errors))
    return synchronize_velocities(plans, spec.vel_base)

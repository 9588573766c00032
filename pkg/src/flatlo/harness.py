"""Squadron run orchestration: references, closed-loop tracking, analysis.

All aircraft share t = 0 at transition start; the synchronized reference
re-timing defines the common clock, and simulated trajectories are sampled
on the same grid so separation figures are time-aligned quantities.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .control import ControllerGains, track
from .core import CENTERLINE_Y, FormationSpec
from .dynamics import AircraftState, DynamicsParams, NoiseSpec, apply_noise, rk4_step
from .errors import AlignmentError, DivergenceError, IntegrationError, ParameterError, ValidationError
from .formation import squadron_references

log = logging.getLogger(__name__)

DEFAULT_COLLISION_THRESHOLD_M = 2000.0
DEFAULT_MARK_FRACTIONS = (0.1, 0.3, 0.5, 0.7, 0.9)


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce a squadron run."""

    formation: FormationSpec
    sim_dt: float = 0.5
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    gains: ControllerGains = field(default_factory=ControllerGains)
    params: DynamicsParams = field(default_factory=DynamicsParams)
    collision_threshold_m: float = DEFAULT_COLLISION_THRESHOLD_M
    abort_cross_track_m: float = None
    crossing_marks_m: tuple = None

    def __post_init__(self):
        if self.sim_dt <= 0.0:
            raise ValidationError(f"sim_dt must be > 0, got {self.sim_dt}")
        if self.sim_dt > self.formation.dt * (1.0 + 1e-12):
            raise ValidationError(
                f"sim_dt ({self.sim_dt}) must not exceed the reference dt ({self.formation.dt})"
            )
        if self.collision_threshold_m < 0.0:
            raise ValidationError("collision threshold must be >= 0")
        if self.crossing_marks_m is not None:
            object.__setattr__(self, "crossing_marks_m", tuple(float(m) for m in self.crossing_marks_m))

    @property
    def abort_bound(self) -> float:
        return self.formation.delta_d if self.abort_cross_track_m is None else self.abort_cross_track_m


@dataclass(frozen=True)
class SimulatedTrack:
    """One aircraft's integrated trajectory on the common clock."""

    aircraft_index: int
    t: np.ndarray
    xyz: np.ndarray
    v: np.ndarray
    gamma: np.ndarray
    chi: np.ndarray

    def position_at(self, times) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        out = np.empty(times.shape + (3,))
        for k in range(3):
            out[..., k] = np.interp(times, self.t, self.xyz[:, k])
        return out


@dataclass(frozen=True)
class PairSeparation:
    a: int
    b: int
    min_distance_m: float
    t_at_min_s: float


@dataclass(frozen=True)
class SeparationReport:
    """Time-aligned pairwise minimum distances and the collision verdict."""

    pairs: tuple
    threshold_m: float

    @property
    def global_min_m(self) -> float:
        return min(p.min_distance_m for p in self.pairs)

    @property
    def colliding(self) -> bool:
        return self.global_min_m < self.threshold_m

    def pair(self, a: int, b: int) -> PairSeparation:
        a, b = min(a, b), max(a, b)
        for p in self.pairs:
            if (p.a, p.b) == (a, b):
                return p
        raise KeyError(f"no pair ({a}, {b}) in report")


@dataclass(frozen=True)
class FormationQuality:
    """Final-formation metrics: x-gaps front-to-back, centerline and timing."""

    final_gaps_m: tuple
    max_gap_error_m: float
    max_centerline_offset_m: float
    arrival_spread_s: float
    final_order: tuple


@dataclass(frozen=True)
class CrossingEvent:
    aircraft: int
    mark_index: int
    station_m: float
    t_cross_s: float
    ahead: tuple


@dataclass(frozen=True)
class CrossingReport:
    events: tuple
    missing: tuple

    def event(self, aircraft: int, mark_index: int) -> CrossingEvent:
        for e in self.events:
            if e.aircraft == aircraft and e.mark_index == mark_index:
                return e
        raise KeyError(f"aircraft {aircraft} never crossed mark {mark_index}")


@dataclass(frozen=True)
class TrackingErrorSeries:
    """Per-aircraft tracking errors against the scheduled reference point."""

    t: np.ndarray
    cross_track_m: np.ndarray  # (N, n) horizontal error perpendicular to the path
    error_3d_m: np.ndarray  # (N, n)

    @property
    def max_cross_track_m(self) -> float:
        return float(np.max(np.abs(self.cross_track_m)))


@dataclass(frozen=True)
class ReferenceRunResult:
    plans: tuple
    separation: SeparationReport
    quality: FormationQuality
    times: np.ndarray


@dataclass(frozen=True)
class ClosedLoopResult:
    plans: tuple
    tracks: tuple
    separation: SeparationReport
    quality: FormationQuality
    tracking: TrackingErrorSeries
    times: np.ndarray


def common_clock(duration: float, dt: float) -> np.ndarray:
    """Uniform shared grid from 0 to duration with step as close to dt as fits."""
    if duration <= 0.0 or dt <= 0.0:
        raise ParameterError("duration and dt must be > 0")
    n = max(1, math.ceil(duration / dt - 1e-12))
    return np.linspace(0.0, duration, n + 1)


def min_pairwise_separation(tracks, times, threshold_m=DEFAULT_COLLISION_THRESHOLD_M) -> SeparationReport:
    """Pairwise minimum 3D distances over the shared clock.

    Positions move linearly between grid samples, so each interval's
    distance-squared is a quadratic whose exact continuous minimum (and its
    time) is evaluated in closed form; minima cannot hide between samples.
    """
    if len(tracks) < 2:
        raise ParameterError("need at least two trajectories for separation analysis")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 1:
        raise AlignmentError("common clock must be a nonempty 1D time grid")
    positions = [trk.position_at(times) for trk in tracks]
    pairs = []
    for a, b in combinations(range(len(tracks)), 2):
        rel = positions[a] - positions[b]
        if times.size == 1:
            d_min, t_min = float(np.linalg.norm(rel[0])), float(times[0])
        else:
            r0 = rel[:-1]
            dr = rel[1:] - rel[:-1]
            dr_sq = np.einsum("ij,ij->i", dr, dr)
            tau = np.zeros_like(dr_sq)
            np.divide(-np.einsum("ij,ij->i", r0, dr), dr_sq, out=tau, where=dr_sq > 0.0)
            np.clip(tau, 0.0, 1.0, out=tau)
            nearest = r0 + tau[:, None] * dr
            d_sq = np.einsum("ij,ij->i", nearest, nearest)
            k = int(np.argmin(d_sq))
            d_min = float(math.sqrt(d_sq[k]))
            t_min = float(times[k] + tau[k] * (times[k + 1] - times[k]))
        pairs.append(PairSeparation(a, b, d_min, t_min))
    return SeparationReport(tuple(pairs), threshold_m)


def crossing_order_check(tracks, marks, times) -> CrossingReport:
    """Who is ahead in x when each aircraft first crosses each x-station."""
    times = np.asarray(times, dtype=float)
    xs = [trk.position_at(times)[:, 0] for trk in tracks]
    events = []
    missing = []
    for i, x in enumerate(xs):
        for m_idx, station in enumerate(marks):
            reached = np.nonzero(x >= station)[0]
            if reached.size == 0:
                missing.append((i, m_idx))
                continue
            k = int(reached[0])
            if k == 0:
                t_cross = float(times[0])
            else:
                frac = (station - x[k - 1]) / (x[k] - x[k - 1])
                t_cross = float(times[k - 1] + frac * (times[k] - times[k - 1]))
            tol = 1e-9 * max(1.0, abs(station))
            ahead = tuple(
                j
                for j, xj in enumerate(xs)
                if j != i and float(np.interp(t_cross, times, xj)) > station + tol
            )
            events.append(CrossingEvent(i, m_idx, float(station), t_cross, ahead))
    return CrossingReport(tuple(events), tuple(missing))


def default_crossing_marks(plans, fractions=DEFAULT_MARK_FRACTIONS) -> tuple:
    """Evenly spaced x-stations every aircraft is guaranteed to cross."""
    reach = min(p.trajectory.xyz[-1, 0] for p in plans)
    return tuple(f * reach for f in fractions)


def _quality_from_finals(final_xyz, final_times, delta_d) -> FormationQuality:
    order = tuple(int(i) for i in np.argsort(-final_xyz[:, 0]))
    xs = final_xyz[np.array(order), 0]
    gaps = tuple(float(g) for g in -np.diff(xs))
    max_gap_err = max(abs(g - delta_d) for g in gaps) if gaps else 0.0
    max_centerline = float(np.max(np.abs(final_xyz[:, 1] - CENTERLINE_Y)))
    spread = float(np.max(final_times) - np.min(final_times))
    return FormationQuality(gaps, float(max_gap_err), max_centerline, spread, order)


def run_reference_only(config: SimConfig) -> ReferenceRunResult:
    """Generate the squadron references and analyze them with no dynamics."""
    plans = squadron_references(config.formation)
    times = common_clock(plans[0].trajectory.duration, config.formation.dt)
    separation = min_pairwise_separation(
        [p.trajectory for p in plans], times, config.collision_threshold_m
    )
    final_xyz = np.vstack([p.trajectory.xyz[-1] for p in plans])
    final_times = np.array([p.trajectory.duration for p in plans])
    quality = _quality_from_finals(final_xyz, final_times, config.formation.delta_d)
    log.info(
        "reference run: %d aircraft, %.1f s transition, min separation %.1f m",
        len(plans), times[-1], separation.global_min_m,
    )
    return ReferenceRunResult(tuple(plans), separation, quality, times)


def _path_directions(reference, times) -> np.ndarray:
    """Horizontal unit direction of the reference segment active at each time."""
    seg = np.clip(np.searchsorted(reference.t, times, side="right") - 1, 0, reference.n_points - 2)
    d = reference.xyz[seg + 1] - reference.xyz[seg]
    d = d[:, :2]
    norms = np.linalg.norm(d, axis=1)
    norms[norms == 0.0] = 1.0
    return d / norms[:, None]


def _simulate_one(plan, config: SimConfig, times: np.ndarray, seed_seq) -> SimulatedTrack:
    spec = config.formation
    ref = plan.trajectory
    rng = np.random.default_rng(seed_seq)
    start = ref.xyz[0]
    state = AircraftState(
        v=plan.vel_i, gamma=spec.beta, chi=spec.phi, x=start[0], y=start[1], h=start[2]
    )
    states = np.empty((times.size, 6))
    states[0] = state.as_array()
    abort = config.abort_bound
    for k in range(times.size - 1):
        measured = apply_noise(state, config.noise, rng)
        control = track(measured, ref, float(times[k]), config.gains, config.params)
        try:
            state = rk4_step(state, control, float(times[k + 1] - times[k]), config.params)
        except IntegrationError as exc:
            raise IntegrationError(f"aircraft {plan.aircraft_index} at t={times[k]:.3f} s: {exc}") from exc
        states[k + 1] = state.as_array()
        scheduled = ref.position_at(times[k + 1])
        off = math.hypot(state.x - scheduled[0], state.y - scheduled[1])
        if off > abort:
            raise DivergenceError(
                f"aircraft {plan.aircraft_index} drifted {off:.1f} m from its reference "
                f"at t={times[k + 1]:.1f} s (abort bound {abort:.1f} m)"
            )
    return SimulatedTrack(
        aircraft_index=plan.aircraft_index,
        t=times,
        xyz=states[:, 3:6].copy(),
        v=states[:, 0].copy(),
        gamma=states[:, 1].copy(),
        chi=states[:, 2].copy(),
    )


def _tracking_errors(plans, tracks, times) -> TrackingErrorSeries:
    n = len(plans)
    cross = np.empty((n, times.size))
    err3d = np.empty((n, times.size))
    for i, (plan, trk) in enumerate(zip(plans, tracks)):
        scheduled = plan.trajectory.position_at(times)
        err = trk.xyz - scheduled
        err3d[i] = np.linalg.norm(err, axis=1)
        dirs = _path_directions(plan.trajectory, times)
        along = np.einsum("ij,ij->i", err[:, :2], dirs)
        cross[i] = np.sqrt(np.maximum(np.einsum("ij,ij->i", err[:, :2], err[:, :2]) - along**2, 0.0))
    return TrackingErrorSeries(times, cross, err3d)


def _arrival_times(plans, tracks, times) -> np.ndarray:
    """First time each aircraft reaches its final reference x-station."""
    arrivals = np.empty(len(plans))
    for i, (plan, trk) in enumerate(zip(plans, tracks)):
        goal = plan.trajectory.xyz[-1, 0]
        x = trk.xyz[:, 0]
        reached = np.nonzero(x >= goal)[0]
        if reached.size == 0:
            arrivals[i] = float(times[-1])
            continue
        k = int(reached[0])
        if k == 0:
            arrivals[i] = float(times[0])
        else:
            frac = (goal - x[k - 1]) / (x[k] - x[k - 1])
            arrivals[i] = float(times[k - 1] + frac * (times[k] - times[k - 1]))
    return arrivals


def run_closed_loop(config: SimConfig, workers: int = 1) -> ClosedLoopResult:
    """Integrate every aircraft tracking its reference under measurement noise.

    Each aircraft starts on its reference at its synchronized speed and owns
    an independent child stream of the configured seed, so results are
    bit-identical for any worker count.
    """
    plans = squadron_references(config.formation)
    duration = plans[0].trajectory.duration
    times = common_clock(duration, config.sim_dt)
    seeds = np.random.SeedSequence(config.noise.seed).spawn(len(plans))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            tracks = list(pool.map(lambda args: _simulate_one(*args),
                                   [(p, config, times, s) for p, s in zip(plans, seeds)]))
    else:
        tracks = [_simulate_one(p, config, times, s) for p, s in zip(plans, seeds)]

    separation = min_pairwise_separation(tracks, times, config.collision_threshold_m)
    final_xyz = np.vstack([trk.xyz[-1] for trk in tracks])
    arrivals = _arrival_times(plans, tracks, times)
    quality = _quality_from_finals(final_xyz, arrivals, config.formation.delta_d)
    tracking = _tracking_errors(plans, tracks, times)
    log.info(
        "closed-loop run: %d aircraft, %d steps, min separation %.1f m, max cross-track %.1f m",
        len(plans), times.size - 1, separation.global_min_m, tracking.max_cross_track_m,
    )
    return ClosedLoopResult(tuple(plans), tuple(tracks), separation, quality, tracking, times)

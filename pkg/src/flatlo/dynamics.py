"""Point-mass aircraft model, classical RK4 stepping, and measurement noise.

State: airspeed V, flight path angle gamma, flight path heading chi, and
position (x, y, h). Controls: net thrust-minus-drag over weight, load
factor n, bank angle mu. The model is singular at V = 0 and |gamma| = pi/2.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import IntegrationError, ParameterError

STANDARD_GRAVITY = 9.80665


@dataclass(frozen=True)
class AircraftState:
    """Dynamic state: V m/s, gamma/chi rad, position meters."""

    v: float
    gamma: float
    chi: float
    x: float
    y: float
    h: float

    def as_array(self) -> np.ndarray:
        return np.array([self.v, self.gamma, self.chi, self.x, self.y, self.h])

    @classmethod
    def from_array(cls, a) -> "AircraftState":
        return cls(*(float(v) for v in a))


@dataclass(frozen=True)
class ControlInput:
    """Commanded channels: (T - D)/W, load factor n, bank angle mu (rad)."""

    net_thrust_over_weight: float
    n: float
    mu: float


@dataclass(frozen=True)
class DynamicsParams:
    """Gravity and input saturation bounds.

    Default bounds keep the nominal squadron operating point (gentle
    quarter-pi turns at tens of m/s over kilometer-scale radii) feasible
    with margin: the required load factor there is barely above 1.
    """

    g: float = STANDARD_GRAVITY
    thrust_bounds: tuple = (-0.3, 0.3)
    load_factor_bounds: tuple = (0.5, 2.5)
    bank_limit: float = math.pi / 4.0

    def __post_init__(self):
        if self.g <= 0.0:
            raise ParameterError(f"gravity must be > 0, got {self.g}")
        if self.thrust_bounds[0] > self.thrust_bounds[1] or self.load_factor_bounds[0] > self.load_factor_bounds[1]:
            raise ParameterError("saturation bounds must be ordered (low, high)")
        if self.bank_limit <= 0.0 or self.bank_limit >= math.pi / 2.0:
            raise ParameterError(f"bank limit must be in (0, pi/2), got {self.bank_limit}")


@dataclass(frozen=True)
class NoiseSpec:
    """Multiplicative measurement noise on V, chi and gamma.

    Each measured channel is scaled by (1 + level*z) with z standard normal,
    drawn independently per channel per call from a seeded stream.
    """

    level: float = 0.0025
    seed: int = 0

    def __post_init__(self):
        if self.level < 0.0:
            raise ParameterError(f"noise level must be >= 0, got {self.level}")


def _check_domain(v: float, gamma: float, context: str = ""):
    if v <= 0.0 or abs(gamma) >= math.pi / 2.0 or not (math.isfinite(v) and math.isfinite(gamma)):
        where = f" {context}" if context else ""
        raise IntegrationError(f"state outside model domain{where}: V={v!r}, gamma={gamma!r} (need V > 0, |gamma| < pi/2)")


def derivatives(state: AircraftState, control: ControlInput, params: DynamicsParams) -> np.ndarray:
    """Time derivatives (dV, dgamma, dchi, dx, dy, dh) of the point-mass model."""
    _check_domain(state.v, state.gamma)
    g, v, gamma, chi = params.g, state.v, state.gamma, state.chi
    cg = math.cos(gamma)
    dv = g * (control.net_thrust_over_weight - math.sin(gamma))
    dgamma = (g / v) * (control.n * math.cos(control.mu) - cg)
    dchi = g * control.n * math.sin(control.mu) / (v * cg)
    dx = v * cg * math.cos(chi)
    dy = v * cg * math.sin(chi)
    dh = v * math.sin(gamma)
    return np.array([dv, dgamma, dchi, dx, dy, dh])


def _derivatives_raw(y: np.ndarray, control: ControlInput, params: DynamicsParams, stage: str) -> np.ndarray:
    v, gamma, chi = y[0], y[1], y[2]
    _check_domain(v, gamma, context=f"at RK4 stage {stage}")
    g = params.g
    cg = math.cos(gamma)
    return np.array(
        [
            g * (control.net_thrust_over_weight - math.sin(gamma)),
            (g / v) * (control.n * math.cos(control.mu) - cg),
            g * control.n * math.sin(control.mu) / (v * cg),
            v * cg * math.cos(chi),
            v * cg * math.sin(chi),
            v * math.sin(gamma),
        ]
    )


def rk4_step(state: AircraftState, control: ControlInput, dt: float, params: DynamicsParams) -> AircraftState:
    """One classical 4-stage Runge-Kutta step with the input held constant."""
    if dt <= 0.0:
        raise ParameterError(f"dt must be > 0, got {dt}")
    y0 = state.as_array()
    k1 = _derivatives_raw(y0, control, params, "k1")
    k2 = _derivatives_raw(y0 + 0.5 * dt * k1, control, params, "k2")
    k3 = _derivatives_raw(y0 + 0.5 * dt * k2, control, params, "k3")
    k4 = _derivatives_raw(y0 + dt * k3, control, params, "k4")
    y1 = y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    _check_domain(y1[0], y1[1], context="after step")
    return AircraftState.from_array(y1)


def apply_noise(state: AircraftState, spec: NoiseSpec, rng: np.random.Generator) -> AircraftState:
    """Corrupt the measured V, chi and gamma channels; position passes through."""
    if spec.level == 0.0:
        return state
    z = rng.standard_normal(3)
    return AircraftState(
        v=state.v * (1.0 + spec.level * z[0]),
        gamma=state.gamma * (1.0 + spec.level * z[2]),
        chi=state.chi * (1.0 + spec.level * z[1]),
        x=state.x,
        y=state.y,
        h=state.h,
    )

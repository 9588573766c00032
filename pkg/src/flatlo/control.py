"""Reference-tracking controller: lookahead aiming plus proportional loops.

The controller aims at the reference point one lookahead_time ahead on the
schedule, banks toward it, sets load factor from the climb geometry, and
holds the reference speed with a small along-track correction so the
squadron keeps its common clock.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import ReferenceTrajectory
from .dynamics import AircraftState, ControlInput, DynamicsParams
from .errors import ParameterError

_EPS = 1e-9


@dataclass(frozen=True)
class ControllerGains:
    lookahead_time: float = 30.0
    k_speed: float = 0.1
    k_gamma: float = 4.0
    k_chi: float = 2.0
    k_alt: float = 0.5

    def __post_init__(self):
        for name in ("lookahead_time", "k_speed", "k_gamma", "k_chi", "k_alt"):
            if getattr(self, name) <= 0.0:
                raise ParameterError(f"{name} must be > 0, got {getattr(self, name)}")


def _wrap_pi(angle: float) -> float:
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


def _clip(value: float, low: float, high: float) -> float:
    return low if value < low else (high if value > high else value)


def track(
    measured: AircraftState,
    reference: ReferenceTrajectory,
    t: float,
    gains: ControllerGains,
    params: DynamicsParams,
) -> ControlInput:
    """Map a measured state and schedule time to saturated control inputs.

    Heading error to the lookahead point commands bank; climb geometry and
    altitude error command load factor; speed error (nominal reference
    speed plus an along-track catch-up term) commands the thrust channel.
    On-reference, on-speed flight along a straight leg yields exactly
    (0, 1, 0).
    """
    if reference.n_points < 2:
        raise ParameterError("reference trajectory must contain at least two points")
    t_now = _clip(t, 0.0, reference.duration)
    t_ahead = min(t_now + gains.lookahead_time, reference.duration)
    pos = np.array([measured.x, measured.y, measured.h])
    p_sched = reference.position_at(t_now)
    p_aim = reference.position_at(t_ahead)

    aim = p_aim - pos
    dist = float(np.linalg.norm(aim))
    if dist > _EPS:
        chi_des = math.atan2(aim[1], aim[0])
        climb_ratio = _clip(float(aim[2]) / dist, -1.0, 1.0)
        gamma_des = math.asin(climb_ratio)
        along_err = float(np.dot(p_sched - pos, aim)) / dist
    else:
        # Sitting on the trajectory end: hold heading, level off, coast.
        chi_des = measured.chi
        climb_ratio = 0.0
        gamma_des = 0.0
        along_err = 0.0

    mu = _clip(gains.k_chi * _wrap_pi(chi_des - measured.chi), -params.bank_limit, params.bank_limit)

    n = (
        math.cos(measured.gamma)
        + gains.k_gamma * (gamma_des - measured.gamma)
        + gains.k_alt * climb_ratio
    ) / math.cos(mu)
    n = _clip(n, params.load_factor_bounds[0], params.load_factor_bounds[1])

    v_cmd = reference.mean_speed + along_err / gains.lookahead_time
    thrust = math.sin(measured.gamma) + gains.k_speed * (v_cmd - measured.v)
    thrust = _clip(thrust, params.thrust_bounds[0], params.thrust_bounds[1])

    return ControlInput(net_thrust_over_weight=thrust, n=n, mu=mu)

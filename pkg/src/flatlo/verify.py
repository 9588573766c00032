"""Executable checks of the transition's formation guarantees.

Used by the `verify` CLI subcommand and the acceptance suite: the spacing
property (final in-line gaps equal delta_d for any squadron size and scale)
and the advance-difference law behind it.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import FormationSpec
from .formation import move_forward, squadron_references

GAP_REL_TOL = 1e-6
CENTERLINE_TOL_FACTOR = 1e-6  # times delta_d


@dataclass(frozen=True)
class SpacingCheck:
    """Outcome of one randomized spacing-theorem trial."""

    n_aircraft: int
    delta_d: float
    k2: float
    max_gap_rel_err: float
    max_centerline_err: float
    max_altitude_err: float
    passed: bool


def spacing_trial(n: int, delta_d: float, k2: float, h0: float = 1000.0, vel: float = 30.5) -> SpacingCheck:
    """Generate one squadron and measure its final-formation errors.

    Uses r = delta_d/4 and level flight; the sample period is scaled so each
    trajectory carries a bounded number of points regardless of delta_d.
    """
    r = delta_d / 4.0
    # ~1500 samples on the longest path keeps runtime flat across scales
    longest = move_forward(0, n, delta_d) + 2.0 * r * (math.pi / 4.0) + 2.0 * delta_d + k2
    dt = longest / vel / 1500.0
    spec = FormationSpec(n_aircraft=n, delta_d=delta_d, vel_base=vel, r=r, k2=k2, dt=dt, h0=h0)
    plans = squadron_references(spec)
    finals = np.vstack([p.trajectory.xyz[-1] for p in plans])
    xs = np.sort(finals[:, 0])[::-1]
    gaps = -np.diff(xs)
    max_gap_rel = float(np.max(np.abs(gaps - delta_d))) / delta_d
    max_y = float(np.max(np.abs(finals[:, 1])))
    max_h = float(np.max(np.abs(finals[:, 2] - h0)))
    passed = (
        max_gap_rel <= GAP_REL_TOL
        and max_y <= CENTERLINE_TOL_FACTOR * delta_d
        and max_h == 0.0
    )
    return SpacingCheck(n, delta_d, k2, max_gap_rel, max_y, max_h, passed)


def spacing_theorem_suite(n_values=range(2, 10), draws: int = 20, seed: int = 61803) -> list:
    """Randomized spacing trials: per squadron size, `draws` random scales.

    delta_d is drawn log-uniform from [10, 1e5] m and k2 uniform from
    [0, 2*delta_d]; r is pinned to delta_d/4.
    """
    rng = np.random.default_rng(seed)
    checks = []
    for n in n_values:
        for _ in range(draws):
            delta_d = float(10.0 ** rng.uniform(1.0, 5.0))
            k2 = float(rng.uniform(0.0, 2.0 * delta_d))
            checks.append(spacing_trial(n, delta_d, k2))
    return checks


def advance_difference_violations(n_max: int = 50) -> list:
    """Exhaustively check the advance-difference law for squadrons up to n_max.

    With unit spacing, consecutive advances must differ by exactly 1 when the
    index parity matches the squadron's, and by exactly 2 otherwise. Returns
    the list of (n, i) violations; empty means the law holds.
    """
    bad = []
    for n in range(2, n_max + 1):
        for i in range(n - 1):
            diff = move_forward(i, n, 1) - move_forward(i + 1, n, 1)
            expected = 1 if (n % 2) == (i % 2) else 2
            if diff != expected:
                bad.append((n, i))
    return bad

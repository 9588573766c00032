"""Collision-free squadron transition from abreast to in-line formation.

Library + CLI: plan per-aircraft reference trajectories for the FLATLO
formation change, simulate point-mass aircraft tracking them under sensor
noise, and analyze pairwise separation and formation quality.
"""

from .core import (
    CENTERLINE_Y,
    FormationSpec,
    Position3,
    ReferencePoint,
    ReferenceTrajectory,
    Side,
    initial_positions,
)
from .dynamics import (
    AircraftState,
    ControlInput,
    DynamicsParams,
    NoiseSpec,
    apply_noise,
    derivatives,
    rk4_step,
)
from .control import ControllerGains, track
from .errors import (
    AlignmentError,
    ConfigurationError,
    DegenerateSegmentError,
    DivergenceError,
    FlatloError,
    IntegrationError,
    ParameterError,
    ValidationError,
)
from .formation import (
    FlatloPlan,
    diagonal_length,
    flatlo,
    get_side,
    lateral_offset,
    move_forward,
    squadron_references,
    synchronize_velocities,
)
from .harness import (
    FormationQuality,
    SeparationReport,
    SimConfig,
    crossing_order_check,
    min_pairwise_separation,
    run_closed_loop,
    run_reference_only,
)
from .maneuver import GoForwardSpec, TurnSpec, fit_angles, fw_generate, turn_generate

__version__ = "0.1.0"

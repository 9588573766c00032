"""Configuration parsing, run artifacts, and plot-data emission.

Configs are a single JSON document with units spelled out in key names.
Numeric CSV output uses 17 significant digits so double-precision values
survive a write/read round trip bit-exactly.
"""

import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .control import ControllerGains
from .core import FormationSpec
from .dynamics import DynamicsParams, NoiseSpec
from .errors import ValidationError
from .harness import SimConfig

FLOAT_FORMAT = "%.17g"

REFERENCE_CSV_COLUMNS = ("t_s", "x_m", "y_m", "h_m", "segment_index")
SIMULATED_CSV_COLUMNS = ("t_s", "x_m", "y_m", "h_m", "V_mps", "gamma_rad", "chi_rad")
TRACKING_CSV_COLUMNS = ("t_s", "aircraft", "cross_track_m", "error_3d_m")


def _fmt(value) -> str:
    return FLOAT_FORMAT % float(value)


# ---------------------------------------------------------------- config

def load_config(path) -> SimConfig:
    """Parse a run configuration file into a validated SimConfig."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> SimConfig:
    if not isinstance(raw, dict) or "formation" not in raw:
        raise ValidationError('config must be a JSON object with a "formation" section')
    f = raw["formation"]
    try:
        formation = FormationSpec(
            n_aircraft=f["n_aircraft"],
            delta_d=float(f["delta_d_m"]),
            vel_base=float(f["vel_base_mps"]),
            r=float(f["turn_radius_m"]),
            phi=float(f.get("phi_rad", 0.0)),
            beta=float(f.get("beta_rad", 0.0)),
            k2=float(f.get("k2_m", 0.0)),
            dt=float(f.get("ref_dt_s", 1.0)),
            h0=float(f.get("initial_altitude_m", 0.0)),
        )
    except KeyError as exc:
        raise ValidationError(f"formation section is missing required key {exc}") from exc
    n = raw.get("noise", {})
    noise = NoiseSpec(level=float(n.get("level", 0.0025)), seed=int(n.get("seed", 0)))
    g = raw.get("gains", {})
    gains = ControllerGains(
        lookahead_time=float(g.get("lookahead_time_s", 30.0)),
        k_speed=float(g.get("k_speed", 0.1)),
        k_gamma=float(g.get("k_gamma", 4.0)),
        k_chi=float(g.get("k_chi", 2.0)),
        k_alt=float(g.get("k_alt", 0.5)),
    )
    d = raw.get("dynamics", {})
    params = DynamicsParams(
        g=float(d.get("gravity_mps2", 9.80665)),
        thrust_bounds=tuple(float(v) for v in d.get("thrust_bounds", (-0.3, 0.3))),
        load_factor_bounds=tuple(float(v) for v in d.get("load_factor_bounds", (0.5, 2.5))),
        bank_limit=float(d.get("bank_limit_rad", math.pi / 4.0)),
    )
    marks = raw.get("crossing_marks_m")
    abort = raw.get("abort_cross_track_m")
    return SimConfig(
        formation=formation,
        sim_dt=float(raw.get("sim_dt_s", min(0.5, formation.dt))),
        noise=noise,
        gains=gains,
        params=params,
        collision_threshold_m=float(raw.get("collision_threshold_m", 2000.0)),
        abort_cross_track_m=None if abort is None else float(abort),
        crossing_marks_m=None if marks is None else tuple(float(m) for m in marks),
    )


def config_to_dict(config: SimConfig) -> dict:
    f = config.formation
    return {
        "formation": {
            "n_aircraft": f.n_aircraft,
            "delta_d_m": f.delta_d,
            "vel_base_mps": f.vel_base,
            "turn_radius_m": f.r,
            "phi_rad": f.phi,
            "beta_rad": f.beta,
            "k2_m": f.k2,
            "ref_dt_s": f.dt,
            "initial_altitude_m": f.h0,
        },
        "sim_dt_s": config.sim_dt,
        "noise": {"level": config.noise.level, "seed": config.noise.seed},
        "gains": {
            "lookahead_time_s": config.gains.lookahead_time,
            "k_speed": config.gains.k_speed,
            "k_gamma": config.gains.k_gamma,
            "k_chi": config.gains.k_chi,
            "k_alt": config.gains.k_alt,
        },
        "dynamics": {
            "gravity_mps2": config.params.g,
            "thrust_bounds": list(config.params.thrust_bounds),
            "load_factor_bounds": list(config.params.load_factor_bounds),
            "bank_limit_rad": config.params.bank_limit,
        },
        "collision_threshold_m": config.collision_threshold_m,
        "abort_cross_track_m": config.abort_cross_track_m,
        "crossing_marks_m": None if config.crossing_marks_m is None else list(config.crossing_marks_m),
    }


def write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ------------------------------------------------------------- artifacts

def _write_csv(path, header, columns):
    rows = len(columns[0])
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for k in range(rows):
            fh.write(",".join(col[k] for col in columns) + "\n")


def write_reference_csv(path, plan):
    traj = plan.trajectory
    seg = traj.segment_index_per_point()
    cols = [
        [_fmt(v) for v in traj.t],
        [_fmt(v) for v in traj.xyz[:, 0]],
        [_fmt(v) for v in traj.xyz[:, 1]],
        [_fmt(v) for v in traj.xyz[:, 2]],
        [str(int(s)) for s in seg],
    ]
    _write_csv(path, REFERENCE_CSV_COLUMNS, cols)


def write_simulated_csv(path, track):
    cols = [
        [_fmt(v) for v in track.t],
        [_fmt(v) for v in track.xyz[:, 0]],
        [_fmt(v) for v in track.xyz[:, 1]],
        [_fmt(v) for v in track.xyz[:, 2]],
        [_fmt(v) for v in track.v],
        [_fmt(v) for v in track.gamma],
        [_fmt(v) for v in track.chi],
    ]
    _write_csv(path, SIMULATED_CSV_COLUMNS, cols)


def write_tracking_csv(path, tracking):
    with open(path, "w") as fh:
        fh.write(",".join(TRACKING_CSV_COLUMNS) + "\n")
        for i in range(tracking.cross_track_m.shape[0]):
            for k in range(tracking.t.size):
                fh.write(
                    f"{_fmt(tracking.t[k])},{i},{_fmt(tracking.cross_track_m[i, k])},"
                    f"{_fmt(tracking.error_3d_m[i, k])}\n"
                )


def read_csv(path) -> dict:
    """Read one of this package's CSVs into column arrays keyed by header."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: data[:, k] for k, name in enumerate(header)}


def quality_payload(quality) -> dict:
    return {
        "final_gaps_m": list(quality.final_gaps_m),
        "max_gap_error_m": quality.max_gap_error_m,
        "max_centerline_offset_m": quality.max_centerline_offset_m,
        "arrival_spread_s": quality.arrival_spread_s,
        "final_order": list(quality.final_order),
    }


def separation_payload(report) -> dict:
    return {
        "threshold_m": report.threshold_m,
        "global_min_m": report.global_min_m,
        "colliding": report.colliding,
        "pairs": [
            {"a": p.a, "b": p.b, "min_distance_m": p.min_distance_m, "t_at_min_s": p.t_at_min_s}
            for p in report.pairs
        ],
    }


def crossing_payload(report) -> dict:
    return {
        "events": [
            {
                "aircraft": e.aircraft,
                "mark_index": e.mark_index,
                "station_m": e.station_m,
                "t_cross_s": e.t_cross_s,
                "ahead": list(e.ahead),
            }
            for e in report.events
        ],
        "missing": [list(m) for m in report.missing],
    }


def write_manifest(out_dir, command, config, artifacts, timings):
    payload = {
        "created_unix_s": time.time(),
        "package_version": __version__,
        "python_version": sys.version.split()[0],
        "numpy_version": np.__version__,
        "command": command,
        "config_echo": "config_echo.json",
        "noise_seed": config.noise.seed,
        "artifacts": sorted(artifacts),
        "timings_s": timings,
    }
    write_json(Path(out_dir) / "manifest.json", payload)


# -------------------------------------------------------------- plotdata

def _write_blocks(path, blocks, header):
    """Whitespace-delimited columnar file, one blank-line-separated block per aircraft."""
    with open(path, "w") as fh:
        fh.write(f"# {header}\n")
        for i, rows in enumerate(blocks):
            fh.write(f"# aircraft {i}\n")
            for row in rows:
                fh.write(" ".join(_fmt(v) for v in row) + "\n")
            if i != len(blocks) - 1:
                fh.write("\n")


def write_plotdata(run_dir, out_dir=None):
    """Emit ground-track, altitude and velocity plot files for a finished run.

    Simulated trajectories are preferred when present; otherwise the
    reference CSVs are used and speeds are recovered from sample spacing.
    Returns the list of files written.
    """
    run_dir = Path(run_dir)
    out_dir = run_dir if out_dir is None else Path(out_dir)
    sim_files = sorted(run_dir.glob("simulated_aircraft_*.csv"))
    ref_files = sorted(run_dir.glob("reference_aircraft_*.csv"))
    files = sim_files or ref_files
    if not files:
        raise ValidationError(f"no trajectory CSVs found in {run_dir}")

    tracks, alts, vels = [], [], []
    for path in files:
        cols = read_csv(path)
        t, x, y, h = cols["t_s"], cols["x_m"], cols["y_m"], cols["h_m"]
        tracks.append(np.column_stack([x, y]))
        alts.append(np.column_stack([t, h]))
        if "V_mps" in cols:
            vels.append(np.column_stack([t, cols["V_mps"]]))
        else:
            step = np.linalg.norm(np.diff(np.column_stack([x, y, h]), axis=0), axis=1)
            speed = step / np.diff(t)
            vels.append(np.column_stack([t[1:], speed]))

    written = []
    for name, blocks, header in (
        ("ground_tracks.dat", tracks, "x_m y_m"),
        ("altitude_profiles.dat", alts, "t_s h_m"),
        ("velocities.dat", vels, "t_s V_mps"),
    ):
        path = out_dir / name
        _write_blocks(path, blocks, header)
        written.append(path)
    return written

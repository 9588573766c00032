"""Batch command-line interface: generate, simulate, plotdata, verify.

Exit codes: 0 success, 1 validation error, 2 runtime/integration error.
Failures print a machine-readable JSON object to stderr. Set FLATLO_LOG
(e.g. DEBUG, INFO) to control log verbosity.
"""

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from .errors import ConfigurationError, FlatloError, ParameterError, ValidationError
from .fileio import (
    config_to_dict,
    crossing_payload,
    load_config,
    quality_payload,
    separation_payload,
    write_json,
    write_manifest,
    write_plotdata,
    write_reference_csv,
    write_simulated_csv,
    write_tracking_csv,
)
from .harness import crossing_order_check, default_crossing_marks, run_closed_loop, run_reference_only
from .verify import advance_difference_violations, spacing_theorem_suite

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _setup_logging():
    level = os.environ.get("FLATLO_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": {"kind": kind, "message": message}}), file=sys.stderr)
    return code


def _prepare_out(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _apply_overrides(config, args):
    if getattr(args, "seed", None) is not None:
        config = replace(config, noise=replace(config.noise, seed=args.seed))
    if getattr(args, "threshold_m", None) is not None:
        config = replace(config, collision_threshold_m=args.threshold_m)
    return config


def _emit_reference(out, result, config, command, timings):
    artifacts = []
    for plan in result.plans:
        name = f"reference_aircraft_{plan.aircraft_index}.csv"
        write_reference_csv(out / name, plan)
        artifacts.append(name)
    write_json(out / "formation_quality.json", quality_payload(result.quality))
    write_json(out / "config_echo.json", config_to_dict(config))
    artifacts += ["formation_quality.json", "config_echo.json"]
    return artifacts


def cmd_generate(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    out = _prepare_out(args.out)
    t0 = time.perf_counter()
    result = run_reference_only(config)
    timings = {"generate": time.perf_counter() - t0}
    artifacts = _emit_reference(out, result, config, "generate", timings)
    write_manifest(out, "generate", config, artifacts, timings)
    print(f"wrote {len(artifacts)} artifacts to {out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    out = _prepare_out(args.out)
    timings = {}

    t0 = time.perf_counter()
    ref_result = run_reference_only(config)
    timings["generate"] = time.perf_counter() - t0
    artifacts = _emit_reference(out, ref_result, config, "simulate", timings)

    marks = config.crossing_marks_m or default_crossing_marks(ref_result.plans)
    if args.reference_only:
        tracks = [p.trajectory for p in ref_result.plans]
        separation = ref_result.separation
        times = ref_result.times
    else:
        t0 = time.perf_counter()
        sim = run_closed_loop(config, workers=args.workers)
        timings["simulate"] = time.perf_counter() - t0
        for trk in sim.tracks:
            name = f"simulated_aircraft_{trk.aircraft_index}.csv"
            write_simulated_csv(out / name, trk)
            artifacts.append(name)
        write_tracking_csv(out / "tracking_error.csv", sim.tracking)
        write_json(out / "formation_quality_simulated.json", quality_payload(sim.quality))
        artifacts += ["tracking_error.csv", "formation_quality_simulated.json"]
        tracks, separation, times = sim.tracks, sim.separation, sim.times

    crossing = crossing_order_check(tracks, marks, times)
    write_json(out / "separation_report.json", separation_payload(separation))
    write_json(out / "crossing_report.json", crossing_payload(crossing))
    artifacts += ["separation_report.json", "crossing_report.json"]
    write_manifest(out, "simulate", config, artifacts, timings)
    verdict = "COLLIDING" if separation.colliding else "clear"
    print(f"wrote {len(artifacts)} artifacts to {out}; min separation {separation.global_min_m:.1f} m ({verdict})")
    return EXIT_OK


def cmd_plotdata(args) -> int:
    written = write_plotdata(args.run, args.out)
    print("\n".join(str(p) for p in written))
    return EXIT_OK


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    checks = spacing_theorem_suite(draws=args.draws, seed=args.seed if args.seed is not None else 61803)
    violations = advance_difference_violations()
    elapsed = time.perf_counter() - t0

    print(f"{'N':>3} {'trials':>7} {'max gap rel err':>16} {'max |y|/delta_d':>16} {'status':>7}")
    all_ok = True
    for n in sorted({c.n_aircraft for c in checks}):
        rows = [c for c in checks if c.n_aircraft == n]
        ok = all(c.passed for c in rows)
        all_ok &= ok
        gap = max(c.max_gap_rel_err for c in rows)
        y = max(c.max_centerline_err / c.delta_d for c in rows)
        print(f"{n:>3} {len(rows):>7} {gap:>16.3e} {y:>16.3e} {'PASS' if ok else 'FAIL':>7}")
    adv_ok = not violations
    all_ok &= adv_ok
    print(f"advance-difference law (N<=50): {'PASS' if adv_ok else 'FAIL ' + str(violations[:5])}")
    print(f"{'all checks passed' if all_ok else 'CHECKS FAILED'} in {elapsed:.2f} s")
    return EXIT_OK if all_ok else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flatlo",
        description="Plan, simulate and verify abreast-to-in-line squadron formation changes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate reference trajectories and quality report")
    gen.add_argument("--config", required=True, help="JSON run configuration")
    gen.add_argument("--out", required=True, help="output directory")
    gen.add_argument("--threshold-m", type=float, default=None, help="collision threshold override")
    gen.set_defaults(func=cmd_generate)

    sim = sub.add_parser("simulate", help="closed-loop squadron simulation and separation analysis")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", required=True)
    sim.add_argument("--seed", type=int, default=None, help="noise seed override")
    sim.add_argument("--threshold-m", type=float, default=None)
    sim.add_argument("--reference-only", action="store_true", help="skip dynamics; analyze references only")
    sim.add_argument("--workers", type=int, default=1, help="thread count for per-aircraft integration")
    sim.set_defaults(func=cmd_simulate)

    plot = sub.add_parser("plotdata", help="emit gnuplot-style data files from a run directory")
    plot.add_argument("run", help="directory containing a finished run")
    plot.add_argument("--out", default=None, help="destination directory (default: run dir)")
    plot.set_defaults(func=cmd_plotdata)

    ver = sub.add_parser("verify", help="run the spacing property suite and print a pass/fail table")
    ver.add_argument("--draws", type=int, default=20, help="random draws per squadron size")
    ver.add_argument("--seed", type=int, default=None)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        return _fail("validation", str(exc), EXIT_VALIDATION)
    except FlatloError as exc:
        return _fail("runtime", str(exc), EXIT_RUNTIME)
    except OSError as exc:
        return _fail("io", str(exc), EXIT_RUNTIME)


if __name__ == "__main__":
    sys.exit(main())

"""
Command-line scenario runner.

    run <scenario-file> [--out DIR] [--dump-config PATH]
    compare <scenario-file> [--out DIR]
    sweep <scenario-file> [--param gamma] [--values ...] [--out DIR]
    verify [--trials N] [--ps-trials N] [--seed S] [--out DIR]

Exit codes: 0 success, 2 validation error, 3 physics error,
4 tolerance breach, 1 anything unexpected.
"""

import argparse
import logging
from pathlib import Path

from pydantic import ValidationError

from pointer_sim.errors import PointerSimError, ScenarioError, ToleranceBreach
from pointer_sim.export import report_json, write_report_json
from pointer_sim.pipeline import compare_mode, run_scenario, run_sweep
from pointer_sim.scenario import dump_scenario, load_scenario
from pointer_sim.verification import run_verification_battery

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_VALIDATION = 2


def _banner(title):
    print("=" * 80)
    print(title)
    print("=" * 80)


def _format_validation_error(error):
    lines = []
    for item in error.errors():
        path = ".".join(str(part) for part in item["loc"]) or "scenario"
        lines.append(f"  • {path}: {item['msg']}")
    return "\n".join(lines)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="run_measurement.py",
        description="Exact von Neumann projector measurements on PS and PPS ensembles",
    )
    parser.add_argument("--verbose", action="store_true", help="Log per-case details")
    sub = parser.add_subparsers(dest="command", required=True)

    run_cmd = sub.add_parser("run", help="Run one scenario and write densities and a report")
    run_cmd.add_argument("scenario", type=Path)
    run_cmd.add_argument("--out", type=Path, default=Path("out"))
    run_cmd.add_argument("--dump-config", type=Path, default=None,
                         help="Write the validated scenario to this path and exit")

    compare_cmd = sub.add_parser("compare", help="Side-by-side PS vs PPS densities")
    compare_cmd.add_argument("scenario", type=Path)
    compare_cmd.add_argument("--out", type=Path, default=Path("out"))
    compare_cmd.add_argument("--dump-config", type=Path, default=None)

    sweep_cmd = sub.add_parser("sweep", help="Repeat a scenario over parameter values")
    sweep_cmd.add_argument("scenario", type=Path)
    sweep_cmd.add_argument("--param", choices=["gamma", "sigma", "hbar"], default=None)
    sweep_cmd.add_argument("--values", type=float, nargs="+", default=None)
    sweep_cmd.add_argument("--out", type=Path, default=Path("out"))
    sweep_cmd.add_argument("--dump-config", type=Path, default=None)

    verify_cmd = sub.add_parser("verify", help="Run the closed-form vs oracle battery")
    verify_cmd.add_argument("--trials", type=int, default=200)
    verify_cmd.add_argument("--ps-trials", type=int, default=1000)
    verify_cmd.add_argument("--seed", type=int, default=0)
    verify_cmd.add_argument("--out", type=Path, default=None)
    return parser


def _sweep_values(args, scenario):
    param, values = args.param, args.values
    if scenario.sweep is not None:
        param = param or scenario.sweep.param
        values = values or scenario.sweep.values
    if values is None:
        raise ScenarioError("sweep needs --values or a 'sweep' block in the scenario file")
    return param or "gamma", values


def _run_command(args):
    if args.command == "verify":
        _banner("VERIFICATION BATTERY")
        report = run_verification_battery(args.trials, args.ps_trials, args.seed)
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            write_report_json(args.out / "verify.json", report)
        print(report_json(report), end="")
        if not report.passed:
            raise ToleranceBreach("; ".join(report.failures))
        print("✓ All checks passed")
        return EXIT_OK

    scenario = load_scenario(args.scenario)
    if args.dump_config is not None:
        dump_scenario(scenario, args.dump_config)
        print(f"✓ Scenario written to {args.dump_config}")
        return EXIT_OK

    if args.command == "run":
        _banner(f"RUN: {scenario.name}")
        report = run_scenario(scenario, args.out)
        print(f"✓ Artifacts in {args.out}: {', '.join(report.artifacts)}")
    elif args.command == "compare":
        _banner(f"COMPARE: {scenario.name}")
        report = compare_mode(scenario, args.out)
        print(f"  • PS cross mass:  {report.ps_cross_l1:.6g}")
        print(f"  • PPS cross mass: {report.pps_cross_l1:.6g}")
        print(f"✓ Artifacts in {args.out}: compare.csv, compare.json")
    elif args.command == "sweep":
        param, values = _sweep_values(args, scenario)
        _banner(f"SWEEP: {scenario.name} over {param}")
        rows = run_sweep(scenario, param, values, args.out)
        print(f"✓ {len(rows)} rows written to {args.out / 'sweep.csv'}")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _run_command(args)
    except ValidationError as e:
        print("✗ Scenario validation failed:")
        print(_format_validation_error(e))
        return EXIT_VALIDATION
    except PointerSimError as e:
        print(f"✗ {type(e).__name__}: {e}")
        return e.exit_code
    except Exception:
        logger.exception("✗ Unexpected failure")
        return EXIT_INTERNAL

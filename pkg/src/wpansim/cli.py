"""Command line entry point.

Exit codes: 0 success, 1 usage error, 2 scenario error, 3 calibration
infeasible.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .calibration import CalibrationTargets
from .coverage import gap_analysis
from .harness import calibrate, compare, run_simulation, sweep
from .scenario_file import ScenarioError, load_scenario
from .trace import read_trace

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SCENARIO = 2
EXIT_INFEASIBLE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse default exits 2; we use 1
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def default_scenario_path() -> Path:
    return Path(str(resources.files("wpansim").joinpath("data/default.scenario")))


def _build_parser() -> _Parser:
    parser = _Parser(prog="wpansim",
                     description="IEEE 802.15.4 PAN simulator: coverage sweeps, "
                                 "handover and transmit power control")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", type=Path, default=None,
                       help="scenario file (default: packaged default.scenario)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the seed from the scenario file")
        p.add_argument("--out", type=Path, default=None,
                       help="output directory (default: ./out_<command>)")

    p_run = sub.add_parser("run", help="single run: trace + energy report")
    common(p_run)

    p_sweep = sub.add_parser("sweep", help="one run per power level, gap report")
    common(p_sweep)
    p_sweep.add_argument("--powers", type=str, default=None,
                         help="comma-separated dBm levels "
                              "(default: scenario [sweep] section)")

    p_cal = sub.add_parser("calibrate",
                           help="fit propagation constants to coverage targets")
    common(p_cal)

    p_cmp = sub.add_parser("compare",
                           help="paired handover/TPC comparison on one seed")
    common(p_cmp)

    p_gaps = sub.add_parser("gaps", help="extract coverage gaps from a trace")
    p_gaps.add_argument("--trace", type=Path, required=True)
    p_gaps.add_argument("--scenario", type=Path, default=None,
                        help="scenario supplying the trajectory bounds")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _load(args):
    path = args.scenario if args.scenario is not None else default_scenario_path()
    cfg = load_scenario(path)
    if getattr(args, "seed", None) is not None:
        cfg = cfg.clone(seed=args.seed)
    return cfg


def _outdir(args, command: str) -> Path:
    return args.out if args.out is not None else Path(f"out_{command}")


def _dispatch(args) -> int:
    if args.command == "run":
        cfg = _load(args)
        out = _outdir(args, "run")
        result = run_simulation(cfg, outdir=out)
        print(f"run complete: {result.summary.total_processed} events, "
              f"trace written to {out / 'trace.csv'}")
        return EXIT_OK

    if args.command == "sweep":
        cfg = _load(args)
        powers = None
        if args.powers:
            powers = [float(p) for p in args.powers.replace(",", " ").split()]
        out = _outdir(args, "sweep")
        result = sweep(cfg, powers, outdir=out)
        print((out / "summary.txt").read_text(encoding="ascii"), end="")
        return EXIT_OK

    if args.command == "calibrate":
        cfg = _load(args)
        out = _outdir(args, "calibrate")
        targets = CalibrationTargets()
        result = calibrate(cfg, outdir=out, targets=targets)
        print("\n".join(result.report_lines(targets)))
        if not result.ok:
            return EXIT_INFEASIBLE
        print(f"calibrated scenario written to {out / 'calibrated.scenario'}")
        return EXIT_OK

    if args.command == "compare":
        cfg = _load(args)
        out = _outdir(args, "compare")
        compare(cfg, outdir=out)
        print((out / "compare_report.txt").read_text(encoding="ascii"), end="")
        return EXIT_OK

    if args.command == "gaps":
        scenario = args.scenario if args.scenario is not None \
            else default_scenario_path()
        cfg = load_scenario(scenario)
        try:
            rows = read_trace(args.trace)
        except (OSError, ValueError) as exc:
            print(f"trace error: {exc}", file=sys.stderr)
            return EXIT_SCENARIO
        x_lo, x_hi = cfg.trajectory.x_bounds()
        gaps = gap_analysis(rows, x_lo, x_hi)
        if gaps:
            for a, b in gaps:
                print(f"gap: {a:.2f} m .. {b:.2f} m")
        else:
            print("no coverage gaps")
        return EXIT_OK

    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())

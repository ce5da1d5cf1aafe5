"""Command line interface: estimate, simulate, evaluate.

Exit codes: 0 success, 2 configuration error, 3 input error (including no
overlapping windows in evaluate), 4 estimation produced zero valid windows.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import BUNDLED_SCENARIOS, load_pipeline_config, resolve_scenario
from .errors import ConfigError, EvrangeError, FormatError, GeometryError
from .evaluation import evaluate, write_report_csv
from .io import read_events, write_events
from .ranging import estimate_stream, read_estimates_csv, write_estimates_csv
from .synthgen import generate, read_truth_csv, write_truth_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_NO_VALID = 4


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_estimate(args) -> int:
    try:
        cfg = load_pipeline_config(args.config)
    except (ConfigError, OSError) as exc:
        return _fail(EXIT_CONFIG, str(exc))
    try:
        stream = read_events(args.input, fmt=args.format, strict=not args.lenient)
    except (FormatError, GeometryError, ValueError, OSError) as exc:
        return _fail(EXIT_INPUT, str(exc))

    estimates = estimate_stream(stream, cfg)
    write_estimates_csv(estimates, args.output)
    n_valid = sum(e.valid for e in estimates)
    print(f"{len(estimates)} windows, {n_valid} valid -> {args.output}")
    if n_valid == 0:
        return _fail(EXIT_NO_VALID, "no window produced a valid estimate")
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        scenario = resolve_scenario(args.scenario)
    except (ConfigError, OSError) as exc:
        return _fail(EXIT_CONFIG, str(exc))
    stream, truth = generate(scenario)
    prefix = Path(args.output_prefix)
    if prefix.parent != Path(""):
        prefix.parent.mkdir(parents=True, exist_ok=True)
    events_path = prefix.with_name(prefix.name + f".{args.events_format}")
    truth_path = prefix.with_name(prefix.name + "_truth.csv")
    write_events(stream, events_path, fmt=args.events_format)
    write_truth_csv(truth, truth_path)
    print(f"{len(stream)} events -> {events_path}")
    print(f"{len(truth)} truth windows -> {truth_path}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    try:
        estimates = read_estimates_csv(args.estimates)
        truth = read_truth_csv(args.truth)
    except (FormatError, OSError) as exc:
        return _fail(EXIT_INPUT, str(exc))
    report = evaluate(estimates, truth, args.threshold_m)
    if report.n_matched == 0:
        return _fail(EXIT_INPUT, "estimate and truth files share no windows")
    for line in report.summary_lines():
        print(line)
    if args.output:
        write_report_csv(report, args.output)
        print(f"per-window report -> {args.output}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evrange",
        description="Range to a blinking LED marker bar from event-camera recordings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="estimate per-window distances from an event file")
    p_est.add_argument("--input", required=True, help="event file (.csv or .bin)")
    p_est.add_argument("--config", required=True, help="pipeline config file")
    p_est.add_argument("--output", required=True, help="estimates CSV to write")
    p_est.add_argument("--format", choices=("csv", "bin"), default=None,
                       help="event file format (default: inferred from extension)")
    mode = p_est.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="lenient", action="store_false", default=False,
                      help="out-of-bounds events are an error (default)")
    mode.add_argument("--lenient", dest="lenient", action="store_true",
                      help="drop out-of-bounds events instead of failing")
    p_est.set_defaults(func=cmd_estimate)

    p_sim = sub.add_parser("simulate", help="render a synthetic scenario to events plus truth")
    p_sim.add_argument("--scenario", required=True,
                       help=f"bundled name ({', '.join(BUNDLED_SCENARIOS)}) or config path")
    p_sim.add_argument("--output-prefix", required=True,
                       help="writes <prefix>.bin (or .csv) and <prefix>_truth.csv")
    p_sim.add_argument("--events-format", choices=("csv", "bin"), default="bin")
    p_sim.set_defaults(func=cmd_simulate)

    p_eval = sub.add_parser("evaluate", help="join estimates with truth and report the error")
    p_eval.add_argument("--estimates", required=True, help="estimates CSV from 'estimate'")
    p_eval.add_argument("--truth", required=True, help="truth CSV from 'simulate'")
    p_eval.add_argument("--threshold-m", type=float, default=0.5,
                        help="error threshold for the headline fraction (default 0.5)")
    p_eval.add_argument("--output", default=None, help="optional per-window report CSV")
    p_eval.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EvrangeError as exc:
        # Anything not already mapped to a specific code is an input problem.
        return _fail(EXIT_INPUT, str(exc))


if __name__ == "__main__":
    sys.exit(main())

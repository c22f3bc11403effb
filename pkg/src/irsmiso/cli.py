"""Command line entry point: ``irsmiso {fig1,fig2,fig3,run} ...``.

Exit codes: 0 on success, 2 on a configuration error, 3 on an I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from . import _jit
from .errors import IrsError
from .harness import (
    ALGORITHMS,
    ConfigError,
    HarnessIOError,
    emit_csv,
    fig1_spec,
    fig2_spec,
    fig3_spec,
    load_spec,
    run_scenario,
    summarize,
)

log = logging.getLogger("irsmiso")

EXIT_CONFIG = 2
EXIT_IO = 3

_FIGURES = {"fig1": fig1_spec, "fig2": fig2_spec, "fig3": fig3_spec}


def _algos(text: str) -> tuple:
    names = tuple(a.strip() for a in text.split(",") if a.strip())
    bad = [a for a in names if a not in ALGORITHMS]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"unknown algorithm(s) {bad}; choose from {','.join(ALGORITHMS)}")
    return names


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trials", type=int, help="channel realizations per sweep point")
    common.add_argument("--seed", type=int, help="base seed")
    common.add_argument("--algos", type=_algos, help="comma-separated subset of " + ",".join(ALGORITHMS))
    common.add_argument("--out", help="trial CSV path; aggregates go to <stem>.agg.csv")
    common.add_argument("--eps", type=float, help="solver stopping threshold")
    common.add_argument("--max-iter", type=int, dest="max_iter", help="solver iteration cap")
    common.add_argument("--workers", type=int, default=1, help="threads used to run trials")
    common.add_argument("-q", "--quiet", action="store_true", help="do not print the summary table")

    parser = argparse.ArgumentParser(prog="irsmiso", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("fig1", parents=[common], help="spectral efficiency vs AP-user distance")
    sub.add_parser("fig2", parents=[common], help="spectral efficiency and run time vs IRS size")
    sub.add_parser("fig3", parents=[common], help="IRS elements vs transmit antennas")
    run = sub.add_parser("run", parents=[common], help="run a scenario from a JSON config file")
    run.add_argument("config", help="JSON file mirroring ScenarioSpec fields")
    return parser


def _spec_from_args(args):
    if args.command == "run":
        spec = load_spec(args.config)
    else:
        spec = _FIGURES[args.command]()
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.algos is not None:
        overrides["algorithms"] = args.algos
    if args.eps is not None:
        overrides["eps"] = args.eps
    if args.max_iter is not None:
        overrides["max_iter"] = args.max_iter
    return replace(spec, **overrides) if overrides else spec


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    out = args.out or (f"{args.command}.csv" if args.command != "run" else "scenario.csv")
    try:
        spec = _spec_from_args(args)
        log.info("backend: %s", _jit.backend_name())
        records, aggregates = run_scenario(spec, workers=max(1, args.workers))
        paths = emit_csv(records, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HarnessIOError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except IrsError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not args.quiet:
        print(summarize(aggregates))
        print(f"wrote {paths[0]} and {paths[1]}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

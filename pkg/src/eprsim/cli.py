"""Command-line entry point: run a scenario file and write reports."""

from __future__ import annotations

import argparse

from .runner import run_scenario
from .scenario import bundled_scenarios


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eprsim",
        description=(
            "Run a declarative spin-pair experiment: prepare the state, couple "
            "pointer devices, measure, and write report.json with the selected "
            "probability, locality, CHSH, observer-frame, and retrodiction analyses."
        ),
        epilog="Bundled scenarios: " + ", ".join(sorted(bundled_scenarios())),
    )
    parser.add_argument(
        "--scenario",
        required=True,
        help="path to a scenario TOML file, or the name of a bundled scenario",
    )
    parser.add_argument(
        "--out", default=".", help="output directory for report.json and records.csv"
    )
    parser.add_argument(
        "--seed", type=int, default=None, help="override the scenario's sampling seed"
    )
    parser.add_argument(
        "--trials", type=int, default=None, help="override the scenario's trial count"
    )
    parser.add_argument(
        "--exact",
        action="store_true",
        help="skip Monte Carlo sampling; report exact values only",
    )
    parser.add_argument(
        "--god-view",
        action="store_true",
        dest="god_view",
        help="include the unframed joint density matrices in the report (debug)",
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=1,
        help="sampling worker threads; results are identical for any count",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run_scenario(
        args.scenario,
        args.out,
        seed=args.seed,
        trials=args.trials,
        exact=args.exact,
        god_view=args.god_view,
        workers=args.workers,
    )


if __name__ == "__main__":
    raise SystemExit(main())

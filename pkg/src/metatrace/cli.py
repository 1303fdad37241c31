from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .api import run_sweep, run_trace, run_weights, simulate_to_dir
from .errors import InputError, NumericalError
from .model import DGPParams
from .simulation import SCENARIOS

logger = logging.getLogger("metatrace.cli")

EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meta-trace",
        description="Sequential Bayesian meta-analysis: research traces and study contributions",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Log debug detail to stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    trace = commands.add_parser("trace", help="Posterior after every study and each study's contribution")
    trace.add_argument("studies", type=Path, help="Studies CSV")
    trace.add_argument("--config", type=Path, required=True, help="Model config JSON")
    trace.add_argument("-o", "--output", type=Path, required=True, help="Trace CSV path")
    trace.add_argument(
        "--retrospective-beliefs",
        action="store_true",
        help="Judge every step under the final kappa schedule",
    )
    trace.add_argument(
        "--metric",
        choices=("w1", "w2", "lindley", "all"),
        default="w2",
        help="Extra contribution columns: w1, lindley, or all (w2 adds none)",
    )

    weights = commands.add_parser("weights", help="Classical meta-analysis weights in percent")
    weights.add_argument("studies", type=Path, help="Studies CSV")
    weights.add_argument("--mode", choices=("sequential", "retrospective"), default="sequential")
    weights.add_argument("--model", choices=("fe", "re"), default="fe")
    weights.add_argument("-o", "--output", type=Path, required=True, help="Weights CSV path")

    simulate = commands.add_parser("simulate", help="Simulate a literature with a methodological innovation")
    simulate.add_argument("--scenario", choices=sorted(SCENARIOS), required=True)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--theta-star", type=float, default=0.0)
    simulate.add_argument("--beta", type=float, default=1.0)
    simulate.add_argument("--var-z", type=float, default=0.01)
    simulate.add_argument("--var-y", type=float, default=0.01)
    simulate.add_argument("--n-old", type=int, default=10)
    simulate.add_argument("--n-new", type=int, default=20)
    simulate.add_argument("--reported-se", type=float, default=None, help="Report this SE for every study")
    simulate.add_argument("--kappa-old-after", type=float, default=None, help="Doubt about method-1 after the switch")
    simulate.add_argument("--tau", type=float, default=None, help="Heterogeneity written into the config")
    simulate.add_argument("-o", "--output", type=Path, required=True, help="Output directory")

    sweep = commands.add_parser("sweep", help="Contribution at one step as a function of a kappa")
    sweep.add_argument("studies", type=Path, help="Studies CSV")
    sweep.add_argument("--config", type=Path, required=True, help="Model config JSON")
    sweep.add_argument("--param", required=True, help="kappa:<label>")
    sweep.add_argument("--values", required=True, help="lo:hi:step (inclusive) or a single value")
    sweep.add_argument("--focus-step", type=int, required=True)
    sweep.add_argument("-o", "--output", type=Path, required=True, help="Sweep CSV path")
    return parser


def _dispatch(args: argparse.Namespace) -> None:
    if args.command == "trace":
        trace, _ = run_trace(
            args.studies,
            args.config,
            args.output,
            retrospective_beliefs=args.retrospective_beliefs,
            metric=args.metric,
        )
        for warning in trace.warnings:
            logger.warning(warning)
    elif args.command == "weights":
        run_weights(args.studies, args.output, mode=args.mode, model=args.model)
    elif args.command == "simulate":
        params = DGPParams(
            theta_star=args.theta_star,
            beta=args.beta,
            var_z=args.var_z,
            var_y=args.var_y,
            n_old=args.n_old,
            n_new=args.n_new,
            seed=args.seed,
            reported_se=args.reported_se,
        )
        simulate_to_dir(
            args.output,
            args.scenario,
            params,
            kappa_old_after=args.kappa_old_after,
            tau=args.tau,
        )
    elif args.command == "sweep":
        run_sweep(
            args.studies,
            args.config,
            args.output,
            param=args.param,
            values=args.values,
            focus_step=args.focus_step,
        )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logging.captureWarnings(True)

    try:
        _dispatch(args)
    except InputError as exc:
        print(f"meta-trace: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"meta-trace: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"meta-trace: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

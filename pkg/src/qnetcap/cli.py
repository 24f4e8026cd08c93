"""Command-line driver: capacity surfaces, trajectories, verification, models.

Exit codes: 0 success, 1 validation error, 2 numerical failure.  Output
tables are CSV; a rendered figure is written next to each table unless
``--no-plot`` is given.  Identical invocations (including ``--seed``)
produce byte-identical tables.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import __version__, plotting, report, verify
from .capacity import OptimizerOptions
from .dynamics import IntegratorError
from .modelio import BUILTIN_MODELS, builtin_model, parse_config, write_table

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


class CliError(Exception):
    """Invalid command line; maps to the validation exit code."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _add_optimizer_flags(parser):
    parser.add_argument("--seed", type=int, default=7,
                        help="base seed for the multistart optimizers")
    parser.add_argument("--restarts", type=int, default=3,
                        help="random restarts per optimization (plus informed starts)")
    parser.add_argument("--ensemble-size", type=int, default=4,
                        help="states per ensemble in the Holevo maximization")
    parser.add_argument("--allow-unconverged", action="store_true",
                        help="report unconverged cells instead of failing")


def _add_output_flags(parser):
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument("--plot", default=True, action=argparse.BooleanOptionalAction,
                        help="render a PNG figure next to the CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qnetcap", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qnetcap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    surface = sub.add_parser("surface", help="capacity surface over an (eta, s) grid")
    surface.add_argument("--eta-steps", type=int, default=21)
    surface.add_argument("--s-steps", type=int, default=21)
    _add_output_flags(surface)
    _add_optimizer_flags(surface)
    surface.set_defaults(handler=cmd_surface)

    traj = sub.add_parser("trajectory",
                          help="channel parameters and capacities along network evolution")
    source = traj.add_mutually_exclusive_group(required=True)
    source.add_argument("--model", choices=sorted(BUILTIN_MODELS),
                        help="bundled model name")
    source.add_argument("--config", help="path to a config document")
    traj.add_argument("--t-max", type=float, default=None,
                      help="sweep end time (default: integrator t_max)")
    traj.add_argument("--t-steps", type=int, default=None,
                      help="number of grid points (default: sweep setting)")
    traj.add_argument("--dephasing-scale", type=float, default=None,
                      help="multiplies every site dephasing rate")
    _add_output_flags(traj)
    _add_optimizer_flags(traj)
    traj.set_defaults(handler=cmd_trajectory)

    ver = sub.add_parser("verify", help="run the cross-module invariant suite")
    ver.add_argument("--level", choices=("fast", "full"), default="fast")
    ver.set_defaults(handler=cmd_verify)

    models = sub.add_parser("models", help="list bundled models")
    models.add_argument("--json", action="store_true", dest="as_json",
                        help="machine-readable listing")
    models.set_defaults(handler=cmd_models)
    return parser


def _optimizer_options(args) -> OptimizerOptions:
    try:
        return OptimizerOptions(restarts=args.restarts,
                                ensemble_size=args.ensemble_size, seed=args.seed)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _finish_report(args, table, unconverged, figure_builder) -> int:
    write_table(table, args.out)
    print(f"wrote {args.out} ({len(table.rows)} rows)")
    if args.plot:
        path = plotting.save_figure(figure_builder(table), plotting.figure_path(args.out))
        print(f"wrote {path}")
    if unconverged and not args.allow_unconverged:
        cells = ", ".join(str(c) for c in unconverged[:5])
        print(f"numerical failure: {len(unconverged)} unconverged cells ({cells} ...)",
              file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_surface(args) -> int:
    if args.eta_steps < 2 or args.s_steps < 2:
        raise CliError("--eta-steps and --s-steps must be at least 2")
    result = report.surface_report(args.eta_steps, args.s_steps, _optimizer_options(args))
    return _finish_report(args, result.table, result.unconverged, plotting.surface_figure)


def cmd_trajectory(args) -> int:
    if args.model is not None:
        text = builtin_model(args.model)
    else:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise CliError(f"cannot read config: {exc}") from exc
    spec, cfg, sweep = parse_config(text)

    scale = args.dephasing_scale if args.dephasing_scale is not None else sweep.dephasing_scale
    if scale < 0.0:
        raise CliError("--dephasing-scale must be nonnegative")
    spec = replace(spec, gamma_deph=tuple(scale * g for g in spec.gamma_deph))
    t_max = args.t_max if args.t_max is not None else cfg.t_max
    if args.t_max is not None and args.t_max > cfg.t_max:
        cfg = replace(cfg, t_max=args.t_max)
    t_steps = args.t_steps if args.t_steps is not None else sweep.t_steps
    if t_steps < 1:
        raise CliError("--t-steps must be at least 1")

    table, unconverged = report.trajectory_report(
        spec, cfg, t_max, t_steps, _optimizer_options(args)
    )
    return _finish_report(args, table, unconverged, plotting.trajectory_figure)


def cmd_verify(args) -> int:
    results = verify.run_checks(args.level)
    for check in results:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.name}: {check.detail}")
    failed = [c for c in results if not c.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_NUMERICAL


def cmd_models(args) -> int:
    if args.as_json:
        listing = [{"name": name, "description": desc}
                   for name, desc in BUILTIN_MODELS.items()]
        print(json.dumps(listing, indent=2))
    else:
        for name, desc in BUILTIN_MODELS.items():
            print(f"{name:10s} {desc}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except IntegratorError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

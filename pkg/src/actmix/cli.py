"""Command-line entry point.

Subcommands:
  run <config.json>            execute an experiment config
  gradcheck                    finite-difference check of the gradients
  paramcount <config.json>     parameter count of the configured network
  export-surface <ckpt> <fn>   grid predictions of a saved model

Exit codes: 0 success, 1 configuration/usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .benchmarks import DomainError, get_function
from .config import ConfigError, load_config
from .gradcheck import run_standard_check
from .harness import export_surface, run
from .linalg import ShapeError
from .network import Network
from .optim import TrainingDiverged
from .timeseries import DataError, SchemaError

GRADCHECK_TOLERANCE = 1e-6


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _build_parser() -> _Parser:
    parser = _Parser(prog="actmix", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("config", help="path to a JSON experiment config")
    p_run.add_argument("--out", help="override the config's output directory")
    p_run.add_argument("--seed", type=int, help="override the config's seed")
    p_run.add_argument("--threads", type=int, default=1,
                       help="worker threads (pentagon sweep only)")

    p_grad = sub.add_parser("gradcheck", help="finite-difference gradient check")
    p_grad.add_argument("--settings", type=int, default=20,
                        help="number of random parameter settings")

    p_count = sub.add_parser("paramcount", help="parameter count of a config's network")
    p_count.add_argument("config")

    p_surf = sub.add_parser("export-surface", help="grid predictions of a checkpoint")
    p_surf.add_argument("checkpoint")
    p_surf.add_argument("function")
    p_surf.add_argument("--out", default=".")
    p_surf.add_argument("--resolution", type=int, default=101)

    p_series = sub.add_parser("make-series",
                              help="write a synthetic periodic CSV for forecast runs")
    p_series.add_argument("path")
    p_series.add_argument("--rows", type=int, default=5000)
    p_series.add_argument("--features", type=int, default=2)
    p_series.add_argument("--periods", type=float, nargs=2, default=(23.0, 37.2163521))
    p_series.add_argument("--noise", type=float, default=0.05)
    p_series.add_argument("--seed", type=int, default=99)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        return _dispatch(args)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ConfigError, SchemaError, FileNotFoundError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except (TrainingDiverged, DataError, DomainError, ShapeError, OSError) as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "run":
        cfg = load_config(args.config)
        if args.out is not None:
            cfg["output"] = args.out
        if args.seed is not None:
            cfg["seed"] = args.seed
        report = run(cfg, threads=args.threads)
        print(json.dumps({k: report[k] for k in ("kind", "eval_mse", "eval_mae")
                          if k in report}, sort_keys=True))
        print(f"report written to {os.path.join(cfg['output'], 'report.json')}")
        return 0

    if args.command == "gradcheck":
        worst = run_standard_check(settings=args.settings)
        print(f"max relative gradient error: {worst:.3e}")
        return 0 if worst < GRADCHECK_TOLERANCE else 2

    if args.command == "paramcount":
        from .harness import build_network

        cfg = load_config(args.config)
        if cfg["kind"] == "forecast":
            fcfg = cfg["forecast"]
            n_feat = 7 if fcfg["columns"] == "ett" else None
            if n_feat is None:
                raise ConfigError("paramcount on forecast configs requires the ett layout")
            in_dim = fcfg["history"] * n_feat
            out_dim = fcfg["horizon"] * n_feat
        else:
            in_dim, out_dim = cfg["data"]["dim"], 1
        net = build_network(cfg, in_dim=in_dim, out_dim=out_dim)
        total, breakdown = net.count_parameters()
        for entry in breakdown:
            print(
                f"layer {entry['layer']}: weights+biases {entry['weights_biases']},"
                f" activation {entry['activation']}"
            )
        print(total)
        return 0

    if args.command == "export-surface":
        net = Network.load(args.checkpoint)
        fn = get_function(args.function, dim=2)
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "surface.csv")
        export_surface(net, fn, path, args.resolution)
        print(f"surface written to {path}")
        return 0

    if args.command == "make-series":
        from .timeseries import make_periodic_series, save_csv

        series = make_periodic_series(
            args.rows, args.features, tuple(args.periods), args.noise, args.seed
        )
        save_csv(series, args.path)
        print(f"{args.rows} rows x {args.features} features written to {args.path}")
        return 0

    raise _UsageError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())

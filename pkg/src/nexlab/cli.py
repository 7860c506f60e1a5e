"""Command-line front end.

Subcommands map one-to-one onto the experiment presets; `report` runs
whatever preset the given config file selects.  Flags override config
fields.  Exit codes: 0 success, 2 config error, 3 numeric failure,
4 format error.
"""

from __future__ import annotations

import argparse
import sys

from .config import ExperimentConfig
from .errors import (ConfigError, ConsistencyError, DerivationError,
                     DomainError, FitError, FormatError, NexlabError,
                     ObstructionError, ResolutionError, StrategyStuckError)
from .experiments import run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_FORMAT = 4

_NUMERIC_ERRORS = (ConsistencyError, DerivationError, DomainError, FitError,
                   ObstructionError, ResolutionError, StrategyStuckError)


def _add_common_flags(p):
    p.add_argument("--theta", help="rotation number in (0,1), or 'golden'")
    p.add_argument("--c-re", type=float, help="real part of c (centered form)")
    p.add_argument("--c-im", type=float, help="imaginary part of c")
    p.add_argument("--res", type=int, help="raster resolution (square)")
    p.add_argument("--max-iter", type=int, help="escape-time iteration cap")
    p.add_argument("--radii", help="comma-separated decreasing radii")
    p.add_argument("--depth", type=int, help="backward depth / lift depth")
    p.add_argument("--cloud", type=int, help="boundary cloud size")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--out", help="output directory")
    p.add_argument("--config", help="JSON config file (flags override it)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nexlab",
        description="Numerical experiments on backward-orbit geometry of "
                    "quadratic Julia sets")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("raster", "deepness", "leafcheck", "rays", "regularity",
                 "feigenbaum", "report"):
        p = sub.add_parser(name)
        _add_common_flags(p)
    return parser


def _config_from_args(args):
    if args.config:
        cfg = ExperimentConfig.from_json(args.config)
    else:
        cfg = ExperimentConfig()
    command = args.command
    if command == "deepness":
        # Siegel deepness by default; a pure-c invocation means Feigenbaum.
        if args.theta is None and (args.c_re is not None or
                                   cfg.preset == "feigenbaum-deepness"):
            cfg.preset = "feigenbaum-deepness"
        else:
            cfg.preset = "siegel-deepness"
    elif command != "report":
        cfg.preset = command
    if args.theta is not None:
        cfg.theta = args.theta if args.theta == "golden" else float(args.theta)
    if args.c_re is not None or args.c_im is not None:
        cfg.c = (args.c_re or 0.0, args.c_im or 0.0)
        if args.theta is None:
            cfg.theta = None
    if args.res is not None:
        cfg.res = args.res
    if args.max_iter is not None:
        cfg.max_iter = args.max_iter
    if args.radii is not None:
        try:
            cfg.radii = tuple(float(r) for r in args.radii.split(","))
        except ValueError as exc:
            raise ConfigError(f"bad --radii value: {exc}") from exc
    if args.depth is not None:
        cfg.depth = args.depth
        cfg.n = args.depth
    if args.cloud is not None:
        cfg.cloud = args.cloud
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    return cfg.validate()


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FormatError as exc:
        print(f"format error: {exc} (byte offset {exc.offset})",
              file=sys.stderr)
        return EXIT_FORMAT
    except _NUMERIC_ERRORS as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except NexlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

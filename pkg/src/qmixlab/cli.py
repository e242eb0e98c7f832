"""Command line entry point: `qmixlab <subcommand> [flags]`.

Each subcommand runs one family of checks (`suite` runs the configured
set), writes CSV tables, the report and optional SVG figures under --out,
and exits 0 (pass), 1 (assertion failure), 2 (configuration error) or
3 (numerical failure)."""

from __future__ import annotations

import argparse
import sys

from .config import SuiteConfig, load_config
from .errors import ConfigError
from .suite import EXIT_CONFIG, run_suite

FAMILIES = {
    "specwin": ("specwin",),
    "kernel": ("kernel",),
    "weight": ("weight",),
    "mix": ("mix",),
    "models": ("models",),
    "bound": ("bound", "spectrum"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="configuration file (section.key = value)")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--seed", type=int, metavar="U64", help="random seed")
    common.add_argument("--tol", type=float, metavar="REAL", help="quadrature tolerance")
    common.add_argument("--jobs", type=int, metavar="N", help="worker threads")
    common.add_argument("--format", choices=("csv", "json"), help="report format")
    common.add_argument("--plots", action="store_true", default=None, help="write SVG figures")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one configuration value (repeatable)")
    common.add_argument("--print-config", action="store_true",
                        help="print the effective configuration and exit")
    parser = argparse.ArgumentParser(prog="qmixlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*FAMILIES, "suite"):
        sub.add_parser(name, parents=[common])
    return parser


def effective_config(args) -> SuiteConfig:
    cfg = load_config(args.config) if args.config else SuiteConfig()
    for item in args.set:
        if "=" not in item:
            raise ConfigError("expected SECTION.KEY=VALUE", key=item)
        key, value = (p.strip() for p in item.split("=", 1))
        cfg = cfg.with_value(key, value)
    for flag, key in (("out", "suite.out"), ("seed", "suite.seed"), ("tol", "suite.tol"),
                      ("jobs", "suite.jobs"), ("format", "suite.format"), ("plots", "suite.plots")):
        v = getattr(args, flag)
        if v is not None:
            cfg = cfg.with_value(key, v)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = effective_config(args)
        if args.print_config:
            sys.stdout.write(cfg.dump())
            return 0
        if args.command == "suite":
            checks = cfg.checks
        else:
            prefixes = FAMILIES[args.command]
            checks = tuple(c for c in cfg.checks if c.split(".")[0] in prefixes)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    code, results = run_suite(cfg, checks)
    for r in results:
        print(f"{r.check_id}: {r.status}")
    print(f"report: {cfg.get('suite', 'out')}/report.{cfg.get('suite', 'format')}")
    return code


if __name__ == "__main__":
    sys.exit(main())

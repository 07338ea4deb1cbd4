"""Command line: ``fitted-mpfa solve ...`` and ``fitted-mpfa dump ...``."""

from __future__ import annotations

import argparse
import logging
import sys

from .experiment import PRESETS, ConfigError, dump_surface, make_config, parse_overrides, run_experiment
from .schemes import SCHEMES


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--config", help="flat key=value configuration file")
    p.add_argument("--scheme", choices=SCHEMES, action="append", help="repeatable; overrides the preset")
    p.add_argument("--n", type=int, action="append", help="grid size N, repeatable")
    p.add_argument("--theta", type=float)
    p.add_argument("--dtau", type=float)
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override any config field")
    p.add_argument("--out", required=True)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fitted-mpfa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("solve", help="append rel-L2 error rows to a CSV table"))
    dump = sub.add_parser("dump", help="write 'x y numeric analytic' rows for one scheme and N")
    _common(dump)
    dump.add_argument("--analytic-only", action="store_true")
    return parser


def _config(args):
    over = parse_overrides(args.set)
    if args.scheme:
        over["schemes"] = tuple(args.scheme)
    if args.n:
        over["n_list"] = tuple(args.n)
    over["theta"] = args.theta
    over["dtau"] = args.dtau
    return make_config(args.preset, args.config, **over)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _config(args)
        if args.command == "solve":
            for row in run_experiment(cfg.replace(out=args.out)):
                print(f"{row['scheme']:<16} N={row['N']:<4} rel_l2={row['rel_l2']:.6f} "
                      f"max_abs={row['max_abs']:.4g} {row['seconds']:.2f}s")
        else:
            dump_surface(cfg, cfg.schemes[0], cfg.n_list[0], args.out, args.analytic_only)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

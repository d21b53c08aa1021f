"""Command-line entry point: ``privcode bounds|codec|example1|example2|selftest``."""

from __future__ import annotations

import argparse
import json
import sys

from .dist import load_joint
from .errors import PrivcodeError
from .experiments import (
    run_bounds,
    run_codec,
    run_example1,
    run_example2,
    run_selftest,
    timed,
)
from .separation import functional_separation, separation_from_dict


def _load_sep(arg, j, functional=False):
    if arg is None:
        return None
    if arg == "auto":
        return functional_separation(j.p_x) if functional else None
    with open(arg, encoding="utf-8") as fh:
        return separation_from_dict(json.load(fh), j)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="privcode", description=__doc__)
    parser.add_argument("--timing", action="store_true",
                        help="include wall-clock seconds in the report")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="evaluate every applicable length bound")
    p.add_argument("--dist", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--sep", help="separation JSON for the fixed-split bounds")
    p.add_argument("--functional", help="'auto' or a grid JSON on which X2 = f(X1)")

    p = sub.add_parser("codec", help="build a keyed codec and audit it exactly")
    p.add_argument("--dist", required=True)
    p.add_argument("--scheme", choices=("eps", "split", "functional"), required=True)
    p.add_argument("--sep", default="auto")
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--umode", choices=("huffman", "fixed"), default="huffman")
    p.add_argument("--variant", choices=("otp-X2", "otp-X1"), default="otp-X2")

    p = sub.add_parser("example1", help="binomial example: bounds and audited length")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--eps", type=float, default=0.5)

    sub.add_parser("example2", help="twelve-symbol separation example")

    p = sub.add_parser("selftest", help="seeded invariant sweep")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=200)
    return parser


def run(args) -> tuple[int, str]:
    if args.command == "bounds":
        j = load_joint(args.dist)
        sep = _load_sep(args.sep, j)
        func = _load_sep(args.functional, j, functional=True)
        inputs = {"dist": j.to_dict(), "eps": args.eps, "sep": args.sep,
                  "functional": args.functional}
        report = timed(run_bounds, j, args.eps, inputs, sep, func, timing=args.timing)
        if args.format == "csv":
            return report.exit_code(), report.bounds.to_csv()
    elif args.command == "codec":
        j = load_joint(args.dist)
        sep = None if args.sep == "auto" else _load_sep(args.sep, j)
        inputs = {"dist": j.to_dict(), "scheme": args.scheme, "sep": args.sep,
                  "eps": args.eps, "seed": args.seed, "u_mode": args.umode,
                  "variant": args.variant}
        report = timed(run_codec, j, args.scheme, args.eps, args.seed, args.umode, sep,
                       args.variant, inputs, timing=args.timing)
    elif args.command == "example1":
        report = timed(run_example1, args.n, args.eps, timing=args.timing)
    elif args.command == "example2":
        report = timed(run_example2, timing=args.timing)
    else:
        report = timed(run_selftest, args.seed, args.trials, timing=args.timing)
    return report.exit_code(), report.to_json() + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code, text = run(args)
    except (PrivcodeError, OSError, ValueError) as exc:
        print(f"privcode: error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

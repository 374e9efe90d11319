"""Command-line driver: ``structcps compile|run|check FILE``."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .frontend import ParseError, ScopeError, UnsupportedFeature, compile_source
from .normalize import DEFAULT_MAX_STEPS, BudgetExceeded, HoleInTerm, Stuck, apply_cps, beta_eta_normalize
from .term import render_json, render_text

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_SCOPE, EXIT_STUCK, EXIT_BUDGET = range(6)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="structcps", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("input", help="source file, or - for stdin")
        p.add_argument("--eval-order", choices=("ltr", "rtl"), default="ltr")

    p = sub.add_parser("compile", help="compile to a CPS lambda term")
    common(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--normalize", action="store_true", help="beta-eta normalize the term")
    p.add_argument("--max-steps", type=_positive, default=DEFAULT_MAX_STEPS)

    p = sub.add_parser("run", help="compile and evaluate, applying the result to --args")
    common(p)
    p.add_argument("--args", type=_int_list, default=[])
    p.add_argument("--max-steps", type=_positive, default=DEFAULT_MAX_STEPS)

    p = sub.add_parser("check", help="parse and scope-check only")
    common(p)
    return parser


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as f:
        return f.read()


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    name = "<stdin>" if args.input == "-" else args.input
    try:
        source = _read(args.input)
    except OSError as e:
        print(f"structcps: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        term = compile_source(source, eval_order=args.eval_order)
    except ParseError as e:
        print(f"{name}:{e.pos[0]}:{e.pos[1]}: {e.message}", file=sys.stderr)
        return EXIT_PARSE
    except (ScopeError, UnsupportedFeature) as e:
        print(f"{name}:{e.pos[0]}:{e.pos[1]}: {e.detail}", file=sys.stderr)
        return EXIT_SCOPE

    if args.command == "check":
        print("ok")
        return EXIT_OK

    try:
        if args.command == "compile":
            if args.normalize:
                term = beta_eta_normalize(term, args.max_steps)
            out = render_json(term) if args.format == "json" else render_text(term)
        else:
            out = str(apply_cps(term, args.args, args.max_steps))
    except BudgetExceeded as e:
        print(f"{name}: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (Stuck, HoleInTerm) as e:
        print(f"{name}: stuck: {e}", file=sys.stderr)
        return EXIT_STUCK
    sys.stdout.write(out + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

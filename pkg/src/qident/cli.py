"""Command-line front end: ``qident list|show|eval|verify|verify-all|report``."""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

import mpmath
from mpmath import mp

from .catalog import Catalog, catalog_path
from .errors import QIdentError, SamplingExhaustedError
from .expr import Evaluator, parse
from .qcore import GUARD_DIGITS, TruncationControl
from .verifier import SampleConfig, load_reports, report_emit, verify_all
from .verifier.verify import fmt

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_EXHAUSTED = 0, 1, 2, 3

_IMAG_SUFFIX = re.compile(r"(\d(?:\.\d*)?(?:[eE][-+]?\d+)?)\s*[ij]\b")


class ConfigError(Exception):
    pass


def _load_catalog() -> Catalog:
    return Catalog.from_path(catalog_path())


def _value(text: str, env: dict, ctl):
    """A number such as ``0.3+0.1i``, or any constant DSL expression."""
    return Evaluator(env, ctl)(parse(_IMAG_SUFFIX.sub(r"\1*i", text)))


def cmd_list(args) -> int:
    for ident in _load_catalog():
        alias = f"  [{', '.join(ident.aliases)}]" if ident.aliases else ""
        print(f"{ident.id:6} {ident.paper_label}{alias}")
    return EXIT_OK


def cmd_show(args) -> int:
    ident = _load_catalog().get(args.id)
    if ident.source and Path(ident.source).is_file():
        print(Path(ident.source).read_text(encoding="utf-8"), end="")
    else:
        print(f"id: {ident.id}\npaper: {ident.paper_label}")
    extra = [c.describe() for c in ident.auto_constraints]
    if extra:
        print(f"# {len(extra)} implied constraints:")
        for line in extra:
            print(f"#   {line}")
    return EXIT_OK


def cmd_eval(args) -> int:
    digits = args.digits
    ctl = TruncationControl.for_digits(digits)
    with mp.workdps(digits + GUARD_DIGITS):
        env: dict = {}
        for item in args.set or []:
            name, eq, text = item.partition("=")
            if not eq or not name.strip():
                raise ConfigError(f"--set expects name=value, got {item!r}")
            env[name.strip()] = _value(text, env, ctl)
        if "q" in env and not 0 < abs(env["q"]) < 1:
            raise ConfigError("q must satisfy 0 < |q| < 1")
        value = Evaluator(env, ctl)(parse(args.expr))
    re_, im = fmt(value, digits).split(",")
    print(mpmath.nstr(mpmath.mpc(re_, im), digits))
    return EXIT_OK


def _config(args) -> SampleConfig:
    try:
        return SampleConfig(
            seed=args.seed,
            trials=args.trials,
            digits=args.digits,
            margin=args.margin,
            complex_q=args.complex_q,
            workers=args.workers,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _run(args, ids) -> int:
    cfg = _config(args)
    catalog = _load_catalog()
    reports = verify_all(cfg, catalog, ids)
    for r in reports:
        agg = r.aggregate()
        if r.exhausted:
            line = f"{r.id:6} EXHAUSTED  {r.error}"
        else:
            status = "PASS" if r.passed else "FAIL"
            worst = agg["max_rel_error"]
            worst = "-" if worst is None else f"{worst:.2e}"
            line = (
                f"{r.id:6} {status}  pass {agg['pass_count']}/{len(r.trials)}"
                f"  skipped {agg['skipped_count']}  max rel err {worst}"
            )
            neg = r.negative_result()
            if neg:
                line += f"  negative variant fails {neg['failed']}/{neg['evaluated']}"
        print(line)
    if args.json:
        report_emit(reports, "json", args.json)
    if args.markdown:
        report_emit(reports, "markdown", args.markdown)
    if any(r.exhausted for r in reports):
        return EXIT_EXHAUSTED
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_verify(args) -> int:
    return _run(args, [args.id])


def cmd_verify_all(args) -> int:
    return _run(args, args.ids or None)


def cmd_report(args) -> int:
    text = report_emit(load_reports(args.input), args.format, args.out)
    if args.out is None:
        print(text, end="")
    return EXIT_OK


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qident", description=__doc__.split(":")[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list catalog identities").set_defaults(fn=cmd_list)

    s = sub.add_parser("show", help="print one catalog entry")
    s.add_argument("id")
    s.set_defaults(fn=cmd_show)

    s = sub.add_parser("eval", help="evaluate a DSL expression")
    s.add_argument("expr")
    s.add_argument("--set", action="append", metavar="NAME=VALUE")
    s.add_argument("--digits", type=int, default=30)
    s.set_defaults(fn=cmd_eval)

    def run_options(s):
        s.add_argument("--trials", type=int, default=10)
        s.add_argument("--digits", type=int, default=30)
        s.add_argument("--seed", type=_seed, default=0)
        s.add_argument("--margin", type=float, default=0.2)
        s.add_argument("--complex-q", action="store_true")
        s.add_argument("--workers", type=int, default=1)
        s.add_argument("--json", metavar="PATH")
        s.add_argument("--markdown", metavar="PATH")

    s = sub.add_parser("verify", help="verify one identity")
    s.add_argument("id")
    run_options(s)
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("verify-all", help="verify the whole catalog")
    s.add_argument("ids", nargs="*", help="restrict to these ids")
    run_options(s)
    s.set_defaults(fn=cmd_verify_all)

    s = sub.add_parser("report", help="render a saved JSON report")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--format", choices=("json", "markdown"), default="markdown")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SamplingExhaustedError as exc:
        print(f"qident: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except (ConfigError, QIdentError, OSError, ValueError) as exc:
        print(f"qident: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

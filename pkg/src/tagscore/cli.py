"""
Command-line front end.

    tagscore score    --inventory INV --key KEY --answers ANS [--mode exact]
    tagscore kappa    --inventory INV --ann1 A1 --ann2 A2 [--pooled]
    tagscore validate --inventory INV [--key KEY] [--answers ANS] [--ann1 A1] [--ann2 A2]

Reports go to stdout, diagnostics to stderr. Exit status is 0 on success,
1 when an input file is invalid, 2 on usage errors (including unreadable
files).
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import formats
from .agreement import PER_LEXEME, POOLED, AgreementError, kappa_run
from .formats import ParseError
from .scoring import EXACT, HIERARCHICAL, ScoringError, score_run
from .tagtree import InventoryError

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def render(value: Fraction, precision: int = 6) -> str:
    """Fixed-point rendering of an exact rational, rounding half to even."""
    scaled = round(Fraction(value) * 10**precision)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(precision + 1, "0")
    return f"{sign}{digits[:-precision]}.{digits[-precision:]}"


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8", newline="") as f:
            return f.read()
    except UnicodeDecodeError as e:
        raise ParseError(path, 0, "encoding", f"not valid UTF-8: {e.reason}") from None
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


class _Writer:
    def __init__(self, args, out):
        self.sep = "\t" if args.format == "tsv" else " "
        self.precision = args.precision
        self.fractions = args.fractions
        self.out = out

    def num(self, value: Optional[Fraction]) -> list[str]:
        if value is None:
            return ["NA"] + (["NA"] if self.fractions else [])
        cells = [render(value, self.precision)]
        if self.fractions:
            cells.append(str(value))
        return cells

    def row(self, *cells):
        flat = []
        for c in cells:
            flat.extend(c if isinstance(c, list) else [str(c)])
        self.out.write(self.sep.join(flat) + "\n")


def run_score(args, out=None) -> int:
    out = out or sys.stdout
    inv = formats.parse_inventory_file(_read(args.inventory), args.inventory)
    key = formats.parse_key_file(_read(args.key), inv, args.key)
    answers = formats.parse_answer_file(_read(args.answers), inv, args.answers,
                                        renormalize=args.renormalize)
    report = score_run(inv, key, answers, mode=args.mode)
    w = _Writer(args, out)
    if args.per_instance:
        for inst, s in report.per_instance:
            w.row(inst.lexeme, inst.instance_id, w.num(s))
    for lexeme, (n, mean) in report.per_lexeme.items():
        w.row("LEXEME", lexeme, n, w.num(mean))
    for inst in report.skipped:
        w.row("MISSING", inst.lexeme, inst.instance_id)
    n, mean = report.overall
    w.row("OVERALL", n, w.num(mean))
    return EXIT_OK


def run_kappa(args, out=None, err=None) -> int:
    out, err = out or sys.stdout, err or sys.stderr
    inv = formats.parse_inventory_file(_read(args.inventory), args.inventory)
    ann1 = dict(formats.parse_key_file(_read(args.ann1), inv, args.ann1))
    ann2 = dict(formats.parse_key_file(_read(args.ann2), inv, args.ann2))
    if ann1.keys() != ann2.keys():
        for inst in sorted(ann1.keys() - ann2.keys()):
            print(f"{args.ann1}: instance {inst} not annotated in {args.ann2}", file=err)
        for inst in sorted(ann2.keys() - ann1.keys()):
            print(f"{args.ann2}: instance {inst} not annotated in {args.ann1}", file=err)
        return EXIT_INVALID
    pairs = [(inst, ann1[inst], ann2[inst]) for inst in sorted(ann1)]
    reports = kappa_run(inv, pairs, PER_LEXEME)
    if args.pooled:
        reports += kappa_run(inv, pairs, POOLED)
    w = _Writer(args, out)
    if args.per_instance:
        for r in reports[:-1] if args.pooled else reports:
            for inst, agreement in r.per_instance:
                w.row(inst.lexeme, inst.instance_id, w.num(agreement))
    for r in reports:
        name = "POOLED" if r.scope == POOLED else r.scope
        w.row(name, r.n_instances, w.num(r.pr_a), w.num(r.pr_e), w.num(r.kappa))
    return EXIT_OK


def run_validate(args, out=None) -> int:
    out = out or sys.stdout
    status = EXIT_OK

    def report(path, errors):
        nonlocal status
        if errors:
            status = EXIT_INVALID
            for e in errors:
                out.write(f"{e}\n")
        else:
            out.write(f"{path}: OK\n")

    def load(path):
        try:
            return _read(path)
        except ParseError as e:
            report(path, [e])
            return None

    text = load(args.inventory)
    inv = None
    if text is not None:
        inv, errors = formats.read_inventory(text, args.inventory)
        report(args.inventory, errors)
    others = [(p, "key") for p in (args.key, args.ann1, args.ann2) if p]
    if args.answers:
        others.append((args.answers, "answers"))
    for path, kind in others:
        if inv is None:
            out.write(f"{path}: not checked (inventory invalid)\n")
            status = EXIT_INVALID
            continue
        text = load(path)
        if text is None:
            continue
        if kind == "key":
            _, errors = formats.read_key(text, inv, path)
        else:
            _, errors = formats.read_answers(text, inv, path, args.renormalize)
        report(path, errors)
    return status


def _precision(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("precision must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tagscore",
        description="Score taggers and measure annotator agreement over hierarchical tag sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--inventory", required=True, help="tag inventory file")
        p.add_argument("--format", choices=("text", "tsv"), default="text",
                       help="space- or tab-separated report (default: text)")
        p.add_argument("--precision", type=_precision, default=6,
                       help="decimal digits in reported values (default: 6)")
        p.add_argument("--fractions", action="store_true",
                       help="also print each value as an exact fraction")

    p = sub.add_parser("score", help="score tagger answers against a gold key")
    common(p)
    p.add_argument("--key", required=True)
    p.add_argument("--answers", required=True)
    p.add_argument("--mode", choices=(HIERARCHICAL, EXACT), default=HIERARCHICAL)
    p.add_argument("--renormalize", action="store_true",
                   help="rescale probabilistic answers that do not sum to 1")
    p.add_argument("--per-instance", action="store_true",
                   help="print one line per scored instance")
    p.set_defaults(func=run_score)

    p = sub.add_parser("kappa", help="inter-annotator kappa over two key-format files")
    common(p)
    p.add_argument("--ann1", required=True)
    p.add_argument("--ann2", required=True)
    p.add_argument("--pooled", action="store_true",
                   help="add a corpus-level line after the per-lexeme lines")
    p.add_argument("--per-instance", action="store_true",
                   help="print each instance's observed agreement (leaf inner product)")
    p.set_defaults(func=run_kappa)

    p = sub.add_parser("validate", help="check input files and list every problem")
    common(p)
    p.add_argument("--key")
    p.add_argument("--answers")
    p.add_argument("--ann1")
    p.add_argument("--ann2")
    p.add_argument("--renormalize", action="store_true")
    p.set_defaults(func=run_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as e:
        print(f"tagscore: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, InventoryError, ScoringError, AgreementError) as e:
        print(f"tagscore: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

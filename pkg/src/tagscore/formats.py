"""
Readers and writers for the three tab-separated input formats.

Inventory::

    lexeme<TAB>tag<TAB>parent[<TAB>weight]      parent "-" means top level

Key (gold annotations; several tags are alternatives)::

    lexeme<TAB>instance_id<TAB>tag( tag)*

Answers (tagger output; plain tags get uniform mass)::

    lexeme<TAB>instance_id<TAB>tag[:prob]( tag[:prob])*

Probabilities and weights are decimals (``0.25``) or fractions (``1/3``).
Lines starting with ``#`` and empty lines are ignored everywhere. Fields
are separated by exactly one tab and tags by exactly one space; stray
whitespace is an error rather than being stripped.

Each ``parse_*`` function raises the first :class:`ParseError` it finds;
the matching ``read_*`` function returns everything it could parse
together with the full list of errors.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .scoring import (SUM_TOLERANCE, Instance, OutputDistribution, ScoringError,
                      make_distribution, normalize_output)
from .tagtree import ROOT_MARKER, InventoryError, TagInventory, build_inventory, check_token

_DECIMAL = re.compile(r"-?(?:\d+(?:\.\d*)?|\.\d+)")
_FRACTION = re.compile(r"-?\d+/\d+")


class ParseError(ValueError):
    """A problem at a specific line of an input file (line 0: the whole file)."""

    def __init__(self, path: str, line: int, kind: str, message: str):
        super().__init__(message)
        self.path = path
        self.line = line
        self.kind = kind
        self.message = message

    def __str__(self):
        return f"{self.path}:{self.line}: {self.kind}: {self.message}"


def parse_number(text: str) -> tuple[Fraction, bool]:
    """Parse ``0.25``/``1/3`` exactly; returns (value, is_decimal).

    Raises ``ValueError`` on any other syntax. The decimal point is always
    ``.`` regardless of locale.
    """
    if _DECIMAL.fullmatch(text):
        return Fraction(text), True
    if _FRACTION.fullmatch(text):
        num, den = text.split("/")
        if int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den)), False
    raise ValueError(f"not a number: {text!r}")


def _records(text: str, path: str, nfields: tuple[int, ...],
             errors: list[ParseError]) -> Iterator[tuple[int, list[str]]]:
    """Yield (line number, fields) for every data line, logging format errors."""
    if text.startswith("\ufeff"):
        errors.append(ParseError(path, 1, "bom", "file starts with a byte-order mark"))
        text = text[1:]
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for lineno, line in enumerate(lines, 1):
        if line.endswith("\r"):
            line = line[:-1]
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) not in nfields:
            want = " or ".join(map(str, nfields))
            errors.append(ParseError(path, lineno, "field-count",
                                     f"expected {want} tab-separated fields, got {len(fields)}"))
            continue
        if any(f != f.strip() for f in fields):
            kind = ("trailing-whitespace" if any(f != f.rstrip() for f in fields)
                    else "stray-whitespace")
            errors.append(ParseError(path, lineno, kind, "field has leading or trailing whitespace"))
            continue
        yield lineno, fields


def _token(value: str, what: str, path: str, lineno: int, errors: list) -> bool:
    try:
        check_token(value, what)
    except InventoryError as e:
        errors.append(ParseError(path, lineno, e.kind, str(e)))
        return False
    return True


def _first(errors: list[ParseError]):
    if errors:
        raise errors[0]


# -- inventory ---------------------------------------------------------------

def read_inventory(text: str, path: str = "<inventory>"
                   ) -> tuple[Optional[TagInventory], list[ParseError]]:
    errors: list[ParseError] = []
    records = []
    where: dict[tuple[str, str], int] = {}
    for lineno, fields in _records(text, path, (3, 4), errors):
        lexeme, tag, parent = fields[:3]
        ok = _token(lexeme, "lexeme", path, lineno, errors)
        ok = _token(tag, "tag", path, lineno, errors) and ok
        if parent != ROOT_MARKER:
            ok = _token(parent, "tag", path, lineno, errors) and ok
        weight = None
        if len(fields) == 4:
            try:
                weight, _ = parse_number(fields[3])
                if weight <= 0:
                    raise ValueError(f"weight must be positive, got {fields[3]!r}")
            except ValueError as e:
                errors.append(ParseError(path, lineno, "invalid-weight", str(e)))
                ok = False
        if not ok:
            continue
        if (lexeme, tag) in where:
            errors.append(ParseError(path, lineno, "duplicate-tag",
                                     f"tag {tag!r} of lexeme {lexeme!r} already defined "
                                     f"on line {where[lexeme, tag]}"))
            continue
        where[lexeme, tag] = lineno
        records.append((lexeme, tag, None if parent == ROOT_MARKER else parent, weight))

    if errors:
        return None, errors
    if not records:
        return None, [ParseError(path, 0, "empty-inventory", "inventory has no tags")]
    try:
        return build_inventory(records), []
    except InventoryError as e:
        line = where.get((e.lexeme, e.tag), 0)
        return None, [ParseError(path, line, e.kind, str(e))]


def parse_inventory_file(text: str, path: str = "<inventory>") -> TagInventory:
    inv, errors = read_inventory(text, path)
    _first(errors)
    return inv


def format_inventory(inv: TagInventory) -> str:
    """Serialize *inv* so that :func:`parse_inventory_file` rebuilds it exactly."""
    out = []
    for lexeme, tag, parent, weight in inv.records():
        row = [lexeme, tag, parent or ROOT_MARKER]
        if weight is not None:
            row.append(str(weight))
        out.append("\t".join(row) + "\n")
    return "".join(out)


# -- keys --------------------------------------------------------------------

def _instance_line(fields, lineno, path, inv, seen, errors):
    """Shared checks for key and answer lines; returns the Instance or None."""
    lexeme, instance_id, body = fields
    if not _token(instance_id, "instance-id", path, lineno, errors):
        return None
    if lexeme not in inv:
        errors.append(ParseError(path, lineno, "unknown-lexeme", f"unknown lexeme {lexeme!r}"))
        return None
    inst = Instance(lexeme, instance_id)
    if inst in seen:
        errors.append(ParseError(path, lineno, "duplicate-instance",
                                 f"instance {inst} already given on line {seen[inst]}"))
        return None
    seen[inst] = lineno
    if body == "":
        errors.append(ParseError(path, lineno, "empty-tag-list", "no tags given"))
        return None
    return inst


def _split_tags(body, lineno, path, errors) -> Optional[list[str]]:
    items = body.split(" ")
    if "" in items:
        errors.append(ParseError(path, lineno, "stray-whitespace",
                                 "tags must be separated by exactly one space"))
        return None
    dup = sorted({t for t in items if items.count(t) > 1})
    if dup:
        errors.append(ParseError(path, lineno, "duplicate-tag", f"tag {dup[0]!r} listed twice"))
        return None
    return items


def _known(tags, lexeme, inv, lineno, path, errors) -> bool:
    tree = inv[lexeme]
    ok = True
    for t in tags:
        if t not in tree:
            errors.append(ParseError(path, lineno, "unknown-tag",
                                     f"unknown tag {t!r} for lexeme {lexeme!r}"))
            ok = False
    return ok


def read_key(text: str, inv: TagInventory, path: str = "<key>"
             ) -> tuple[list[tuple[Instance, frozenset]], list[ParseError]]:
    errors: list[ParseError] = []
    out = []
    seen: dict[Instance, int] = {}
    for lineno, fields in _records(text, path, (3,), errors):
        inst = _instance_line(fields, lineno, path, inv, seen, errors)
        if inst is None:
            continue
        tags = _split_tags(fields[2], lineno, path, errors)
        if tags is None or not _known(tags, inst.lexeme, inv, lineno, path, errors):
            continue
        out.append((inst, frozenset(tags)))
    return out, errors


def parse_key_file(text: str, inv: TagInventory, path: str = "<key>"
                   ) -> list[tuple[Instance, frozenset]]:
    """Gold key lines; the tags on one line are alternatives, any of which is correct."""
    out, errors = read_key(text, inv, path)
    _first(errors)
    return out


def format_key(entries: Iterable[tuple[Instance, Iterable[str]]]) -> str:
    return "".join(f"{i.lexeme}\t{i.instance_id}\t{' '.join(sorted(tags))}\n"
                   for i, tags in entries)


# -- answers -----------------------------------------------------------------

def _answer(items, renormalize) -> OutputDistribution:
    split = [item.split(":") for item in items]
    if any(len(s) > 2 for s in split):
        raise ValueError("bad-probability", "more than one ':' in an entry")
    probabilistic = {len(s) == 2 for s in split}
    if len(probabilistic) > 1:
        raise ValueError("mixed-styles", "line mixes tag:prob entries with plain tags")
    if not probabilistic.pop():
        return normalize_output(items)
    masses = {}
    decimal = False
    for tag, prob in split:
        try:
            value, is_dec = parse_number(prob)
        except ValueError as e:
            raise ValueError("bad-probability", str(e)) from None
        if value < 0:
            raise ValueError("negative-probability", f"negative probability {prob} for {tag!r}")
        decimal |= is_dec
        masses[tag] = value
    tolerance = SUM_TOLERANCE if decimal else Fraction(0)
    try:
        return make_distribution(masses, tolerance=tolerance, renormalize=renormalize)
    except ScoringError as e:
        raise ValueError("sum-violation", str(e)) from None


def read_answers(text: str, inv: TagInventory, path: str = "<answers>",
                 renormalize: bool = False
                 ) -> tuple[list[tuple[Instance, OutputDistribution]], list[ParseError]]:
    errors: list[ParseError] = []
    out = []
    seen: dict[Instance, int] = {}
    for lineno, fields in _records(text, path, (3,), errors):
        inst = _instance_line(fields, lineno, path, inv, seen, errors)
        if inst is None:
            continue
        items = _split_tags(fields[2], lineno, path, errors)
        if items is None:
            continue
        tags = [i.split(":", 1)[0] for i in items]
        if not all(tags):
            errors.append(ParseError(path, lineno, "bad-probability", "entry with empty tag"))
            continue
        if len(set(tags)) != len(tags):
            errors.append(ParseError(path, lineno, "duplicate-tag", "tag listed twice"))
            continue
        if not _known(tags, inst.lexeme, inv, lineno, path, errors):
            continue
        try:
            out.append((inst, _answer(items, renormalize)))
        except ValueError as e:
            kind, msg = e.args
            errors.append(ParseError(path, lineno, kind, msg))
    return out, errors


def parse_answer_file(text: str, inv: TagInventory, path: str = "<answers>",
                      renormalize: bool = False) -> list[tuple[Instance, OutputDistribution]]:
    """Tagger answers, either plain tag lists or ``tag:prob`` lists.

    Decimal probabilities must sum to 1 within 1e-6 (they are then rescaled
    to an exact 1); all-fraction lines must sum to exactly 1. With
    *renormalize* any positive total is rescaled instead of rejected.
    """
    out, errors = read_answers(text, inv, path, renormalize)
    _first(errors)
    return out


def format_answers(entries: Iterable[tuple[Instance, OutputDistribution]]) -> str:
    lines = []
    for inst, dist in entries:
        body = " ".join(f"{t}:{m}" for t, m in sorted(dist.mass.items()))
        lines.append(f"{inst.lexeme}\t{inst.instance_id}\t{body}\n")
    return "".join(lines)

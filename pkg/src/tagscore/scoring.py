"""
Per-instance and aggregate scoring of tagger output against gold keys.

A tagger's answer is a probability distribution over tags; a gold key is
a disjunctive set of correct tags. The score is the probability the
tagger assigns to *any* correct tag, where internal tags are read as
under-specified and spread uniformly (or by edge weight) over their
sub-tags.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

from .tagtree import InventoryError, TagInventory

HIERARCHICAL = "hierarchical"
EXACT = "exact"
MODES = (HIERARCHICAL, EXACT)

# decimal answers are accepted when they sum to 1 within this slack
SUM_TOLERANCE = Fraction(1, 10**6)


class ScoringError(ValueError):
    pass


class Instance(NamedTuple):
    lexeme: str
    instance_id: str

    def __str__(self):
        return f"{self.lexeme} {self.instance_id}"


TagSet = frozenset


def _frac(value) -> Fraction:
    return value if type(value) is Fraction else Fraction(value)


def exact_sum(values: Iterable[Fraction]) -> Fraction:
    """Sum of rationals, adding integer numerators per denominator first.

    Much cheaper than repeated ``Fraction.__add__`` when denominators repeat.
    """
    by_den: dict[int, int] = {}
    for v in values:
        by_den[v.denominator] = by_den.get(v.denominator, 0) + v.numerator
    total = Fraction(0)
    for den, num in by_den.items():
        total += Fraction(num, den)
    return total


@dataclass(frozen=True)
class OutputDistribution:
    """A tagger's probability mass over the tags of one instance.

    Tags not listed carry zero mass. Masses must sum to exactly 1; use
    :func:`make_distribution` to build one from rounded inputs.
    """

    mass: Mapping[str, Fraction]

    def __post_init__(self):
        mass = {t: _frac(m) for t, m in dict(self.mass).items()}
        if not mass:
            raise ScoringError("empty output distribution")
        for t, m in mass.items():
            if not 0 <= m.numerator <= m.denominator:
                raise ScoringError(f"mass {m} on {t!r} is outside [0, 1]")
        total = exact_sum(mass.values())
        if total != 1:
            raise ScoringError(f"output distribution sums to {total}, not 1")
        object.__setattr__(self, "mass", MappingProxyType(mass))

    @classmethod
    def _checked(cls, mass: dict[str, Fraction]) -> "OutputDistribution":
        # caller guarantees non-empty, non-negative Fractions summing to 1
        self = object.__new__(cls)
        object.__setattr__(self, "mass", MappingProxyType(mass))
        return self

    def point_mass(self) -> Optional[str]:
        """The tag holding all the mass, or None if the mass is spread."""
        hits = [t for t, m in self.mass.items() if m]
        if len(hits) == 1:
            return hits[0]
        return None


def normalize_output(tags: Sequence[str]) -> OutputDistribution:
    """Uniform distribution over a plain (non-probabilistic) tag list."""
    tags = list(tags)
    if not tags:
        raise ScoringError("empty tag list")
    if len(set(tags)) != len(tags):
        dup = next(t for t in tags if tags.count(t) > 1)
        raise ScoringError(f"duplicate tag {dup!r} in output")
    p = Fraction(1, len(tags))
    return OutputDistribution._checked({t: p for t in tags})


def make_distribution(masses: Mapping[str, Fraction], *, tolerance=Fraction(0),
                      renormalize: bool = False) -> OutputDistribution:
    """Build an :class:`OutputDistribution` from possibly rounded masses.

    A sum within *tolerance* of 1 is rescaled to exactly 1. A sum further
    off is an error unless *renormalize* is set, in which case any
    positive total is rescaled.
    """
    masses = {t: _frac(m) for t, m in masses.items()}
    if not masses:
        raise ScoringError("empty output distribution")
    for t, m in masses.items():
        if m.numerator < 0:
            raise ScoringError(f"negative probability {m} on {t!r}")
    total = exact_sum(masses.values())
    if total != 1:
        if abs(total - 1) > tolerance and not renormalize:
            raise ScoringError(f"probabilities sum to {float(total):.10g}, not 1")
        if total == 0:
            raise ScoringError("probabilities sum to 0")
        masses = {t: m / total for t, m in masses.items()}
    return OutputDistribution._checked(masses)


def _check(inv: TagInventory, lexeme: str, output: OutputDistribution, key):
    tree = inv[lexeme]
    for t in output.mass:
        tree.node(t)
    return tree, tree.canonicalize(key)


def score_instance(inv: TagInventory, lexeme: str, output: OutputDistribution,
                   key: Iterable[str]) -> Fraction:
    """Probability that *output* lands on any tag of the disjunctive *key*.

    Each output tag t earns, per canonical key tag c, full credit if c is t
    or one of its ancestors, Pr(c | t) if c lies below t, nothing otherwise.
    """
    tree, key = _check(inv, lexeme, output, key)
    score = Fraction(0)
    for t, m in output.mass.items():
        if not m:
            continue
        above_t = tree._ancestors[t]
        if key & above_t:
            score += m
            continue
        for c in key:
            if t in tree._ancestors[c]:
                score += m * tree._reach[c] / tree._reach[t]
    return score


def leaf_mass_score(inv: TagInventory, lexeme: str, output: OutputDistribution,
                    key: Iterable[str]) -> Fraction:
    """Same quantity as :func:`score_instance`, computed by pushing all output
    mass to the leaves and summing what falls under the key."""
    tree, key = _check(inv, lexeme, output, key)
    covered = frozenset().union(*(tree.leaves_under(c) for c in key))
    leaf_mass = tree.distribute(output.mass)
    return sum((m for l, m in leaf_mass.items() if l in covered), Fraction(0))


def exact_match_score(output: OutputDistribution, key: Iterable[str]) -> Fraction:
    """1 if *output* is a point mass on a member of *key*, else 0."""
    tag = output.point_mass()
    return Fraction(int(tag is not None and tag in frozenset(key)))


class InstanceScore(NamedTuple):
    instance: Instance
    score: Fraction


@dataclass
class ScoreReport:
    per_instance: list[InstanceScore]
    per_lexeme: dict[str, tuple[int, Fraction]]
    overall: tuple[int, Fraction]
    skipped: list[Instance] = field(default_factory=list)


def _mean(scores: list[Fraction]) -> tuple[int, Fraction]:
    n = len(scores)
    return n, (exact_sum(scores) / n if n else Fraction(0))


def _index(pairs, what: str) -> dict:
    out = {}
    for inst, value in pairs:
        inst = Instance(*inst)
        if inst in out:
            raise ScoringError(f"duplicate instance {inst} in {what}")
        out[inst] = value
    return out


def score_run(inv: TagInventory, key: Iterable[tuple[Instance, frozenset]],
              answers: Iterable[tuple[Instance, OutputDistribution]],
              mode: str = HIERARCHICAL) -> ScoreReport:
    """Score every key instance and aggregate means per lexeme and overall.

    Key instances without an answer score 0 and are listed in ``skipped``.
    An answer for an instance absent from the key is an error.
    """
    if mode not in MODES:
        raise ScoringError(f"unknown scoring mode {mode!r}")
    gold = _index(key, "key")
    system = _index(answers, "answers")
    extra = sorted(set(system) - set(gold))
    if extra:
        raise ScoringError(f"answer for instance not in key: {extra[0]}")

    per_instance = []
    skipped = []
    for inst in sorted(gold):
        output = system.get(inst)
        if output is None:
            skipped.append(inst)
            s = Fraction(0)
        elif mode == HIERARCHICAL:
            s = score_instance(inv, inst.lexeme, output, gold[inst])
        else:
            _check(inv, inst.lexeme, output, gold[inst])
            s = exact_match_score(output, gold[inst])
        per_instance.append(InstanceScore(inst, s))

    by_lexeme: dict[str, list[Fraction]] = {}
    for inst, s in per_instance:
        by_lexeme.setdefault(inst.lexeme, []).append(s)
    per_lexeme = {lex: _mean(v) for lex, v in sorted(by_lexeme.items())}
    overall = _mean([s for _, s in per_instance])
    return ScoreReport(per_instance, per_lexeme, overall, skipped)


__all__ = [
    "EXACT", "HIERARCHICAL", "Instance", "InstanceScore", "InventoryError",
    "OutputDistribution", "ScoreReport", "ScoringError", "TagSet",
    "exact_match_score", "leaf_mass_score", "make_distribution",
    "normalize_output", "score_instance", "score_run",
]

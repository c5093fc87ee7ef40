"""
Kappa over hierarchical tag sets.

Both annotators' tags are pushed down to leaf distributions before
comparison, so a parent tag and its child are never compared directly.
Observed agreement is the mean inner product of the two leaf
distributions; chance agreement is the sum of squared leaf probabilities,
with the leaf probabilities estimated by pooling both annotators.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence

from .scoring import Instance
from .tagtree import LeafDistribution, TagInventory

PER_LEXEME = "per-lexeme"
POOLED = "pooled"


class AgreementError(ValueError):
    pass


class UndefinedKappaError(AgreementError):
    pass


class AnnotationPair(NamedTuple):
    instance: Instance
    ann1: frozenset
    ann2: frozenset


@dataclass
class KappaReport:
    scope: str
    n_instances: int
    pr_a: Fraction
    pr_e: Fraction
    kappa: Optional[Fraction]
    # (instance, inner product) for every instance in scope
    per_instance: list[tuple[Instance, Fraction]] = field(default_factory=list)

    @property
    def defined(self) -> bool:
        return self.kappa is not None


def annotation_leaf_distribution(inv: TagInventory, lexeme: str,
                                 ann: Iterable[str]) -> LeafDistribution:
    """Give each canonical disjunct equal mass, then push it to the leaves."""
    tree = inv[lexeme]
    disjuncts = tree.canonicalize(ann)
    share = Fraction(1, len(disjuncts))
    return LeafDistribution(lexeme, tree.distribute({t: share for t in disjuncts}))


def _inner(d1: LeafDistribution, d2: LeafDistribution) -> Fraction:
    if d1.lexeme != d2.lexeme:
        raise AgreementError(f"lexeme mismatch: {d1.lexeme!r} vs {d2.lexeme!r}")
    small, big = sorted((d1.mass, d2.mass), key=len)
    return sum((m * big[l] for l, m in small.items() if l in big), Fraction(0))


def pr_agreement(pairs: Sequence[tuple[LeafDistribution, LeafDistribution]]) -> Fraction:
    """Mean over instances of sum_l Pr(l | ann1) * Pr(l | ann2)."""
    if not pairs:
        raise AgreementError("no annotation pairs")
    return sum((_inner(a, b) for a, b in pairs), Fraction(0)) / len(pairs)


def pr_chance(distributions: Sequence[LeafDistribution]) -> Fraction:
    """Sum of squared leaf probabilities, each leaf's probability being its
    mean mass over all the given distributions."""
    if not distributions:
        raise AgreementError("no annotations")
    lexemes = {d.lexeme for d in distributions}
    if len(lexemes) > 1:
        raise AgreementError(f"lexeme mismatch: {sorted(lexemes)}")
    pooled: dict[str, Fraction] = {}
    for d in distributions:
        for l, m in d.mass.items():
            pooled[l] = pooled.get(l, 0) + m
    n = len(distributions)
    return sum((m * m for m in pooled.values()), Fraction(0)) / (n * n)


def kappa(pr_a: Fraction, pr_e: Fraction) -> Fraction:
    """(Pr(A) - Pr(E)) / (1 - Pr(E)); undefined when chance agreement is 1."""
    pr_a, pr_e = Fraction(pr_a), Fraction(pr_e)
    for name, v in (("Pr(A)", pr_a), ("Pr(E)", pr_e)):
        if not 0 <= v <= 1:
            raise AgreementError(f"{name} = {v} is outside [0, 1]")
    if pr_e == 1:
        raise UndefinedKappaError("kappa is undefined when Pr(E) = 1")
    return (pr_a - pr_e) / (1 - pr_e)


def _kappa_or_none(pr_a, pr_e):
    try:
        return kappa(pr_a, pr_e)
    except UndefinedKappaError:
        return None


def kappa_run(inv: TagInventory, pairs: Iterable, scope: str = PER_LEXEME) -> list[KappaReport]:
    """Kappa reports, one per lexeme (sorted) or a single pooled one.

    The pooled report averages Pr(A) over all instances and takes Pr(E) as
    the instance-weighted mean of the per-lexeme chance agreements, since
    different lexemes have disjoint leaf sets. An undefined kappa is
    reported with ``kappa=None`` rather than raised.
    """
    if scope not in (PER_LEXEME, POOLED):
        raise AgreementError(f"unknown kappa scope {scope!r}")
    by_lexeme: dict[str, list] = {}
    seen = set()
    for p in pairs:
        inst, a1, a2 = AnnotationPair(*p)
        inst = Instance(*inst)
        if inst in seen:
            raise AgreementError(f"duplicate instance {inst}")
        seen.add(inst)
        d1 = annotation_leaf_distribution(inv, inst.lexeme, a1)
        d2 = annotation_leaf_distribution(inv, inst.lexeme, a2)
        by_lexeme.setdefault(inst.lexeme, []).append((inst, d1, d2))
    if not by_lexeme:
        raise AgreementError("no annotation pairs")

    reports = []
    for lexeme in sorted(by_lexeme):
        rows = sorted(by_lexeme[lexeme], key=lambda r: r[0])
        inner = [(inst, _inner(d1, d2)) for inst, d1, d2 in rows]
        pr_a = sum((v for _, v in inner), Fraction(0)) / len(rows)
        pr_e = pr_chance([d for _, d1, d2 in rows for d in (d1, d2)])
        reports.append(KappaReport(lexeme, len(rows), pr_a, pr_e,
                                   _kappa_or_none(pr_a, pr_e), inner))
    if scope == PER_LEXEME:
        return reports

    n = sum(r.n_instances for r in reports)
    pr_a = sum((r.pr_a * r.n_instances for r in reports), Fraction(0)) / n
    pr_e = sum((r.pr_e * r.n_instances for r in reports), Fraction(0)) / n
    inner = [row for r in reports for row in r.per_instance]
    return [KappaReport(POOLED, n, pr_a, pr_e, _kappa_or_none(pr_a, pr_e), inner)]

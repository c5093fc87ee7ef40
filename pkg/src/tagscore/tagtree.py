"""
Hierarchical tag inventories and the probability computations over them.

Each lexeme owns a forest of tags. A child tag IS-A its parent, so the
probability of the parent given the child is always 1, while the
probability of a child given its parent ("downward" probability) is
uniform over siblings unless explicit edge weights are supplied.

All probabilities are exact ``fractions.Fraction`` values.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional

ROOT_MARKER = "-"

_BAD_TAG_CHARS = re.compile(r"[\s:]")


class InventoryError(ValueError):
    """A tag inventory, or a query against one, is invalid.

    ``kind`` is a short machine-readable category such as ``"duplicate-tag"``.
    """

    def __init__(self, kind: str, message: str, lexeme: Optional[str] = None,
                 tag: Optional[str] = None):
        super().__init__(message)
        self.kind = kind
        self.lexeme = lexeme
        self.tag = tag


class UnknownTagError(InventoryError, KeyError):
    def __str__(self):
        return self.args[0]


class TagRecord(NamedTuple):
    lexeme: str
    tag: str
    parent: Optional[str] = None
    weight: Optional[Fraction] = None


@dataclass(frozen=True)
class TagNode:
    id: str
    parent: Optional[str]
    children: tuple[str, ...]
    weight: Optional[Fraction] = None

    @property
    def is_leaf(self) -> bool:
        return not self.children


def check_token(value: str, what: str = "tag") -> None:
    """Raise ``InventoryError`` unless *value* is a usable tag or lexeme token."""
    if not isinstance(value, str) or not value:
        raise InventoryError("invalid-" + what, f"empty {what}")
    if _BAD_TAG_CHARS.search(value):
        raise InventoryError("invalid-" + what,
                             f"{what} {value!r} contains whitespace or ':'")
    if value == ROOT_MARKER:
        raise InventoryError("invalid-" + what,
                             f"{what} may not be the reserved marker {ROOT_MARKER!r}")


class LexemeTree:
    """The tag forest for a single lexeme.

    Built once and never mutated. Per-node quantities (ancestor sets,
    root-to-node path probabilities) are computed eagerly; leaf sets and
    leaf distributions are cached on first use.
    """

    def __init__(self, lexeme: str, nodes: Mapping[str, TagNode], roots: tuple[str, ...]):
        self.lexeme = lexeme
        self.nodes = MappingProxyType(dict(nodes))
        self.roots = roots
        self._ancestors: dict[str, frozenset[str]] = {}
        # product of edge probabilities from the node's top-level ancestor down to it
        self._reach: dict[str, Fraction] = {}
        self._leaves: dict[str, frozenset[str]] = {}
        self._leaf_dist: dict[str, Mapping[str, Fraction]] = {}

        stack = [(r, frozenset(), Fraction(1)) for r in reversed(roots)]
        while stack:
            tag, above, reach = stack.pop()
            anc = above | {tag}
            self._ancestors[tag] = anc
            self._reach[tag] = reach
            node = self.nodes[tag]
            for child, p in self._edge_probabilities(node):
                stack.append((child, anc, reach * p))

    def _edge_probabilities(self, node: TagNode) -> list[tuple[str, Fraction]]:
        children = node.children
        if not children:
            return []
        weights = [self.nodes[c].weight for c in children]
        if weights[0] is None:
            p = Fraction(1, len(children))
            return [(c, p) for c in children]
        total = sum(weights)
        return [(c, w / total) for c, w in zip(children, weights)]

    def __contains__(self, tag) -> bool:
        return tag in self.nodes

    def __iter__(self) -> Iterator[str]:
        return iter(self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, tag: str) -> TagNode:
        try:
            return self.nodes[tag]
        except KeyError:
            raise UnknownTagError("unknown-tag",
                                  f"unknown tag {tag!r} for lexeme {self.lexeme!r}",
                                  self.lexeme, tag) from None

    def ancestors(self, tag: str) -> frozenset[str]:
        """Tags on the path from *tag* to its top-level root, *tag* included."""
        self.node(tag)
        return self._ancestors[tag]

    def is_ancestor_or_equal(self, a: str, d: str) -> bool:
        self.node(a)
        return a in self.ancestors(d)

    def downward_probability(self, ancestor: str, target: str) -> Fraction:
        """Pr(target | ancestor) under the IS-A reading of the tree."""
        self.node(ancestor)
        up = self.ancestors(target)
        if target in self.ancestors(ancestor):
            return Fraction(1)
        if ancestor in up:
            return self._reach[target] / self._reach[ancestor]
        return Fraction(0)

    def leaves(self) -> frozenset[str]:
        return frozenset(t for t, n in self.nodes.items() if n.is_leaf)

    def leaves_under(self, tag: str) -> frozenset[str]:
        self.node(tag)
        found = self._leaves.get(tag)
        if found is None:
            out = []
            stack = [tag]
            while stack:
                t = stack.pop()
                children = self.nodes[t].children
                if children:
                    stack.extend(children)
                else:
                    out.append(t)
            found = self._leaves[tag] = frozenset(out)
        return found

    def leaf_distribution(self, tag: str) -> Mapping[str, Fraction]:
        """Pr(leaf | tag) for every leaf under *tag*."""
        dist = self._leaf_dist.get(tag)
        if dist is None:
            self.node(tag)
            base = self._reach[tag]
            dist = MappingProxyType({l: self._reach[l] / base
                                     for l in self.leaves_under(tag)})
            self._leaf_dist[tag] = dist
        return dist

    def canonicalize(self, tags: Iterable[str]) -> frozenset[str]:
        """Drop every tag that has a strict ancestor in the same set."""
        tags = frozenset(tags)
        if not tags:
            raise InventoryError("empty-tag-set", "tag set is empty", self.lexeme)
        for t in tags:
            self.node(t)
        return frozenset(t for t in tags
                         if len(self._ancestors[t] & tags) == 1)

    def distribute(self, dist: Mapping[str, Fraction]) -> dict[str, Fraction]:
        """Push every tag's mass down to the leaves; returns leaf -> mass."""
        out: dict[str, Fraction] = {}
        for tag, mass in dist.items():
            self.node(tag)
            if mass < 0:
                raise InventoryError("invalid-distribution",
                                     f"negative mass {mass} on {tag!r}", self.lexeme, tag)
            if not mass:
                continue
            for leaf, p in self.leaf_distribution(tag).items():
                out[leaf] = out.get(leaf, 0) + mass * p
        return out


@dataclass(frozen=True)
class TagInventory:
    """Per-lexeme tag forests; top-level tags hang off a virtual root that is
    never itself a tag."""

    trees: Mapping[str, LexemeTree] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "trees", MappingProxyType(dict(self.trees)))

    def __contains__(self, lexeme) -> bool:
        return lexeme in self.trees

    def __getitem__(self, lexeme: str) -> LexemeTree:
        try:
            return self.trees[lexeme]
        except KeyError:
            raise UnknownTagError("unknown-lexeme", f"unknown lexeme {lexeme!r}",
                                  lexeme) from None

    def lexemes(self) -> list[str]:
        return sorted(self.trees)

    def records(self) -> Iterator[TagRecord]:
        """Yield records that rebuild this inventory (parents before children)."""
        for lexeme, tree in self.trees.items():
            stack = list(reversed(tree.roots))
            while stack:
                tag = stack.pop()
                node = tree.nodes[tag]
                yield TagRecord(lexeme, tag, node.parent, node.weight)
                stack.extend(reversed(node.children))


@dataclass(frozen=True)
class LeafDistribution:
    """Probability mass over the leaf tags of one lexeme."""

    lexeme: str
    mass: Mapping[str, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "mass", MappingProxyType(dict(self.mass)))

    def __getitem__(self, leaf: str) -> Fraction:
        return self.mass.get(leaf, Fraction(0))

    def total(self) -> Fraction:
        return sum(self.mass.values(), Fraction(0))


def _as_weight(weight, lexeme, tag) -> Optional[Fraction]:
    if weight is None:
        return None
    try:
        w = Fraction(weight)
    except (TypeError, ValueError):
        raise InventoryError("invalid-weight", f"weight {weight!r} of {tag!r} is not a number",
                             lexeme, tag) from None
    if w <= 0:
        raise InventoryError("invalid-weight", f"weight of {tag!r} must be positive, got {w}",
                             lexeme, tag)
    return w


def build_inventory(records: Iterable) -> TagInventory:
    """Validate ``(lexeme, tag, parent, weight)`` records and build an inventory.

    ``parent`` is ``None`` (or ``"-"``) for top-level tags and may refer to a
    tag defined later. Children keep the order in which their records
    appear. Every error carries the offending lexeme and tag.
    """
    by_lexeme: dict[str, dict[str, TagRecord]] = {}
    n = 0
    for rec in records:
        rec = TagRecord(*rec)
        n += 1
        lexeme, tag, parent = rec.lexeme, rec.tag, rec.parent
        try:
            check_token(lexeme, "lexeme")
        except InventoryError as e:
            raise InventoryError(e.kind, str(e), lexeme, tag) from None
        try:
            check_token(tag)
        except InventoryError as e:
            raise InventoryError(e.kind, str(e), lexeme, tag) from None
        if parent == ROOT_MARKER:
            parent = None
        weight = _as_weight(rec.weight, lexeme, tag)
        seen = by_lexeme.setdefault(lexeme, {})
        if tag in seen:
            raise InventoryError("duplicate-tag", f"duplicate tag {tag!r} in lexeme {lexeme!r}",
                                 lexeme, tag)
        seen[tag] = TagRecord(lexeme, tag, parent, weight)
    if not n:
        raise InventoryError("empty-inventory", "inventory has no tags")

    trees = {}
    for lexeme, recs in by_lexeme.items():
        children: dict[Optional[str], list[str]] = {None: []}
        for rec in recs.values():
            if rec.parent is not None and rec.parent not in recs:
                raise InventoryError("unknown-parent",
                                     f"parent {rec.parent!r} of {rec.tag!r} not defined "
                                     f"for lexeme {lexeme!r}", lexeme, rec.tag)
            children.setdefault(rec.parent, []).append(rec.tag)

        for parent, kids in children.items():
            weighted = [recs[k].weight is not None for k in kids]
            if any(weighted) and not all(weighted):
                bad = kids[weighted.index(not weighted[0])]
                raise InventoryError("mixed-weights",
                                     f"children of {parent or 'the top level'!s} in lexeme "
                                     f"{lexeme!r} mix weighted and unweighted tags",
                                     lexeme, bad)

        # anything unreachable from the top level sits on a cycle
        reached = set()
        stack = list(children[None])
        while stack:
            t = stack.pop()
            reached.add(t)
            stack.extend(children.get(t, ()))
        if len(reached) != len(recs):
            bad = next(t for t in recs if t not in reached)
            raise InventoryError("cycle", f"tag {bad!r} of lexeme {lexeme!r} is on a parent cycle",
                                 lexeme, bad)

        nodes = {t: TagNode(t, r.parent, tuple(children.get(t, ())), r.weight)
                 for t, r in recs.items()}
        trees[lexeme] = LexemeTree(lexeme, nodes, tuple(children[None]))
    return TagInventory(trees)


def is_ancestor_or_equal(inv: TagInventory, lexeme: str, a: str, d: str) -> bool:
    return inv[lexeme].is_ancestor_or_equal(a, d)


def downward_probability(inv: TagInventory, lexeme: str, ancestor: str, target: str) -> Fraction:
    """Pr(target | ancestor): 1 if *target* is at or above *ancestor*, the
    product of edge probabilities if it lies below, else 0."""
    return inv[lexeme].downward_probability(ancestor, target)


def leaves_under(inv: TagInventory, lexeme: str, tag: str) -> frozenset[str]:
    return inv[lexeme].leaves_under(tag)


def canonicalize_tag_set(inv: TagInventory, lexeme: str, tags: Iterable[str]) -> frozenset[str]:
    return inv[lexeme].canonicalize(tags)


def distribute_to_leaves(inv: TagInventory, lexeme: str,
                         dist: Mapping[str, Fraction]) -> LeafDistribution:
    """Spread a distribution over tags down to the leaves of *lexeme*'s forest.

    The masses must sum to exactly 1; the result does too.
    """
    total = sum(dist.values(), Fraction(0))
    if total != 1:
        raise InventoryError("invalid-distribution",
                             f"distribution sums to {total}, not 1", lexeme)
    return LeafDistribution(lexeme, inv[lexeme].distribute(dist))

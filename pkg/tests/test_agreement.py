import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from tagscore import (AgreementError, Instance, LeafDistribution, UndefinedKappaError,
                      annotation_leaf_distribution, build_inventory, kappa, kappa_run,
                      pr_agreement, pr_chance)

F = Fraction


def leaf(lexeme="w", **mass):
    return LeafDistribution(lexeme, {k.replace("_", "."): F(v) for k, v in mass.items()})


class TestAnnotationLeafDistribution:
    @pytest.mark.parametrize("ann, expected", [
        ({"A"}, {"A.1a": F(1, 4), "A.1b": F(1, 4), "A.2": F(1, 2)}),
        ({"A.1a"}, {"A.1a": F(1)}),
        ({"A.1", "B"},
         {"A.1a": F(1, 4), "A.1b": F(1, 4), "B.1": F(1, 6), "B.2": F(1, 6), "B.3": F(1, 6)}),
        ({"A", "A.1"}, {"A.1a": F(1, 4), "A.1b": F(1, 4), "A.2": F(1, 2)}),
    ])
    def test_examples(self, example_inv, ann, expected):
        from conftest import EXAMPLE_RECORDS
        got = annotation_leaf_distribution(example_inv, "w", ann)
        assert dict(got.mass) == expected
        canonical = example_inv["w"].canonicalize(ann)
        share = {t: F(1, len(canonical)) for t in canonical}
        assert oracles.leaf_mass(EXAMPLE_RECORDS, "w", share) == expected


class TestPrAgreement:
    def test_identical_leaf(self, example_inv):
        d = annotation_leaf_distribution(example_inv, "w", {"A.1a"})
        assert pr_agreement([(d, d)]) == 1

    def test_disjoint(self, example_inv):
        d1 = annotation_leaf_distribution(example_inv, "w", {"A.1a"})
        d2 = annotation_leaf_distribution(example_inv, "w", {"B.2"})
        assert pr_agreement([(d1, d2)]) == 0

    def test_both_internal(self, example_inv):
        d = annotation_leaf_distribution(example_inv, "w", {"A"})
        assert pr_agreement([(d, d)]) == F(1, 16) + F(1, 16) + F(1, 4) == F(3, 8)

    def test_errors(self):
        with pytest.raises(AgreementError):
            pr_agreement([])
        with pytest.raises(AgreementError, match="mismatch"):
            pr_agreement([(leaf("w", x=1), leaf("v", x=1))])


class TestPrChance:
    def test_balanced(self):
        dists = [leaf(x=1), leaf(y=1), leaf(x=1), leaf(y=1)]
        assert pr_chance(dists) == F(1, 2)

    def test_degenerate(self):
        assert pr_chance([leaf(x=1)] * 3) == 1

    def test_internal_tag(self, example_inv):
        d = annotation_leaf_distribution(example_inv, "w", {"A"})
        assert pr_chance([d, d]) == F(3, 8)

    def test_errors(self):
        with pytest.raises(AgreementError):
            pr_chance([])
        with pytest.raises(AgreementError, match="mismatch"):
            pr_chance([leaf("w", x=1), leaf("v", x=1)])


class TestKappa:
    @pytest.mark.parametrize("pr_a, pr_e, expected", [
        (F(1), F(1, 2), F(1)), (F(0), F(1, 2), F(-1)), (F(1, 3), F(1, 3), F(0)),
    ])
    def test_values(self, pr_a, pr_e, expected):
        assert kappa(pr_a, pr_e) == expected

    def test_undefined(self):
        with pytest.raises(UndefinedKappaError):
            kappa(F(1), F(1))

    def test_out_of_range(self):
        with pytest.raises(AgreementError):
            kappa(F(2), F(1, 2))


def _pairs(*rows):
    return [(Instance("w", str(i)), frozenset(a), frozenset(b)) for i, (a, b) in enumerate(rows)]


class TestKappaRun:
    def test_perfect_agreement(self, example_inv):
        [r] = kappa_run(example_inv, _pairs(({"A.1a"}, {"A.1a"}), ({"B.2"}, {"B.2"})))
        assert (r.scope, r.n_instances, r.pr_a, r.pr_e, r.kappa) == ("w", 2, 1, F(1, 2), 1)

    def test_perfect_disagreement(self, example_inv):
        [r] = kappa_run(example_inv, _pairs(({"A.1a"}, {"B.2"}), ({"A.1a"}, {"B.2"})))
        assert (r.pr_a, r.pr_e, r.kappa) == (0, F(1, 2), -1)

    def test_single_instance_is_undefined(self, example_inv):
        [r] = kappa_run(example_inv, _pairs(({"A.1a"}, {"A.1a"})))
        assert r.pr_e == 1
        assert r.kappa is None and not r.defined

    def test_identical_internal_annotations(self, example_inv):
        [r] = kappa_run(example_inv, _pairs(({"A"}, {"A"})))
        assert r.pr_a == F(3, 8)
        assert r.per_instance == [(Instance("w", "0"), F(3, 8))]

    def test_pooled(self):
        inv = build_inventory([("u", "x", None), ("u", "y", None),
                               ("v", "p", None), ("v", "q", None), ("v", "r", None)])
        pairs = [(Instance("u", "1"), {"x"}, {"x"}), (Instance("u", "2"), {"y"}, {"y"}),
                 (Instance("v", "1"), {"p"}, {"q"})]
        per = kappa_run(inv, pairs)
        assert [r.scope for r in per] == ["u", "v"]
        assert (per[0].pr_a, per[0].pr_e) == (1, F(1, 2))
        # v: pooled leaf probs p=q=1/2 -> Pr(E) = 1/2
        assert (per[1].pr_a, per[1].pr_e, per[1].kappa) == (0, F(1, 2), -1)
        [pooled] = kappa_run(inv, pairs, "pooled")
        assert pooled.scope == "pooled" and pooled.n_instances == 3
        assert pooled.pr_a == F(2, 3)
        assert pooled.pr_e == (2 * F(1, 2) + 1 * F(1, 2)) / 3
        assert pooled.kappa == (F(2, 3) - F(1, 2)) / (1 - F(1, 2))

    def test_errors(self, example_inv):
        with pytest.raises(AgreementError):
            kappa_run(example_inv, [])
        with pytest.raises(AgreementError, match="duplicate"):
            kappa_run(example_inv, _pairs(({"A"}, {"A"})) * 2)
        with pytest.raises(AgreementError, match="scope"):
            kappa_run(example_inv, _pairs(({"A"}, {"A"})), "global")


def _random_pairs(rng, records, n):
    tags = oracles.tags_of(records, "w")
    return [(Instance("w", str(i)),
             frozenset(rng.sample(tags, rng.randint(1, min(2, len(tags))))),
             frozenset(rng.sample(tags, rng.randint(1, min(2, len(tags))))))
            for i in range(n)]


seeds = st.integers(0, 2**32)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_swap_symmetry_and_bounds(seed):
    rng = random.Random(seed)
    records = oracles.random_records(rng)
    inv = build_inventory(records)
    pairs = _random_pairs(rng, records, rng.randint(1, 6))
    swapped = [(i, b, a) for i, a, b in pairs]
    for scope in ("per-lexeme", "pooled"):
        [r] = kappa_run(inv, pairs, scope)
        [s] = kappa_run(inv, swapped, scope)
        assert (r.pr_a, r.pr_e, r.kappa) == (s.pr_a, s.pr_e, s.kappa)
        assert 0 <= r.pr_a <= 1 and 0 <= r.pr_e <= 1
        assert r.kappa is None or r.kappa <= 1


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_inner_product_matches_brute_force(seed):
    rng = random.Random(seed)
    records = oracles.random_records(rng)
    inv = build_inventory(records)
    (_, a, b), = _random_pairs(rng, records, 1)
    leaves = inv["w"].leaves()

    paths = [path for path, _ in oracles.leaf_paths(records, "w")]

    def strictly_above(o, t):
        return any(o in p and t in p and p.index(o) < p.index(t) for p in paths)

    def brute(ann):
        canon = {t for t in ann if not any(strictly_above(o, t) for o in ann)}
        return oracles.leaf_mass(records, "w", {t: F(1, len(canon)) for t in canon})

    m1, m2 = brute(a), brute(b)
    expected = sum((m1.get(l, 0) * m2.get(l, 0) for l in leaves), F(0))
    d1 = annotation_leaf_distribution(inv, "w", a)
    d2 = annotation_leaf_distribution(inv, "w", b)
    assert pr_agreement([(d1, d2)]) == expected


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_leaf_sum_regroups_over_any_complete_antichain(seed):
    """Leaves under a complete antichain partition the leaf set, so grouping
    the leaf-level inner product by antichain member neither loses nor
    double-counts mass; summing over every tag instead of leaves would."""
    rng = random.Random(seed)
    records = oracles.random_records(rng)
    inv = build_inventory(records)
    tree = inv["w"]
    (_, a, b), = _random_pairs(rng, records, 1)
    d1 = annotation_leaf_distribution(inv, "w", a)
    d2 = annotation_leaf_distribution(inv, "w", b)
    pr_a = pr_agreement([(d1, d2)])

    # random complete antichain: walk down from the roots, stopping at random
    cut, stack = [], list(tree.roots)
    while stack:
        t = stack.pop()
        if tree.node(t).is_leaf or rng.random() < 0.4:
            cut.append(t)
        else:
            stack.extend(tree.node(t).children)
    groups = [tree.leaves_under(c) for c in cut]
    assert sum(len(g) for g in groups) == len(tree.leaves())
    assert frozenset().union(*groups) == tree.leaves()
    assert sum((d1[l] * d2[l] for g in groups for l in g), F(0)) == pr_a

    # mass aggregated at every node (ancestors included) counts shared paths repeatedly
    def up(d):
        return {t: sum((d[l] for l in tree.leaves_under(t)), F(0)) for t in tree}
    u1, u2 = up(d1), up(d2)
    all_nodes = sum((u1[t] * u2[t] for t in tree), F(0))
    shared_internal = [t for t in tree if not tree.node(t).is_leaf and u1[t] and u2[t]]
    if shared_internal:
        assert all_nodes > pr_a
    else:
        assert all_nodes == pr_a

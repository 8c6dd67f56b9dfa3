import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from combagg.errors import (
    BadGradeCount,
    DisconnectedGraph,
    DuplicatePair,
    IncompleteMatrix,
    NonPositiveEntry,
    NonPositiveWeight,
)
from combagg.pcm import (
    Kind,
    all_pairs,
    consistency_defect,
    convert_kind,
    make_pcm,
    normalize,
)

from conftest import PAIRS4, GRADE_COUNTS, UNIFIED_VALUES


def e1_pcm():
    return make_pcm(4, "multiplicative",
                    [(u, v, x, g) for (u, v), x, g in zip(PAIRS4, UNIFIED_VALUES[0], GRADE_COUNTS[0])])


def positive_pcms(min_n=3, max_n=6):
    @st.composite
    def build(draw):
        n = draw(st.integers(min_n, max_n))
        vals = draw(st.lists(st.floats(0.1, 9.0), min_size=n * (n - 1) // 2,
                             max_size=n * (n - 1) // 2))
        return make_pcm(n, "multiplicative", [(u, v, x) for (u, v), x in zip(all_pairs(n), vals)])
    return build()


def test_expert1_example_is_valid_complete():
    p = e1_pcm()
    assert p.is_complete
    assert p.values[(1, 4)] == Fraction(53, 6)
    assert p.grade(3, 4) == 4 and p.grade(4, 3) == 4
    assert p.entry(4, 1) == Fraction(6, 53)


def test_all_ones_implied_matrix():
    p = make_pcm(3, "multiplicative", [(u, v, 1) for u, v in all_pairs(3)])
    np.testing.assert_array_equal(p.matrix(), np.ones((3, 3)))


def test_missing_grades_default_to_nine():
    p = make_pcm(3, "multiplicative", [(1, 2, 2.0), (2, 3, 1.5, 5)])
    assert p.grade(1, 2) == 9
    assert p.grade(2, 3) == 5


@pytest.mark.parametrize("entries, error", [
    ([(1, 2, 1.0), (3, 4, 1.0)], DisconnectedGraph),
    ([(1, 2, 0.0), (2, 3, 1.0), (3, 4, 1.0)], NonPositiveEntry),
    ([(1, 2, -2.0), (2, 3, 1.0), (3, 4, 1.0)], NonPositiveEntry),
    ([(1, 2, 1.0), (1, 2, 2.0), (2, 3, 1.0), (3, 4, 1.0)], DuplicatePair),
    ([(1, 2, 1.0, 1), (2, 3, 1.0), (3, 4, 1.0)], BadGradeCount),
])
def test_make_pcm_errors(entries, error):
    with pytest.raises(error):
        make_pcm(4, "multiplicative", entries)


def test_additive_allows_negative_and_zero():
    p = make_pcm(3, "additive", [(1, 2, -1.5), (1, 3, 0.0), (2, 3, 1.5)])
    assert p.entry(2, 1) == 1.5
    assert p.entry(2, 2) == 0


def brute_force_defect(p):
    A = p.matrix()
    n = p.n
    worst = 0.0
    for i, j, k in itertools.product(range(n), repeat=3):
        if p.kind is Kind.MULTIPLICATIVE:
            worst = max(worst, abs(math.log(A[i, k] * A[k, j] / A[i, j])))
        else:
            worst = max(worst, abs(A[i, k] + A[k, j] - A[i, j]))
    return worst


def test_consistency_defect_examples():
    ones = make_pcm(4, "multiplicative", [(u, v, 1) for u, v in all_pairs(4)])
    assert consistency_defect(ones) == 0.0
    w = [1.0, 2.0, 4.0, 8.0]
    consistent = make_pcm(4, "mult", [(u, v, w[u - 1] / w[v - 1]) for u, v in all_pairs(4)])
    assert consistency_defect(consistent) < 1e-12
    d = consistency_defect(e1_pcm())
    assert d > 0
    assert d == pytest.approx(brute_force_defect(e1_pcm()), abs=1e-12)


def test_consistency_defect_requires_complete():
    with pytest.raises(IncompleteMatrix):
        consistency_defect(make_pcm(3, "mult", [(1, 2, 2.0), (2, 3, 2.0)]))


@settings(max_examples=50, deadline=None)
@given(positive_pcms(), st.randoms(use_true_random=False))
def test_consistency_defect_permutation_invariant(p, rnd):
    perm = list(range(1, p.n + 1))
    rnd.shuffle(perm)
    relabeled = make_pcm(p.n, "mult", [
        (min(perm[u - 1], perm[v - 1]), max(perm[u - 1], perm[v - 1]),
         x if perm[u - 1] < perm[v - 1] else 1 / x)
        for (u, v), x in p.values.items()
    ])
    assert consistency_defect(relabeled) == pytest.approx(consistency_defect(p), abs=1e-12)
    assert consistency_defect(p) == pytest.approx(brute_force_defect(p), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(positive_pcms())
def test_reciprocity(p):
    for i, j in itertools.permutations(range(1, p.n + 1), 2):
        assert p.entry(i, j) * p.entry(j, i) == pytest.approx(1.0, abs=1e-15)


def test_reciprocity_exact_for_rationals():
    p = e1_pcm()
    for i, j in itertools.permutations(range(1, 5), 2):
        assert p.entry(i, j) * p.entry(j, i) == 1


@pytest.mark.parametrize("mult_value, add_value", [(1.0, 0.0), (math.e, 1.0)])
def test_convert_kind_examples(mult_value, add_value):
    m = make_pcm(2, "mult", [(1, 2, mult_value)])
    a = convert_kind(m, "additive")
    assert a.kind is Kind.ADDITIVE
    assert a.values[(1, 2)] == pytest.approx(add_value, abs=1e-15)
    back = convert_kind(make_pcm(2, "add", [(1, 2, add_value)]), "multiplicative")
    assert back.values[(1, 2)] == pytest.approx(mult_value, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(positive_pcms())
def test_convert_kind_round_trip(p):
    q = convert_kind(convert_kind(p, "additive"), "multiplicative")
    assert q.mask == p.mask and q.grade_counts == p.grade_counts
    for pair, x in p.values.items():
        assert q.values[pair] == pytest.approx(x, rel=1e-12)


def test_convert_preserves_grades():
    a = convert_kind(e1_pcm(), Kind.ADDITIVE)
    assert dict(a.grade_counts) == dict(e1_pcm().grade_counts)


@pytest.mark.parametrize("w, kind, expected", [
    ((2, 2, 2, 2), "multiplicative", (0.25, 0.25, 0.25, 0.25)),
    ((3, 1), "multiplicative", (0.75, 0.25)),
    ((5, 1), "additive", (2.0, -2.0)),
])
def test_normalize_examples(w, kind, expected):
    np.testing.assert_allclose(normalize(w, kind).weights, expected, atol=1e-15)


def test_normalize_rejects_nonpositive():
    with pytest.raises(NonPositiveWeight):
        normalize([1.0, 0.0], "multiplicative")


@given(st.lists(st.floats(0.01, 100.0), min_size=2, max_size=8),
       st.sampled_from(["multiplicative", "additive"]))
def test_normalize_idempotent_and_order_preserving(w, kind):
    once = normalize(w, kind)
    twice = normalize(once.weights, kind)
    np.testing.assert_allclose(twice.weights, once.weights, atol=1e-12)
    assert list(np.argsort(once.weights, kind="stable")) == list(np.argsort(w, kind="stable"))

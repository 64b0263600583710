import pytest
from hypothesis import given, strategies as st

from covspec.filtration import (
    CosetBudgetExceeded,
    CosetTable,
    abelian_obstruction,
    closure_contains_all,
    membership,
    tietze_eliminate,
)
from covspec.spaces_core import inverse, multiply, power, reduce_word

a, A, b, B = (0, 1), (0, -1), (1, 1), (1, -1)


@pytest.mark.parametrize(
    "relators, order",
    [
        ([(a, a), (b, b, b), (a, b) * 2], 6),
        ([(a, a), (b, b, b), (a, b) * 3], 12),
        ([(a, a), (b, b, b), (a, b) * 4], 24),
        ([(a, a), (b, b, b), (a, b) * 5], 60),
        ([power((a,), 7), (b,)], 7),
        ([(a, a), (b, b), (a, b, A, B)], 4),
    ],
)
def test_coset_enumeration_finds_group_order(relators, order):
    t = CosetTable([0, 1], relators)
    assert t.enumerate()
    assert t.index() == order


def test_infinite_index_hits_the_budget():
    t = CosetTable([0, 1], [(a, b, A, B)], budget=500)
    assert t.enumerate() is False and not t.complete
    with pytest.raises(CosetBudgetExceeded):
        t.define(0, 0)


letters = st.tuples(st.integers(0, 1), st.sampled_from([1, -1]))
words = st.lists(letters, max_size=5).map(tuple)


@given(st.lists(st.tuples(words, st.sampled_from([1, -1])), min_size=1, max_size=3))
def test_products_of_conjugates_are_members(parts):
    rel = (a, b, A, B)
    w = ()
    for c, s in parts:
        w = multiply(w, c, power(rel, s), inverse(c))
    assert membership([rel], w).member is True


@given(words)
def test_abelian_obstruction_detects_nonzero_exponent_sums(w):
    w = reduce_word(w)
    sums = [sum(s for g, s in w if g == k) for k in (0, 1)]
    if sums[0] % 2 or sums[1]:
        assert abelian_obstruction([(a, a)], w)


def test_membership_verdicts():
    assert membership([(a, a)], (a,)).member is False
    assert membership([(a, a)], (b, a, a, B)).member is True
    assert closure_contains_all([(a,)], [(a, b, A)]).member is False
    assert closure_contains_all([(a,), (b,)], [(a, b, A)]).member is True


def test_tietze_eliminates_primitive_relators():
    rels, _, eliminated = tietze_eliminate([(a, b)], [(b,)])
    assert rels == [] and eliminated == [0]

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from covspec.exact import PiRational
from covspec.spaces_core import (
    LatticeElement,
    SpecValue,
    Spectrum,
    cyclic_reduce,
    detect_accumulation,
    extrapolate_limit,
    format_word,
    hermite_normal_form,
    inverse,
    is_reduced,
    lattice_covering_spectrum,
    lattice_shift_length,
    multiply,
    parse_word,
    power,
    reduce_word,
)

letters = st.tuples(st.integers(0, 2), st.sampled_from([1, -1]))
words = st.lists(letters, max_size=12).map(tuple)


@given(words)
def test_reduce_is_idempotent(w):
    r = reduce_word(w)
    assert is_reduced(r)
    assert reduce_word(r) == r


@given(words, words, words)
def test_group_axioms(a, b, c):
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))
    assert multiply(a, inverse(a)) == ()
    assert inverse(multiply(a, b)) == multiply(inverse(b), inverse(a))


@given(words, st.integers(-4, 4))
def test_power_adds_exponents(w, n):
    assert multiply(power(w, n), power(w, 2)) == power(w, n + 2)


@given(words)
def test_cyclic_reduce_conjugates_back(w):
    core, c = cyclic_reduce(w)
    assert multiply(c, core, inverse(c)) == reduce_word(w)
    if len(core) > 1:
        assert core[0] != (core[-1][0], -core[-1][1])


@given(words)
def test_word_text_round_trip(w):
    names = ["a", "b", "c"]
    w = reduce_word(w)
    assert parse_word(format_word(w, names) if w else "", names) == w


@pytest.mark.parametrize("text", ["a d", "a^", "a b ^x"])
def test_parse_word_rejects(text):
    with pytest.raises(ValueError):
        parse_word(text, ["a", "b"])


def _sublattice_index(rows):
    m = np.array(rows, dtype=float)
    return round(abs(np.linalg.det(m)))


@given(st.lists(st.lists(st.integers(-6, 6), min_size=2, max_size=2), min_size=2, max_size=4), st.integers(-3, 3))
def test_hnf_invariant_under_row_operations(rows, k):
    h = hermite_normal_form(rows, 2)
    moved = [list(r) for r in rows]
    moved[0] = [a + k * b for a, b in zip(moved[0], moved[1])]
    moved.reverse()
    assert hermite_normal_form(moved, 2) == h
    if len(h) == 2:
        # the index of the sublattice is the gcd of the 2x2 minors
        minors = [abs(a[0] * b[1] - a[1] * b[0]) for i, a in enumerate(rows) for b in rows[i + 1 :]]
        assert _sublattice_index(h) == math.gcd(*minors)


def test_hnf_example():
    assert hermite_normal_form([(2, 0), (0, 3), (2, 3)], 2) == ((2, 0), (0, 3))


def test_lattice_element_arithmetic():
    a, b = LatticeElement((1, 2)), LatticeElement((-1, -2))
    assert (a + b).is_zero()
    assert (a * 3).coords == (3, 6)
    assert lattice_shift_length((1, 1), [3, 4]) == 10


@given(st.lists(st.integers(1, 6), min_size=1, max_size=3))
def test_orthogonal_torus_spectrum_is_set_of_diameters(ds):
    # for a product of circles the shortest vectors are the coordinate ones
    spec = lattice_covering_spectrum(ds)
    assert spec.raw() == sorted(set(ds))
    assert all(v.provenance == "exact" for v in spec)


def test_torus_with_pi_diameters_is_exact():
    spec = lattice_covering_spectrum([PiRational.pi(1), PiRational.pi(Fraction(1, 2))])
    assert spec.raw() == [PiRational.pi(Fraction(1, 2)), PiRational.pi(1)]


def test_float_diameters_are_numeric():
    spec = lattice_covering_spectrum([1.5, 0.5])
    assert spec.floats() == pytest.approx([0.5, 1.5])
    assert {v.provenance for v in spec} == {"numeric"}


def test_nonpositive_diameter_rejected():
    with pytest.raises(ValueError):
        lattice_covering_spectrum([1, 0])


def test_spectrum_sorted_and_positive():
    s = Spectrum((SpecValue(3), SpecValue(Fraction(1, 2)), SpecValue(2.0, "numeric", 1e-9)))
    assert s.floats() == [0.5, 2.0, 3.0]
    with pytest.raises(ValueError):
        Spectrum((SpecValue(0),))
    assert Spectrum().is_empty()
    assert not s.has_undetermined()
    assert Spectrum((SpecValue(1, status="undetermined"),)).has_undetermined()


@given(st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=20))
def test_scaling_keeps_exactness(c):
    s = Spectrum((SpecValue(PiRational.pi(1)), SpecValue(Fraction(3, 2))))
    t = s.scaled(c)
    assert t.raw() == sorted([PiRational.pi(c), Fraction(3, 2) * c], key=float)


@pytest.mark.parametrize("L", [0.0, 1.0, math.pi, -2.5])
def test_extrapolate_harmonic_tail(L):
    xs = [L + 3.0 / (n + 2) for n in range(1, 12)]
    lim, rad = extrapolate_limit(xs)
    assert lim == pytest.approx(L, abs=1e-9)
    assert rad < 1e-6


@pytest.mark.parametrize("q", [0.1, 0.5, 0.8])
def test_extrapolate_geometric_tail(q):
    xs = [2.0 + q**n for n in range(8)]
    lim, _ = extrapolate_limit(xs)
    assert lim == pytest.approx(2.0, abs=1e-9)


def test_accumulation_of_wedge_values():
    vals = [math.pi * (1 + 1 / j) for j in range(1, 51)]
    acc = detect_accumulation(vals)
    assert len(acc) == 1 and acc[0].side == "above"
    assert abs(acc[0].value - math.pi) < 1e-6


@given(st.lists(st.floats(0.1, 10.0), min_size=1, max_size=4, unique=True))
def test_no_accumulation_in_short_lists(vals):
    assume(len(vals) < 6)
    assert detect_accumulation(vals) == []

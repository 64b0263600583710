import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from covspec.exact import PiRational
from covspec.metric_graph import PRESETS, GraphFormatError
from covspec.towers import (
    NO,
    TOWER_PRESETS,
    YES,
    TowerElement,
    constant_tower,
    delta_schedule,
    pants_tower,
    parse_tower,
    shrinking_circle_tower,
    slipping_group_membership,
    slipping_test,
    tower_to_text,
    tower_translation_length,
    two_cusp_tower,
    universal_delta_cover_report,
    universal_slipping_test,
)


@pytest.fixture(scope="module")
def pants():
    return pants_tower(8)


@given(st.lists(st.tuples(st.integers(0, 3), st.sampled_from([1, -1])), min_size=1, max_size=6), st.integers(0, 5))
def test_pants_expansion_preserves_lengths(word, depth):
    t = pants_tower(8)
    g = TowerElement(2, tuple(word))
    a = t.levels[2].translation_length(t.expand(g, 2))
    b = t.levels[2 + depth].translation_length(t.expand(g, 2 + depth))
    assert a == b


@pytest.mark.parametrize("level", range(0, 7))
def test_pants_generator_lengths(pants, level):
    for g in pants.generators(level)[:3]:
        rep = tower_translation_length(pants, g)
        assert rep.lengths == [PiRational.pi(Fraction(2, 2**level))] * len(rep.levels)
        assert rep.stabilized and rep.nonincreasing and not rep.estimate


def test_pants_generators_slip_universally_but_not_individually(pants):
    delta = 2 * math.pi / 2**6  # the deepest loops (level 7) are shorter than this
    g = pants.generators(2)[1]
    assert slipping_test(pants, g, delta).verdict == NO
    assert universal_slipping_test(pants, g, delta).verdict == YES
    # at resolution delta the level-7 loops already count as slipping
    assert slipping_group_membership(pants, g, delta).verdict == YES


def test_shrinking_circle_slips():
    t = shrinking_circle_tower(30)
    g = TowerElement(0, ((0, 1),))
    rep = tower_translation_length(t, g)
    assert rep.lengths[:3] == [1, Fraction(1, 2), Fraction(1, 3)]
    assert rep.nonincreasing and not rep.stabilized
    assert slipping_test(t, g, 0.05).verdict == YES


def test_two_cusp_product_is_not_slipping():
    t = two_cusp_tower(20)
    a, b = t.element("a"), t.element("b")
    ab = TowerElement(0, ((0, 1), (1, 1)))
    assert slipping_test(t, a, 1e-3).verdict == YES
    assert slipping_test(t, b, 1e-3).verdict == YES
    assert slipping_test(t, ab, 0.5).verdict == NO
    # but it is generated by slipping elements
    assert slipping_group_membership(t, ab, 0.5).verdict == YES
    assert universal_slipping_test(t, ab, 0.5).verdict == YES


@pytest.mark.parametrize(
    "name, full, trivial",
    [
        ("pants", True, False),
        ("shrinking-circle", True, False),
        ("two-cusp", True, False),
        ("cusp-cylinder", True, False),
        ("wedge", False, True),
        ("infinite-genus", False, True),
    ],
)
def test_universal_delta_cover_presets(name, full, trivial):
    t = TOWER_PRESETS[name](10) if name == "pants" else TOWER_PRESETS[name]()
    rep = universal_delta_cover_report(t)
    assert (rep.pi_slip_full, rep.pi_slip_trivial) == (full, trivial)
    if full:
        assert "X̃⁰ = X" in rep.statement


def test_wedge_systole_bounded_below():
    rep = universal_delta_cover_report(TOWER_PRESETS["wedge"]())
    assert rep.positive_infimum
    assert rep.infimum == pytest.approx(2 * math.pi, abs=1e-9)


def test_constant_tower_of_compact_graph():
    rep = universal_delta_cover_report(constant_tower(PRESETS["theta"]()))
    assert rep.positive_infimum and rep.is_delta_cover
    assert rep.infimum == 3 and float(rep.delta0) == 1.5


@pytest.mark.parametrize("delta0, target", [(1.0, None), (8.0, 0.3), (2 * math.pi, 2 * math.pi / 2**10)])
def test_delta_schedule(delta0, target):
    s = delta_schedule(delta0, target)
    assert s[0] == delta0
    assert all(b < a for a, b in zip(s, s[1:]))
    if target is not None:
        assert s[-1] == pytest.approx(target)


def test_tower_text_round_trip():
    t = pants_tower(4)
    u = parse_tower(tower_to_text(t))
    assert u.rules == t.rules
    assert [g.rank for g in u.levels] == [1, 2, 4, 8]


@pytest.mark.parametrize(
    "text",
    [
        "level 0\nv o\n",
        "tower\nv o\n",
        "tower\nlevel 0\nv o\ne a o o 1\nlevel 1\nv o\ne b o o 1\nexpand a = c\n",
        "tower\nlevel 0\nv o\ne a o o 1\nlevel 1\nv o\ne b o o 1\n",
    ],
)
def test_bad_tower_files(text):
    with pytest.raises(GraphFormatError):
        parse_tower(text)

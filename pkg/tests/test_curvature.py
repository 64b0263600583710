import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from covspec.curvature import (
    PackingCase,
    QuotientSamplePoint,
    SingularInputError,
    WarpedMetricSpec,
    _image,
    _product_distance,
    berard_bergery_covspec,
    lattice_packing,
    milnor_bound,
    packing_bound,
    packing_case_check,
    plane_packing_grid,
    ricci_circle_direction,
    warp_rescale_check,
    wilking_curvature,
    wilking_displacement_bound,
)
from covspec.metric_graph import PRESETS
from covspec.spaces_core import lattice_covering_spectrum as torus_spectrum


def _ricci_by_hand(f, f1, f2, h, h1, n=2):
    return -(f2 / f + n * f1 * h1 / (f * h))


@pytest.mark.parametrize("r", [0.3, 1.0, 2.5])
def test_ricci_matches_hand_formula(r):
    # f = exp(-r), h = sin(r): f' = -f, f'' = f
    spec = WarpedMetricSpec("exp(-r)", "sin(r)")
    ref = _ricci_by_hand(math.exp(-r), -math.exp(-r), math.exp(-r), math.sin(r), math.cos(r))
    assert ricci_circle_direction(spec, r) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("c", [2.0, 0.5, 3.0])
@pytest.mark.parametrize("r", [0.4, 1.3])
def test_ricci_scales_inverse_square(c, r):
    spec = WarpedMetricSpec("1/(1+r^2)", "r")
    assert ricci_circle_direction(spec.rescaled(c), c * r) == pytest.approx(ricci_circle_direction(spec, r) / c**2, rel=1e-10)


def test_positive_ricci_gives_decreasing_warp():
    # the round sphere: Ric(V, V) = 3 on the whole chart
    rep = warp_rescale_check(WarpedMetricSpec("cos(r)", "sin(r)"), np.linspace(0.05, 1.5, 40))
    assert rep.status == "pass" and rep.ricci_min == pytest.approx(3.0)


def test_injected_derivative_fault_is_caught():
    # a wrong sign on f' keeps Ric > 0 only if f'' compensates; the checker must report it
    spec = WarpedMetricSpec("1/(1+r^2)", "r", df=lambda r: 2 * r / (1 + r * r) ** 2, d2f=lambda r: -10.0)
    rep = warp_rescale_check(spec, [0.5, 1.0, 2.0])
    assert rep.status == "violation"
    assert [r for r, _ in rep.violations] == [0.5, 1.0, 2.0]


def test_hypothesis_not_met_is_not_a_violation():
    rep = warp_rescale_check(WarpedMetricSpec("1+r^2", "r"), [0.5, 1.0])
    assert rep.status == "hypothesis not met" and rep.ok


def test_side_conditions():
    good = WarpedMetricSpec("1/(1+r^2)", "sin(r)").side_conditions()
    assert all(good.values())
    bad = WarpedMetricSpec("exp(r)", "r+1").side_conditions()
    assert bad == {"h(0)=0": False, "h'(0)=1": True, "f(0)!=0": True, "f'(0)=0": False}


def test_singular_inputs():
    with pytest.raises(SingularInputError):
        ricci_circle_direction(WarpedMetricSpec("1", "sin(r)"), math.pi)
    with pytest.raises(SingularInputError):
        ricci_circle_direction(WarpedMetricSpec("r-1", "r"), 1.0)
    with pytest.raises(ValueError):
        ricci_circle_direction(WarpedMetricSpec("1", "r"), 0.0)


@pytest.mark.parametrize("n, delta, value", [(2, 1, 18), (1, 2, 4), (3, "1/2", 250), (2, Fraction(2, 3), 32), (1, 1, 6)])
def test_milnor_bound_exact(n, delta, value):
    out = milnor_bound(n, delta)
    assert out == value and type(out) is int


def test_milnor_bound_float_and_errors():
    assert milnor_bound(2, 0.5) == pytest.approx(50.0)
    with pytest.raises(ValueError):
        milnor_bound(0, 1)
    with pytest.raises(ValueError):
        milnor_bound(2, 0)


@given(st.integers(1, 5), st.fractions(min_value=Fraction(1, 10), max_value=5, max_denominator=20))
def test_milnor_bound_monotone(n, d):
    assert milnor_bound(n, d) > milnor_bound(n, d + Fraction(1, 10))
    assert milnor_bound(n + 1, d) > milnor_bound(n, d)


def test_packing_bound_reduces_to_milnor():
    assert packing_bound(2, 1.0, 0.0, 0.0, 1.0) == pytest.approx(9.0)
    assert packing_bound(2, 1.0, 1.0, 0.0, 1.0) == math.inf


@pytest.mark.parametrize("case", plane_packing_grid(), ids=lambda c: f"d{c.delta}-e{c.eps}-C{c.C}-rho{c.rho}")
def test_plane_packings_respect_the_bound(case):
    for lattice in ("hex", "square"):
        N, bound, ok = packing_case_check(case, lattice)
        assert ok and N <= bound


@settings(max_examples=30)
@given(st.floats(0.1, 1.0), st.floats(1.0, 6.0), st.sampled_from(["hex", "square"]))
def test_lattice_packings_are_disjoint_and_contained(r, R, lattice):
    pts = lattice_packing(2, r, R, lattice)
    assert np.all(np.linalg.norm(pts, axis=1) + r <= R * (1 + 1e-9))
    if len(pts) > 1:
        d = np.linalg.norm(pts[:, None] - pts[None], axis=-1) + np.eye(len(pts)) * 10
        assert d.min() >= 2 * r * (1 - 1e-9)
    # area bound: disjoint disks fit inside the container
    assert len(pts) * r * r <= R * R


def test_packing_case_radii():
    assert PackingCase(2, 1.0, 0.5, 2.0, 3.0).radii == (1.5, 9.5)


@pytest.mark.parametrize(
    "f, diameters, expected",
    [("1+exp(-r)", (3, 2), [2, 3]), ("1+1/(1+r)", (1,), [1]), ("1", (5, 1), [1, 5])],
)
def test_berard_bergery_transfer(f, diameters, expected):
    rep = berard_bergery_covspec(f, torus_spectrum(diameters))
    assert rep.spectrum.raw() == expected
    assert rep.attained == (f == "1")


def test_berard_bergery_from_a_graph():
    assert berard_bergery_covspec("1+exp(-r)", PRESETS["theta"]()).spectrum.raw() == [Fraction(3, 2), 2]


@pytest.mark.parametrize("f", ["2+exp(-r)", "1+r", "1+sin(r)/(1+r)"])
def test_berard_bergery_rejects_bad_warps(f):
    with pytest.raises(ValueError):
        berard_bergery_covspec(f, [1])


@pytest.mark.parametrize("r, expected", [(0.0, (4.0, 4.0)), (1.0, (1.0, 2.0)), (3.0, (0.04, 0.4))])
def test_wilking_curvature(r, expected):
    assert wilking_curvature(r) == pytest.approx(expected, rel=1e-15)


def test_wilking_curvature_decays():
    k = [wilking_curvature(r) for r in (1e1, 1e2, 1e3)]
    assert all(a[0] > b[0] and a[1] > b[1] for a, b in zip(k, k[1:]))
    with pytest.raises(ValueError):
        wilking_curvature(-1.0)


def test_sample_point_validation():
    with pytest.raises(ValueError):
        QuotientSamplePoint((1, 1, 0, 0))
    with pytest.raises(ValueError):
        QuotientSamplePoint((1, 0, 0))


def _dense_min(p, n=20000):
    th = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    return min(_product_distance(_image(p.z, t), p.z) for t in th)


@pytest.mark.parametrize("seed", range(6))
def test_displacement_against_dense_search(seed):
    p = QuotientSamplePoint.random(np.random.default_rng(seed), max_fiber=10.0)
    rep = wilking_displacement_bound(p)
    dense = _dense_min(p)
    assert rep.displacement <= dense + 1e-12
    # the angle derivative is at most ~ 1 + |z|, so the grid is within half a step of it
    assert rep.displacement >= dense - (1 + p.fiber_norm) * math.pi / 20000
    assert rep.margin >= -1e-6


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_displacement_dominates_the_fiber_bound(seed, scale):
    p = QuotientSamplePoint.random(np.random.default_rng(seed), max_fiber=scale)
    assert wilking_displacement_bound(p).margin >= -1e-6


def test_image_is_an_involution_up_to_the_circle():
    p = QuotientSamplePoint.random(np.random.default_rng(5))
    twice = _image(_image(p.z, 0.0), 0.0)
    # applying the map twice multiplies every coordinate by the same unit scalar
    ratios = [a / b for a, b in zip(twice, p.z)]
    assert all(abs(q - ratios[0]) < 1e-12 and abs(abs(q) - 1) < 1e-12 for q in ratios)

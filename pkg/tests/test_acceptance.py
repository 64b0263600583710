"""End-to-end acceptance checks, one group per criterion.

Each check records its outcome through ``check`` so that the terminal summary
prints a single PASS/FAIL line per criterion.
"""
import functools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE
from covspec import cli
from covspec.curvature import (
    QuotientSamplePoint,
    berard_bergery_covspec,
    milnor_bound,
    packing_case_check,
    plane_packing_grid,
    wilking_curvature,
    wilking_displacement_bound,
)
from covspec.exact import PiRational
from covspec.expr import WarpFunction
from covspec.geodesic import ClairautSolver, variational_F
from covspec.metric_graph import covering_spectrum_graph, covofshift_check, random_graph, wedge_j
from covspec.model_spaces import (
    MODEL_PRESETS,
    WARP_PRESETS,
    ConeModel,
    ConeSpace,
    MoebiusModel,
    cone_rescaled_spectrum,
    covspec_warped_cylinder,
    revolution_rescaled_length,
    warped_rescaled_length,
)
from covspec.rescaled import rescaled_covspec, rescaled_lemma_suite, rescaled_length_infinity
from covspec.spaces_core import lattice_covering_spectrum
from covspec.towers import NO, YES, delta_schedule, pants_tower, slipping_test, universal_delta_cover_report, universal_slipping_test
from oracles import word_shift_lengths

PI = PiRational.pi


def check(n: int, ok: bool, detail: str):
    ok = bool(ok)
    ACCEPTANCE.setdefault(n, []).append((ok, detail))
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


# ---------------------------------------------------------------- 1


def test_01_torus_spectrum_from_cli(tmp_path):
    out = tmp_path / "t.json"
    code, res = cli.run(["covspec", "torus", "--diameters", "3,2,1", "-o", str(out)])
    spec = lattice_covering_spectrum([3, 2, 1])
    ok = code == 0 and spec.raw() == [1, 2, 3] and all(type(v) is int for v in spec.raw()) and [r[1] for r in res.rows] == ["1", "2", "3"]
    check(1, ok, f"torus 3,2,1 -> {spec.raw()}")


# ---------------------------------------------------------------- 2


def test_02_wedge_values_and_accumulation():
    spec = covering_spectrum_graph(wedge_j(50)).with_accumulation()
    want = sorted(PI(1 + Fraction(1, j)) for j in range(1, 51))
    check(2, spec.raw() == want, f"{len(spec.raw())} exact values pi(1+1/j)")
    acc = [a.value for a in spec.accumulation_points]
    check(2, len(acc) == 1 and abs(acc[0] - math.pi) < 1e-6, f"accumulation at {acc}")


# ---------------------------------------------------------------- 3


def test_03_gauss_bump_cylinder():
    rep = covspec_warped_cylinder("1+exp(-r^2)", PI(2), "R", evidence_points=11)
    vals = rep.spectrum.floats()
    check(3, len(vals) == 1 and abs(vals[0] - math.pi) < 1e-3, f"CovSpec = {vals}")
    check(3, abs(float(rep.length_g) - 2 * math.pi) < 1e-4 and rep.attained is False, f"L(g) = {float(rep.length_g)}, attained={rep.attained}")
    s = ClairautSolver.warped("1+exp(-r^2)", x_lo=-math.inf)
    sampled = [(x, F) for x, F in rep.evidence] + [(float(r), s.F(float(r), 2 * math.pi).length) for r in np.linspace(-5, 5, 41)]
    worst = min(F - 2 * math.pi for _, F in sampled)
    check(3, worst > 0, f"min F(r, 2pi) - 2pi over {len(sampled)} samples = {worst:.3e}")


# ---------------------------------------------------------------- 4


def test_04_cusp_cylinder(tmp_path):
    rep = covspec_warped_cylinder("exp(r)", PI(2), "R", evidence_points=0)
    check(4, rep.spectrum.is_empty(), f"CovSpec = {rep.spectrum.raw()}")
    code, res = cli.run(["slipping", "preset", "cusp-cylinder", "-o", str(tmp_path / "s")])
    verdicts = {r[0]: r[4] for r in res.rows}
    check(4, code == 0 and verdicts["g (warped model)"] == YES and verdicts["g"] == YES, f"slipping verdicts {verdicts}")


# ---------------------------------------------------------------- 5


def test_05_cone_and_hyperboloid():
    spec = cone_rescaled_spectrum(ConeSpace(1, (math.pi / math.sqrt(2),)))
    check(5, spec["infinite"].raw() == [1] and type(spec["infinite"].raw()[0]) is int, f"cone CovSpec_inf = {spec['infinite'].raw()}")
    check(5, spec["basepoint"].is_empty() and rescaled_covspec(ConeModel(), "basepoint").is_empty(), "cone basepoint spectrum empty")
    t0 = time.perf_counter()
    est = revolution_rescaled_length("sqrt(r^2+1)", z_schedule=[1e3])
    dt = time.perf_counter() - t0
    check(5, abs(est.ratios[-1] - 2) < 5e-2 and dt <= 60, f"hyperboloid ratio {est.ratios[-1]:.8f} at z=1e3 in {dt:.2f}s")


# ---------------------------------------------------------------- 6


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("d", [math.pi / 4, math.pi / 2, math.pi])
def test_06_linear_warp_limits(k, d):
    ratio = warped_rescaled_length(f"{k}*r", d, [1e4]).ratios[-1]
    want = math.sqrt(2 - 2 * math.cos(min(math.pi, k * d)))
    check(6, abs(ratio - want) < 1e-2, f"k={k}, d={d:.4f}: {ratio:.8f} vs {want:.8f}")


def test_06_sublinear_warp_limit():
    ratio = warped_rescaled_length("sqrt(r)", math.pi, [1e6]).ratios[-1]
    check(6, ratio < 1e-2, f"sqrt(r): ratio {ratio:.3e} at r=1e6")


# ---------------------------------------------------------------- 7


@pytest.fixture(scope="module")
def pants12():
    return pants_tower(12)


@pytest.mark.parametrize("level", range(7))
def test_07_pants_generators(pants12, level):
    delta = 2 * math.pi / 2**10
    sched = delta_schedule(4 * math.pi, delta)
    bad = []
    for g in pants12.generators(level):
        L = pants12.levels[level].translation_length(pants12.expand(g, level))
        if L != PI(Fraction(2, 2**level)):
            bad.append(f"length {L}")
        if not all(universal_slipping_test(pants12, g, d).verdict == YES for d in sched):
            bad.append("universal")
        if slipping_test(pants12, g, delta).verdict != NO:
            bad.append("slipping")
    check(7, not bad, f"level {level}: {len(pants12.generators(level))} generators, issues {bad[:3]}")


def test_07_pants_report(pants12):
    text = "\n".join(universal_delta_cover_report(pants12).lines())
    check(7, "π_slip = full group" in text and "X̃⁰ = X" in text, "report states full slipping group and trivial universal delta cover")


# ---------------------------------------------------------------- 8


LEMMA_PRESETS = ["flat-cylinder", "hyperboloid", "cone", "moebius", "nabonnand"]


@functools.lru_cache(maxsize=None)
def lemma_checks(name):
    return {c.name: c for c in rescaled_lemma_suite(MODEL_PRESETS[name]())}


@pytest.mark.parametrize("name", LEMMA_PRESETS)
def test_08_lengths_at_most_two(name):
    c = lemma_checks(name)["at most 2"]
    check(8, c.worst <= 2 + 1e-9, f"{name}: {c.detail}")


@pytest.mark.parametrize("name", LEMMA_PRESETS)
def test_08_infinity_dominates_basepoint(name):
    c = lemma_checks(name)["infinity >= basepoint"]
    check(8, c.worst <= 1e-6, f"{name}: {c.detail}")


@pytest.mark.parametrize("name", LEMMA_PRESETS)
def test_08_basepoint_independence(name):
    c = lemma_checks(name)["basepoint independence"]
    check(8, c.worst < 1e-6, f"{name}: {c.detail}")


@pytest.mark.parametrize("name", LEMMA_PRESETS)
def test_08_zero_iff_zero(name):
    c = lemma_checks(name)["zero iff zero"]
    check(8, c.ok, f"{name}: {c.detail}")


@pytest.mark.parametrize("name", LEMMA_PRESETS)
def test_08_scale_invariance(name):
    c = lemma_checks(name)["scale invariance"]
    check(8, c.ok and c.worst < 1e-6, f"{name}: {c.detail}")


# ---------------------------------------------------------------- 9


def test_09_moebius():
    m = MoebiusModel()
    spec = rescaled_covspec(m, "infinity")
    g1, g2 = rescaled_length_infinity(m, 1), rescaled_length_infinity(m, 2)
    check(9, spec.raw() == [1], f"spectrum {spec.raw()}")
    check(9, abs(float(g1.value) - 2) <= 1e-6 and abs(g1.numeric - 2) <= 1e-6, f"L(g) = {g1.value} (sampled {g1.numeric})")
    check(9, float(g2.value) < 1e-4 and g2.numeric < 1e-4, f"L(g^2) = {g2.value} (sampled {g2.numeric})")


# ---------------------------------------------------------------- 10


def test_10_covofshift_on_random_graphs():
    rng = np.random.default_rng(0)
    graphs = [random_graph(rng) for _ in range(50)]
    assert all(len(g.edges) <= 6 for g in graphs)
    violations = []
    for i, g in enumerate(graphs):
        half = [x / 2 for x in word_shift_lengths(g, 8)]
        rep = covofshift_check(g, half_shift=half)
        violations += [(i, v) for v in rep.violations]
    check(10, not violations, f"50 graphs, violations {violations[:5]}")


# ---------------------------------------------------------------- 11


def test_11_wilking():
    check(11, wilking_curvature(0.0) == (4.0, 4.0) and wilking_curvature(1.0) == (1.0, 2.0), "curvatures at r = 0, 1")
    rng = np.random.default_rng(0)
    margins = [wilking_displacement_bound(QuotientSamplePoint.random(rng)).margin for _ in range(100)]
    check(11, min(margins) >= -1e-6, f"minimum margin over 100 points {min(margins):.3e}")
    b = wilking_displacement_bound(QuotientSamplePoint((1, 0, 1e3, 0)))
    ratio = b.displacement / 1e3
    check(11, ratio >= math.sqrt(2) / 2 - 1e-3, f"ratio at |z| = 1e3: {ratio:.8f}")


# ---------------------------------------------------------------- 12


def test_12_milnor_and_packings():
    check(12, milnor_bound(2, 1) == 18, f"milnor_bound(2, 1) = {milnor_bound(2, 1)}")
    grid = plane_packing_grid()
    bad = [(c, lat) for c in grid for lat in ("hex", "square") if not packing_case_check(c, lat)[2]]
    check(12, len(grid) == 20 and not bad, f"{len(grid)} cases, over the bound: {bad}")


# ---------------------------------------------------------------- 13


def test_13_berard_bergery():
    fiber = lattice_covering_spectrum([3, 2])
    rep = berard_bergery_covspec("1+exp(-r)", fiber)
    check(13, rep.spectrum.raw() == [2, 3] == fiber.raw() and not rep.attained, f"{rep.spectrum.raw()}")


# ---------------------------------------------------------------- 14


ORACLE_GRID = [
    (f, r, d)
    for f in ("1+exp(-r^2)", "cosh(r)", "2+sin(r)", "r^2+1")
    for r, d in ((0.0, 1.0), (0.5, 2.0), (-1.0, 3.0), (1.5, 0.7), (2.0, 4.0))
]


@pytest.mark.parametrize("f, r, d", ORACLE_GRID)
def test_14_shooting_vs_variational(f, r, d):
    a = ClairautSolver.warped(f, x_lo=-math.inf).F(r, d).length
    b = variational_F(f, r, d)
    rel = abs(a - b) / abs(b)
    check(14, rel < 1e-6, f"{f} r={r} d={d}: relative gap {rel:.2e}")


PRESET_WARPS = sorted({f for f, _ in WARP_PRESETS.values()} | {"sqrt(r^2+1)", "r", "1+exp(-r)", "sqrt(r)", "r/2", "2*r"})


@pytest.mark.parametrize("f", PRESET_WARPS)
def test_14_symbolic_vs_finite_difference(f):
    w = WarpFunction(f)
    xs = np.linspace(0.1, 5.0, 50) if "sqrt(r)" == f else np.linspace(-5.0, 5.0, 51)
    e1 = w.derivative_error(xs)
    # second derivative: central difference of the symbolic first derivative
    h = 1e-5 * np.maximum(1.0, np.abs(xs))
    ones = np.ones_like(xs)
    d2 = np.asarray(w.d2(xs), dtype=float) * ones
    fd2 = (np.asarray(w.d1(xs + h), dtype=float) * ones - np.asarray(w.d1(xs - h), dtype=float) * ones) / (2 * h)
    e2 = float(np.max(np.abs(fd2 - d2) / np.maximum.reduce([np.abs(d2), np.abs(np.asarray(w.d1(xs), dtype=float) * ones), ones])))
    check(14, e1 < 1e-5 and e2 < 1e-5, f"{f}: first {e1:.1e}, second {e2:.1e}")

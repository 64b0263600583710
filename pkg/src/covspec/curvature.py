"""Curvature-side checks for doubly warped products and the Wilking quotient.

The metric ``dr^2 + h(r)^2 g_{S^n} + f(r)^2 ds^2`` on ``R^{n+1} x S^1`` has
circle-direction Ricci curvature

    Ric(V, V) = -( f''/f + n f' h' / (f h) )

for a unit vector ``V`` tangent to the circle; the default fiber dimension
``n = 2`` gives the familiar ``2 f'h'/(fh)`` cross term.  A decreasing warping
function is forced whenever this is positive, which ``warp_rescale_check``
verifies on a grid.  The remaining helpers are small evaluators: a
volume-counting cardinality bound, the spectrum transfer across a warping
function tending to 1, and the explicit curvature and displacement formulas of
Wilking's circle quotient of ``S^3 x R^4``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
import sympy
from scipy import optimize

from .expr import Num, Var, WarpFunction, mul, div, substitute
from .metric_graph import MetricGraph, covering_spectrum_graph
from .spaces_core import SpecValue, Spectrum


SINGULAR_TOL = 1e-12


class SingularInputError(ValueError):
    """Raised where the warped metric degenerates (``h(r) = 0`` away from 0)."""


def _warp(f) -> WarpFunction:
    return f if isinstance(f, WarpFunction) else WarpFunction(str(f))


@dataclass
class WarpedMetricSpec:
    """``dr^2 + h^2 g_{S^n} + f^2 ds^2`` with optional derivative overrides.

    ``df``/``d2f`` replace the symbolic derivatives of ``f``; they exist so
    that tests can inject a faulty derivative and watch the checker catch it.
    """

    f: WarpFunction
    h: WarpFunction
    n: int = 2
    grid: np.ndarray | None = None
    df: Callable | None = None
    d2f: Callable | None = None

    def __post_init__(self):
        self.f = _warp(self.f)
        self.h = _warp(self.h)
        if self.n < 1:
            raise ValueError("fiber dimension must be at least 1")
        if self.grid is None:
            self.grid = np.linspace(0.05, 10.0, 200)

    def derivatives(self, r):
        f = float(self.f(r))
        f1 = float(self.df(r) if self.df is not None else self.f.d1(r))
        f2 = float(self.d2f(r) if self.d2f is not None else self.f.d2(r))
        return f, f1, f2, float(self.h(r)), float(self.h.d1(r))

    def side_conditions(self, tol: float = 1e-9) -> dict[str, bool]:
        """Smoothness conditions at the axis ``r = 0``: h(0)=0, h'(0)=1, f(0)!=0, f'(0)=0."""
        return {
            "h(0)=0": abs(float(self.h(0.0))) <= tol,
            "h'(0)=1": abs(float(self.h.d1(0.0)) - 1.0) <= tol,
            "f(0)!=0": abs(float(self.f(0.0))) > tol,
            "f'(0)=0": abs(float(self.f.d1(0.0))) <= tol,
        }

    def rescaled(self, c: float) -> "WarpedMetricSpec":
        """The metric scaled by ``c``: ``r -> c r``, ``f -> f(./c)``, ``h -> c h(./c)``."""
        q = Fraction(c).limit_denominator(10**9)
        arg = div(Var(self.f.var), Num(q))
        f = WarpFunction(substitute(self.f.node, self.f.var, arg), self.f.var)
        h = WarpFunction(mul(Num(q), substitute(self.h.node, self.h.var, div(Var(self.h.var), Num(q)))), self.h.var)
        return WarpedMetricSpec(f, h, self.n, np.asarray(self.grid) * float(q))


def ricci_circle_direction(spec: WarpedMetricSpec, r: float) -> float:
    """``Ric(V, V)`` for the unit circle direction at radius ``r > 0``."""
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    f, f1, f2, h, h1 = spec.derivatives(r)
    if abs(h) <= SINGULAR_TOL:
        raise SingularInputError(f"h vanishes at r={r}")
    if abs(f) <= SINGULAR_TOL:
        raise SingularInputError(f"f vanishes at r={r}")
    return -(f2 / f + spec.n * f1 * h1 / (f * h))


@dataclass
class WarpRescaleReport:
    status: str  # pass | hypothesis not met | violation
    ricci_min: float
    violations: list[tuple[float, float]] = field(default_factory=list)  # (r, f'(r))
    ricci_failures: list[float] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status != "violation"


def warp_rescale_check(spec: WarpedMetricSpec, grid: Sequence[float] | None = None) -> WarpRescaleReport:
    """If ``Ric(V,V) > 0`` on every grid point then ``f' < 0`` there too.

    A violation can only come from wrong derivatives, since positive
    circle-direction Ricci curvature rules out a critical point of ``f``
    with ``f'' >= 0`` and hence any increasing stretch.
    """
    pts = np.asarray(spec.grid if grid is None else grid, dtype=float)
    if np.any(pts <= 0):
        raise ValueError("grid must lie in (0, inf)")
    ric = np.array([ricci_circle_direction(spec, float(r)) for r in pts])
    bad_ric = [float(r) for r, v in zip(pts, ric) if not v > 0]
    if bad_ric:
        return WarpRescaleReport("hypothesis not met", float(ric.min()), [], bad_ric)
    viol = []
    for r in pts:
        d = spec.derivatives(float(r))[1]
        if not d < 0:
            viol.append((float(r), d))
    return WarpRescaleReport("violation" if viol else "pass", float(ric.min()), viol, [])


# --------------------------------------------------------------------------
# cardinality bound


def _num(x):
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return float(x)


def milnor_bound(n: int, delta) -> object:
    """``2 (2 + delta)^n / delta^n``; exact for rational ``delta``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    d = _num(delta)
    if not d > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    out = 2 * (2 + d) ** n / d**n
    if isinstance(out, Fraction) and out.denominator == 1:
        return int(out)
    return out


def packing_bound(n: int, delta, eps, C, rho) -> float:
    """Right-hand side of the packing inequality (``inf`` when ``eps = delta``)."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    if eps < 0 or eps > delta:
        raise ValueError("need 0 <= eps <= delta")
    gap = rho * (delta - eps)
    if gap == 0:
        return math.inf
    return (C + rho * (2 + delta - eps)) ** n / gap**n


def packing_inequality_check(n: int, delta, eps, C, rho, N: int) -> bool:
    """``N <= (C + rho(2+delta-eps))^n / (rho(delta-eps))^n``."""
    return N <= packing_bound(n, delta, eps, C, rho)


def lattice_packing(n: int, r: float, R: float, lattice: str = "square") -> np.ndarray:
    """Centers of disjoint radius-``r`` balls inside the radius-``R`` ball.

    ``square`` uses the grid ``2r Z^n``; ``hex`` (plane only) the hexagonal
    lattice, the densest disk packing.
    """
    m = int(math.floor(R / (2 * r))) + 1
    if lattice == "hex":
        if n != 2:
            raise ValueError("hexagonal packing is planar")
        i, j = np.meshgrid(np.arange(-2 * m, 2 * m + 1), np.arange(-2 * m, 2 * m + 1), indexing="ij")
        pts = np.stack([2 * r * (i + 0.5 * j), 2 * r * (math.sqrt(3) / 2) * j], axis=-1).reshape(-1, 2)
    elif lattice == "square":
        axis = 2 * r * np.arange(-m, m + 1)
        pts = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    else:
        raise ValueError(f"unknown lattice {lattice!r}")
    keep = np.linalg.norm(pts, axis=1) + r <= R * (1 + 1e-12)
    return pts[keep]


@dataclass(frozen=True)
class PackingCase:
    n: int
    delta: float
    eps: float
    C: float
    rho: float

    @property
    def radii(self) -> tuple[float, float]:
        """(small ball radius, container radius) in the packing argument."""
        return self.rho * (self.delta - self.eps), self.C + self.rho * (2 + self.delta - self.eps)


def plane_packing_grid() -> list[PackingCase]:
    """Twenty planar cases: four (delta, eps) pairs times five (C, rho) pairs."""
    pairs = [(1.0, 0.0), (1.0, 0.5), (0.5, 0.0), (0.25, 0.1)]
    shapes = [(0.0, 1.0), (1.0, 1.0), (0.0, 3.0), (2.0, 0.5), (5.0, 2.0)]
    return [PackingCase(2, d, e, C, rho) for d, e in pairs for C, rho in shapes]


def packing_case_check(case: PackingCase, lattice: str = "hex") -> tuple[int, float, bool]:
    """(packed count, bound, within bound) for an explicit lattice packing."""
    r, R = case.radii
    N = len(lattice_packing(case.n, r, R, lattice))
    bound = packing_bound(case.n, case.delta, case.eps, case.C, case.rho)
    return N, bound, packing_inequality_check(case.n, case.delta, case.eps, case.C, case.rho, N)


# --------------------------------------------------------------------------
# spectrum transfer across a warping function tending to 1


@dataclass
class TransferReport:
    spectrum: Spectrum
    attained: bool
    inf_f: float


def _limit_at_infinity(w: WarpFunction) -> float:
    x = sympy.Symbol(w.var, real=True)
    try:
        L = sympy.limit(w.to_sympy(), x, sympy.oo)
        if L.is_finite:
            return float(L)
    except (NotImplementedError, TypeError, ValueError):
        pass
    tail = [float(w(t)) for t in (1e6, 1e8, 1e10)]
    if abs(tail[-1] - tail[-2]) <= 1e-9 * max(1.0, abs(tail[-1])):
        return tail[-1]
    return math.nan


def berard_bergery_covspec(f, fiber: Spectrum | Sequence | MetricGraph, tol: float = 1e-9) -> TransferReport:
    """Covering spectrum of ``[0, inf) x_f M`` from that of the fiber ``M``.

    Every deck element has shift length ``inf f * L_M = L_M`` but the
    infimum escapes to infinity (unless ``f`` is constant), so the spectrum
    is the fiber's and no shift is attained.
    """
    w = _warp(f)
    L = _limit_at_infinity(w)
    if not abs(L - 1.0) <= tol:
        raise ValueError(f"warping function must tend to 1, found limit {L}")
    grid = np.concatenate([np.linspace(0.0, 10.0, 401), np.geomspace(10.0, 1e6, 200)])
    d1 = np.asarray(w.d1(grid), dtype=float) * np.ones_like(grid)
    if np.any(d1 > tol):
        raise ValueError("warping function must be non-increasing")
    if isinstance(fiber, MetricGraph):
        spec = covering_spectrum_graph(fiber)
    elif isinstance(fiber, Spectrum):
        spec = fiber
    else:
        spec = Spectrum(tuple(v if isinstance(v, SpecValue) else SpecValue(v) for v in fiber))
    const = w.is_constant()
    note = "shift lengths attained" if const else "infimum of f not attained: shifts approached at infinity"
    return TransferReport(Spectrum(spec.values, spec.accumulation_points, spec.notes + (note,)), const, 1.0)


# --------------------------------------------------------------------------
# Wilking's quotient of S^3 x R^4


def wilking_curvature(r: float) -> tuple[float, float]:
    """Sectional curvatures ``(4/(1+r^2)^2, 4/(1+r^2))`` at fiber radius ``r``."""
    if r < 0:
        raise ValueError("r must be non-negative")
    q = 1.0 + r * r
    return 4.0 / (q * q), 4.0 / q


@dataclass(frozen=True)
class QuotientSamplePoint:
    z: tuple[complex, complex, complex, complex]

    def __post_init__(self):
        z = tuple(complex(v) for v in self.z)
        if len(z) != 4:
            raise ValueError("need four complex coordinates")
        if abs(abs(z[0]) ** 2 + abs(z[1]) ** 2 - 1.0) > 1e-12:
            raise ValueError("|z1|^2 + |z2|^2 must equal 1")
        object.__setattr__(self, "z", z)

    @property
    def fiber_norm(self) -> float:
        return math.hypot(abs(self.z[2]), abs(self.z[3]))

    @classmethod
    def random(cls, rng: np.random.Generator, max_fiber: float = 1e3) -> "QuotientSamplePoint":
        s = rng.normal(size=4)
        s /= np.linalg.norm(s)
        t = rng.normal(size=4)
        t *= rng.uniform(0.0, max_fiber) / np.linalg.norm(t)
        return cls((complex(s[0], s[1]), complex(s[2], s[3]), complex(t[0], t[1]), complex(t[2], t[3])))


def _image(z, th):
    z1, z2, z3, z4 = z
    e, em = cmath.exp(1j * th), cmath.exp(1j * (math.pi + th))
    return (e * z2.conjugate(), em * z1.conjugate(), e * z4.conjugate(), em * z3.conjugate())


def _product_distance(p, q) -> float:
    ip = (p[0] * q[0].conjugate() + p[1] * q[1].conjugate()).real
    dS = math.acos(max(-1.0, min(1.0, ip)))
    dR = math.sqrt(abs(p[2] - q[2]) ** 2 + abs(p[3] - q[3]) ** 2)
    return math.hypot(dS, dR)


@dataclass(frozen=True)
class DisplacementBound:
    displacement: float
    lower_bound: float
    theta: float

    @property
    def margin(self) -> float:
        return self.displacement - self.lower_bound


def wilking_displacement_bound(p: QuotientSamplePoint, resolution: int = 256) -> DisplacementBound:
    """Displacement of the deck involution at ``p`` against ``(sqrt2/2)|(z3, z4)|``.

    The quotient distance minimises over one circle angle: a grid locates
    the best cell and golden-section search refines it.
    """
    z = p.z
    obj = lambda th: _product_distance(_image(z, th), z)
    grid = np.linspace(0.0, 2 * math.pi, resolution, endpoint=False)
    vals = np.array([obj(t) for t in grid])
    k = int(np.argmin(vals))
    step = grid[1] - grid[0]
    a, b, c = grid[k] - step, grid[k], grid[k] + step
    fa, fb, fc = obj(a), obj(b), obj(c)
    if fb > min(fa, fc):
        raise RuntimeError("grid minimum is not bracketed")
    if not (fb < fa and fb < fc):
        # flat in the angle (up to rounding): the grid value is the minimum
        return DisplacementBound(float(vals[k]), math.sqrt(2) / 2 * p.fiber_norm, float(grid[k]))
    res = optimize.minimize_scalar(obj, bracket=(a, b, c), method="golden", tol=1e-12)
    if not res.success:
        raise RuntimeError(f"golden-section refinement failed: {res.message}")
    disp = min(float(res.fun), float(vals[k]))
    return DisplacementBound(disp, math.sqrt(2) / 2 * p.fiber_norm, float(res.x) % (2 * math.pi))

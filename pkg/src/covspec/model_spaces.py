"""Cones, warped cylinders, surfaces of revolution and the named model spaces.

Closed forms are used wherever the geometry gives one (cone law of cosines,
the warped-cylinder sandwich ``d inf f <= F(x, d) <= d f(x)``, the Moebius
displacement); everything else goes through ``ClairautSolver``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
import sympy
from scipy import optimize

from .exact import PiRational, is_exact
from .expr import WarpFunction
from .geodesic import ClairautSolver, GeodesicError
from .parallel import pmap
from .spaces_core import GroupDescriptor, LatticeElement, SpaceModel, SpecValue, Spectrum, exact_simplify


def _power_of(g) -> int:
    if isinstance(g, LatticeElement):
        return int(g.coords[0])
    if isinstance(g, (tuple, list)) and g and isinstance(g[0], tuple):
        return sum(s for _, s in g)  # word in a single generator
    return int(g)


def _to_sympy_number(x):
    if isinstance(x, PiRational):
        return x.to_sympy()
    if isinstance(x, (Fraction, int)):
        return sympy.Rational(x)
    return sympy.Float(float(x))


def _exact_from_sympy(v):
    """PiRational/Fraction for sympy values in Q + Q*pi, else None."""
    v = sympy.nsimplify(v) if v.is_Float else sympy.simplify(v)
    a, b = sympy.Wild("a"), sympy.Wild("b")
    if v.is_Rational:
        return exact_simplify(PiRational(Fraction(int(v.p), int(v.q))))
    m = sympy.expand(v).match(a + b * sympy.pi)
    if m and m[a].is_Rational and m[b].is_Rational:
        return exact_simplify(PiRational(Fraction(int(m[a].p), int(m[a].q)), Fraction(int(m[b].p), int(m[b].q))))
    return None


# --------------------------------------------------------------------------
# cones


def cone_distance(r1: float, r2: float, dY: float, k: float = 1.0) -> float:
    """Distance in ``C_k(Y) = (0, inf) x_{kr} Y`` between ``(r1, y1)`` and ``(r2, y2)``."""
    if r1 < 0 or r2 < 0 or dY < 0:
        raise ValueError("cone_distance needs r1, r2 >= 0 and d_Y >= 0")
    ang = min(math.pi, k * float(dY))
    return math.sqrt(max(r1 * r1 + r2 * r2 - 2 * r1 * r2 * math.cos(ang), 0.0))


def _half_chord(x) -> tuple[object, str]:
    """``(1/2) sqrt(2 - 2 cos(min(pi, x)))`` = ``sin(min(pi/2, x/2))``, exact when possible."""
    if is_exact(x):
        xe = PiRational.coerce(x)
        if xe >= PiRational.pi():
            return Fraction(1), "exact"
        if xe.rational == 0:
            q = xe.pi_coeff
            table = {Fraction(1, 3): Fraction(1, 2), Fraction(1, 1): Fraction(1)}
            if q in table:
                return table[q], "exact"
            return math.sin(float(xe) / 2), f"closed-form: sin({PiRational.pi(q / 2)})"
    x = float(x)
    if x >= math.pi:
        return Fraction(1), "exact"
    return math.sin(x / 2), "closed-form"


@dataclass(frozen=True)
class ConeSpace:
    """``C_k(Y)`` described by ``k`` and the covering spectrum of ``Y``."""

    k: object
    base_covspec: tuple = ()
    base_diameter: object = None

    def __post_init__(self):
        if not float(self.k) > 0:
            raise ValueError("cone scaling k must be positive")
        vals = tuple(self.base_covspec)
        if any(not float(v) > 0 for v in vals):
            raise ValueError("CovSpec(Y) values must be positive")
        object.__setattr__(self, "base_covspec", vals)


def cone_rescaled_spectrum(c: ConeSpace) -> dict[str, Spectrum]:
    """Both rescaled covering spectra of a cone.

    Each ``delta`` in CovSpec(Y) maps to ``(1/2) sqrt(2 - 2 cos(min(pi, 2 k delta)))``;
    the basepoint spectrum is empty since every element has rescaled length 0
    along the rays into the apex.
    """
    vals = []
    for d in c.base_covspec:
        x = PiRational.coerce(c.k) * PiRational.coerce(d) * 2 if is_exact(c.k) and is_exact(d) else 2 * float(c.k) * float(d)
        v, prov = _half_chord(x)
        vals.append(SpecValue(exact_simplify(v) if is_exact(v) else v, prov))
    uniq = {}
    for v in vals:
        uniq.setdefault(round(v.numeric, 12), v)
    return {"infinite": Spectrum(tuple(uniq.values()), notes=("cone closed form",)), "basepoint": Spectrum(notes=("every element slips toward the apex",))}


# --------------------------------------------------------------------------
# warped planes and cylinders


def _solver(f: WarpFunction | str, domain: str | float = "R") -> ClairautSolver:
    lo = -math.inf if domain in ("R", "real", None) else float(0.0 if domain in ("half", "[0,inf)") else domain)
    return ClairautSolver.warped(f, x_lo=lo)


def warped_geodesic_F(f: WarpFunction | str, r: float, d: float, domain: str | float = "half", tol: float = 1e-8) -> float:
    """Minimal length from ``(r, 0)`` to ``(r, d)`` in the warped plane ``I x_f R``.

    ``domain`` is ``"half"`` for ``[0, inf)`` (wall at 0), ``"R"`` for the
    whole line, or a number giving the wall position.
    """
    w = WarpFunction(f) if isinstance(f, str) else f
    s = _solver(w, domain)
    if not w.check_positive(max(s.x_lo, r - 50) if math.isfinite(s.x_lo) else r - 50, r + 50):
        if not (math.isfinite(s.x_lo) and w.check_positive(s.x_lo + 1e-9, r + 50)):
            raise GeodesicError(f"warping function {w} is not positive near r = {r}")
    res = s.F(r, d)
    if not math.isfinite(res.length):
        raise GeodesicError(f"no finite candidate path (r={r}, d={d}): {res.candidates}")
    return res.length


@dataclass
class LimitEstimate:
    """Tail minimum of a ratio along a schedule (an estimate, never a certificate)."""

    value: float
    schedule: list
    ratios: list
    tail_min: float
    decreasing: bool
    tag: str = "estimate"

    def lines(self) -> list[str]:
        out = [f"{x:>14.6g}  {y:.12f}" for x, y in zip(self.schedule, self.ratios)]
        out.append(f"tail minimum {self.tail_min:.12f} ({self.tag}; {'decreasing' if self.decreasing else 'not decreasing'} tail)")
        return out


def _estimate(schedule, ratios) -> LimitEstimate:
    tail = ratios[len(ratios) // 2 :]
    dec = all(b <= a + 1e-12 for a, b in zip(tail, tail[1:]))
    return LimitEstimate(min(tail), list(schedule), list(ratios), min(tail), dec)


def geometric_schedule(lo: float, hi: float, n: int) -> list[float]:
    return [float(x) for x in np.geomspace(lo, hi, n)]


@dataclass(frozen=True)
class SecondFiber:
    """The optional factor ``h(r)^2 g_M`` of a doubly warped product."""

    h: WarpFunction | str
    simply_connected: bool


def require_asymptotic_hypotheses(second: SecondFiber | None) -> None:
    """The slope formula needs ``M`` simply connected or ``h(0) = 0``; refuse anything else."""
    if second is None or second.simply_connected:
        return
    h = WarpFunction(second.h) if isinstance(second.h, str) else second.h
    if abs(float(h(0.0))) > 1e-12:
        raise ValueError("second fiber is not simply connected and h(0) != 0: the slope formula does not apply")


def warped_rescaled_length(f: WarpFunction | str, L_N: float, r_schedule: Sequence[float] | None = None, domain="half",
                           second: SecondFiber | None = None) -> LimitEstimate:
    """Estimate ``liminf F(r, L_N)/r`` on a geometric schedule."""
    require_asymptotic_hypotheses(second)
    w = WarpFunction(f) if isinstance(f, str) else f
    s = _solver(w, domain)
    sched = list(r_schedule) if r_schedule is not None else geometric_schedule(10.0, 1e4, 7)
    ratios = pmap(lambda r: s.F(r, float(L_N)).length / r, sched)
    return _estimate(sched, ratios)


@dataclass
class AsymptoticSlope:
    k: object  # exact when sympy finds the limit
    verdict: str  # limit | zero | no-limit
    method: str


def asymptotic_slope(f: WarpFunction | str, schedule: Sequence[float] | None = None) -> AsymptoticSlope:
    """``k = lim f(r)/r``, symbolically when sympy manages, else on a schedule."""
    w = WarpFunction(f) if isinstance(f, str) else f
    r = w.symbol()
    try:
        lim = sympy.limit(w.to_sympy().subs(sympy.Symbol(w.var, real=True), r) / r, r, sympy.oo)
        if lim.is_finite and lim.is_real:
            ex = _exact_from_sympy(lim)
            k = ex if ex is not None else float(lim)
            return AsymptoticSlope(k, "zero" if float(k) == 0 else "limit", "symbolic")
    except (NotImplementedError, TypeError, ValueError):
        pass
    sched = list(schedule) if schedule is not None else geometric_schedule(1e3, 1e9, 7)
    with np.errstate(all="ignore"):
        ratios = [float(w(x)) / x for x in sched]
    tail = ratios[-3:]
    if not all(math.isfinite(t) for t in tail):
        return AsymptoticSlope(None, "no-limit", "numeric")
    if max(tail) < 1e-6:
        return AsymptoticSlope(0.0, "zero", "numeric")
    if max(tail) - min(tail) <= 1e-6 * max(abs(t) for t in tail):
        return AsymptoticSlope(tail[-1], "limit", "numeric")
    return AsymptoticSlope(None, "no-limit", "numeric")


@dataclass
class AsymCovSpecReport:
    spectrum: Spectrum | None
    slope: AsymptoticSlope
    slipping: bool  # fiber group inside the rescaled slipping group

    @property
    def verdict(self) -> str:
        return self.slope.verdict


def asym_covspec(f: WarpFunction | str, fiber_covspec: Sequence, second: SecondFiber | None = None) -> AsymCovSpecReport:
    """Infinite rescaled spectrum of ``[0, inf) x_f N (x_h M)`` from ``k = lim f/r``."""
    require_asymptotic_hypotheses(second)
    sl = asymptotic_slope(f)
    if sl.verdict == "no-limit":
        return AsymCovSpecReport(None, sl, False)
    if sl.verdict == "zero":
        return AsymCovSpecReport(Spectrum(notes=("k = 0: every fiber element has rescaled length 0",)), sl, True)
    cone = ConeSpace(sl.k, tuple(fiber_covspec))
    return AsymCovSpecReport(cone_rescaled_spectrum(cone)["infinite"], sl, False)


# --------------------------------------------------------------------------
# warped cylinders: infimum of f


@dataclass
class InfimumReport:
    value: object
    attained: bool
    where: float  # minimizer, or +-inf when the minimizing sequence escapes


def warp_infimum(f: WarpFunction | str, lo: float = -math.inf, hi: float = math.inf) -> InfimumReport:
    """``inf f`` over ``[lo, hi]`` with attainment, exact when sympy allows."""
    w = WarpFunction(f) if isinstance(f, str) else f
    if w.is_constant():
        v = _exact_from_sympy(w.to_sympy())
        return InfimumReport(v if v is not None else float(w(0.0)), True, lo if math.isfinite(lo) else 0.0)
    x = sympy.Symbol(w.var, real=True)
    expr = w.to_sympy()
    ends = []
    for end, direction in ((lo, "+"), (hi, "-")):
        if math.isfinite(end):
            ends.append((float(w(end)), expr.subs(x, end), end, True))
        else:
            try:
                L = sympy.limit(expr, x, sympy.oo if end > 0 else -sympy.oo)
                if L.is_finite:
                    ends.append((float(L), L, end, False))
            except (NotImplementedError, TypeError, ValueError):
                pass
    # interior minimum on a wide grid, polished
    a = lo if math.isfinite(lo) else -60.0
    b = hi if math.isfinite(hi) else 60.0
    grid = np.linspace(a, b, 4001)
    with np.errstate(all="ignore"):
        vals = np.asarray(w(grid), dtype=float) * np.ones_like(grid)
    k = int(np.nanargmin(vals))
    lo_b, hi_b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(lambda t: float(w(t)), bounds=(lo_b, hi_b), method="bounded", options={"xatol": 1e-13})
    interior = (float(res.fun), float(res.x))
    best_end = min(ends, key=lambda e: e[0]) if ends else None
    if best_end is not None and (best_end[0] < interior[0] or (not best_end[3] and _escapes(w, expr, x, best_end, interior, lo, hi))):
        v = _exact_from_sympy(best_end[1])
        return InfimumReport(v if v is not None else best_end[0], best_end[3], best_end[2])
    return InfimumReport(interior[0], True, interior[1])


def _escapes(w, expr, x, end, interior, lo, hi) -> bool:
    """Does the infimum sit at an infinite end (values equal in floating point)?"""
    if abs(end[0] - interior[0]) > 1e-12 * max(1.0, abs(end[0])):
        return False
    try:
        dom = sympy.Interval(lo if math.isfinite(lo) else -sympy.oo, hi if math.isfinite(hi) else sympy.oo)
        sols = sympy.solveset(sympy.Eq(expr, end[1]), x, dom)
        if sols is sympy.S.EmptySet:
            return True
    except (NotImplementedError, TypeError, ValueError):
        pass
    # numerically: the minimizer ran to the edge of the scan
    return abs(interior[1]) >= 59.0


@dataclass
class WarpedCylinderReport:
    spectrum: Spectrum
    length_g: object  # L(g) = c * inf f
    attained: bool
    infimum: InfimumReport
    evidence: list = field(default_factory=list)  # (x, F(x, c)) along the minimizing direction

    def lines(self) -> list[str]:
        from .exact import format_exact

        out = [f"L(g) = {format_exact(self.length_g) if is_exact(self.length_g) else f'{float(self.length_g):.12g}'}"
               f"  [{float(self.length_g):.12f}]  attained={'true' if self.attained else 'false'}"]
        for x, F in self.evidence:
            out.append(f"  F({x:.6g}, c) = {F:.12f}")
        return out


def covspec_warped_cylinder(f: WarpFunction | str, circumference, domain: str | float = "R", evidence_points: int = 6) -> WarpedCylinderReport:
    """Covering spectrum of ``I x_f S^1`` with fiber circumference ``c``.

    The displacement of ``g^n`` at ``x`` is ``F(x, n c)`` and
    ``n c inf f <= F(x, n c) <= n c f(x)``, so ``L(g^n) = |n| c inf f``.  The
    Z-filtration then breaks only at ``c inf f / 2``.
    """
    w = WarpFunction(f) if isinstance(f, str) else f
    lo = -math.inf if domain in ("R", "real", None) else float(0.0 if domain in ("half", "[0,inf)") else domain)
    inf = warp_infimum(w, lo, math.inf)
    c = circumference
    if is_exact(c) and is_exact(inf.value):
        L = exact_simplify(PiRational.coerce(c) * PiRational.coerce(inf.value))
    else:
        L = float(c) * float(inf.value)
    if float(L) <= 0:
        spec = Spectrum(notes=("L(g^n) = 0 for all n: every delta-cover is trivial",))
    else:
        half = exact_simplify(PiRational.coerce(L) / 2) if is_exact(L) else float(L) / 2
        spec = Spectrum((SpecValue(half, "exact" if is_exact(half) else "numeric"),))
    ev = []
    if evidence_points:
        s = ClairautSolver.warped(w, x_lo=lo)
        if math.isfinite(inf.where):
            xs = [inf.where + t for t in np.linspace(0.0, 2.0, evidence_points)]
        else:
            sgn = 1.0 if inf.where > 0 else -1.0
            xs = [sgn * t + 0.0 for t in np.linspace(0.0, 5.0, evidence_points)]
        xs = [x for x in xs if x >= lo]
        ev = list(zip(xs, pmap(lambda x: s.F(x, float(c)).length, xs)))
    return WarpedCylinderReport(spec, L, inf.attained, inf, ev)


# --------------------------------------------------------------------------
# surfaces of revolution


def revolution_rescaled_length(rho: WarpFunction | str, n: int = 1, z_schedule: Sequence[float] | None = None, base_z: float = 0.0, domain="R") -> LimitEstimate:
    """``F(z, 2 pi n) / d((z, pi), (base_z, 0))`` along a geometric z schedule."""
    w = WarpFunction(rho) if isinstance(rho, str) else rho
    lo = -math.inf if domain in ("R", None) else float(0.0 if domain == "half" else domain)
    s = ClairautSolver.revolution(w, x_lo=lo)
    sched = list(z_schedule) if z_schedule is not None else geometric_schedule(10.0, 1e3, 5)

    def ratio(z):
        return s.F(z, 2 * math.pi * n).length / s.distance(base_z, z, math.pi).length

    return _estimate(sched, pmap(ratio, sched))


# --------------------------------------------------------------------------
# space models


class ClairautModel(SpaceModel):
    """``I x S^1`` with metric ``a(x)^2 dx^2 + f(x)^2 dtheta^2``, theta of period c.

    Covers warped cylinders (``a = 1``), surfaces of revolution and the
    S^1 factor of doubly warped products.  Points are ``(x, theta)``.
    """

    def __init__(self, solver: ClairautSolver, circumference: float = 2 * math.pi, base=(0.0, 0.0), name: str = "clairaut", fast: dict | None = None, profile=None):
        super().__init__()
        self.solver = solver
        self.c = float(circumference)
        self.base_point = tuple(base)
        self.name = name
        self.group = GroupDescriptor("lattice", 1, names=("g",))
        self.fast_paths.update(fast or {})
        self.profile = profile  # (f, df, d2f, a_kind) for rescaling
        self._cache: dict = {}

    @property
    def x_lo(self):
        return self.solver.x_lo

    def displacement(self, g, p) -> float:
        n = abs(_power_of(g))
        if n == 0:
            return 0.0
        key = ("F", p[0], n)
        if key not in self._cache:
            self._cache[key] = self.solver.F(p[0], n * self.c).length
        return self._cache[key]

    def _ang(self, t1, t2) -> float:
        d = abs(t1 - t2) % self.c
        return min(d, self.c - d)

    def dist(self, p, q) -> float:
        key = ("D", p[0], q[0], round(self._ang(p[1], q[1]), 15))
        if key not in self._cache:
            self._cache[key] = self.solver.distance(p[0], q[0], self._ang(p[1], q[1])).length
        return self._cache[key]

    def dist_to_base(self, p, base=None) -> float:
        return self.dist(p, base if base is not None else self.base_point)

    def far_point(self, x, base=None):
        """The point at level x farthest from the basepoint."""
        b = base if base is not None else self.base_point
        return (x, b[1] + self.c / 2)

    def escape_sequences(self):
        seqs = [lambda R: self.far_point(self.base_point[0] + R)]
        if not math.isfinite(self.x_lo):
            seqs.append(lambda R: self.far_point(self.base_point[0] - R))
        return seqs

    def sample_points(self, budget: int = 40):
        x0 = self.base_point[0]
        offs = np.geomspace(1e-2, 1e3, max(4, budget // 2))
        xs = [x0 + o for o in offs]
        if math.isfinite(self.x_lo):
            xs += [x for x in (x0 - offs) if x >= self.x_lo] + [self.x_lo]
        else:
            xs += list(x0 - offs)
        return [self.far_point(x) for x in sorted(set(xs))]

    def level_set_diameter(self, r: float) -> float:
        """Diameter of the far slice ``{x = x0 + r}`` (proxy for the level-set component)."""
        x = self.base_point[0] + r
        return self.solver.F(x, self.c / 2).length

    def scaled(self, R: float) -> "ClairautModel":
        """The same space with every length multiplied by R."""
        s = self.solver
        f, df, d2f, a = s.f, s.df, s.d2f, s.a
        R = float(R)
        new = ClairautSolver(
            lambda x: R * f(np.asarray(x) / R),
            lambda x: df(np.asarray(x) / R),
            (lambda x: d2f(np.asarray(x) / R) / R) if d2f is not None else None,
            (lambda x: a(np.asarray(x) / R)) if a is not None else None,
            R * s.x_lo if math.isfinite(s.x_lo) else s.x_lo,
            R * s.x_hi if math.isfinite(s.x_hi) else s.x_hi,
            f"{s.name}*{R:g}",
        )
        fast = dict(self.fast_paths)
        return ClairautModel(new, self.c, (R * self.base_point[0], self.base_point[1]), f"{self.name}/R={R:g}", fast)


class ConeModel(SpaceModel):
    """``C_k(S^1_C)``: cone over a circle of circumference C; points ``(r, theta)``."""

    def __init__(self, k: float = 1.0, circumference: float = math.sqrt(2) * math.pi, base=(1.0, 0.0), scale: float = 1.0, name: str = "cone"):
        super().__init__()
        self.k = float(k)
        self.C = float(circumference)
        self.scale = float(scale)
        self.base_point = tuple(base)
        self.name = name
        self.group = GroupDescriptor("lattice", 1, names=("g",))
        self.fast_paths["infinity"] = lambda g: 2 * _half_chord(self.k * abs(_power_of(g)) * self.C)[0] if _power_of(g) else 0.0
        self.fast_paths["basepoint"] = lambda g: 0.0

    def _ang(self, t1, t2):
        d = abs(t1 - t2) % self.C
        return min(d, self.C - d)

    def displacement(self, g, p) -> float:
        n = abs(_power_of(g))
        return self.scale * cone_distance(p[0], p[0], n * self.C, self.k)

    def dist(self, p, q) -> float:
        return self.scale * cone_distance(p[0], q[0], self._ang(p[1], q[1]), self.k)

    def dist_to_base(self, p, base=None) -> float:
        return self.dist(p, base if base is not None else self.base_point)

    def far_point(self, r, base=None):
        b = base if base is not None else self.base_point
        return (r, b[1] + self.C / 2)

    def escape_sequences(self):
        return [lambda R: self.far_point(R / self.scale)]

    def sample_points(self, budget: int = 40):
        rs = np.geomspace(1e-6, 1e4, budget)
        return [self.far_point(r) for r in rs] + [(r, self.base_point[1]) for r in rs]

    def level_set_diameter(self, r: float) -> float:
        # level sets around the apex are the circles {r} x Y
        return self.scale * cone_distance(r / self.scale, r / self.scale, self.C / 2, self.k)

    def scaled(self, R: float) -> "ConeModel":
        return ConeModel(self.k, self.C, self.base_point, self.scale * R, f"{self.name}/R={R:g}")


class MoebiusModel(SpaceModel):
    """Flat infinite Moebius band ``R^2 / <(x, y) -> (x + c, -y)>``; points ``(x, y)``."""

    def __init__(self, c: float = 1.0, base=(0.0, 0.0), name: str = "moebius"):
        super().__init__()
        self.c = float(c)
        self.base_point = tuple(base)
        self.name = name
        self.group = GroupDescriptor("lattice", 1, names=("g",))
        self.fast_paths["infinity"] = lambda g: (2.0 if _power_of(g) % 2 else 0.0) if _power_of(g) else 0.0
        if self.base_point[1] == 0:
            self.fast_paths["basepoint"] = self.fast_paths["infinity"]

    def act(self, n: int, p):
        return (p[0] + n * self.c, p[1] if n % 2 == 0 else -p[1])

    def displacement(self, g, p) -> float:
        n = _power_of(g)
        q = self.act(n, p)
        return math.hypot(q[0] - p[0], q[1] - p[1])

    def dist(self, p, q) -> float:
        m0 = round((q[0] - p[0]) / self.c)
        best = math.inf
        for m in range(m0 - 2, m0 + 3):
            s = self.act(m, p)
            best = min(best, math.hypot(s[0] - q[0], s[1] - q[1]))
        return best

    def dist_to_base(self, p, base=None) -> float:
        return self.dist(p, base if base is not None else self.base_point)

    def escape_sequences(self):
        x0 = self.base_point[0] + self.c / 2
        return [lambda R: (x0, self.base_point[1] + R), lambda R: (x0, self.base_point[1] - R)]

    def sample_points(self, budget: int = 40):
        ys = np.concatenate([[0.0], np.geomspace(1e-3, 1e4, budget)])
        xs = self.base_point[0] + self.c * np.array([0.25, 0.5])
        return [(x, s * y) for x in xs for y in ys for s in (1, -1)]

    def level_set_diameter(self, r: float) -> float:
        # the level set is one circle of length ~2c at height ~r; its diameter stays ~c
        pts = [(self.base_point[0] + t, r) for t in np.linspace(0, 2 * self.c, 41)]
        return max(self.dist(p, q) for p in pts for q in pts)

    def scaled(self, R: float) -> "MoebiusModel":
        return MoebiusModel(self.c * R, (self.base_point[0] * R, self.base_point[1] * R), f"{self.name}/R={R:g}")


# --------------------------------------------------------------------------
# presets


def flat_cylinder(c: float = 2 * math.pi) -> ClairautModel:
    return ClairautModel(ClairautSolver.warped("1", x_lo=-math.inf), c, name="flat-cylinder", fast={"infinity": lambda g: 0.0, "basepoint": lambda g: 0.0})


def cusp_cylinder() -> ClairautModel:
    return ClairautModel(ClairautSolver.warped("exp(r)", x_lo=-math.inf), 2 * math.pi, name="cusp-cylinder")


def gauss_bump_cylinder() -> ClairautModel:
    return ClairautModel(ClairautSolver.warped("1+exp(-r^2)", x_lo=-math.inf), 2 * math.pi, name="gauss-bump-cylinder",
                         fast={"infinity": lambda g: 0.0})


def hyperboloid() -> ClairautModel:
    """``x^2 + y^2 = z^2 + 1`` as the surface of revolution ``rho(z) = sqrt(z^2 + 1)``, based on the neck."""
    # asymptotic cone: C_1 over the circle of diameter pi/sqrt(2); every g^n has length 2
    return ClairautModel(ClairautSolver.revolution("sqrt(r^2+1)"), 2 * math.pi, name="hyperboloid",
                         fast={"infinity": lambda g: 2.0 if _power_of(g) else 0.0})


def nabonnand() -> ClairautModel:
    """S^1 factor of ``[0, inf) x_r S^2 x_f S^1`` with ``f = 1/sqrt(1 + r^2)``; basepoint at the center."""
    return ClairautModel(ClairautSolver.warped("1/sqrt(1+r^2)", x_lo=0.0), 2 * math.pi, name="nabonnand",
                         fast={"infinity": lambda g: 0.0})


def cone(k: float = 1.0, base_covspec: float = math.pi / math.sqrt(2)) -> ConeModel:
    """Cone ``C_k(Y)``, Y a circle whose covering spectrum (= diameter) is ``base_covspec``."""
    return ConeModel(k, 2 * float(base_covspec), name="cone")


MODEL_PRESETS: dict[str, Callable[[], SpaceModel]] = {
    "flat-cylinder": flat_cylinder,
    "cusp-cylinder": cusp_cylinder,
    "gauss-bump-cylinder": gauss_bump_cylinder,
    "hyperboloid": hyperboloid,
    "cone": cone,
    "moebius": MoebiusModel,
    "nabonnand": nabonnand,
}

WARP_PRESETS = {
    "flat-cylinder": ("1", "R"),
    "cusp-cylinder": ("exp(r)", "R"),
    "gauss-bump-cylinder": ("1+exp(-r^2)", "R"),
    "nabonnand": ("1/sqrt(1+r^2)", "half"),
}


def diameter_growth_estimate(model: SpaceModel, schedule: Sequence[float] | None = None) -> LimitEstimate:
    """``limsup diam(level set)/r`` on a schedule (experimental)."""
    sched = list(schedule) if schedule is not None else geometric_schedule(10.0, 1e4, 7)
    ratios = pmap(lambda r: model.level_set_diameter(r) / r, sched)
    tail = ratios[len(ratios) // 2 :]
    return LimitEstimate(max(tail), sched, ratios, max(tail), all(b <= a + 1e-12 for a, b in zip(tail, tail[1:])))


def diameter_conjecture_report(a: float, spectrum: Spectrum, tol: float = 1e-6) -> tuple[bool, str]:
    """Is ``spectrum`` inside ``(0, a/2] u {1}``?  Experimental consistency check only."""
    bad = [v.numeric for v in spectrum if not (v.numeric <= a / 2 + tol or abs(v.numeric - 1) <= tol)]
    if bad:
        return False, f"values {bad} outside (0, {a / 2:.6g}] u {{1}}"
    return True, f"spectrum inside (0, {a / 2:.6g}] u {{1}}: consistent"

"""Geodesics of metrics ``a(x)^2 dx^2 + f(x)^2 dy^2``.

Warped planes ``R x_f R`` have ``a = 1``; a surface of revolution with profile
radius ``rho(z)`` has ``f = rho`` and ``a = sqrt(1 + rho'^2)``.  Along a unit
speed geodesic ``f^2 dy/ds = c`` is conserved (Clairaut), so a geodesic that
turns around at ``x*`` has ``c = f(x*)`` and

    dy/dx = a c / (f sqrt(f^2 - c^2)),   ds/dx = a f / sqrt(f^2 - c^2).

``ClairautSolver.F(r, d)`` returns the length of a minimal path from
``(r, 0)`` to ``(r, d)`` by shooting on the turning point; ``distance`` handles
two arbitrary points.  ``variational_F`` is an independent discrete
minimizer used as an oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import linalg, optimize

from .expr import WarpFunction


class GeodesicError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# quadrature


_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)
_GL8_X, _GL8_W = np.polynomial.legendre.leggauss(8)


def _panels(edges: np.ndarray, fun: Callable[[np.ndarray], np.ndarray]):
    a, b = edges[:-1], edges[1:]
    mid, half = (a + b) / 2, (b - a) / 2
    x = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    vals = np.asarray(fun(x))
    wts = (_GL_W[None, :] * half[:, None]).ravel()
    return vals @ wts


def graded_integral(fun: Callable[[np.ndarray], np.ndarray], lo: float = 0.0, hi: float = 1.0, rtol: float = 1e-13, grade_at_lo: bool = True):
    """Composite Gauss-Legendre on panels graded geometrically toward ``lo``.

    ``fun`` may return shape ``(k, n)`` for k integrands at once.  Panels are
    halved until two successive estimates agree to ``rtol``.
    """
    if hi == lo:
        return 0.0 * np.asarray(fun(np.array([lo])))[..., 0]
    width = hi - lo
    if grade_at_lo:
        base = lo + width * np.concatenate([[0.0], np.logspace(-44, 0, 23, base=2.0)])
    else:
        base = np.linspace(lo, hi, 9)
    prev = _panels(base, fun)
    edges = base
    for _ in range(7):
        edges = np.sort(np.concatenate([edges, (edges[:-1] + edges[1:]) / 2]))
        cur = _panels(edges, fun)
        if np.all(np.abs(cur - prev) <= rtol * np.maximum(np.abs(cur), 1e-300)):
            return cur
        prev = cur
    return prev


# coarser fixed rule, only used to bracket roots before the accurate solve
_GL12_X, _GL12_W = np.polynomial.legendre.leggauss(12)
_SCAN_EDGES = np.concatenate([[0.0], np.logspace(-44, 0, 45, base=2.0)])
_SCAN_U = ((_SCAN_EDGES[:-1, None] + _SCAN_EDGES[1:, None]) / 2 + (_SCAN_EDGES[1:, None] - _SCAN_EDGES[:-1, None]) / 2 * _GL12_X[None, :]).ravel()
_SCAN_W = ((_SCAN_EDGES[1:, None] - _SCAN_EDGES[:-1, None]) / 2 * _GL12_W[None, :]).ravel()


# --------------------------------------------------------------------------


def _bracket_root(g, lo, hi):
    """Brent on [lo, hi] after re-checking the bracket with the accurate g."""
    glo, ghi = g(lo), g(hi)
    if glo == 0:
        return lo
    if ghi == 0:
        return hi
    if not (math.isfinite(glo) and math.isfinite(ghi)) or glo * ghi > 0:
        return None
    return optimize.brentq(g, lo, hi, xtol=1e-13, rtol=1e-15, maxiter=300)


@dataclass
class GeodesicResult:
    length: float
    kind: str  # turning | straight | wall | monotone | radial
    c: float | None = None
    x_star: float | None = None
    candidates: dict = field(default_factory=dict)


class ClairautSolver:
    """Shortest paths for ``a^2 dx^2 + f^2 dy^2`` on ``x in [x_lo, x_hi]``.

    A finite ``x_lo`` is a wall; paths may run along it (for cones with
    ``f(x_lo) = 0`` this is the path through the apex).
    """

    def __init__(self, f, df, d2f=None, a=None, x_lo: float = -math.inf, x_hi: float = math.inf, name: str = ""):
        self.f, self.df, self.d2f = f, df, d2f
        self.a = a
        self.x_lo, self.x_hi = float(x_lo), float(x_hi)
        self.name = name

    @classmethod
    def warped(cls, f: WarpFunction | str, x_lo: float = 0.0, x_hi: float = math.inf) -> "ClairautSolver":
        w = WarpFunction(f) if isinstance(f, str) else f
        F = lambda x: np.asarray(w(x), dtype=float) * np.ones_like(np.asarray(x, dtype=float))
        dF = lambda x: np.asarray(w.d1(x), dtype=float) * np.ones_like(np.asarray(x, dtype=float))
        d2F = lambda x: np.asarray(w.d2(x), dtype=float) * np.ones_like(np.asarray(x, dtype=float))
        return cls(F, dF, d2F, None, x_lo, x_hi, str(w))

    @classmethod
    def revolution(cls, rho: WarpFunction | str, x_lo: float = -math.inf, x_hi: float = math.inf) -> "ClairautSolver":
        w = WarpFunction(rho, var="r") if isinstance(rho, str) else rho
        one = lambda x: np.ones_like(np.asarray(x, dtype=float))
        F = lambda x: np.asarray(w(x), dtype=float) * one(x)
        dF = lambda x: np.asarray(w.d1(x), dtype=float) * one(x)
        d2F = lambda x: np.asarray(w.d2(x), dtype=float) * one(x)
        A = lambda x: np.sqrt(1.0 + dF(x) ** 2)
        return cls(F, dF, d2F, A, x_lo, x_hi, f"revolution[{w}]")

    # ------------------------------------------------------------------ basic pieces
    def _f(self, x):
        return float(self.f(np.asarray([x], dtype=float))[0])

    def _df(self, x):
        return float(self.df(np.asarray([x], dtype=float))[0])

    def _a(self, x):
        if self.a is None:
            return np.ones_like(x)
        return self.a(x)

    def radial(self, x1: float, x2: float) -> float:
        """Length of the path ``y = const`` from x1 to x2."""
        if self.a is None:
            return abs(x2 - x1)
        lo, hi = min(x1, x2), max(x1, x2)
        return graded_integral(lambda x: self._a(x), lo, hi, grade_at_lo=False)

    def _half_parts(self, x_star, x_end, u):
        """Integrands (dy, excess) after ``x = x* + (x_end - x*) u^2``.

        The excess ``a sqrt(f^2 - c^2)/f`` is what the arc length adds to
        ``c dy``; unlike the length integrand it has no singularity at the
        turning point, so ``length = c dy + excess`` keeps full precision.

        ``x_star`` has shape (m, 1) or is scalar; ``u`` has shape (n,).
        """
        x_star = np.asarray(x_star, dtype=float)
        L = x_end - x_star
        c = self.f(x_star)
        d1 = self.df(x_star)
        d2 = self.d2f(x_star) if self.d2f is not None else 0.0 * c
        t = L * u * u
        x = x_star + t
        with np.errstate(all="ignore"):
            q = self.f(x) - c
            # f(x) - f(x*) loses digits to cancellation when small; integrate f' instead
            near = np.abs(q) < 1e-3 * np.abs(c)
            if np.any(near):
                tb, xb = np.broadcast_arrays(t, x_star)
                tn, xn = tb[near], xb[near]
                nodes = xn[:, None] + tn[:, None] * (1 + _GL8_X[None, :]) / 2
                q = np.array(q, dtype=float, copy=True) * np.ones_like(tb)
                q[near] = (self.df(nodes) @ _GL8_W) * tn / 2
            taylor = d1 * t + 0.5 * d2 * t * t
            q = np.where(np.abs(t) < 1e-9 * np.abs(L), taylor, q)
            fx = c + q
            root = np.sqrt(np.maximum(q * (2 * c + q), 0.0))
            jac = 2 * np.abs(L) * u
            g = jac / root
            lim0 = np.where(d1 * L > 0, 2 * np.abs(L) / np.sqrt(np.maximum(2 * c * d1 * L, 1e-300)), 0.0)
            g = np.where(u == 0, lim0, g)
            g = np.where(np.isfinite(g), g, 0.0)
            a = self._a(x)
            return a * c / fx * g, a * root / fx * jac

    def half_dy_excess(self, x_star: float, x_end: float) -> tuple[float, float, float]:
        """``(dy, excess, c)`` of the arc from its turning point to ``x_end``."""
        c = self._f(x_star)
        if x_end == x_star:
            return 0.0, 0.0, c
        out = graded_integral(lambda u: np.stack(self._half_parts(x_star, x_end, u)))
        return float(out[0]), float(out[1]), c

    def half_integrals(self, x_star: float, x_end: float) -> tuple[float, float]:
        """``(dy, length)`` of the geodesic arc from its turning point to ``x_end``."""
        dy, ex, c = self.half_dy_excess(x_star, x_end)
        return dy, c * dy + ex

    def half_dy_scan(self, x_stars: np.ndarray, x_end: float) -> np.ndarray:
        """Fixed-rule ``dy`` for many turning points at once (for bracketing)."""
        xs = np.asarray(x_stars, dtype=float)[:, None]
        dy, _ = self._half_parts(xs, x_end, _SCAN_U[None, :])
        return dy @ _SCAN_W

    # ------------------------------------------------------------------ turning points
    def _decreases(self, x: float, s: int) -> bool:
        d1 = self._df(x)
        if d1 != 0:
            return s * d1 < 0
        h = 1e-6 * max(1.0, abs(x))
        bound = self.x_lo if s < 0 else self.x_hi
        if abs(bound - x) < h:
            return False
        return self._f(x + s * h) < self._f(x)

    def _descent_end(self, r: float, s: int) -> tuple[float, bool]:
        """Where ``f`` stops decreasing when walking from r in direction s.

        Returns ``(x_end, bounded)``; bounded is False when f keeps decreasing
        to the end of an infinite domain.
        """
        bound = self.x_lo if s < 0 else self.x_hi
        span = abs(bound - r) if math.isfinite(bound) else math.inf
        ts = np.logspace(-9, 8, 400) * max(1.0, abs(r))
        ts = ts[ts < span]
        if math.isfinite(span):
            ts = np.append(ts, span)
        if len(ts) == 0:
            return r, True
        xs = r + s * ts
        with np.errstate(all="ignore"):
            slope = s * self.df(xs)
        g = lambda z: s * self._df(z)
        prev_x = r
        for x, sl in zip(xs, slope):
            if not np.isfinite(sl) or sl >= 0:
                if np.isfinite(sl) and prev_x != r and g(prev_x) < 0:
                    return optimize.brentq(g, prev_x, x, xtol=1e-15, rtol=1e-15, maxiter=500), True
                return prev_x, True
            prev_x = x
        if math.isfinite(span):
            return bound, True
        return r + s * ts[-1], False

    def F(self, r: float, d: float, rtol: float = 1e-8) -> GeodesicResult:
        """Minimal length from ``(r, 0)`` to ``(r, d)``."""
        d = abs(float(d))
        r = float(r)
        if not (self.x_lo <= r <= self.x_hi):
            raise GeodesicError(f"r = {r} outside the domain")
        fr = self._f(r)
        if d == 0:
            return GeodesicResult(0.0, "straight", fr, r, {"straight": 0.0})
        cands: dict[str, float] = {"straight": fr * d}
        best = GeodesicResult(fr * d, "straight", fr, r)
        if math.isfinite(self.x_lo):
            w = 2 * self.radial(self.x_lo, r) + self._f(self.x_lo) * d
            cands["wall"] = w
            if w < best.length:
                best = GeodesicResult(w, "wall", None, self.x_lo)
        if math.isfinite(self.x_lo) and r > self.x_lo and self._decreases(r, -1) and self._descent_end(r, -1)[0] == self.x_lo:
            # geodesic reaching the wall tangentially, gliding along it and back
            dy, ln = self.half_integrals(self.x_lo, r)
            if 2 * dy <= d:
                glide = 2 * ln + self._f(self.x_lo) * (d - 2 * dy)
                cands["glide"] = glide
                if glide < best.length:
                    best = GeodesicResult(glide, "glide", self._f(self.x_lo), self.x_lo)
        for s in (-1, 1):
            if not self._decreases(r, s):
                continue
            res = self._turning(r, d, s)
            if res is not None:
                cands[f"turning{'+' if s > 0 else '-'}"] = res.length
                if res.length < best.length:
                    best = res
        best.candidates = cands
        return best

    def _turning(self, r: float, d: float, s: int) -> GeodesicResult | None:
        end, bounded = self._descent_end(r, s)
        if end == r:
            return None
        if bounded:
            span = end - r
            # x* = r + span * expit(sigma): dense near both r and the end
            xstar = lambda sig: r + span * (1.0 / (1.0 + math.exp(-sig)))
            sig_grid = np.linspace(-30.0, 36.0, 100)
        else:
            xstar = lambda sig: r + s * math.exp(sig) * max(1.0, abs(r))
            sig_grid = np.linspace(-25.0, math.log(abs(end - r) / max(1.0, abs(r))), 120)

        def g(sig):
            dy, _ = self.half_integrals(xstar(sig), r)
            return 2 * dy - d

        xs_grid = np.array([xstar(sg) for sg in sig_grid])
        ok = (xs_grid != r) & ~(bounded & (xs_grid == end))
        vals = np.full(len(sig_grid), math.nan)
        vals[ok] = 2 * self.half_dy_scan(xs_grid[ok], r) - d
        roots = []
        for k in range(len(sig_grid) - 1):
            v0, v1 = vals[k], vals[k + 1]
            if not (math.isfinite(v0) and math.isfinite(v1)):
                continue
            if np.sign(v0) * np.sign(v1) <= 0:
                root = _bracket_root(g, sig_grid[k], sig_grid[k + 1])
                if root is not None:
                    roots.append(root)
        if not roots:
            return None
        best = None
        for sg in roots:
            x = xstar(sg)
            _, ex, c = self.half_dy_excess(x, r)
            # at the root the two half arcs cover exactly d
            res = GeodesicResult(c * d + 2 * ex, "turning", c, x)
            if best is None or res.length < best.length:
                best = res
        return best

    # ------------------------------------------------------------------ two points
    def distance(self, x1: float, x2: float, dy: float) -> GeodesicResult:
        """Minimal length between ``(x1, 0)`` and ``(x2, dy)``."""
        dy = abs(float(dy))
        if x1 > x2:
            x1, x2 = x2, x1
        if x1 == x2:
            return self.F(x1, dy)
        if dy == 0:
            return GeodesicResult(self.radial(x1, x2), "radial", 0.0)
        cands = {}
        # along the thinnest fiber between the endpoints
        grid = np.linspace(x1, x2, 401)
        fm = self.f(grid)
        k = int(np.argmin(fm))
        xm = grid[k]
        best = GeodesicResult(self.radial(x1, xm) + float(fm[k]) * dy + self.radial(xm, x2), "straight")
        cands["straight"] = best.length
        if math.isfinite(self.x_lo):
            w = self.radial(self.x_lo, x1) + self.radial(self.x_lo, x2) + self._f(self.x_lo) * dy
            cands["wall"] = w
            if w < best.length:
                best = GeodesicResult(w, "wall", None, self.x_lo)
        mono = self._monotone(x1, x2, dy)
        if mono is not None:
            cands["monotone"] = mono.length
            if mono.length < best.length:
                best = mono
        for s, xe in ((-1, x1), (1, x2)):
            if not self._decreases(xe, s):
                continue
            res = self._turning_two(x1, x2, dy, s)
            if res is not None:
                cands[f"turning{'+' if s > 0 else '-'}"] = res.length
                if res.length < best.length:
                    best = res
        best.candidates = cands
        return best

    def _min_on(self, x1, x2):
        res = optimize.minimize_scalar(lambda x: self._f(x), bounds=(x1, x2), method="bounded", options={"xatol": 1e-12})
        grid = np.linspace(x1, x2, 201)
        fg = self.f(grid)
        k = int(np.argmin(fg))
        cands = [(float(fg[k]), float(grid[k])), (float(res.fun), float(res.x)), (self._f(x1), x1), (self._f(x2), x2)]
        return min(cands)

    def _excess(self, x, xref):
        """``f(x) - f(xref)`` without cancellation when the difference is small."""
        x = np.asarray(x, dtype=float)
        fr = self._f(xref)
        with np.errstate(all="ignore"):
            q = self.f(x) - fr
        near = np.abs(q) < 1e-3 * max(abs(fr), 1e-300)
        if np.any(near):
            t = x[near] - xref
            nodes = xref + t[:, None] * (1 + _GL8_X[None, :]) / 2
            q = np.array(q, dtype=float, copy=True)
            q[near] = (self.df(nodes) @ _GL8_W) * t / 2
        return q

    def _monotone_parts(self, x, gap, m, xm):
        """Integrands (dy, length) of a monotone arc with ``c = m - gap``."""
        c = m - gap
        fx = self.f(x)
        fmc = self._excess(x, xm) + gap  # f(x) - c
        with np.errstate(all="ignore"):
            root = np.sqrt(np.maximum(fmc * (fx + c), 1e-300))
            a = self._a(x)
            return a * c / (fx * root), a * fx / root

    def _monotone_nodes(self, x1, x2, xm):
        """Quadrature nodes/weights graded toward the thinnest point ``xm``."""
        xs, ws = [], []
        for end in (x1, x2):
            if end == xm:
                continue
            e = xm + (end - xm) * _SCAN_EDGES
            lo, hi = e[:-1], e[1:]
            mid, half = (lo + hi) / 2, (hi - lo) / 2
            xs.append((mid[:, None] + half[:, None] * _GL_X[None, :]).ravel())
            ws.append((np.abs(half)[:, None] * _GL_W[None, :]).ravel())
        return np.concatenate(xs), np.concatenate(ws)

    def _monotone_integrals(self, x1, x2, gap, m, xm):
        total = np.zeros(2)
        for end in (x1, x2):
            if end == xm:
                continue
            L = end - xm
            # x = xm + L u, graded toward u = 0
            out = graded_integral(lambda u: np.stack(self._monotone_parts(xm + L * u, gap, m, xm)) * abs(L))
            total += out
        return float(total[0]), float(total[1])

    def _monotone(self, x1, x2, dy) -> GeodesicResult | None:
        m, xm = self._min_on(x1, x2)
        if m <= 0:
            return None
        sig_grid = np.concatenate([np.logspace(-8, 0, 30), np.linspace(1.5, 30, 58)])
        gaps = m * np.exp(-sig_grid)
        xs, ws = self._monotone_nodes(x1, x2, xm)
        dyi, _ = self._monotone_parts(xs[None, :], gaps[:, None], m, xm)
        vals = dyi @ ws - dy

        def g(sig):
            return self._monotone_integrals(x1, x2, m * math.exp(-sig), m, xm)[0] - dy

        for k in range(len(sig_grid) - 1):
            if np.sign(vals[k]) * np.sign(vals[k + 1]) <= 0:
                sg = _bracket_root(g, sig_grid[k], sig_grid[k + 1])
                if sg is None:
                    continue
                gap = m * math.exp(-sg)
                return GeodesicResult(self._monotone_integrals(x1, x2, gap, m, xm)[1], "monotone", m - gap)
        return None

    def _turning_two(self, x1, x2, dy, s) -> GeodesicResult | None:
        start = x1 if s < 0 else x2
        end, bounded = self._descent_end(start, s)
        if end == start:
            return None
        if bounded:
            span = end - start
            xstar = lambda sig: start + span / (1.0 + math.exp(-sig))
            sig_grid = np.linspace(-30.0, 36.0, 120)
        else:
            xstar = lambda sig: start + s * math.exp(sig) * max(1.0, abs(start))
            sig_grid = np.linspace(-25.0, math.log(abs(end - start) / max(1.0, abs(start))), 150)

        def both(sig):
            x = xstar(sig)
            a = self.half_dy_excess(x, x1)
            b = self.half_dy_excess(x, x2)
            return a[0] + b[0], a[2] * dy + a[1] + b[1]

        g = lambda sig: both(sig)[0] - dy
        xs_grid = np.array([xstar(sg) for sg in sig_grid])
        ok = (xs_grid != start) & ~(bounded & (xs_grid == end))
        vals = np.full(len(sig_grid), math.nan)
        vals[ok] = self.half_dy_scan(xs_grid[ok], x1) + self.half_dy_scan(xs_grid[ok], x2) - dy
        best = None
        for k in range(len(sig_grid) - 1):
            v0, v1 = vals[k], vals[k + 1]
            if not (math.isfinite(v0) and math.isfinite(v1)):
                continue
            if np.sign(v0) * np.sign(v1) <= 0:
                sg = _bracket_root(g, sig_grid[k], sig_grid[k + 1])
                if sg is None:
                    continue
                ln = both(sg)[1]
                if best is None or ln < best.length:
                    best = GeodesicResult(ln, "turning", self._f(xstar(sg)), xstar(sg))
        return best


# --------------------------------------------------------------------------
# variational oracle


class _OracleMetric:
    """Vectorized f, A = a^2 and their first two derivatives."""

    def __init__(self, w: WarpFunction, revolution: bool):
        self.w = w
        self.revolution = revolution
        self.d3 = w.derivative().derivative().derivative() if revolution else None

    def _v(self, fn, x):
        return np.asarray(fn(x), dtype=float) * np.ones_like(x)

    def __call__(self, x):
        f, f1, f2 = self._v(self.w, x), self._v(self.w.d1, x), self._v(self.w.d2, x)
        if not self.revolution:
            one = np.ones_like(x)
            return f, f1, f2, one, 0 * one, 0 * one
        f3 = self._v(self.d3, x)
        return f, f1, f2, 1 + f1 * f1, 2 * f1 * f2, 2 * (f2 * f2 + f1 * f3)


def _newton_path(metric: _OracleMetric, d, x0, n_iter=200):
    """Minimize the discrete length of a graph x(y) with fixed ends by Newton."""
    x = x0.copy()
    N = len(x) - 1
    h = d / N

    def energy(x):
        m = (x[:-1] + x[1:]) / 2
        f, _, _, A, _, _ = metric(m)
        D = np.diff(x)
        return float(np.sum(np.sqrt(A * D * D + f * f * h * h)))

    with np.errstate(all="ignore"):
        E = energy(x)
        return _newton_loop(metric, x, E, h, N, energy, n_iter)


def _newton_loop(metric, x, E, h, N, energy, n_iter):
    for _ in range(n_iter):
        m = (x[:-1] + x[1:]) / 2
        fm, f1, f2, A, A1, A2 = metric(m)
        D = np.diff(x)
        # segment length sqrt(P), P = A(m) D^2 + G(m), m the midpoint
        G = fm * fm * h * h
        G1 = 2 * fm * f1 * h * h
        G2 = 2 * (f1 * f1 + fm * f2) * h * h
        P = A * D * D + G
        phi = np.sqrt(P)
        B = (A1 * D * D + G1) / 2
        C = (A2 * D * D + G2) / 4
        Pi = -2 * A * D + B
        Pj = 2 * A * D + B
        Pii = 2 * A - 2 * A1 * D + C
        Pij = -2 * A + C
        Pjj = 2 * A + 2 * A1 * D + C
        gi, gj = Pi / (2 * phi), Pj / (2 * phi)
        hii = Pii / (2 * phi) - Pi * Pi / (4 * phi**3)
        hij = Pij / (2 * phi) - Pi * Pj / (4 * phi**3)
        hjj = Pjj / (2 * phi) - Pj * Pj / (4 * phi**3)
        grad = np.zeros(N + 1)
        grad[:-1] += gi
        grad[1:] += gj
        diag = np.zeros(N + 1)
        diag[:-1] += hii
        diag[1:] += hjj
        g_in = grad[1:-1]
        if np.max(np.abs(g_in)) < 1e-15 * max(1.0, E):
            break
        main = diag[1:-1].copy()
        off = hij[1:-1]
        lam = 0.0
        for _try in range(30):
            ab = np.zeros((3, N - 1))
            ab[0, 1:] = off
            ab[1, :] = main + lam
            ab[2, :-1] = off
            try:
                step = linalg.solve_banded((1, 1), ab, -g_in)
            except (linalg.LinAlgError, ValueError):
                lam = max(2 * lam, 1e-8)
                continue
            t = 1.0
            improved = False
            for _ls in range(40):
                xn = x.copy()
                xn[1:-1] += t * step
                En = energy(xn)
                if math.isfinite(En) and En <= E:
                    improved = True
                    break
                t /= 2
            if improved:
                break
            lam = max(4 * lam, 1e-8 * max(1.0, np.max(np.abs(main))))
        else:
            break
        if not improved:
            break
        dx = np.max(np.abs(xn - x))
        x, E_old, E = xn, E, En
        if dx < 1e-14 * max(1.0, np.max(np.abs(x))) or E_old - E <= 1e-16 * E:
            # one more exact step usually polishes; stop when stalled
            if E_old - E <= 1e-16 * E:
                break
    return E, x


def variational_F(f: WarpFunction | str, r: float, d: float, n: int = 1024, guesses=None, richardson: bool = True, revolution: bool = False) -> float:
    """Independent estimate of ``F(r, d)``: Newton on discretized graphs ``x(y)``.

    With ``revolution=True``, ``f`` is a profile radius and the radial
    coefficient is ``1 + f'^2``.
    """
    return variational_distance(f, r, r, d, n, guesses, richardson, revolution)


def variational_distance(f: WarpFunction | str, x1: float, x2: float, dy: float, n: int = 1024, guesses=None, richardson: bool = True, revolution: bool = False) -> float:
    """Discrete minimal length from ``(x1, 0)`` to ``(x2, dy)`` over graphs ``x(y)``.

    Several initial bulges in both directions are tried; the best discrete
    minimum at ``n/2`` and ``n`` intervals is Richardson extrapolated.
    """
    w = WarpFunction(f) if isinstance(f, str) else f
    metric = _OracleMetric(w, revolution)
    dy = abs(dy)
    if guesses is None:
        scale = max(1.0, abs(x1), abs(x2))
        guesses = [0.0] + [s * a * scale for s in (-1, 1) for a in (0.05, 0.2, 0.5, 0.9)]

    def solve(N, init=None):
        ys = np.linspace(0, 1, N + 1)
        best = (math.inf, None)
        starts = [init] if init is not None else [x1 + (x2 - x1) * ys + A * np.sin(math.pi * ys) for A in guesses]
        for x0 in starts:
            E, x = _newton_path(metric, dy, x0)
            if np.all(np.isfinite(x)) and E < best[0]:
                best = (E, x)
        return best

    Ec, xc = solve(n // 2)
    if not richardson:
        return Ec
    yc = np.linspace(0, 1, n // 2 + 1)
    yf = np.linspace(0, 1, n + 1)
    Ef, _ = solve(n, np.interp(yf, yc, xc))
    return (4 * Ef - Ec) / 3

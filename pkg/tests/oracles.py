"""Independent reference computations used by several test modules."""
from __future__ import annotations

import math
from fractions import Fraction

import mpmath

from covspec.exact import PiRational


def word_shift_lengths(g, max_len: int = 8) -> list:
    """Translation lengths of every cyclically reduced word of length <= max_len.

    Words are spelled in the graph's free basis, expanded to edge paths with
    free cancellation and then cyclically cancelled; the remaining edge
    lengths are summed.  Only words starting with their smallest letter are
    visited since the length is invariant under rotation.  Exact lengths
    (rational + rational * pi) are carried as pairs of integers.
    """
    lens = [PiRational.coerce(e.length) for e in g.edges]
    den = math.lcm(*[x.rational.denominator for x in lens], *[x.pi_coeff.denominator for x in lens])
    elen = [(int(x.rational * den), int(x.pi_coeff * den)) for x in lens]
    loops = []
    for k in range(g.rank):
        p = list(g.generator_loop(k))
        fwd = [2 * i + (s < 0) for i, s in p]  # dart code; code ^ 1 is the reverse dart
        loops += [fwd, [c ^ 1 for c in reversed(fwd)]]
    out: set = set()
    path: list[int] = []
    total = [0, 0]
    word: list[int] = []

    def add(code: int, sign: int):
        a, b = elen[code >> 1]
        total[0] += sign * a
        total[1] += sign * b

    def visit(first: int):
        if word and word[0] != word[-1] ^ 1:
            i, j = 0, len(path) - 1
            cut = [0, 0]
            while i < j and path[i] == path[j] ^ 1:
                a, b = elen[path[i] >> 1]
                cut[0] += a
                cut[1] += b
                i, j = i + 1, j - 1
            out.add((total[0] - 2 * cut[0], total[1] - 2 * cut[1]))
        if len(word) == max_len:
            return
        for c in range(first, len(loops)):
            if word and word[-1] == c ^ 1:
                continue
            popped, pushed = [], 0
            for d in loops[c]:
                if path and path[-1] == d ^ 1:
                    popped.append(path.pop())
                    add(d, -1)
                else:
                    path.append(d)
                    add(d, 1)
                    pushed += 1
            word.append(c)
            visit(first if len(word) > 1 else c)
            word.pop()
            for _ in range(pushed):
                add(path.pop(), -1)
            for d in reversed(popped):
                path.append(d)
                add(d, 1)

    visit(0)
    vals = [PiRational(Fraction(a, den), Fraction(b, den)) for a, b in out if (a, b) != (0, 0)]
    return sorted(set(vals), key=float)


def hyperbolic_equidistant_distance(r: float, d: float) -> float:
    """Distance in ``dr^2 + cosh(r)^2 dy^2`` (the hyperbolic plane in Fermi coordinates)."""
    with mpmath.workdps(40):
        R, D = mpmath.mpf(r), mpmath.mpf(d)
        return float(mpmath.acosh(mpmath.cosh(R) ** 2 * mpmath.cosh(D) - mpmath.sinh(R) ** 2))


def horocyclic_distance(r: float, d: float) -> float:
    """Distance in ``dr^2 + exp(2r) dy^2`` (the hyperbolic plane in horocyclic coordinates)."""
    with mpmath.workdps(40):
        R, D = mpmath.mpf(r), mpmath.mpf(d)
        return float(mpmath.acosh(1 + D**2 * mpmath.exp(2 * R) / 2))


def cone_chord_distance(r: float, d: float, k: float) -> float:
    """Distance between two points at radius r on ``dr^2 + (k r)^2 dy^2``, angular gap d."""
    with mpmath.workdps(40):
        a = min(mpmath.pi, mpmath.mpf(k) * d)
        return float(2 * r * mpmath.sin(a / 2))


def clairaut_quadrature(f: str, r: float, d: float, lo: float | None = None) -> float:
    """Length of the symmetric Clairaut geodesic from (r, 0) to (r, d) that dips towards
    smaller f, by mpmath quadrature with the turning point found by root finding.

    Valid when f increases away from the turning point on the path (one dip).
    """
    import sympy

    x = sympy.Symbol("r", real=True)
    F = sympy.lambdify(x, sympy.sympify(f.replace("^", "**"), locals={"r": x}), "mpmath")
    with mpmath.workdps(40):
        fr = F(r)

        def integrand(xs, length: bool):
            c = F(xs)

            # x = xs + u^2 removes the inverse square root at the turning point;
            # nodes that round onto the turning point carry negligible weight
            def g(u):
                fx = F(xs + u * u)
                gap = fx * fx - c * c
                if gap <= 0:
                    return mpmath.mpf(0)
                return 2 * u * (fx if length else c / fx) / mpmath.sqrt(gap)

            return mpmath.quad(g, [0, mpmath.sqrt(r - xs)])

        half_dy = lambda xs: integrand(xs, False)
        half_len = lambda xs: integrand(xs, True)

        lo = mpmath.mpf(r) - 30 if lo is None else mpmath.mpf(lo)
        hi = mpmath.mpf(r) - mpmath.mpf(10) ** -12
        for _ in range(60):
            mid = (lo + hi) / 2
            if 2 * half_dy(mid) > d:
                lo = mid
            else:
                hi = mid
        xs = (lo + hi) / 2
        return float(min(2 * half_len(xs), fr * d))

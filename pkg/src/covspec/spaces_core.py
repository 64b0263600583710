"""Free-group words, integer lattices, spectra and the space-model interface."""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .exact import PiRational, format_exact, is_exact

Letter = tuple[int, int]
Word = tuple[Letter, ...]

IDENTITY: Word = ()


# --------------------------------------------------------------------------
# words


def as_word(letters: Iterable) -> Word:
    out = []
    for g, s in letters:
        if int(g) < 0 or s not in (1, -1):
            raise ValueError(f"bad letter {(g, s)!r}")
        out.append((int(g), int(s)))
    return tuple(out)


def reduce_word(w: Iterable[Letter]) -> Word:
    """Free reduction by a single stack pass."""
    stack: list[Letter] = []
    for g, s in w:
        if stack and stack[-1][0] == g and stack[-1][1] == -s:
            stack.pop()
        else:
            stack.append((g, s))
    return tuple(stack)


def inverse(w: Sequence[Letter]) -> Word:
    return tuple((g, -s) for g, s in reversed(w))


def multiply(*words: Sequence[Letter]) -> Word:
    return reduce_word(itertools.chain.from_iterable(words))


def power(w: Sequence[Letter], n: int) -> Word:
    if n < 0:
        return power(inverse(w), -n)
    return reduce_word(tuple(w) * n)


def cyclic_reduce(w: Iterable[Letter]) -> tuple[Word, Word]:
    """Return ``(core, conjugator)`` with ``w = conjugator * core * conjugator^-1``."""
    r = reduce_word(w)
    i, j = 0, len(r) - 1
    while i < j and r[i][0] == r[j][0] and r[i][1] == -r[j][1]:
        i += 1
        j -= 1
    return r[i : j + 1], r[:i]


def is_reduced(w: Sequence[Letter]) -> bool:
    return all(not (a[0] == b[0] and a[1] == -b[1]) for a, b in zip(w, w[1:]))


def letter_names(n: int) -> list[str]:
    if n <= 26:
        return [chr(ord("a") + i) for i in range(n)]
    return [f"g{i}" for i in range(n)]


_WORD_TOKEN = re.compile(r"\s*([A-Za-z][A-Za-z0-9_]*(?:\{[^}]*\})?)(?:\^\(?(-?\d+)\)?)?")


def parse_word(text: str, names: Sequence[str]) -> Word:
    """Parse ``"a b^-1 a^2"`` or ``"abA"`` over the given generator names.

    A name written in upper case denotes the inverse of its lower-case
    generator when the upper-case spelling is not itself a generator.
    """
    index = {n: i for i, n in enumerate(names)}
    text = text.strip()
    if text in ("", "1", "e", "id"):
        return IDENTITY
    out: list[Letter] = []
    pos = 0
    single = all(len(n) == 1 for n in names) and " " not in text and "^" not in text
    if single:
        for ch in text:
            if ch in index:
                out.append((index[ch], 1))
            elif ch.lower() in index:
                out.append((index[ch.lower()], -1))
            else:
                raise ValueError(f"unknown generator {ch!r} in word {text!r}")
        return reduce_word(out)
    while pos < len(text):
        m = _WORD_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse word {text!r} at column {pos + 1}")
        name, exp = m.group(1), int(m.group(2) or 1)
        if name in index:
            g, s = index[name], 1
        elif name.lower() in index:
            g, s = index[name.lower()], -1
        else:
            raise ValueError(f"unknown generator {name!r} in word {text!r}")
        s *= 1 if exp > 0 else -1
        out.extend([(g, s)] * abs(exp))
        pos = m.end()
    return reduce_word(out)


def format_word(w: Sequence[Letter], names: Sequence[str] | None = None) -> str:
    if not w:
        return "1"
    parts = []
    for g, s in w:
        name = names[g] if names is not None else f"g{g}"
        parts.append(name if s > 0 else f"{name}^-1")
    return " ".join(parts)


# --------------------------------------------------------------------------
# lattices


@dataclass(frozen=True)
class LatticeElement:
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __add__(self, other: "LatticeElement") -> "LatticeElement":
        _check_dim(self.dim, other.dim)
        return LatticeElement(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return LatticeElement(tuple(-a for a in self.coords))

    def __mul__(self, n: int):
        return LatticeElement(tuple(n * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)


def _check_dim(a: int, b: int):
    if a != b:
        raise ValueError(f"dimension mismatch: {a} vs {b}")


def hermite_normal_form(rows: Iterable[Sequence[int]], dim: int) -> tuple[tuple[int, ...], ...]:
    """Row-style HNF of the integer span of ``rows``; zero rows dropped.

    Pivots are positive and entries above each pivot are reduced into
    ``[0, pivot)``, so two generating sets span the same sublattice iff their
    forms coincide.
    """
    m = [list(map(int, r)) for r in rows if any(r)]
    for r in m:
        _check_dim(len(r), dim)
    out: list[list[int]] = []
    col = 0
    while m and col < dim:
        nz = [r for r in m if r[col] != 0]
        if not nz:
            col += 1
            continue
        rest = [r for r in m if r[col] == 0]
        # Euclid on column col
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            nxt = [p]
            for r in nz[1:]:
                q = r[col] // p[col]
                r2 = [a - q * b for a, b in zip(r, p)]
                if r2[col] != 0:
                    nxt.append(r2)
                elif any(r2):
                    rest.append(r2)
            nz = nxt
        piv = nz[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        out.append(piv)
        m = [r for r in rest if any(r)]
        col += 1
    # reduce above pivots
    for i, row in enumerate(out):
        c = next(k for k, a in enumerate(row) if a)
        for j in range(i):
            q = out[j][c] // row[c]
            if q:
                out[j] = [a - q * b for a, b in zip(out[j], row)]
    return tuple(tuple(r) for r in out)


def _diameters_scale(diameters: Sequence) -> tuple[list, object]:
    """Split diameters into exact rational multipliers and a common scale.

    Returns ``(multipliers, scale)`` where scale is ``1``, ``pi`` (as a
    PiRational) or ``None`` when inputs are inexact floats.
    """
    ds = [PiRational.coerce(d) if isinstance(d, (int, Fraction)) else d for d in diameters]
    if all(isinstance(d, PiRational) and d.pi_coeff == 0 for d in ds):
        return [d.rational for d in ds], PiRational(1)
    if all(isinstance(d, PiRational) and d.rational == 0 for d in ds):
        return [d.pi_coeff for d in ds], PiRational.pi()
    return [float(d) for d in ds], None


def lattice_shift_length(v: LatticeElement | Sequence[int], circle_diameters: Sequence) -> float:
    coords = v.coords if isinstance(v, LatticeElement) else tuple(v)
    _check_dim(len(coords), len(circle_diameters))
    mult, scale = _diameters_scale(circle_diameters)
    sq = sum((2 * m * c) ** 2 for m, c in zip(mult, coords))
    if scale is None:
        return math.sqrt(sq)
    root = _exact_sqrt(Fraction(sq))
    if root is not None:
        return exact_simplify(scale * root)
    return float(scale) * math.sqrt(sq)


def _exact_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def exact_simplify(x):
    """Collapse pure-rational PiRationals to Fraction (ints when integral)."""
    if isinstance(x, PiRational) and x.pi_coeff == 0:
        x = x.rational
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def lattice_covering_spectrum(circle_diameters: Sequence, max_vectors: int = 2_000_000) -> "Spectrum":
    """Covering spectrum of a flat product of circles with intrinsic diameters ``r_i``.

    The deck lattice Z^k acts by shifting coordinate i by ``2 r_i v_i``.  The
    filtration by sublattices generated by vectors shorter than ``2 delta`` is
    compared in Hermite normal form at each candidate ``|v|/2``.
    """
    k = len(circle_diameters)
    if k == 0:
        return Spectrum(())
    if any(float(d) <= 0 for d in circle_diameters):
        raise ValueError("circle diameters must be positive")
    mult, scale = _diameters_scale(circle_diameters)
    top = max(mult)
    bounds = [int(math.floor(top / m)) for m in mult]
    count = math.prod(2 * b + 1 for b in bounds)
    exact = scale is not None
    if count > max_vectors:
        # coordinate bound only: any v with v_i != 0 has |v| >= 2 r_i, so the
        # short sublattice is spanned by the e_i with 2 r_i < 2 delta.
        vecs = [tuple(int(i == j) for j in range(k)) for i in range(k)]
    else:
        vecs = [v for v in itertools.product(*[range(-b, b + 1) for b in bounds]) if any(v)]
    # squared half-lengths in scale units: (|v|/2)^2 = sum (m_i v_i)^2
    sq = {}
    for v in vecs:
        s = sum((m * c) ** 2 for m, c in zip(mult, v))
        if s <= top * top * (1 if exact else 1 + 1e-12):
            sq.setdefault(s, []).append(v)
    cands = sorted(sq)
    values = []
    below: list = []
    prev = hermite_normal_form([], k)
    for s in cands:
        below.extend(sq[s])
        now = hermite_normal_form(below, k)
        if now != prev:
            if exact:
                root = _exact_sqrt(Fraction(s))
                val = exact_simplify(scale * root) if root is not None else float(scale) * math.sqrt(s)
                values.append(SpecValue(val, "exact" if root is not None else "numeric", 0.0 if root else 1e-12))
            else:
                values.append(SpecValue(math.sqrt(s), "numeric", 1e-9))
        prev = now
    return Spectrum(tuple(values))


# --------------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class SpecValue:
    """One spectrum value with its provenance.

    ``status`` is ``ok``, ``undetermined`` (filtration test inconclusive),
    ``incomplete`` (above the enumeration bound) or ``boundary``.
    """

    value: object
    provenance: str = "exact"
    tol: float = 0.0
    status: str = "ok"

    def __float__(self):
        return float(self.value)

    @property
    def numeric(self) -> float:
        return float(self.value)

    def symbolic(self) -> str:
        if is_exact(self.value):
            return format_exact(self.value)
        return ""

    def __str__(self):
        s = self.symbolic()
        return s if s else f"{self.numeric:.12g}"


@dataclass(frozen=True)
class AccumulationPoint:
    value: float
    radius: float
    side: str = "above"  # values approach from above or below
    count: int = 0


@dataclass(frozen=True)
class Spectrum:
    values: tuple[SpecValue, ...] = ()
    accumulation_points: tuple[AccumulationPoint, ...] = ()
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        vals = tuple(v if isinstance(v, SpecValue) else SpecValue(v) for v in self.values)
        vals = tuple(sorted(vals, key=lambda v: v.numeric))
        for v in vals:
            if not v.numeric > 0:
                raise ValueError(f"spectrum values must be positive, got {v.value!r}")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "accumulation_points", tuple(sorted(self.accumulation_points, key=lambda a: a.value)))

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def floats(self) -> list[float]:
        return [v.numeric for v in self.values]

    def raw(self) -> list:
        return [v.value for v in self.values]

    def is_empty(self) -> bool:
        return not self.values and not self.accumulation_points

    def has_undetermined(self) -> bool:
        return any(v.status == "undetermined" for v in self.values)

    def scaled(self, c) -> "Spectrum":
        vals = []
        for v in self.values:
            try:
                x = exact_simplify(PiRational.coerce(v.value) * c) if is_exact(v.value) and is_exact(c) else float(v) * float(c)
            except TypeError:
                x = float(v) * float(c)
            vals.append(SpecValue(x, v.provenance if is_exact(x) else "numeric", v.tol * abs(float(c)), v.status))
        acc = [AccumulationPoint(a.value * float(c), a.radius * abs(float(c)), a.side, a.count) for a in self.accumulation_points]
        return Spectrum(tuple(vals), tuple(acc), self.notes)

    def with_accumulation(self, min_run: int = 6) -> "Spectrum":
        acc = detect_accumulation(self.floats(), min_run=min_run)
        return Spectrum(self.values, tuple(acc), self.notes)


def extrapolate_limit(xs: Sequence[float]) -> tuple[float, float]:
    """Limit estimate of a monotone tail with its uncertainty.

    Fits ``L + a/(n + c)`` exactly through consecutive triples (index-shift
    invariant, exact for harmonic tails) and Aitken's process (exact for
    geometric tails); the model with more consistent recent estimates wins.
    """
    def hyper(x1, x2, x3):
        d1, d2 = x1 - x2, x2 - x3
        if d1 == d2 or d2 == 0:
            return None
        m = 2 * d2 / (d1 - d2)
        if m <= 0:
            return None
        a = d1 * m * (m + 1)
        return x1 - a / m

    def aitken(x1, x2, x3):
        den = x3 - 2 * x2 + x1
        if den == 0:
            return None
        return x3 - (x3 - x2) ** 2 / den

    best = None
    for fit in (hyper, aitken):
        ests = [fit(*xs[i : i + 3]) for i in range(len(xs) - 2)]
        ests = [e for e in ests if e is not None and math.isfinite(e)]
        if len(ests) < 2:
            continue
        tail = ests[-3:]
        spread = max(abs(e - tail[-1]) for e in tail)
        if best is None or spread < best[1]:
            best = (tail[-1], spread)
    if best is None:
        return xs[-1], abs(xs[-1] - xs[-2])
    lim, spread = best
    return lim, max(spread, 1e-12 * max(1.0, abs(lim)))


def _limit_with_radius(run: Sequence[float]) -> tuple[float, float]:
    # the radius also covers the drift from using only the first part of the run
    lim, rad = extrapolate_limit(run)
    if len(run) >= 10:
        half, _ = extrapolate_limit(run[: max(5, len(run) // 2)])
        rad = max(rad, abs(lim - half))
    return lim, rad


def detect_accumulation(values: Sequence[float], min_run: int = 6) -> list[AccumulationPoint]:
    """Find accumulation points suggested by runs of shrinking gaps.

    Looks at the run starting from the smallest values (approach from above)
    and the run ending at the largest values (approach from below).
    """
    xs = sorted(set(float(v) for v in values))
    out = []
    if len(xs) < min_run:
        return out
    gaps = [b - a for a, b in zip(xs, xs[1:])]
    # from above: gaps grow as we move up from the smallest value
    n = 1
    while n < len(gaps) and gaps[n] > gaps[n - 1]:
        n += 1
    if n + 1 >= min_run and gaps[0] < 0.5 * gaps[n - 1]:
        run = xs[: n + 1][::-1]  # descending towards the limit
        lim, rad = _limit_with_radius(run)
        if lim < run[-1] + rad:
            out.append(AccumulationPoint(lim, rad, "above", n + 1))
    # from below: gaps shrink towards the largest value
    n = 1
    while n < len(gaps) and gaps[-n - 1] > gaps[-n]:
        n += 1
    if n + 1 >= min_run and gaps[-1] < 0.5 * gaps[-n]:
        run = xs[-(n + 1) :]
        lim, rad = _limit_with_radius(run)
        if lim > run[-1] - rad:
            out.append(AccumulationPoint(lim, rad, "below", n + 1))
    return out


# --------------------------------------------------------------------------
# groups and spaces


@dataclass(frozen=True)
class GroupDescriptor:
    """Deck group of a space: ``free`` (words), ``lattice`` (Z^k) or ``tower``."""

    kind: str
    rank: int
    length: Callable | None = None
    names: tuple[str, ...] = ()
    expansion: object = None

    def __post_init__(self):
        if self.kind not in ("free", "lattice", "tower"):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if not self.names:
            object.__setattr__(self, "names", tuple(letter_names(self.rank)))

    def identity(self):
        if self.kind == "lattice":
            return LatticeElement((0,) * self.rank)
        return IDENTITY

    def generators(self) -> list:
        if self.kind == "lattice":
            return [LatticeElement(tuple(int(i == j) for j in range(self.rank))) for i in range(self.rank)]
        return [((i, 1),) for i in range(self.rank)]


class SpaceModel:
    """A complete length space with a deck group acting on its universal cover.

    Points are model-specific parameters.  Subclasses supply ``displacement``,
    ``dist_to_base`` and, for noncompact models, ``escape_sequences``; closed
    forms known for a model are registered in ``fast_paths``.
    """

    name = "space"
    group: GroupDescriptor
    base_point = None

    def __init__(self):
        self.fast_paths: dict[str, Callable] = {}

    def displacement(self, g, p) -> float:
        raise NotImplementedError

    def dist_to_base(self, p, base=None) -> float:
        raise NotImplementedError

    def escape_sequences(self) -> list[Callable[[float], object]]:
        """Families ``R -> point`` with distance to the basepoint growing like R."""
        raise NotImplementedError(f"{self.name} declares no escape sequences (compact model)")

    def sample_points(self, budget: int):
        raise NotImplementedError

    def tracked_elements(self) -> list:
        return self.group.generators()

    def scaled(self, R: float) -> "SpaceModel":
        raise NotImplementedError

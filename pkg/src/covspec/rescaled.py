"""Rescaled lengths, rescaled delta-groups and rescaled covering spectra.

For a deck transformation ``g`` and basepoint ``x0``

    L^{x0}(g) = inf_x  d(g x~, x~) / d(x, x0)
    L^inf(g)  = lim_R inf_{d(x, x0) >= R}  d(g x~, x~) / d(x, x0)

Both are scale invariant and at most 2.  Values come from the closed forms a
model registers in ``fast_paths`` when present; otherwise (and always, for
cross-checking) they are estimated numerically from sample points and the
model's escape sequences.  The deck groups handled here are cyclic, so the
rescaled delta-group is ``<g^m>`` with ``m`` the gcd of the admitted powers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import optimize

from .exact import is_exact
from .model_spaces import _power_of, geometric_schedule
from .parallel import pmap
from .spaces_core import SpaceModel, SpecValue, Spectrum, exact_simplify, extrapolate_limit

ZERO_THRESHOLD = 1e-4


class RescaledError(RuntimeError):
    pass


@dataclass
class RescaledLengthReport:
    value: float
    witness: list = field(default_factory=list)  # (point, ratio)
    attained: bool = False
    tag: str = "estimate"  # fast-path | estimate
    numeric: float | None = None
    trend: str = ""

    @property
    def is_zero(self) -> bool:
        if self.tag == "fast-path":
            return float(self.value) == 0.0
        return _zero_trend([r for _, r in self.witness])


def _zero_trend(ratios: Sequence[float]) -> bool:
    tail = list(ratios)[-3:]
    return len(tail) == 3 and tail[-1] < ZERO_THRESHOLD and tail[0] >= tail[1] >= tail[2]


def _base(model: SpaceModel, x0):
    return tuple(x0) if x0 is not None else model.base_point


# --------------------------------------------------------------------------
# basepoint rescaled length


def _polish(model, g, base, pts, ratios, k):
    """Refine a sampled minimum over the level coordinate of ``far_point`` models."""
    if not hasattr(model, "far_point") or len(pts) < 3:
        return None
    lo = pts[max(k - 1, 0)][0]
    hi = pts[min(k + 1, len(pts) - 1)][0]
    if lo == hi:
        return None

    def obj(x):
        p = model.far_point(x, base)
        d = model.dist_to_base(p, base)
        return model.displacement(g, p) / d if d > 0 else math.inf

    res = optimize.minimize_scalar(obj, bounds=(lo, hi), method="bounded", options={"xatol": 1e-6 * max(1.0, abs(hi - lo))})
    if res.fun < ratios[k]:
        return model.far_point(float(res.x), base), float(res.fun)
    return None


def rescaled_length_basepoint(model: SpaceModel, g, x0=None, budget: int = 40, numeric: bool = True) -> RescaledLengthReport:
    """``L^{x0}(g)``: fast path when the model has one, plus a sampled infimum."""
    base = _base(model, x0)
    fast = model.fast_paths.get("basepoint") if base == model.base_point else None
    num = None
    witness = []
    attained = False
    if numeric or fast is None:
        pts = [p for p in model.sample_points(budget) if model.dist_to_base(p, base) > 0]

        def ratio(p):
            return model.displacement(g, p) / model.dist_to_base(p, base)

        ratios = pmap(ratio, pts)
        k = int(np.argmin(ratios))
        witness = list(zip(pts, ratios))
        num = float(ratios[k])
        polished = _polish(model, g, base, pts, ratios, k)
        if polished is not None:
            witness.append(polished)
            num = polished[1]
        # the sample set runs out to the model's far field; an interior argmin is attained
        attained = 0 < k < len(pts) - 1 and num > 0
        # points escaping to infinity are admissible too: L^{x0} <= L^inf
        try:
            far = rescaled_length_infinity(model, g, x0=base, numeric=True)
        except RescaledError:
            far = None
        if far is not None and far.numeric is not None and far.numeric < num:
            num, attained = far.numeric, False
            witness.append(("infinity", far.numeric))
    if fast is not None:
        return RescaledLengthReport(fast(g), witness, attained, "fast-path", num)
    return RescaledLengthReport(num, witness, attained, "estimate", num)


# --------------------------------------------------------------------------
# infinite rescaled length


def _model_cache(model) -> dict:
    cache = getattr(model, "_rescaled_cache", None)
    if cache is None:
        cache = {}
        model._rescaled_cache = cache
    return cache


def infinity_ratios(model: SpaceModel, g, schedule: Sequence[float], x0=None) -> list[float]:
    """``min`` over escape sequences of the ratio at each schedule radius."""
    base = _base(model, x0)
    key = ("infinity_ratios", repr(g), tuple(schedule), base)
    cache = _model_cache(model)
    if key in cache:
        return list(cache[key])
    try:
        seqs = model.escape_sequences()
    except NotImplementedError as e:
        raise RescaledError(str(e)) from None

    def at(R):
        vals = []
        for seq in seqs:
            p = seq(R)
            d = model.dist_to_base(p, base)
            if d > 0:
                vals.append(model.displacement(g, p) / d)
        return min(vals)

    out = pmap(at, schedule)
    cache[key] = tuple(out)
    return out


def rescaled_length_infinity(model: SpaceModel, g, schedule: Sequence[float] | None = None, x0=None, numeric: bool = True) -> RescaledLengthReport:
    """``L^inf(g)`` from the fast path and/or the escape-sequence schedule.

    The numeric value extrapolates the ratios along a geometric schedule
    (errors decaying like a power of R are removed by Aitken's process).
    """
    fast = model.fast_paths.get("infinity")
    sched = list(schedule) if schedule is not None else geometric_schedule(1e3, 1e7, 5)
    num, witness, trend = None, [], ""
    if numeric or fast is None:
        ratios = infinity_ratios(model, g, sched, x0)
        witness = list(zip(sched, ratios))
        if _zero_trend(ratios):
            num, trend = 0.0, "decreasing to 0"
        else:
            num, spread = extrapolate_limit(ratios)
            num = max(num, 0.0)
            trend = f"extrapolated (spread {spread:.1e})"
    if fast is not None:
        return RescaledLengthReport(fast(g), witness, False, "fast-path", num, trend)
    return RescaledLengthReport(num, witness, False, "estimate", num, trend)


def rescaled_length(model: SpaceModel, g, which: str = "infinity", **kw) -> RescaledLengthReport:
    if which == "infinity":
        return rescaled_length_infinity(model, g, **kw)
    if which == "basepoint":
        return rescaled_length_basepoint(model, g, **kw)
    raise ValueError(f"which must be 'infinity' or 'basepoint', got {which!r}")


# --------------------------------------------------------------------------
# delta-groups and spectra


@dataclass
class PowerLengths:
    """Rescaled lengths of ``g, g^2, ..., g^n``."""

    which: str
    lengths: dict[int, RescaledLengthReport]

    def value(self, n: int) -> float:
        return float(self.lengths[n].value)

    def tol(self, n: int) -> float:
        return 1e-9 if self.lengths[n].tag == "fast-path" else 1e-6


def power_lengths(model: SpaceModel, which: str = "infinity", n_max: int = 6, numeric: bool = False) -> PowerLengths:
    key = ("power_lengths", which, n_max, numeric)
    cache = _model_cache(model)
    if key not in cache:
        cache[key] = PowerLengths(which, {n: rescaled_length(model, n, which, numeric=numeric) for n in range(1, n_max + 1)})
    return cache[key]


def _subgroup_name(m: int, n_max: int) -> str:
    if m == 1:
        return "entire group"
    if m == 0:
        return "trivial"
    return f"<g^{m}>"


@dataclass
class DeltaGroupReport:
    delta: float
    which: str
    members: list[int]
    boundary: list[int]
    index: int  # the subgroup is <g^index>; 0 means trivial

    @property
    def description(self) -> str:
        return _subgroup_name(self.index, 0)


def rescaled_delta_group(model: SpaceModel, delta: float, which: str = "infinity", n_max: int = 6, lengths: PowerLengths | None = None) -> DeltaGroupReport:
    """Powers ``g^n`` with rescaled length ``< 2 delta`` and the subgroup they generate."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    if delta > 1:
        # every rescaled length is at most 2
        return DeltaGroupReport(delta, which, list(range(1, n_max + 1)), [], 1)
    pl = lengths or power_lengths(model, which, n_max)
    members, boundary = [], []
    for n in range(1, n_max + 1):
        L, tol = pl.value(n), pl.tol(n)
        if abs(L - 2 * delta) <= tol:
            boundary.append(n)
        elif L < 2 * delta:
            members.append(n)
    m = 0
    for n in members:
        m = math.gcd(m, n)
    return DeltaGroupReport(delta, which, members, boundary, m)


def rescaled_covspec(model: SpaceModel, which: str = "infinity", n_max: int = 6, lengths: PowerLengths | None = None) -> Spectrum:
    """Breakpoints of the rescaled filtration of the cyclic deck group."""
    pl = lengths or power_lengths(model, which, n_max)
    vals = sorted({round(pl.value(n), 12) for n in range(1, n_max + 1)})
    out = []
    m = 0
    for n in range(1, n_max + 1):
        if pl.value(n) <= pl.tol(n):
            m = math.gcd(m, n)
    for L in vals:
        if L <= 1e-9:
            continue
        admitted = [n for n in range(1, n_max + 1) if abs(pl.value(n) - L) <= 1e-12 * max(1.0, L)]
        m_new = m
        for n in admitted:
            m_new = math.gcd(m_new, n)
        if m_new != m:
            rep = pl.lengths[admitted[0]]
            raw = rep.value
            half = exact_simplify(Fraction(raw) / 2) if is_exact(raw) or float(raw) in (1.0, 2.0) else float(raw) / 2
            out.append(SpecValue(half, "fast-path" if rep.tag == "fast-path" else "numeric", pl.tol(admitted[0]), "ok"))
            m = m_new
    notes = (f"{which} variant over powers up to {n_max}",)
    return Spectrum(tuple(out), notes=notes)


@dataclass(frozen=True)
class SlipVerdictRS:
    verdict: bool | None
    method: str


def rescaled_slipping_membership(model: SpaceModel, g, n_max: int = 6) -> SlipVerdictRS:
    """Is ``g`` in the rescaled slipping group (generated by elements of ``L^inf = 0``)?"""
    n = abs(_power_of(g))
    if n == 0:
        return SlipVerdictRS(True, "identity")
    rep = rescaled_length_infinity(model, n, numeric=False) if model.fast_paths.get("infinity") else rescaled_length_infinity(model, n)
    if rep.is_zero:
        return SlipVerdictRS(True, "length-zero")
    m = 0
    undetermined = False
    for k in range(1, n_max + 1):
        r = rescaled_length_infinity(model, k, numeric=False) if model.fast_paths.get("infinity") else rescaled_length_infinity(model, k)
        if r.is_zero:
            m = math.gcd(m, k)
        elif r.tag != "fast-path" and float(r.value) < 10 * ZERO_THRESHOLD:
            undetermined = True
    if m and n % m == 0:
        return SlipVerdictRS(True, f"product of slipping powers (g^{m})")
    if undetermined:
        return SlipVerdictRS(None, "undetermined (near the zero threshold)")
    return SlipVerdictRS(False, f"rescaled length {float(rep.value):.6g} > 0")


@dataclass
class LoopsFlag:
    loops_to_infinity: bool
    cut_spectrum_empty: bool
    length: float


def loops_to_infinity_flag(model: SpaceModel, g, tol: float = 1e-6) -> LoopsFlag:
    """``L^inf(g) < 2`` gives the loops-to-infinity property; a spectrum inside (0, 1) adds CovSpec_cut = {}."""
    rep = rescaled_length_infinity(model, g, numeric=model.fast_paths.get("infinity") is None)
    L = float(rep.value)
    loops = L < 2 - tol
    spec = rescaled_covspec(model, "infinity")
    cut_empty = all(v.numeric < 1 - tol for v in spec)
    return LoopsFlag(loops, cut_empty, L)


# --------------------------------------------------------------------------
# lemma suite


@dataclass
class LemmaCheck:
    name: str
    ok: bool
    detail: str
    worst: float = 0.0


def _second_base(model: SpaceModel):
    pts = [p for p in model.sample_points(8) if model.dist_to_base(p) > 0]
    return pts[len(pts) // 2]


def rescaled_lemma_suite(model: SpaceModel, powers: Sequence[int] = (1, 2), scales: Sequence[float] = (2.0, 10.0),
                         schedule: Sequence[float] | None = None, second_base=None) -> list[LemmaCheck]:
    """Consistency checks every rescaled length must pass.

    * reported lengths (closed form and numeric) stay at most 2;
    * the infinite length dominates the basepoint length;
    * the infinite length does not depend on the basepoint;
    * one length vanishes exactly when the other does;
    * lengths are unchanged when the metric is scaled by R.
    """
    sched = list(schedule) if schedule is not None else geometric_schedule(1e3, 1e7, 5)
    x1 = tuple(second_base) if second_base is not None else _second_base(model)
    inf = {n: rescaled_length_infinity(model, n, sched) for n in powers}
    bp = {n: rescaled_length_basepoint(model, n) for n in powers}
    out = []

    vals = [float(x) for n in powers for rep in (inf[n], bp[n]) for x in (rep.value, rep.numeric) if x is not None]
    worst = max(vals)
    out.append(LemmaCheck("at most 2", worst <= 2 + 1e-9, f"largest length {worst:.12g}", worst))

    gaps = [float(bp[n].value) - float(inf[n].value) for n in powers]
    out.append(LemmaCheck("infinity >= basepoint", max(gaps) <= 1e-6, f"largest L^x0 - L^inf = {max(gaps):.3e}", max(gaps)))

    other = {n: rescaled_length_infinity(model, n, sched, x0=x1) for n in powers}
    diffs = [abs(other[n].numeric - inf[n].numeric) for n in powers]
    out.append(LemmaCheck("basepoint independence", bool(max(diffs) < 1e-6), f"largest two-basepoint difference {max(diffs):.3e} (second base {tuple(float(v) for v in x1)})", max(diffs)))

    agree = [inf[n].is_zero == bp[n].is_zero for n in powers]
    out.append(LemmaCheck("zero iff zero", all(agree), ", ".join(f"g^{n}: {inf[n].is_zero}/{bp[n].is_zero}" for n in powers)))

    worst_scale, exact_ok = 0.0, True
    for R in scales:
        m = model.scaled(R)
        for n in powers:
            s_inf = rescaled_length_infinity(m, n, [R * s for s in sched])
            worst_scale = max(worst_scale, abs(s_inf.numeric - inf[n].numeric))
            if inf[n].tag == "fast-path":
                exact_ok &= s_inf.value == inf[n].value
            s_bp = rescaled_length_basepoint(m, n, numeric=bp[n].tag != "fast-path")
            if bp[n].tag == "fast-path":
                exact_ok &= s_bp.value == bp[n].value
            else:
                worst_scale = max(worst_scale, abs(float(s_bp.value) - float(bp[n].value)))
    out.append(LemmaCheck("scale invariance", bool(exact_ok and worst_scale < 1e-6),
                          f"fast paths {'equal' if exact_ok else 'differ'}; largest numeric change {worst_scale:.3e}", worst_scale))
    return out

"""Figures for the command line reports (matplotlib, SVG output).

Figures are written with a fixed hash salt and no date stamp so identical
inputs give byte-identical SVG files.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .expr import WarpFunction  # noqa: E402
from .model_spaces import asymptotic_slope, warped_geodesic_F  # noqa: E402
from .parallel import pmap  # noqa: E402
from .spaces_core import Spectrum  # noqa: E402

STYLE = {
    "figure.figsize": (5.0, 3.4),
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "lines.linewidth": 1.2,
    "svg.hashsalt": "covspec",
    "svg.fonttype": "none",
}


def svg_bytes(fig) -> bytes:
    buf = io.StringIO()
    with plt.rc_context(STYLE):
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return buf.getvalue().encode("utf-8")


@dataclass
class RatioCurve:
    f: str
    d: float
    r: np.ndarray
    ratio: np.ndarray
    limit: float | None  # predicted limit of F(r, d)/r

    def rows(self):
        return [(float(a), float(b)) for a, b in zip(self.r, self.ratio)]


def cone_chord(k: float, d: float) -> float:
    """``sqrt(2 - 2 cos(min(pi, k d)))``: the limit of ``F(r, d)/r`` for ``f ~ k r``."""
    return math.sqrt(2 - 2 * math.cos(min(math.pi, k * d)))


def warped_ratio_curve(f: str, d: float, rmax: float = 1e6, n: int = 25, rmin: float = 1.0, domain="half") -> RatioCurve:
    """``F(r, d)/r`` on a log grid, with the limit predicted by the slope of ``f``."""
    w = WarpFunction(f)
    rs = np.geomspace(rmin, rmax, n)
    ratios = np.array(pmap(lambda r: warped_geodesic_F(w, float(r), d, domain) / float(r), rs))
    sl = asymptotic_slope(w)
    limit = None
    if sl.verdict == "zero":
        limit = 0.0
    elif sl.verdict == "limit":
        limit = cone_chord(float(sl.k), d)
    return RatioCurve(str(w), d, rs, ratios, limit)


def ratio_figure(curve: RatioCurve):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.semilogx(curve.r, curve.ratio, "o-", ms=3, label=f"F(r, d)/r, f = {curve.f}")
        if curve.limit is not None:
            ax.axhline(curve.limit, color="0.4", ls="--", lw=0.8, label=f"limit {curve.limit:.6g}")
        ax.set_xlabel("r")
        ax.set_ylabel("F(r, d) / r")
        ax.set_title(f"d = {curve.d:.6g}")
        ax.legend(frameon=False)
        fig.tight_layout()
    return fig


def sweep_counts(spectrum: Spectrum, deltas: Sequence[float]) -> np.ndarray:
    """Number of spectrum values strictly below each delta (steps at the spectrum)."""
    vals = np.array(spectrum.floats())
    return np.array([int(np.sum(vals < d)) for d in deltas])


def sweep_figure(spectrum: Spectrum, deltas: np.ndarray, title: str):
    counts = sweep_counts(spectrum, deltas)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.step(deltas, counts, where="post")
        for v in spectrum.floats():
            ax.axvline(v, color="0.6", lw=0.6, ls=":")
        ax.set_xlabel(r"$\delta$")
        ax.set_ylabel(r"breakpoints below $\delta$")
        ax.set_title(title)
        ax.set_ylim(-0.1, max(1, counts.max()) + 0.5)
        fig.tight_layout()
    return fig


def spectrum_figure(spectrum: Spectrum, title: str):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 1.8))
        vals = spectrum.floats()
        if vals:
            ax.vlines(vals, 0, 1)
        for a in spectrum.accumulation_points:
            ax.plot([a.value], [0.5], "x", color="C3")
        ax.set_yticks([])
        ax.set_xlabel("value")
        ax.set_title(title)
        fig.tight_layout()
    return fig

"""Noncompact spaces as towers of metric graphs.

Level ``n`` is a finite metric graph; consecutive levels are related either by
isometric embeddings (from which generator rewrites are derived) or directly by
rewrite rules ``g -> word`` that are group homomorphisms between the free
fundamental groups.  All verdicts are three valued and hold *at the budget*.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact import PiRational
from .filtration import membership
from .metric_graph import Edge, GraphFormatError, MetricGraph, enumerate_cycles, parse_graph, short_cycle_relators
from .spaces_core import IDENTITY, Word, extrapolate_limit, exact_simplify, format_word, reduce_word

YES, NO, UNDETERMINED = "yes", "no", "undetermined"


@dataclass(frozen=True)
class TowerElement:
    level: int
    word: Word


class GraphTower:
    def __init__(self, levels: Sequence[MetricGraph], rules: Sequence[dict[int, Word]], name: str = ""):
        self.levels = list(levels)
        self.rules = [dict(r) for r in rules]
        self.name = name
        if len(self.rules) != len(self.levels) - 1:
            raise ValueError("need one rule set between each pair of consecutive levels")
        for n, r in enumerate(self.rules):
            missing = set(range(self.levels[n].rank)) - set(r)
            if missing:
                raise ValueError(f"level {n}: no rewrite for generators {sorted(missing)}")
            top = self.levels[n + 1].rank
            for k, w in r.items():
                if any(not 0 <= g < top for g, _ in w):
                    raise ValueError(f"level {n}: rewrite of generator {k} uses unknown generators")
        self.names = [[g.edges[e].name for e in g.chords] for g in self.levels]
        self._index = {}
        for n, names in enumerate(self.names):
            for k, nm in enumerate(names):
                self._index.setdefault(nm, (n, k))

    def __len__(self):
        return len(self.levels)

    def element(self, name: str) -> TowerElement:
        """The generator with this (chord edge) name, at the level it first appears."""
        if name not in self._index:
            raise KeyError(f"unknown generator {name!r}")
        n, k = self._index[name]
        return TowerElement(n, ((k, 1),))

    def generators(self, level: int) -> list[TowerElement]:
        return [TowerElement(level, ((k, 1),)) for k in range(self.levels[level].rank)]

    def expand(self, g: TowerElement, target: int) -> Word:
        if target < g.level:
            raise ValueError("cannot expand to a shallower level")
        w = reduce_word(g.word)
        for n in range(g.level, target):
            rule = self.rules[n]
            out = []
            for k, s in w:
                img = rule[k]
                out.extend(img if s > 0 else tuple((a, -b) for a, b in reversed(img)))
            w = reduce_word(out)
        return w

    def label(self, g: TowerElement) -> str:
        return format_word(g.word, self.names[g.level])

    def systole(self, level: int):
        """Shortest immersed cycle length at a level (``inf`` for trees)."""
        gr = self.levels[level]
        if gr.rank == 0:
            return math.inf
        bound = min(float(gr.translation_length(((k, 1),))) for k in range(gr.rank))
        cyc, _ = enumerate_cycles(gr, bound * (1 + 1e-9) + 1e-12)
        return min((c.length for c in cyc), key=float)

    # ------------------------------------------------------------------ builders
    @classmethod
    def from_embeddings(cls, levels, edge_maps: Sequence[dict[int, tuple[int, int]]], name: str = ""):
        """Derive rewrite rules from edge maps ``e -> (e', sign)`` between levels."""
        rules = []
        for n, emap in enumerate(edge_maps):
            lo, hi = levels[n], levels[n + 1]
            for e, (e2, s) in emap.items():
                a, b = lo.edges[e], hi.edges[e2]
                if not _length_equal(a.length, b.length):
                    raise ValueError(f"embedding {n}: edge {a.name} -> {b.name} is not length preserving")
            rule = {}
            for k in range(lo.rank):
                loop = lo.generator_loop(k)
                img = tuple((emap[i][0], s * emap[i][1]) for i, s in loop)
                if img and hi.tail(img[0]) != hi.basepoint:
                    raise ValueError(f"embedding {n} does not preserve the basepoint")
                rule[k] = reduce_word(hi.word_of_walk(img))
            rules.append(rule)
        return cls(levels, rules, name)


def _length_equal(a, b) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return abs(float(a) - float(b)) <= 1e-9 * max(1.0, abs(float(a)))
    return a == b


# --------------------------------------------------------------------------
# lengths and slipping


@dataclass
class TowerLengthReport:
    levels: list[int]
    lengths: list
    value: object
    stabilized: bool
    nonincreasing: bool
    estimate: bool  # True when the infimum is extrapolated rather than reached


def _lt(a, b) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return float(a) < float(b) - 1e-12 * max(1.0, abs(float(b)))
    return PiRational.coerce(a) < PiRational.coerce(b)


def tower_translation_length(t: GraphTower, g: TowerElement, level_budget: int | None = None) -> TowerLengthReport:
    top = len(t) - 1 if level_budget is None else min(len(t) - 1, level_budget)
    levels, lengths = [], []
    for n in range(g.level, top + 1):
        levels.append(n)
        lengths.append(t.levels[n].translation_length(t.expand(g, n)))
    noninc = all(not _lt(prev, nxt) for prev, nxt in zip(lengths, lengths[1:]))
    stabilized = len(lengths) >= 2 and _length_equal(lengths[-1], lengths[-2]) or len(lengths) == 1
    value, estimate = lengths[-1], False
    if not stabilized and len(lengths) >= 3:
        lim, _ = extrapolate_limit([float(x) for x in lengths])
        value, estimate = max(lim, 0.0), True
    return TowerLengthReport(levels, lengths, value, stabilized, noninc, estimate)


def delta_schedule(delta0: float, target: float | None = None, steps: int = 20) -> list[float]:
    """Geometric schedule ``delta0 * 2^-i`` (i <= steps), optionally stopping at ``target``."""
    out = []
    for i in range(steps + 1):
        d = delta0 * 2.0**-i
        if target is not None and d < float(target) * (1 - 1e-12):
            break
        out.append(d)
    if target is not None and (not out or abs(out[-1] - float(target)) > 1e-12 * float(target)):
        out.append(float(target))
    return out


@dataclass
class SlipVerdict:
    verdict: str
    level: int | None = None
    method: str = ""
    detail: dict = field(default_factory=dict)


def slipping_test(t: GraphTower, g: TowerElement, eps, level_budget: int | None = None) -> SlipVerdict:
    """Does ``g`` have representatives of length below every scale down to ``eps``?"""
    if not reduce_word(g.word):
        return SlipVerdict(YES, g.level, "identity")
    rep = tower_translation_length(t, g, level_budget)
    best = min(rep.lengths, key=float)
    sched = delta_schedule(max(float(rep.lengths[0]) * 2, float(eps)), float(eps))
    ok = all(float(best) < e for e in sched) and _lt(best, eps)
    lvl = rep.levels[[float(x) for x in rep.lengths].index(float(best))]
    if ok:
        return SlipVerdict(YES, lvl, "length", {"length": best})
    if rep.estimate and float(rep.value) < 1e-3 * float(eps):
        # lengths still falling at the budget with extrapolated infimum ~ 0
        return SlipVerdict(YES, rep.levels[-1], "extrapolated", {"length": best, "limit": rep.value})
    return SlipVerdict(NO, rep.levels[-1], "length", {"length": best})


def universal_slipping_test(t: GraphTower, g: TowerElement, delta, level_budget: int | None = None, coset_budget: int = 20000) -> SlipVerdict:
    """Is ``g`` a product of elements of translation length ``< delta``?"""
    if not reduce_word(g.word):
        return SlipVerdict(YES, g.level, "identity")
    top = len(t) - 1 if level_budget is None else min(len(t) - 1, level_budget)
    for n in range(g.level, top + 1):
        w = t.expand(g, n)
        gr = t.levels[n]
        lens = {k: gr.translation_length(((k, 1),)) for k in {a for a, _ in w}}
        if all(_lt(x, delta) for x in lens.values()):
            return SlipVerdict(YES, n, "letters", {"letters": len(w)})
    # exact filtration test at the deepest level
    gr = t.levels[top]
    rels, complete = short_cycle_relators(gr, delta)
    v = membership(rels, t.expand(g, top), coset_budget)
    if v.member is True:
        return SlipVerdict(YES, top, v.method)
    if v.member is False and complete:
        return SlipVerdict(NO, top, v.method)
    return SlipVerdict(UNDETERMINED, top, v.method)


def slipping_group_membership(t: GraphTower, g: TowerElement, eps, level_budget: int | None = None) -> SlipVerdict:
    """Membership in the group generated by slipping elements.

    Directly slipping elements are members; otherwise ``g`` is a member when at
    some level it is spelled in generators that are each slipping.
    """
    direct = slipping_test(t, g, eps, level_budget)
    if direct.verdict == YES:
        return SlipVerdict(YES, direct.level, "slipping")
    top = len(t) - 1 if level_budget is None else min(len(t) - 1, level_budget)
    for n in range(g.level, top + 1):
        w = t.expand(g, n)
        if all(slipping_test(t, TowerElement(n, ((k, 1),)), eps, level_budget).verdict == YES for k in {a for a, _ in w}):
            return SlipVerdict(YES, n, "generated")
    return SlipVerdict(NO, top, "generated")


# --------------------------------------------------------------------------
# universal delta cover


@dataclass
class UniversalDeltaCoverReport:
    members: list[str]
    non_members: list[str]
    undetermined: list[str]
    systoles: list
    infimum: float
    infimum_radius: float
    positive_infimum: bool
    pi_slip_full: bool
    pi_slip_trivial: bool
    is_delta_cover: bool
    delta0: object
    schedule: list[float]
    statement: str

    def lines(self) -> list[str]:
        out = [f"tracked generators: {len(self.members) + len(self.non_members) + len(self.undetermined)}"]
        out.append(f"π_slip members: {len(self.members)}; non-members: {len(self.non_members)}; undetermined: {len(self.undetermined)}")
        if self.pi_slip_full:
            out.append("π_slip = full group")
        elif self.pi_slip_trivial:
            out.append("π_slip = trivial")
        out.append(self.statement)
        return out


def universal_delta_cover_report(t: GraphTower, level_budget: int | None = None, track_levels: int | None = None, coset_budget: int = 20000) -> UniversalDeltaCoverReport:
    top = len(t) - 1 if level_budget is None else min(len(t) - 1, level_budget)
    systoles = [t.systole(n) for n in range(top + 1)]
    fin = [float(s) for s in systoles if math.isfinite(float(s))]
    if not fin:
        return UniversalDeltaCoverReport([], [], [], systoles, math.inf, 0.0, True, False, True, True, None, [],
                                         "simply connected: every cover is trivial, X̃⁰ = X = X̃")
    if len(fin) >= 3 and not _length_equal(fin[-1], fin[-2]):
        lim, rad = extrapolate_limit(fin)
    else:
        lim, rad = fin[-1], 0.0
    lim = min(lim, fin[-1])
    positive = lim - rad > 1e-9 * fin[0]
    tl = min(top, 6) if track_levels is None else min(track_levels, top)
    tracked = [e for n in range(tl + 1) for e in t.generators(n)]
    if positive:
        # every loop has length >= lim > 0: pi(X, delta) is trivial for delta <= lim/2
        labels = [t.label(e) for e in tracked]
        d0 = exact_simplify(PiRational.coerce(systoles[-1]) / 2) if not isinstance(systoles[-1], float) else systoles[-1] / 2
        stmt = (f"systole bounded below (limit {lim:.12g}); universal delta cover = delta-cover at delta0 = {lim / 2:.12g} "
                f"(truncation infimum {float(d0):.12g}); π_slip trivial so X̃⁰ = X̃")
        return UniversalDeltaCoverReport([], labels, [], systoles, lim, rad, True, False, True, True, d0, [], stmt)
    delta0 = 2 * max(float(t.levels[e.level].translation_length(e.word)) for e in tracked)
    floor = fin[-1]  # finest scale the truncation resolves
    sched = [d for d in delta_schedule(delta0) if d > floor * (1 + 1e-12)]
    members, non, und = [], [], []
    for e in tracked:
        verdicts = [universal_slipping_test(t, e, d, top, coset_budget).verdict for d in sched]
        lab = t.label(e)
        if all(v == YES for v in verdicts):
            members.append(lab)
        elif NO in verdicts:
            non.append(lab)
        else:
            und.append(lab)
    full = not non and not und
    if full:
        stmt = f"π_slip = full group (verified down to delta = {sched[-1]:.12g}); X̃⁰ = X"
    else:
        stmt = "π_slip is a proper subgroup at this budget; X̃⁰ = X̃/π_slip"
    return UniversalDeltaCoverReport(members, non, und, systoles, lim, rad, False, full, not members and not und, False, None, sched, stmt)


# --------------------------------------------------------------------------
# presets


def pants_tower(levels: int = 12) -> GraphTower:
    """Level n is a bouquet of 2^n loops g_{n,j} of length 2 pi / 2^n with
    ``g_{n,j} -> g_{n+1,2j-1} g_{n+1,2j}``."""
    graphs = []
    for n in range(levels):
        ln = PiRational.pi(Fraction(2, 2**n))
        graphs.append(MetricGraph(1, [Edge(0, 0, ln, f"g_{{{n},{j}}}") for j in range(1, 2**n + 1)], 0, ["o"], f"pants{n}"))
    rules = [{k: ((2 * k, 1), (2 * k + 1, 1)) for k in range(2**n)} for n in range(levels - 1)]
    return GraphTower(graphs, rules, "pants")


def wedge_tower(levels: int = 20) -> GraphTower:
    """Level j adds a circle of circumference 2 pi (1 + 1/j)."""
    graphs = []
    for J in range(1, levels + 1):
        es = [Edge(0, 0, PiRational.pi(2 * (1 + Fraction(1, j))), f"g_{j}") for j in range(1, J + 1)]
        graphs.append(MetricGraph(1, es, 0, ["o"], f"wedge{J}"))
    maps = [{i: (i, 1) for i in range(J)} for J in range(1, levels)]
    return GraphTower.from_embeddings(graphs, maps, "wedge")


def shrinking_circle_tower(levels: int = 20) -> GraphTower:
    """A single loop of length 1/n at level n (n >= 1)."""
    graphs = [MetricGraph(1, [Edge(0, 0, Fraction(1, n), "g")], 0, ["o"], f"circle{n}") for n in range(1, levels + 1)]
    return GraphTower(graphs, [{0: ((0, 1),)} for _ in range(levels - 1)], "shrinking-circle")


def cusp_tower(levels: int = 20, circumference: float = 2 * math.pi) -> GraphTower:
    """Circles ``{x = -n}`` of the cusp cylinder ``dx^2 + e^{2x} dy^2``."""
    graphs = [MetricGraph(1, [Edge(0, 0, circumference * math.exp(-n), "g")], 0, ["o"], f"cusp{n}") for n in range(levels)]
    return GraphTower(graphs, [{0: ((0, 1),)} for _ in range(levels - 1)], "cusp-cylinder")


def infinite_genus_tower(levels: int = 20) -> GraphTower:
    """Dual wedge of the holes of an infinite-genus surface: circles of
    circumference 2 pi / j added one per level."""
    graphs = []
    for J in range(1, levels + 1):
        es = [Edge(0, 0, PiRational.pi(Fraction(2, j)), f"h_{j}") for j in range(1, J + 1)]
        graphs.append(MetricGraph(1, es, 0, ["o"], f"genus{J}"))
    maps = [{i: (i, 1) for i in range(J)} for J in range(1, levels)]
    return GraphTower.from_embeddings(graphs, maps, "infinite-genus")


def two_cusp_tower(levels: int = 20, bridge=1) -> GraphTower:
    """Two shrinking loops a, b joined by a fixed bridge: a and b slip, ab does not."""
    graphs = []
    for n in range(1, levels + 1):
        es = [Edge(0, 0, Fraction(1, n), "a"), Edge(0, 1, bridge, "t"), Edge(1, 1, Fraction(1, n), "b")]
        graphs.append(MetricGraph(2, es, 0, ["p", "q"], f"twocusp{n}"))
    return GraphTower(graphs, [{0: ((0, 1),), 1: ((1, 1),)} for _ in range(levels - 1)], "two-cusp")


def constant_tower(graph: MetricGraph, levels: int = 5) -> GraphTower:
    maps = [{i: (i, 1) for i in range(len(graph.edges))} for _ in range(levels - 1)]
    return GraphTower.from_embeddings([graph] * levels, maps, f"constant-{graph.name}")


TOWER_PRESETS = {
    "pants": pants_tower,
    "wedge": wedge_tower,
    "shrinking-circle": shrinking_circle_tower,
    "infinite-genus": infinite_genus_tower,
    "two-cusp": two_cusp_tower,
    "cusp-cylinder": cusp_tower,
}


# --------------------------------------------------------------------------
# file format

_EXPAND = re.compile(r"^expand\s+(\S+)\s*=\s*(.*)$")


def parse_tower(text: str, name: str = "") -> GraphTower:
    """Parse a tower file.

    ::

        tower
        level 0
        v o
        e g_{0,1} o o 2*pi
        base o
        level 1
        ...
        embed 0 e <edge at level 0> <edge at level 1> [-]
        expand g_{0,1} = g_{1,1} g_{1,2}
    """
    lines = text.splitlines()
    body = [(i + 1, l) for i, l in enumerate(lines) if l.split("#", 1)[0].strip()]
    if not body or body[0][1].strip() != "tower":
        raise GraphFormatError("tower file must start with 'tower'", body[0][0] if body else 1, 1)
    blocks: list[list[tuple[int, str]]] = []
    embeds: list[tuple[int, str]] = []
    expands: list[tuple[int, str]] = []
    for lineno, l in body[1:]:
        s = l.split("#", 1)[0].strip()
        if s.startswith("level"):
            blocks.append([])
        elif s.startswith("embed"):
            embeds.append((lineno, s))
        elif s.startswith("expand"):
            expands.append((lineno, s))
        else:
            if not blocks:
                raise GraphFormatError("graph line before the first 'level'", lineno, 1)
            blocks[-1].append((lineno, l))
    graphs = []
    for blk in blocks:
        txt = "\n".join(l for _, l in blk)
        try:
            graphs.append(parse_graph(txt))
        except GraphFormatError as err:
            ln = blk[err.line - 1][0] if err.line else None
            raise GraphFormatError(str(err).split(": ", 1)[-1], ln, err.column) from None
    if not graphs:
        raise GraphFormatError("tower has no levels")
    names = [[g.edges[e].name for e in g.chords] for g in graphs]
    rules: list[dict[int, Word]] = [dict() for _ in range(len(graphs) - 1)]
    for lineno, s in expands:
        m = _EXPAND.match(s)
        if not m:
            raise GraphFormatError("expected 'expand <gen> = <word>'", lineno, 1)
        lhs, rhs = m.group(1), m.group(2)
        lvl = next((n for n, nm in enumerate(names) if lhs in nm), None)
        if lvl is None or lvl >= len(graphs) - 1:
            raise GraphFormatError(f"unknown or top-level generator {lhs!r}", lineno, s.index(lhs) + 1)
        from .spaces_core import parse_word

        try:
            rules[lvl][names[lvl].index(lhs)] = parse_word(rhs, names[lvl + 1])
        except ValueError as err:
            raise GraphFormatError(str(err), lineno, s.index("=") + 2) from None
    edge_maps: list[dict[int, tuple[int, int]]] = [dict() for _ in range(len(graphs) - 1)]
    for lineno, s in embeds:
        parts = s.split()
        if len(parts) not in (5, 6) or parts[2] not in ("e", "v"):
            raise GraphFormatError("expected 'embed <level> e <edge> <edge> [-]' or 'embed <level> v <v> <v>'", lineno, 1)
        lvl = int(parts[1])
        if parts[2] == "e":
            a = [e.name for e in graphs[lvl].edges].index(parts[3])
            b = [e.name for e in graphs[lvl + 1].edges].index(parts[4])
            edge_maps[lvl][a] = (b, -1 if len(parts) == 6 and parts[5] == "-" else 1)
    for n in range(len(graphs) - 1):
        if not rules[n] and edge_maps[n]:
            lo, hi = graphs[n], graphs[n + 1]
            derived = GraphTower.from_embeddings([lo, hi], [edge_maps[n]]).rules[0]
            rules[n] = derived
        elif rules[n] and edge_maps[n] and len(edge_maps[n]) == len(graphs[n].edges):
            derived = GraphTower.from_embeddings([graphs[n], graphs[n + 1]], [edge_maps[n]]).rules[0]
            if derived != rules[n]:
                raise GraphFormatError(f"expand rules at level {n} disagree with the embedding")
    try:
        return GraphTower(graphs, rules, name)
    except ValueError as err:
        raise GraphFormatError(str(err)) from None


def tower_to_text(t: GraphTower) -> str:
    out = ["tower"]
    for n, g in enumerate(t.levels):
        out.append(f"level {n}")
        out.extend(l for l in g.to_text().splitlines() if not l.startswith("#"))
    for n, rule in enumerate(t.rules):
        for k, w in sorted(rule.items()):
            out.append(f"expand {t.names[n][k]} = {format_word(w, t.names[n + 1]).replace('^-1', '^-1')}")
    return "\n".join(out) + "\n"


def load_tower(path: str) -> GraphTower:
    with open(path, encoding="utf-8") as fh:
        return parse_tower(fh.read(), name=path)

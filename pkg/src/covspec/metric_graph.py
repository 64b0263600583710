"""Finite metric graphs: free fundamental group, translation lengths on the
universal-cover tree, shift spectrum and covering spectrum."""
from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import expr
from .exact import PiRational, format_exact
from .filtration import CosetTable, closure_contains_all, tietze_eliminate
from .spaces_core import (
    AccumulationPoint,
    SpecValue,
    Spectrum,
    Word,
    cyclic_reduce,
    exact_simplify,
    reduce_word,
)

Dart = tuple[int, int]  # (edge index, +1 forward / -1 backward)
EdgePath = tuple[Dart, ...]

FLOAT_EPS = 1e-9


class GraphFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    length: object
    name: str = ""


class MetricGraph:
    """Connected multigraph with positive edge lengths and a basepoint.

    Lengths are kept exact (``PiRational``) when every edge length is exact,
    otherwise everything is a float and comparisons use ``1e-9``.
    """

    def __init__(self, n_vertices: int, edges: Sequence[Edge], basepoint: int = 0, vertex_names=None, name: str = ""):
        self.n = int(n_vertices)
        self.name = name
        self.vertex_names = list(vertex_names) if vertex_names else [str(i) for i in range(self.n)]
        lengths = [e.length for e in edges]
        self.exact = all(isinstance(x, (PiRational, Fraction, int)) for x in lengths)
        conv = PiRational.coerce if self.exact else float
        self.edges = tuple(Edge(e.u, e.v, conv(e.length), e.name or str(i)) for i, e in enumerate(edges))
        self.basepoint = int(basepoint)
        for e in self.edges:
            if not (0 <= e.u < self.n and 0 <= e.v < self.n):
                raise ValueError(f"edge {e.name} has an unknown endpoint")
            if not float(e.length) > 0:
                raise ValueError(f"edge {e.name} must have positive length")
        if not 0 <= self.basepoint < max(self.n, 1):
            raise ValueError("unknown basepoint")
        self.flen = [float(e.length) for e in self.edges]
        self.adj: list[list[Dart]] = [[] for _ in range(self.n)]
        for i, e in enumerate(self.edges):
            self.adj[e.u].append((i, 1))
            self.adj[e.v].append((i, -1))
        self._build_tree()

    # ------------------------------------------------------------------ darts
    def tail(self, d: Dart) -> int:
        e = self.edges[d[0]]
        return e.u if d[1] > 0 else e.v

    def head(self, d: Dart) -> int:
        e = self.edges[d[0]]
        return e.v if d[1] > 0 else e.u

    def path_length(self, path: Sequence[Dart]):
        if self.exact:
            total = PiRational(0)
            for i, _ in path:
                total = total + self.edges[i].length
            return exact_simplify(total)
        return float(sum(self.flen[i] for i, _ in path))

    def zero(self):
        return 0 if self.exact else 0.0

    # ------------------------------------------------------------------ tree
    def _build_tree(self):
        seen = {self.basepoint}
        parent: dict[int, Dart] = {}
        q = deque([self.basepoint])
        tree = set()
        while q:
            x = q.popleft()
            for d in sorted(self.adj[x]):
                y = self.head(d)
                if y not in seen:
                    seen.add(y)
                    parent[y] = d
                    tree.add(d[0])
                    q.append(y)
        if len(seen) != self.n:
            raise ValueError("graph is not connected")
        self.tree_edges = frozenset(tree)
        self.parent_dart = parent
        self.chords = [i for i in range(len(self.edges)) if i not in tree]
        self.gen_of_edge = {e: k for k, e in enumerate(self.chords)}
        self._tree_path_cache: dict[int, EdgePath] = {}

    @property
    def rank(self) -> int:
        return len(self.chords)

    def tree_path(self, v: int) -> EdgePath:
        """Reduced path in the spanning tree from the basepoint to ``v``."""
        if v in self._tree_path_cache:
            return self._tree_path_cache[v]
        path = []
        x = v
        while x != self.basepoint:
            d = self.parent_dart[x]
            path.append(d)
            x = self.tail(d)
        out = tuple(reversed(path))
        self._tree_path_cache[v] = out
        return out

    def generator_loop(self, k: int) -> EdgePath:
        e = self.chords[k]
        u, v = self.edges[e].u, self.edges[e].v
        return reduce_path(self.tree_path(u) + ((e, 1),) + invert_path(self.tree_path(v)))

    def free_basis(self) -> list[tuple[int, EdgePath]]:
        return [(k, self.generator_loop(k)) for k in range(self.rank)]

    def expand(self, w: Word) -> EdgePath:
        path: list[Dart] = []
        for g, s in w:
            if not 0 <= g < self.rank:
                raise ValueError(f"unknown generator id {g}")
            loop = self.generator_loop(g)
            path.extend(loop if s > 0 else invert_path(loop))
        return reduce_path(path)

    def word_of_walk(self, path: Sequence[Dart]) -> Word:
        """Chord sequence of a closed walk: its conjugacy class in the basis."""
        return tuple((self.gen_of_edge[i], s) for i, s in path if i in self.gen_of_edge)

    # ------------------------------------------------------------------ lengths
    def translation_length(self, w: Word):
        core, _ = cyclic_reduce(w)
        path = cyclic_reduce_path(self.expand(core))
        return self.path_length(path)

    def based_length(self, w: Word, p: int | None = None):
        p = self.basepoint if p is None else p
        if not 0 <= p < self.n:
            raise ValueError(f"unknown vertex {p}")
        tp = self.tree_path(p)
        path = reduce_path(invert_path(tp) + self.expand(reduce_word(w)) + tp)
        return self.path_length(path)

    def min_edge(self) -> float:
        return min(self.flen) if self.flen else math.inf

    def distances_from(self, src: int) -> list[float]:
        dist = [math.inf] * self.n
        dist[src] = 0.0
        h = [(0.0, src)]
        while h:
            d, x = heapq.heappop(h)
            if d > dist[x]:
                continue
            for dart in self.adj[x]:
                y = self.head(dart)
                nd = d + self.flen[dart[0]]
                if nd < dist[y]:
                    dist[y] = nd
                    heapq.heappush(h, (nd, y))
        return dist

    def default_lmax(self) -> float:
        """Bound past which every basis loop is admitted, so the filtration is full."""
        if self.rank == 0:
            return 0.0
        top = max(float(self.translation_length(((k, 1),))) for k in range(self.rank))
        return top + 0.5 * self.min_edge()

    # ------------------------------------------------------------------ io
    def to_text(self) -> str:
        lines = [f"# {self.name}"] if self.name else []
        lines += [f"v {n}" for n in self.vertex_names]
        for e in self.edges:
            ln = format_exact(e.length) if self.exact else repr(float(e.length))
            lines.append(f"e {e.name} {self.vertex_names[e.u]} {self.vertex_names[e.v]} {ln.replace(' ', '')}")
        lines.append(f"base {self.vertex_names[self.basepoint]}")
        return "\n".join(lines) + "\n"

    def subdivide(self, edge: int, t: Fraction = Fraction(1, 2)) -> "MetricGraph":
        """Split one edge at fraction ``t`` of its length (same metric space)."""
        e = self.edges[edge]
        new = self.n
        if self.exact:
            a, b = e.length * t, e.length * (1 - t)
        else:
            a, b = float(e.length) * float(t), float(e.length) * (1 - float(t))
        edges = list(self.edges[:edge]) + [Edge(e.u, new, a, e.name + "a")] + list(self.edges[edge + 1 :])
        edges.append(Edge(new, e.v, b, e.name + "b"))
        return MetricGraph(self.n + 1, edges, self.basepoint, self.vertex_names + [f"s{new}"], self.name)

    def __repr__(self):
        return f"MetricGraph({self.name or 'unnamed'}: V={self.n}, E={len(self.edges)}, rank={self.rank})"


def invert_path(path: Sequence[Dart]) -> EdgePath:
    return tuple((i, -s) for i, s in reversed(path))


def reduce_path(path) -> EdgePath:
    stack: list[Dart] = []
    for d in path:
        if stack and stack[-1][0] == d[0] and stack[-1][1] == -d[1]:
            stack.pop()
        else:
            stack.append(d)
    return tuple(stack)


def cyclic_reduce_path(path) -> EdgePath:
    p = reduce_path(path)
    i, j = 0, len(p) - 1
    while i < j and p[i][0] == p[j][0] and p[i][1] == -p[j][1]:
        i += 1
        j -= 1
    return p[i : j + 1]


# --------------------------------------------------------------------------
# file format


def parse_graph(text: str, name: str = "") -> MetricGraph:
    """Parse ``v <id>`` / ``e <id> <v1> <v2> <length>`` / ``base <id>`` lines."""
    vnames: list[str] = []
    vindex: dict[str, int] = {}
    edges: list[Edge] = []
    enames: set[str] = set()
    base = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        col0 = len(line) - len(line.lstrip()) + 1
        parts = line.split()
        key = parts[0]
        if key == "v":
            if len(parts) != 2:
                raise GraphFormatError("expected 'v <id>'", lineno, col0)
            if parts[1] in vindex:
                raise GraphFormatError(f"duplicate vertex {parts[1]!r}", lineno, raw.index(parts[1], col0) + 1)
            vindex[parts[1]] = len(vnames)
            vnames.append(parts[1])
        elif key == "e":
            if len(parts) < 5:
                raise GraphFormatError("expected 'e <id> <v1> <v2> <length>'", lineno, col0)
            eid, a, b = parts[1], parts[2], parts[3]
            for vv in (a, b):
                if vv not in vindex:
                    raise GraphFormatError(f"unknown vertex {vv!r}", lineno, raw.index(vv, raw.index(eid) + len(eid)) + 1)
            if eid in enames:
                raise GraphFormatError(f"duplicate edge {eid!r}", lineno, raw.index(eid) + 1)
            enames.add(eid)
            # the length expression is the remainder of the line after the endpoints
            pos = raw.index(b, raw.index(a, raw.index(eid) + len(eid)) + len(a)) + len(b)
            ltext = raw[pos:].split("#", 1)[0]
            lstart = pos + len(ltext) - len(ltext.lstrip()) + 1
            try:
                length = expr.constant(ltext.strip())
            except expr.ExpressionError as err:
                col = lstart + (err.column - 1 if err.column else 0)
                raise GraphFormatError(f"bad length: {err.args[0].split(' (column')[0]}", lineno, col) from None
            if float(length) <= 0:
                raise GraphFormatError("edge length must be positive", lineno, lstart)
            edges.append(Edge(vindex[a], vindex[b], length, eid))
        elif key == "base":
            if len(parts) != 2 or parts[1] not in vindex:
                raise GraphFormatError("expected 'base <known vertex id>'", lineno, col0)
            base = vindex[parts[1]]
        else:
            raise GraphFormatError(f"unknown directive {key!r}", lineno, col0)
    if not vnames:
        raise GraphFormatError("graph has no vertices")
    try:
        return MetricGraph(len(vnames), edges, base if base is not None else 0, vnames, name)
    except ValueError as err:
        raise GraphFormatError(str(err)) from None


def load_graph(path: str) -> MetricGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read(), name=path)


# --------------------------------------------------------------------------
# cycles and spectra


@dataclass(frozen=True)
class Cycle:
    length: object
    walk: EdgePath
    word: Word


@dataclass
class ShiftSpectrum:
    lengths: list  # sorted, with multiplicity
    cycles: list[Cycle]
    lmax: float
    truncated: bool = False

    def distinct(self) -> list:
        out = []
        for x in self.lengths:
            if not out or not _same(out[-1], x):
                out.append(x)
        return out


def _same(a, b) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return abs(float(a) - float(b)) <= FLOAT_EPS * max(1.0, abs(float(a)))
    return a == b


def _less(a, b) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return float(a) < float(b) - FLOAT_EPS * max(1.0, abs(float(a)))
    return a < b


def _dart_index(d: Dart) -> int:
    return 2 * d[0] + (0 if d[1] > 0 else 1)


def _min_rotation(seq: tuple) -> tuple:
    return min(seq[i:] + seq[:i] for i in range(len(seq)))


def enumerate_cycles(g: MetricGraph, lmax, max_cycles: int = 200_000, max_steps: int = 5_000_000) -> tuple[list[Cycle], bool]:
    """Closed non-backtracking walks of length ``< lmax``, one per class up to
    rotation and reversal.  Returns ``(cycles, truncated)``."""
    lim = float(lmax) + FLOAT_EPS * max(1.0, float(lmax))
    dist = [g.distances_from(v) for v in range(g.n)]
    out: list[Cycle] = []
    seen: set = set()
    truncated = False
    steps = 0
    darts = sorted(((i, s) for i in range(len(g.edges)) for s in (1, -1)), key=_dart_index)
    by_len = [sorted((g.flen[d[0]], _dart_index(d), d, g.head(d)) for d in g.adj[x]) for x in range(g.n)]
    for d0 in darts:
        i0 = _dart_index(d0)
        start = g.tail(d0)
        stack = [(d0,)]
        lens = [g.flen[d0[0]]]
        # iterative DFS over extensions
        while stack:
            steps += 1
            if steps > max_steps:
                truncated = True
                break
            walk = stack.pop()
            length = lens.pop()
            last = walk[-1]
            x = g.head(last)
            if x == start and not (last[0] == d0[0] and last[1] == -d0[1]) and length < lim:
                idx = tuple(_dart_index(d) for d in walk)
                if idx == _min_rotation(idx):
                    inv = invert_path(walk)
                    key = min(idx, _min_rotation(tuple(_dart_index(d) for d in inv)))
                    if key not in seen:
                        seen.add(key)
                        exact_len = g.path_length(walk)
                        if g.exact and not isinstance(lmax, float):
                            keep = PiRational.coerce(exact_len) < PiRational.coerce(lmax)
                        else:
                            keep = float(exact_len) < lim
                        if keep:
                            out.append(Cycle(exact_len, walk, g.word_of_walk(walk)))
                            if len(out) >= max_cycles:
                                truncated = True
                                stack.clear()
                                break
            for fl, di, d, y in by_len[x]:
                nl = length + fl
                if nl >= lim:
                    break  # sorted by length
                if di < i0 or (d[0] == last[0] and d[1] == -last[1]):
                    continue
                if nl + dist[y][start] >= lim:
                    continue
                stack.append(walk + (d,))
                lens.append(nl)
        if truncated:
            break
    out.sort(key=lambda c: (float(c.length), [_dart_index(d) for d in c.walk]))
    return out, truncated


def short_cycle_relators(g: MetricGraph, bound, max_cycles: int = 5000, max_steps: int = 500_000) -> tuple[list[Word], bool]:
    """Words of the immersed cycles of length ``< bound``; flag says whether the list is complete
    up to normal closure.

    On a bouquet every such cycle is a product of loops each shorter than
    ``bound`` and each loop is itself such a cycle, so the short loops alone
    have the same normal closure.
    """
    if g.n == 1:
        return [((g.gen_of_edge[i], 1),) for i in g.chords if _less(g.edges[i].length, bound)], True
    cyc, truncated = enumerate_cycles(g, bound, max_cycles, max_steps)
    return [c.word for c in cyc if _less(c.length, bound)], not truncated


def shift_spectrum(g: MetricGraph, lmax, max_cycles: int = 200_000) -> ShiftSpectrum:
    if float(lmax) <= 0:
        raise ValueError("Lmax must be positive")
    cycles, truncated = enumerate_cycles(g, lmax, max_cycles)
    if not g.exact:
        lmax = float(lmax)
    return ShiftSpectrum([c.length for c in cycles], cycles, float(lmax), truncated)


def _half(x):
    if isinstance(x, float):
        return x / 2
    return exact_simplify(PiRational.coerce(x) / 2)


def covering_spectrum_graph(g: MetricGraph, lmax=None, coset_budget: int = 20000, max_cycles: int = 200_000) -> Spectrum:
    """Breakpoints of the filtration by normal closures of short cycles.

    At each candidate cycle length ``L`` the value ``L/2`` is a breakpoint
    iff some cycle of length exactly ``L`` is not in the normal closure of the
    cycles strictly shorter than ``L``.
    """
    if g.rank == 0:
        return Spectrum((), notes=("complete",))
    lmax = g.default_lmax() if lmax is None else lmax
    shift = shift_spectrum(g, lmax, max_cycles)
    values: list[SpecValue] = []
    below: list[Word] = []
    full = False
    groups: list[tuple[object, list[Word]]] = []
    for c in shift.cycles:
        if groups and _same(groups[-1][0], c.length):
            groups[-1][1].append(c.word)
        else:
            groups.append((c.length, [c.word]))
    for length, words in groups:
        verdict = closure_contains_all(below, words, coset_budget)
        delta = _half(length)
        prov = "exact" if g.exact else "numeric"
        tol = 0.0 if g.exact else FLOAT_EPS
        if verdict.member is False:
            values.append(SpecValue(delta, prov, tol))
        elif verdict.member is None:
            values.append(SpecValue(delta, prov, tol, "undetermined"))
        below.extend(words)
        rels, _, elim = tietze_eliminate(below, [])
        if not rels and len(elim) == g.rank:
            full = True
            break
    notes = ["complete"] if full else [f"complete below {float(lmax) / 2:.12g}"]
    if shift.truncated:
        notes.append("cycle enumeration truncated")
    return Spectrum(tuple(values), notes=tuple(notes))


# --------------------------------------------------------------------------
# delta covers


@dataclass
class CoverGraph:
    vertices: list[tuple[int, object]]  # (base vertex, sheet label)
    edges: list[tuple[int, int, int]]  # (cover u, cover v, base edge)
    partial: bool
    sheets: int | None
    radius: int | None = None

    def projection(self, k: int) -> int:
        return self.vertices[k][0]

    def degree(self, k: int) -> int:
        return sum((a == k) + (b == k) for a, b, _ in self.edges)


def delta_cover_graph(g: MetricGraph, delta, coset_budget: int = 5000, radius: int = 4, max_nodes: int = 5000) -> CoverGraph:
    """The cover ``X~ / pi1(X, delta)``: explicit when finite, else a partial ball."""
    if float(delta) <= 0:
        raise ValueError("delta must be positive")
    two = 2 * delta if not isinstance(delta, float) else 2.0 * delta
    rels, complete = short_cycle_relators(g, two)
    gens = list(range(g.rank))
    table = CosetTable(gens, rels, budget=coset_budget)
    finite = table.enumerate()
    if finite and complete:
        cosets = [c for c in range(len(table.table)) if table.alive(c)]
        label = {c: k for k, c in enumerate(cosets)}
        verts = [(v, label[c]) for c in cosets for v in range(g.n)]
        vidx = {vc: k for k, vc in enumerate(verts)}
        edges = []
        for c in cosets:
            for i, e in enumerate(g.edges):
                if i in g.gen_of_edge:
                    c2 = table.rep(table.table[c][2 * gens.index(g.gen_of_edge[i])])
                else:
                    c2 = c
                edges.append((vidx[(e.u, label[c])], vidx[(e.v, label[c2])], i))
        return CoverGraph(verts, edges, False, len(cosets))

    # partial ball around the lifted basepoint; sheets keyed by coset when
    # the partial table knows them, else by the reduced word
    def key(word: Word):
        t = table.trace(word)
        return ("c", t) if t is not None else ("w", word)

    start = (g.basepoint, key(()))
    index = {start: 0}
    verts = [(g.basepoint, start[1])]
    words = {0: ()}
    edges = []
    seen_edges = set()
    frontier = [0]
    for _ in range(radius):
        nxt = []
        for k in frontier:
            v, _lab = verts[k]
            w = words[k]
            for d in g.adj[v]:
                i, s = d
                if i in g.gen_of_edge:
                    w2 = reduce_word(w + ((g.gen_of_edge[i], s),))
                else:
                    w2 = w
                y = g.head(d)
                node = (y, key(w2))
                if node not in index:
                    if len(verts) >= max_nodes:
                        continue
                    index[node] = len(verts)
                    verts.append((y, node[1]))
                    words[index[node]] = w2
                    nxt.append(index[node])
                a, b = (k, index[node]) if s > 0 else (index[node], k)
                if (a, b, i) not in seen_edges:
                    seen_edges.add((a, b, i))
                    edges.append((a, b, i))
        frontier = nxt
    return CoverGraph(verts, edges, True, None, radius)


# --------------------------------------------------------------------------
# covering spectrum vs shift spectrum


@dataclass
class CovOfShiftReport:
    ok: bool
    covspec: list
    half_shift: list
    violations: list = field(default_factory=list)


def lower_semiclosure_contains(values: Sequence, x, tol: float = 0.0) -> bool:
    """Membership in a finite set together with its limits from above."""
    for v in values:
        if _same(v, x) or (tol and abs(float(v) - float(x)) <= tol):
            return True
    return False


def covofshift_check(g: MetricGraph, lmax=None, half_shift: Sequence | None = None) -> CovOfShiftReport:
    lmax = g.default_lmax() if lmax is None else lmax
    spec = covering_spectrum_graph(g, lmax)
    if half_shift is None:
        half_shift = sorted({_half(x) for x in shift_spectrum(g, lmax).distinct()}, key=float)
    bad = [v.value for v in spec.values if not lower_semiclosure_contains(half_shift, v.value)]
    for a in spec.accumulation_points:
        if not lower_semiclosure_contains(half_shift, a.value, tol=a.radius):
            bad.append(a.value)
    return CovOfShiftReport(not bad, spec.raw(), list(half_shift), bad)


# --------------------------------------------------------------------------
# presets


def _exact(x):
    if isinstance(x, (PiRational, Fraction, int)):
        return x
    if isinstance(x, str):
        return expr.constant(x)
    return x


def circle(circumference=2) -> MetricGraph:
    return MetricGraph(1, [Edge(0, 0, _exact(circumference), "a")], 0, ["o"], "circle")


def wedge(circumferences: Sequence) -> MetricGraph:
    names = [chr(ord("a") + i) if i < 26 else f"g{i}" for i in range(len(circumferences))]
    return MetricGraph(1, [Edge(0, 0, _exact(c), n) for c, n in zip(circumferences, names)], 0, ["o"], "wedge")


def figure8(a=4, b=3) -> MetricGraph:
    g = wedge([a, b])
    g.name = "figure8"
    return g


def wedge_j(J: int) -> MetricGraph:
    """Circles of circumference ``2 pi (1 + 1/j)`` for ``j = 1..J`` at one point."""
    g = wedge([PiRational.pi(2 * (1 + Fraction(1, j))) for j in range(1, J + 1)])
    g.name = f"wedge{J}"
    return g


def barbell(loop=3, bridge=2) -> MetricGraph:
    """Two loops joined by a bridge; basepoint at the left loop."""
    loop, bridge = _exact(loop), _exact(bridge)
    return MetricGraph(2, [Edge(0, 0, loop, "a"), Edge(0, 1, bridge, "t"), Edge(1, 1, loop, "b")], 0, ["p", "q"], "barbell")


def fathandle(lam1=1, lam2=2, bridge=1) -> MetricGraph:
    """Two far-apart handles with intrinsic half-lengths ``lam1 < lam2``."""
    lam1, lam2 = _exact(lam1), _exact(lam2)
    edges = [Edge(0, 0, 2 * lam1, "a"), Edge(0, 1, _exact(bridge), "t"), Edge(1, 1, 2 * lam2, "b")]
    return MetricGraph(2, edges, 0, ["p", "q"], "fathandle")


def theta(a=1, b=2, c=3) -> MetricGraph:
    return MetricGraph(2, [Edge(0, 1, _exact(a), "x"), Edge(0, 1, _exact(b), "y"), Edge(0, 1, _exact(c), "z")], 0, ["p", "q"], "theta")


def triangle(a=1, b=1, c=1) -> MetricGraph:
    return MetricGraph(3, [Edge(0, 1, _exact(a), "x"), Edge(1, 2, _exact(b), "y"), Edge(2, 0, _exact(c), "z")], 0, ["p", "q", "r"], "triangle")


def path_tree(n: int = 3) -> MetricGraph:
    return MetricGraph(n + 1, [Edge(i, i + 1, 1, f"t{i}") for i in range(n)], 0, name="tree")


def random_graph(rng, max_edges: int = 6, max_rank: int = 3, lengths=(1, 3), denominators=(1, 2, 3, 4)) -> MetricGraph:
    """Connected multigraph with rational lengths in ``lengths`` (seeded ``rng``)."""
    while True:
        nv = int(rng.integers(1, 4))
        ne = int(rng.integers(max(nv - 1, 1), max_edges + 1))
        if ne - nv + 1 < 1 or ne - nv + 1 > max_rank:
            continue
        edges = []
        for k in range(1, nv):  # random spanning tree first
            edges.append((int(rng.integers(0, k)), k))
        while len(edges) < ne:
            edges.append((int(rng.integers(0, nv)), int(rng.integers(0, nv))))
        out = []
        lo, hi = lengths
        for i, (u, v) in enumerate(edges):
            den = int(rng.choice(denominators))
            num = int(rng.integers(lo * den, hi * den + 1))
            out.append(Edge(u, v, Fraction(num, den), f"e{i}"))
        return MetricGraph(nv, out, 0, name="random")


PRESETS = {
    "circle": lambda: circle(2),
    "figure8": lambda: figure8(PiRational.pi(4), PiRational.pi(3)),
    "wedge3": lambda: wedge_j(3),
    "wedge50": lambda: wedge_j(50),
    "barbell": lambda: barbell(3, 2),
    "fathandle": lambda: fathandle(1, 2, 1),
    "theta": lambda: theta(1, 2, 3),
    "triangle": lambda: triangle(1, 1, 1),
}

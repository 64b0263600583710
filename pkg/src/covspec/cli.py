"""Command line interface.

    covspec torus --diameters 3,2,1
    covspec graph wedge3.graph
    covspec warped-cylinder --f "1+exp(-r^2)" --circumference 2*pi
    covspec rescaled hyperboloid --which infinity
    covspec slipping preset pants --levels 12 --delta 2*pi/2^10
    covspec verify wilking --samples 100 --seed 7
    covspec plot warped-ratio --f "r" --d pi --rmax 1e4

The first word selects the command (``covspec``, ``rescaled``, ``slipping``,
``verify``, ``plot``); when it names a ``covspec`` target instead, the
``covspec`` command is implied.  Exit status: 0 success, 2 when some value
is undetermined, 1 on errors or failed verification.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from . import curvature, expr, metric_graph, model_spaces, rescaled, towers
from .exact import format_exact, is_exact
from .spaces_core import Spectrum, lattice_covering_spectrum

EXIT_OK, EXIT_ERROR, EXIT_UNDETERMINED = 0, 1, 2
COMMANDS = ("covspec", "rescaled", "slipping", "verify", "plot")
FORMATS = ("table", "csv", "json", "svg")


class CliError(Exception):
    pass


@dataclass
class Result:
    title: str
    columns: list[str]
    rows: list[list]
    notes: list[str] = field(default_factory=list)
    status: int = EXIT_OK
    figure: Callable | None = None  # () -> matplotlib Figure
    stem: str = "covspec"


# --------------------------------------------------------------------------
# value formatting


def num(x) -> str:
    return f"{float(x):.12g}"


def sym(x) -> str:
    """Symbolic form when exact, else the 12-digit number."""
    return format_exact(x) if is_exact(x) else num(x)


def parse_number(text: str):
    try:
        return expr.constant(text)
    except expr.ExpressionError as err:
        raise CliError(f"cannot parse number {text!r}: {err}") from None


def parse_list(text: str) -> list:
    return [parse_number(t) for t in text.split(",") if t.strip()]


def spectrum_rows(spec: Spectrum, label: str = "covspec") -> list[list]:
    rows = [[label, sym(v.value), num(v.value), v.provenance, v.status] for v in spec.values]
    rows += [[f"{label} accumulation", f"~{num(a.value)}", num(a.value), f"radius {a.radius:.1e}", "ok"] for a in spec.accumulation_points]
    return rows


SPEC_COLUMNS = ["kind", "value", "numeric", "provenance", "status"]


def _spec_status(spec: Spectrum) -> int:
    return EXIT_UNDETERMINED if spec.has_undetermined() else EXIT_OK


# --------------------------------------------------------------------------
# rendering


def render(res: Result, fmt: str) -> bytes:
    if fmt == "table":
        return render_table(res).encode("utf-8")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(res.columns)
        w.writerows([[_cell(c) for c in row] for row in res.rows])
        return buf.getvalue().encode("utf-8")
    if fmt == "json":
        doc = {
            "title": res.title,
            "columns": res.columns,
            "rows": [dict(zip(res.columns, [_json_cell(c) for c in row])) for row in res.rows],
            "notes": res.notes,
            "status": res.status,
        }
        return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    if fmt == "svg":
        if res.figure is None:
            raise CliError("svg output is not available for this command")
        from .plotting import svg_bytes

        return svg_bytes(res.figure())
    raise CliError(f"unknown format {fmt!r}")


def _cell(c) -> str:
    if isinstance(c, float):
        return num(c)
    if isinstance(c, bool):
        return "yes" if c else "no"
    return "" if c is None else str(c)


def _json_cell(c):
    if isinstance(c, (bool, int, str)) or c is None:
        return c
    if isinstance(c, float):
        return c if math.isfinite(c) else str(c)
    return str(c)


def render_table(res: Result) -> str:
    cells = [[_cell(c) for c in row] for row in res.rows]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(res.columns)]
    line = lambda r: "  ".join(s.ljust(w) for s, w in zip(r, widths)).rstrip()
    out = [res.title, line(res.columns), line(["-" * w for w in widths])]
    out += [line(r) for r in cells]
    if not cells:
        out.append("(empty)")
    out += res.notes
    return "\n".join(out) + "\n"


def write_report(res: Result, directory: str) -> list[str]:
    """CSV and JSON of the table plus the SVG figure when there is one."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for fmt in ("csv", "json", "svg"):
        if fmt == "svg" and res.figure is None:
            continue
        p = os.path.join(directory, f"{res.stem}.{fmt}")
        with open(p, "wb") as fh:
            fh.write(render(res, fmt))
        paths.append(p)
    return paths


# --------------------------------------------------------------------------
# inputs


def load_graph(path: str) -> metric_graph.MetricGraph:
    """A graph file; names of bundled example graphs work from any directory."""
    if os.path.exists(path):
        return metric_graph.load_graph(path)
    name = os.path.basename(path)
    stem = name[: -len(".graph")] if name.endswith(".graph") else name
    data = resources.files("covspec") / "data" / f"{stem}.graph"
    if data.is_file():
        return metric_graph.parse_graph(data.read_text(encoding="utf-8"), name=stem)
    if stem in metric_graph.PRESETS:
        return metric_graph.PRESETS[stem]()
    raise CliError(f"no such graph file: {path}")


def _model(name: str, args) -> model_spaces.SpaceModel:
    if name == "cone":
        base = parse_number(args.base_covspec) if args.base_covspec else math.pi / math.sqrt(2)
        return model_spaces.cone(float(parse_number(args.k)), float(base))
    if name not in model_spaces.MODEL_PRESETS:
        raise CliError(f"unknown model {name!r}; choose from {', '.join(model_spaces.MODEL_PRESETS)}")
    return model_spaces.MODEL_PRESETS[name]()


# --------------------------------------------------------------------------
# covspec


def cmd_covspec(args) -> Result:
    if args.target == "torus":
        diam = parse_list(args.diameters)
        spec = lattice_covering_spectrum(diam)
        return Result(f"covering spectrum of the flat torus with circle diameters {args.diameters}", SPEC_COLUMNS,
                      spectrum_rows(spec), list(spec.notes), _spec_status(spec), _spec_fig(spec, "torus"), "torus")
    if args.target == "graph":
        g = load_graph(args.path)
        spec = metric_graph.covering_spectrum_graph(g, parse_number(args.lmax) if getattr(args, "lmax", None) else None).with_accumulation()
        return Result(f"covering spectrum of graph {g.name or args.path} (rank {g.rank})", SPEC_COLUMNS,
                      spectrum_rows(spec), list(spec.notes), _spec_status(spec), _spec_fig(spec, g.name), "graph")
    if args.target == "warped-cylinder":
        c = parse_number(args.circumference)
        domain = args.domain if args.domain in ("R", "half") else float(parse_number(args.domain))
        rep = model_spaces.covspec_warped_cylinder(args.f, c, domain)
        return _warped_result(rep, f"f = {args.f}, circumference {sym(c)}")
    if args.target == "preset":
        name = args.name
        if name in model_spaces.WARP_PRESETS:
            f, domain = model_spaces.WARP_PRESETS[name]
            rep = model_spaces.covspec_warped_cylinder(f, expr.constant("2*pi"), domain)
            return _warped_result(rep, f"{name} (f = {f})")
        if name in metric_graph.PRESETS:
            args.path = name
            args.target = "graph"
            return cmd_covspec(args)
        raise CliError(f"unknown preset {name!r}")
    raise CliError(f"unknown covspec target {args.target!r}")


def _spec_fig(spec: Spectrum, title: str):
    def fig():
        from .plotting import spectrum_figure

        return spectrum_figure(spec, title)

    return fig


def _warped_result(rep: model_spaces.WarpedCylinderReport, what: str) -> Result:
    rows = spectrum_rows(rep.spectrum)
    rows.append(["L(g)", sym(rep.length_g), num(rep.length_g), "c * inf f", "attained" if rep.attained else "not attained"])
    for x, F in rep.evidence:
        rows.append(["F(x, c)", f"x = {num(x + 0.0)}", num(F), "shooting", "ok"])
    notes = [f"attained={'true' if rep.attained else 'false'}"] + list(rep.spectrum.notes)
    return Result(f"covering spectrum of the warped cylinder {what}", SPEC_COLUMNS, rows, notes,
                  _spec_status(rep.spectrum), _spec_fig(rep.spectrum, what), "warped-cylinder")


# --------------------------------------------------------------------------
# rescaled


def cmd_rescaled(args) -> Result:
    target = list(args.target)
    if target[0] == "preset":
        if len(target) != 2:
            raise CliError("usage: rescaled preset NAME")
        name = target[1]
    elif len(target) == 1:
        name = target[0]
    else:
        raise CliError(f"unexpected arguments {' '.join(target[1:])!r}")
    model = _model(name, args)
    whiches = ("infinity", "basepoint") if args.which == "both" else (args.which,)
    cols = ["kind", "variant", "item", "value", "numeric", "provenance"]
    rows, notes, status = [], [], EXIT_OK
    for which in whiches:
        pl = rescaled.power_lengths(model, which, args.powers, numeric=args.numeric)
        spec = rescaled.rescaled_covspec(model, which, args.powers, lengths=pl)
        for v in spec.values:
            rows.append(["spectrum", which, "breakpoint", sym(v.value), num(v.value), v.provenance])
        if not spec.values:
            rows.append(["spectrum", which, "empty", "{}", "", ""])
        for n in range(1, args.powers + 1):
            rep = pl.lengths[n]
            extra = "attained" if rep.attained else ""
            rows.append(["length", which, f"g^{n}", num(rep.value), "" if rep.numeric is None else num(rep.numeric),
                         " ".join(x for x in (rep.tag, extra, rep.trend) if x)])
        if args.delta:
            d = float(parse_number(args.delta))
            grp = rescaled.rescaled_delta_group(model, d, which, args.powers, lengths=pl)
            rows.append(["delta-group", which, f"delta = {num(d)}", grp.description, "", f"boundary {grp.boundary}" if grp.boundary else ""])
    verdict = rescaled.rescaled_slipping_membership(model, 1, args.powers)
    rows.append(["slipping", "infinity", "g", {True: "yes", False: "no", None: "undetermined"}[verdict.verdict], "", verdict.method])
    if verdict.verdict is None:
        status = EXIT_UNDETERMINED
    if model.fast_paths.get("infinity") is not None:
        flag = rescaled.loops_to_infinity_flag(model, 1)
        notes.append(f"loops to infinity: {'yes' if flag.loops_to_infinity else 'no'} (L^inf(g) = {num(flag.length)})")
    notes.append(f"cyclic deck group; powers g^1..g^{args.powers} examined")
    return Result(f"rescaled lengths and spectra of {model.name}", cols, rows, notes, status, None, f"rescaled-{name}")


# --------------------------------------------------------------------------
# slipping


def cmd_slipping(args) -> Result:
    target = list(args.target)
    cols = ["element", "level", "length", "universal slipping", "slipping", "method"]
    if target[0] == "preset" and len(target) == 2:
        name = target[1]
        if name not in towers.TOWER_PRESETS:
            raise CliError(f"unknown tower preset {name!r}; choose from {', '.join(towers.TOWER_PRESETS)}")
        t = towers.TOWER_PRESETS[name](args.levels) if args.levels else towers.TOWER_PRESETS[name]()
        res = _tower_slipping(t, args, cols)
        if name in model_spaces.WARP_PRESETS:
            f, domain = model_spaces.WARP_PRESETS[name]
            rep = model_spaces.covspec_warped_cylinder(f, expr.constant("2*pi"), domain, evidence_points=0)
            v = "yes" if float(rep.length_g) == 0 else "no"
            res.rows.append(["g (warped model)", "", sym(rep.length_g), v, v, f"L(g) = c * inf f for f = {f}"])
        return res
    if target[0] == "graph" and len(target) == 2:
        g = load_graph(target[1])
        t = towers.constant_tower(g, 2)
        res = _tower_slipping(t, args, cols, track=0)
        res.title = f"slipping verdicts for graph {g.name or target[1]}"
        return res
    raise CliError("usage: slipping preset NAME | slipping graph PATH")


def _tower_slipping(t: towers.GraphTower, args, cols, track: int | None = None) -> Result:
    top = len(t) - 1
    tl = min(top, 6 if args.track is None else args.track) if track is None else track
    gens = [e for n in range(tl + 1) for e in t.generators(n)]
    lengths = [t.levels[e.level].translation_length(e.word) for e in gens]
    rep = towers.universal_delta_cover_report(t, track_levels=tl)
    if args.delta:
        delta = parse_number(args.delta)
    elif rep.positive_infimum:
        delta = rep.infimum / 2 if math.isfinite(rep.infimum) else 1.0
    else:
        # finest scale the truncated tower resolves
        delta = rep.schedule[-1]
    d0 = 2 * max([float(x) for x in lengths] + [float(delta)])
    sched = towers.delta_schedule(d0, float(delta))
    rows, status = [], EXIT_OK
    for e, L in zip(gens, lengths):
        vs = [towers.universal_slipping_test(t, e, d).verdict for d in sched]
        uni = towers.YES if all(v == towers.YES for v in vs) else (towers.NO if towers.NO in vs else towers.UNDETERMINED)
        sl = towers.slipping_test(t, e, delta)
        if towers.UNDETERMINED in (uni, sl.verdict):
            status = EXIT_UNDETERMINED
        rows.append([t.label(e), e.level, sym(L), uni, sl.verdict, sl.method])
    notes = [f"universal slipping checked on {len(sched)} scales from {num(sched[0])} down to {sym(delta)}"] + rep.lines()
    return Result(f"slipping verdicts for tower {t.name} ({len(t)} levels)", cols, rows, notes, status, None, f"slipping-{t.name}")


# --------------------------------------------------------------------------
# verify


def _checks_result(title: str, rows: list[list], notes: list[str], stem: str) -> Result:
    ok = all(r[1] for r in rows)
    notes = notes + [f"overall: {'pass' if ok else 'FAIL'}"]
    return Result(title, ["check", "ok", "value", "detail"], rows, notes, EXIT_OK if ok else EXIT_ERROR, None, stem)


def cmd_verify(args) -> Result:
    if args.suite == "wilking":
        rng = np.random.default_rng(args.seed)
        rows = []
        for r, want in ((0.0, (4.0, 4.0)), (1.0, (1.0, 2.0))):
            got = curvature.wilking_curvature(r)
            rows.append([f"curvature at r={num(r)}", got == want, f"{num(got[0])}, {num(got[1])}", f"expected {want}"])
        margins = [curvature.wilking_displacement_bound(curvature.QuotientSamplePoint.random(rng, args.max_fiber)).margin
                   for _ in range(args.samples)]
        rows.append(["displacement margin", min(margins) >= -1e-6, num(min(margins)), f"minimum over {args.samples} seeded points"])
        b = curvature.wilking_displacement_bound(curvature.QuotientSamplePoint((1, 0, 1e3, 0)))
        ratio = b.displacement / 1e3
        rows.append(["ratio at |z| = 1e3", ratio >= math.sqrt(2) / 2 - 1e-3, num(ratio), "needs >= sqrt(2)/2"])
        return _checks_result("Wilking quotient checks", rows, [f"seed {args.seed}"], "verify-wilking")
    if args.suite == "covofshift":
        rng = np.random.default_rng(args.seed)
        rows, undetermined = [], False
        for i in range(args.random_graphs):
            g = metric_graph.random_graph(rng)
            rep = metric_graph.covofshift_check(g)
            spec = metric_graph.covering_spectrum_graph(g)
            undetermined |= spec.has_undetermined()
            rows.append([f"graph {i}", rep.ok, "{" + ", ".join(sym(x) for x in rep.covspec) + "}",
                         f"{len(g.edges)} edges, rank {g.rank}"])
        res = _checks_result("covering spectrum inside the lower semiclosure of half the shift spectrum", rows, [f"seed {args.seed}"], "verify-covofshift")
        if res.status == EXIT_OK and undetermined:
            res.status = EXIT_UNDETERMINED
        return res
    if args.suite == "rescaled-lemmas":
        model = _model(args.preset, args)
        checks = rescaled.rescaled_lemma_suite(model)
        rows = [[c.name, c.ok, num(c.worst), c.detail] for c in checks]
        return _checks_result(f"rescaled-length lemmas on {model.name}", rows, [], f"verify-lemmas-{args.preset}")
    if args.suite == "milnor":
        rows = [["milnor_bound(2, 1)", curvature.milnor_bound(2, 1) == 18, str(curvature.milnor_bound(2, 1)), "expected 18"]]
        for case in curvature.plane_packing_grid():
            N, bound, ok = curvature.packing_case_check(case)
            rows.append([f"delta={case.delta:g} eps={case.eps:g} C={case.C:g} rho={case.rho:g}", ok, str(N), f"bound {num(bound)}"])
        return _checks_result("hexagonal disk packings against the counting bound", rows, [], "verify-milnor")
    raise CliError(f"unknown verification suite {args.suite!r}")


# --------------------------------------------------------------------------
# plot


def cmd_plot(args) -> Result:
    from . import plotting

    if args.kind == "warped-ratio":
        if not args.f:
            raise CliError("plot warped-ratio needs --f")
        d = float(parse_number(args.d))
        rmax = float(parse_number(args.rmax)) if args.rmax else 1e6
        curve = plotting.warped_ratio_curve(args.f, d, rmax, args.points)
        rows = [[num(r), num(v)] for r, v in curve.rows()]
        notes = [f"predicted limit {num(curve.limit)}" if curve.limit is not None else "no predicted limit (slope undetermined)",
                 f"last ratio {num(curve.ratio[-1])} at r = {num(curve.r[-1])}"]
        return Result(f"F(r, d)/r for f = {curve.f}, d = {num(d)}", ["r", "ratio"], rows, notes, EXIT_OK,
                      lambda: plotting.ratio_figure(curve), "warped-ratio")
    if args.kind == "covspec-sweep":
        name = args.preset or "gauss-bump-cylinder"
        if name in model_spaces.WARP_PRESETS:
            f, domain = model_spaces.WARP_PRESETS[name]
            spec = model_spaces.covspec_warped_cylinder(f, expr.constant("2*pi"), domain, evidence_points=0).spectrum
        elif name in metric_graph.PRESETS:
            spec = metric_graph.covering_spectrum_graph(metric_graph.PRESETS[name]())
        else:
            raise CliError(f"unknown preset {name!r}")
        top = 1.5 * max(spec.floats()) if spec.floats() else 2 * math.pi
        deltas = np.linspace(0.0, top, args.points)
        counts = plotting.sweep_counts(spec, deltas)
        rows = [[num(d), int(c)] for d, c in zip(deltas, counts)]
        notes = ["steps at " + (", ".join(sym(v.value) for v in spec.values) or "none")]
        return Result(f"covering spectrum sweep for {name}", ["delta", "breakpoints below"], rows, notes, _spec_status(spec),
                      lambda: plotting.sweep_figure(spec, deltas, name), f"sweep-{name}")
    raise CliError(f"unknown plot {args.kind!r}")


# --------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="table")
    common.add_argument("-o", "--output", help="write the rendered output here instead of stdout")
    common.add_argument("--report", metavar="DIR", help="also write CSV, JSON and (when available) SVG into DIR")

    p = _Parser(prog="covspec", description="Covering, shift and rescaled spectra.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("covspec", help="covering spectra")
    csub = c.add_subparsers(dest="target", required=True, parser_class=_Parser)
    t = csub.add_parser("torus", parents=[common])
    t.add_argument("--diameters", required=True, help="comma separated circle diameters, e.g. 3,2,1")
    g = csub.add_parser("graph", parents=[common])
    g.add_argument("path")
    g.add_argument("--lmax", help="cycle enumeration bound")
    w = csub.add_parser("warped-cylinder", parents=[common])
    w.add_argument("--f", required=True, help="warping function of r")
    w.add_argument("--circumference", default="2*pi")
    w.add_argument("--domain", default="R", help="R, half, or a left endpoint")
    pr = csub.add_parser("preset", parents=[common])
    pr.add_argument("name")

    r = sub.add_parser("rescaled", parents=[common], help="rescaled lengths and spectra")
    r.add_argument("target", nargs="+", help="MODEL or 'preset MODEL'")
    r.add_argument("--which", choices=("infinity", "basepoint", "both"), default="both")
    r.add_argument("--k", default="1", help="cone slope")
    r.add_argument("--base-covspec", help="covering spectrum (diameter) of the cone's circle")
    r.add_argument("--powers", type=int, default=6, help="examine g^1..g^N")
    r.add_argument("--delta", help="also report the rescaled delta-group")
    r.add_argument("--numeric", action="store_true", help="also estimate lengths numerically where closed forms exist")

    s = sub.add_parser("slipping", parents=[common], help="slipping verdicts")
    s.add_argument("target", nargs="+", help="'preset NAME' or 'graph PATH'")
    s.add_argument("--levels", type=int)
    s.add_argument("--delta", help="smallest scale for the universal test")
    s.add_argument("--track", type=int, help="deepest level whose generators are listed")

    v = sub.add_parser("verify", help="invariant suites")
    vsub = v.add_subparsers(dest="suite", required=True, parser_class=_Parser)
    vw = vsub.add_parser("wilking", parents=[common])
    vw.add_argument("--samples", type=int, default=100)
    vw.add_argument("--seed", type=int, default=0)
    vw.add_argument("--max-fiber", type=float, default=1e3)
    vc = vsub.add_parser("covofshift", parents=[common])
    vc.add_argument("--random-graphs", type=int, default=50)
    vc.add_argument("--seed", type=int, default=0)
    vr = vsub.add_parser("rescaled-lemmas", parents=[common])
    vr.add_argument("--preset", default="hyperboloid")
    vr.add_argument("--k", default="1")
    vr.add_argument("--base-covspec")
    vsub.add_parser("milnor", parents=[common])

    pl = sub.add_parser("plot", help="figures")
    psub = pl.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    pw = psub.add_parser("warped-ratio", parents=[common])
    pw.add_argument("--f", required=True)
    pw.add_argument("--d", default="pi")
    pw.add_argument("--rmax")
    pw.add_argument("--points", type=int, default=25)
    ps = psub.add_parser("covspec-sweep", parents=[common])
    ps.add_argument("--preset")
    ps.add_argument("--points", type=int, default=400)
    return p


HANDLERS = {"covspec": cmd_covspec, "rescaled": cmd_rescaled, "slipping": cmd_slipping, "verify": cmd_verify, "plot": cmd_plot}


def run(argv: Sequence[str]) -> tuple[int, Result | None]:
    argv = list(argv)
    if argv and argv[0] not in COMMANDS and not argv[0].startswith("-"):
        argv = ["covspec"] + argv
    args = build_parser().parse_args(argv)
    res = HANDLERS[args.command](args)
    data = render(res, args.format)
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data) if hasattr(sys.stdout, "buffer") else sys.stdout.write(data.decode("utf-8"))
        sys.stdout.flush()
    if args.report:
        for path in write_report(res, args.report):
            print(f"wrote {path}", file=sys.stderr)
    return res.status, res


ERRORS = (CliError, expr.ExpressionError, metric_graph.GraphFormatError, ValueError, RuntimeError, OSError,
          rescaled.RescaledError, curvature.SingularInputError)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        code, _ = run(sys.argv[1:] if argv is None else argv)
    except ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

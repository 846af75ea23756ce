"""Command line interface.

Exit codes: 0 success, 1 a verification failed, 2 usage error, 3 I/O or
file-format error.  Surface files go to stdout unless ``-o`` is given, so
stages can be piped: ``horopack construct --m 1 | horopack verify``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from collections import Counter
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .analysis import (CuspBasis, Slope, dense_packing, six_theorem_gate, slope_length,
                       transverse_disk_obstruction)
from .decor import (C1_SATURATING, TARGET_AREA, DecorationParams, analyze_recursion,
                    check_geometric, choose_m_for_epsilon, cusp_areas, paper_decoration,
                    recursion_sequence)
from .develop import (block_center, corner_labels, cusp_holonomy, develop,
                      embedded_cusp_check, fit_window, render_svg)
from .figure import Figure, Window
from .optimize import OptimizeConfig, density, maximize_min_cusp_area
from .persist import (SurfaceFileError, dump_report, dump_surface, load_surface,
                      make_report)
from .surface import family, icosahedron, thrice_punctured_sphere

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def _pair(text: str) -> tuple:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two numbers a,b, got {text!r}")
    return tuple(vals)


def _int_pair(text: str) -> tuple:
    try:
        p, q = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two integers p,q, got {text!r}")
    return p, q


# --------------------------------------------------------------------------
# I/O helpers

class _Ctx:
    def __init__(self, args, stdin, stdout, stderr):
        self.args, self.stdin, self.stdout, self.stderr = args, stdin, stdout, stderr

    def read_surface(self, path: Optional[str]):
        if path in (None, "-"):
            return load_surface(self.stdin)
        return load_surface(path)

    def write(self, text: str, path: Optional[str] = None):
        if path in (None, "-"):
            self.stdout.write(text)
        else:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)

    def emit(self, kind: str, data: dict, lines: Sequence[str], to_stderr: bool = False):
        """Report as JSON (with --json) or as human readable lines."""
        stream = self.stderr if to_stderr else self.stdout
        if self.args.json:
            stream.write(dump_report(make_report(kind, data)))
        else:
            stream.write("".join(line + "\n" for line in lines))


def _num(x) -> str:
    return repr(float(x))


def _structure(T) -> dict:
    hist = Counter(int(d) for d in T.degrees)
    return {
        "m": None if T.m is None else int(T.m),
        "triangles": T.n_triangles,
        "vertices": T.n_vertices,
        "edges": T.n_edges,
        "euler_characteristic": T.euler_characteristic(),
        "degree_histogram": {str(k): hist[k] for k in sorted(hist)},
    }


def _structure_lines(s: dict) -> list:
    hist = " ".join(f"{k}:{v}" for k, v in s["degree_histogram"].items())
    return [
        f"triangles {s['triangles']}",
        f"vertices {s['vertices']}",
        f"edges {s['edges']}",
        f"euler characteristic {s['euler_characteristic']}",
        f"degree histogram {hist}",
    ]


def _need_decoration(data, what: str):
    if data.decoration is None:
        raise UsageError(f"{what} needs a decorated surface; run 'decorate' first")
    return data.decoration


# --------------------------------------------------------------------------
# subcommands

def cmd_construct(ctx: _Ctx) -> int:
    a = ctx.args
    if a.surface == "family":
        if a.m is None:
            raise UsageError("construct needs --m (or --surface icosahedron/thrice-punctured)")
        if a.m < 0:
            raise UsageError("--m must be nonnegative")
        T = family(a.m)
    elif a.surface == "icosahedron":
        T = icosahedron()
    else:
        T = thrice_punctured_sphere()
    ctx.write(dump_surface(T), a.output)
    s = _structure(T)
    # the surface itself occupies stdout when no output file is given
    ctx.emit("construct", s, _structure_lines(s), to_stderr=a.output in (None, "-"))
    return EXIT_OK


def cmd_decorate(ctx: _Ctx) -> int:
    a = ctx.args
    if a.c is not None:
        c = a.c
        if not c:
            raise UsageError("--c needs at least one value")
        need_m = len(c)
    else:
        if not a.epsilon > 0:
            raise UsageError("--epsilon must be positive")
        try:
            need_m = choose_m_for_epsilon(a.epsilon, c1=a.c1).m
        except ValueError as exc:
            raise UsageError(str(exc))
        c = None
    if a.input is not None:
        T = ctx.read_surface(a.input).triangulation
        if not T.is_family or T.m < 1:
            raise UsageError("the input surface is not a subdivided family triangulation")
        if a.c is not None and T.m != need_m:
            raise UsageError(f"{len(a.c)} c values given for a surface with m = {T.m}")
        m = T.m
    else:
        m = need_m
        T = family(m)
    if c is None:
        c = recursion_sequence(TARGET_AREA, a.c1, m)[:m]
    try:
        params = DecorationParams.of(c)
    except ValueError as exc:
        raise UsageError(str(exc))
    dec = paper_decoration(T, params)
    ctx.write(dump_surface(T, dec, params), a.output)
    rep = cusp_areas(T, dec, params)
    geo = check_geometric(T, dec, a.tol)
    data = {
        "m": int(m),
        "c": [float(x) for x in c],
        "min_area": rep.min_area,
        "target": TARGET_AREA,
        "epsilon": a.epsilon if a.c is None else None,
        "margin": rep.margin,
        "geometric": geo.ok,
    }
    lines = [f"m {m}", "c " + ",".join(_num(x) for x in c),
             f"min area {_num(rep.min_area)}", f"margin to 10/sqrt(3) {_num(rep.margin)}",
             f"geometric {'yes' if geo.ok else 'no'}"]
    ctx.emit("decorate", data, lines, to_stderr=a.output in (None, "-"))
    ok = geo.ok
    if a.c is None:
        ok = ok and rep.min_area >= TARGET_AREA - a.epsilon
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(ctx: _Ctx) -> int:
    a = ctx.args
    data = ctx.read_surface(a.input)
    T, dec = data.triangulation, data.decoration
    s = _structure(T)
    out = {"structure": s, "decorated": dec is not None}
    lines = _structure_lines(s)
    ok = True
    if dec is not None:
        geo = check_geometric(T, dec, a.tol)
        scal = [cusp_holonomy(T, v, dec=dec).scaling for v in range(T.n_vertices)]
        dev = [abs(x - 1.0) for x in scal]
        worst = int(np.argmax(dev))
        complete = dev[worst] <= a.holonomy_tol
        emb = embedded_cusp_check(T, a.radius, dec=dec, tol=a.tol)
        ok = geo.ok and complete and emb.ok
        out["geometricity"] = geo.to_dict()
        out["completeness"] = {
            "tolerance": a.holonomy_tol,
            "max_deviation": dev[worst],
            "worst_cusp": worst,
            "complete": complete,
            "non_parabolic": [v for v, d in enumerate(dev) if d > a.holonomy_tol],
        }
        out["embedding"] = emb.to_dict()
        lines += [
            f"geometric {'yes' if geo.ok else 'no'} ({geo.summary()})",
            f"complete {'yes' if complete else 'no'} (max |scaling - 1| {_num(dev[worst])} at cusp {worst})",
            f"embedded {'yes' if emb.ok else 'no'} (radius {a.radius}, {emb.n_pairs} pairs, "
            f"{emb.n_tangent} tangent, {len(emb.overlaps)} overlaps)",
        ]
    else:
        lines.append("no decoration: structure only")
    out["ok"] = ok
    lines.append("PASS" if ok else "FAIL")
    ctx.emit("verify", out, lines)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_areas(ctx: _Ctx) -> int:
    a = ctx.args
    data = ctx.read_surface(a.input)
    T = data.triangulation
    dec = _need_decoration(data, "areas")
    rep = cusp_areas(T, dec, data.params)
    d = rep.to_dict(per_vertex=a.per_vertex)
    d["density"] = density(T, dec)
    lines = [f"min area {_num(rep.min_area)} at vertex {rep.min_vertex}",
             f"target 10/sqrt(3) {_num(rep.target)}",
             f"margin {_num(rep.margin)}",
             f"total area {_num(d['total_area'])}",
             f"density {_num(d['density'])}",
             f"max closed form error {_num(d['max_closed_form_error'])}"]
    for name, row in d["by_type"].items():
        lines.append(f"  {name}: count {row['count']} min {_num(row['min'])} max {_num(row['max'])}")
    if a.per_vertex:
        for row in d["vertices"]:
            cf = "-" if row["closed_form"] is None else _num(row["closed_form"])
            lines.append(f"  vertex {row['vertex']} type {row['type']} area {_num(row['area'])} "
                         f"closed form {cf} {row['form']} {row['convention']}".rstrip())
    ctx.emit("cusp-areas", d, lines)
    return EXIT_OK


def _window(a, dev, triangles=None) -> Window:
    if a.window is not None:
        try:
            return Window.parse(a.window)
        except ValueError as exc:
            raise UsageError(f"bad --window: {exc}")
    return fit_window(dev, triangles)


def cmd_develop(ctx: _Ctx) -> int:
    a = ctx.args
    data = ctx.read_surface(a.input)
    T = data.triangulation
    dec = _need_decoration(data, "develop")
    if not 0 <= a.base < T.n_triangles:
        raise UsageError(f"--base must be a triangle index below {T.n_triangles}")
    dev = develop(T, dec, base=a.base, require_geometric=not a.force)
    win = _window(a, dev)
    svg = render_svg(dev, win, triangles=None)
    ctx.write(svg, a.output)
    err = dev.edge_length_errors()
    info = {"base": a.base, "tree_depth": int(dev.depth.max()),
            "max_edge_length_error": float(err.max()),
            "window": [win.xmin, win.xmax, win.ymin, win.ymax]}
    lines = [f"base {a.base}", f"tree depth {info['tree_depth']}",
             f"max edge length error {_num(info['max_edge_length_error'])}"]
    ctx.emit("develop", info, lines, to_stderr=a.output in (None, "-"))
    return EXIT_OK


def cmd_render(ctx: _Ctx) -> int:
    a = ctx.args
    if a.dense_packing is not None:
        if a.dense_packing < 0:
            raise UsageError("--dense-packing depth must be nonnegative")
        win = Window.parse(a.window) if a.window else Window(-0.1, 1.1, 0.0, 1.5)
        fig = Figure(win, title=f"Farey packing, depth {a.dense_packing}")
        lo, hi = math.floor(win.xmin), math.ceil(win.xmax)
        for H in dense_packing(a.dense_packing, (lo, hi)):
            fig.horoball(H)
        svg = fig.to_svg()
        ctx.write(svg, a.output)
        info = {"dense_packing_depth": a.dense_packing, "elements": len(fig)}
        ctx.emit("render", info, [f"elements {len(fig)}"], to_stderr=a.output in (None, "-"))
        return EXIT_OK
    data = ctx.read_surface(a.input)
    T = data.triangulation
    dec = _need_decoration(data, "render")
    tris = None
    base = a.base
    if a.block is not None:
        if T.block is None:
            raise UsageError("--block needs a family triangulation")
        tris = [int(t) for t in np.flatnonzero(T.block == a.block)]
        if not tris:
            raise UsageError(f"no triangles in block {a.block}")
        base = block_center(T, a.block)
    dev = develop(T, dec, base=base, require_geometric=not a.force)
    win = _window(a, dev, tris)
    labels = corner_labels(dec, data.params) if a.labels else None
    svg = render_svg(dev, win, triangles=tris, labels=labels)
    ctx.write(svg, a.output)
    info = {"base": base, "block": a.block, "labels": bool(a.labels),
            "window": [win.xmin, win.xmax, win.ymin, win.ymax]}
    ctx.emit("render", info, [f"window {win.xmin!r},{win.xmax!r},{win.ymin!r},{win.ymax!r}"],
             to_stderr=a.output in (None, "-"))
    return EXIT_OK


def cmd_recursion(ctx: _Ctx) -> int:
    a = ctx.args
    if a.steps < 0:
        raise UsageError("--steps must be nonnegative")
    try:
        ra = analyze_recursion(a.L, a.c1, a.steps)
    except ValueError as exc:
        raise UsageError(str(exc))
    d = ra.to_dict()
    lines = [f"L {_num(a.L)}"]
    for k, x in enumerate(d["sequence"], start=1):
        lines.append(f"c{k} {_num(x)}")
    for fp in d["fixed_points"]:
        lines.append(f"fixed point {_num(fp['value'])} {fp['kind']}")
    lines.append(f"increasing {'yes' if d['increasing'] else 'no'}")
    lines.append(f"converged {'yes' if d['converged'] else 'no'}")
    ctx.emit("recursion", d, lines)
    return EXIT_OK


def cmd_optimize(ctx: _Ctx) -> int:
    a = ctx.args
    settings = {}
    if a.config:
        with open(a.config, "r", encoding="utf-8") as fh:
            try:
                settings = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SurfaceFileError(exc.msg, f"{a.config} line {exc.lineno}")
    for key in ("seed", "restarts"):
        if getattr(a, key) is not None:
            settings[key] = getattr(a, key)
    if a.input is None and a.surface is None:
        raise UsageError("optimize needs -i FILE or --surface")
    if a.surface == "icosahedron":
        T, start, params = icosahedron(), None, None
    elif a.surface == "thrice-punctured":
        T, start, params = thrice_punctured_sphere(), None, None
    else:
        data = ctx.read_surface(a.input)
        T, start, params = data.triangulation, data.decoration, data.params
    try:
        cfg = OptimizeConfig.from_dict(settings)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad optimizer settings: {exc}")
    if a.warm_start and start is not None:
        cfg = OptimizeConfig(**{**cfg.to_dict(), "initial": start})
    res = maximize_min_cusp_area(T, cfg)
    if a.trace:
        res.write_trace_csv(a.trace)
    if a.output:
        ctx.write(dump_surface(T, res.decoration), a.output)
    d = res.to_dict()
    d["config"] = cfg.to_dict()
    d["density"] = density(T, res.decoration)
    lines = [f"min area {_num(res.min_area)} at vertex {res.min_vertex}",
             f"margin to 10/sqrt(3) {_num(res.conjecture_margin)}",
             f"geometric {'yes' if res.report.ok else 'no'}",
             f"best restart {res.restart}", f"iterations {len(res.trace)}",
             f"density {_num(d['density'])}"]
    ctx.emit("optimize", d, lines)
    return EXIT_OK if res.report.ok else EXIT_FAIL


def cmd_slope(ctx: _Ctx) -> int:
    a = ctx.args
    try:
        basis = CuspBasis(complex(*a.tau1), complex(*a.tau2))
        s = Slope(*a.pq)
    except ValueError as exc:
        raise UsageError(str(exc))
    L = slope_length(basis, s)
    d = {"tau1": list(a.tau1), "tau2": list(a.tau2), "slope": list(a.pq), "length": L}
    lines = [f"length {_num(L)}"]
    if a.gate:
        g = six_theorem_gate([L])
        d["gate"] = g
        row = g["lengths"][0]
        lines.append(f"gate {g['verdict']}")
        lines.append("types not excluded by records: " + (", ".join(row["types_not_excluded_by_records"]) or "none"))
    ctx.emit("slope", d, lines)
    return EXIT_OK


def cmd_gate(ctx: _Ctx) -> int:
    a = ctx.args
    try:
        g = six_theorem_gate(a.lengths)
    except ValueError as exc:
        raise UsageError(str(exc))
    lines = [f"verdict {g['verdict']}"]
    for row in g["lengths"]:
        lines.append(f"length {_num(row['length'])} hyperbolic forced {'yes' if row['hyperbolic_forced'] else 'no'}")
        for r in row["records"]:
            lines.append(f"  {r['type']} ({r['cusps']}-cusp) record {_num(r['record'])}"
                         f"{'*' if r['asymptotic'] else ''}: {r['position']}, margin {_num(r['margin'])}")
    ctx.emit("slope", g, lines)
    return EXIT_OK


def cmd_obstruct(ctx: _Ctx) -> int:
    a = ctx.args
    try:
        rep = transverse_disk_obstruction(a.depth, a.resolution, a.tolerance)
    except ValueError as exc:
        raise UsageError(str(exc))
    d = rep.to_dict(timing=a.timing)
    lines = [rep.statement(), f"max disk radius {_num(rep.max_radius)}",
             f"feasible grid points {rep.n_feasible} of {rep.n_candidates}"]
    if rep.argmax:
        x0, r, dd = rep.argmax
        lines.append(f"argmax x0 {_num(x0)} r {_num(r)} d {_num(dd)} center height {_num(r)}")
    if a.timing:
        lines.append(f"seconds {rep.seconds:.3f}")
    ctx.emit("obstruction", d, lines)
    return EXIT_OK if rep.empty or not a.expect_empty else EXIT_FAIL


# --------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="horopack", description="Horoball-decorated ideal triangulations.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--json", action="store_true", help="machine readable report output")
    p.add_argument("--tol", type=float, default=1e-9, help="geometric check tolerance")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("construct", cmd_construct, "build the colored family triangulation T_m")
    sp.add_argument("--m", type=int)
    sp.add_argument("--surface", choices=("family", "icosahedron", "thrice-punctured"),
                    default="family")
    sp.add_argument("-o", "--output")

    sp = add("decorate", cmd_decorate, "attach the explicit family decoration")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--epsilon", type=float)
    g.add_argument("--c", type=_floats, help="explicit c1,...,cm")
    sp.add_argument("--c1", type=float, default=C1_SATURATING, help="start of the c recursion")
    sp.add_argument("-i", "--input", help="surface file ('-' for stdin); default: build T_m")
    sp.add_argument("-o", "--output")

    sp = add("verify", cmd_verify, "check geometricity, completeness and embeddedness")
    sp.add_argument("-i", "--input")
    sp.add_argument("--radius", type=int, default=1, help="combinatorial radius of the embedding check")
    sp.add_argument("--holonomy-tol", type=float, default=1e-9)

    sp = add("areas", cmd_areas, "cusp areas with closed forms and the 10/sqrt(3) margin")
    sp.add_argument("-i", "--input")
    sp.add_argument("--per-vertex", action="store_true")

    sp = add("develop", cmd_develop, "develop into the upper half-plane and draw it")
    sp.add_argument("-i", "--input")
    sp.add_argument("-o", "--output", help="SVG file (default stdout)")
    sp.add_argument("--base", type=int, default=0)
    sp.add_argument("--window", help="xmin,xmax[,ymin,ymax]")
    sp.add_argument("--force", action="store_true", help="develop even if not geometric")

    sp = add("render", cmd_render, "draw a block with corner labels or the Farey packing")
    sp.add_argument("-i", "--input")
    sp.add_argument("-o", "--output", help="SVG file (default stdout)")
    sp.add_argument("--base", type=int, default=0)
    sp.add_argument("--block", type=int)
    sp.add_argument("--labels", action="store_true")
    sp.add_argument("--window", help="xmin,xmax[,ymin,ymax]")
    sp.add_argument("--dense-packing", type=int, metavar="DEPTH")
    sp.add_argument("--force", action="store_true")

    sp = add("recursion", cmd_recursion, "iterate c -> 4/(L - 2c) and classify fixed points")
    sp.add_argument("--L", type=float, default=TARGET_AREA)
    sp.add_argument("--c1", type=float, default=C1_SATURATING)
    sp.add_argument("--steps", type=int, default=10)

    sp = add("optimize", cmd_optimize, "maximise the smallest cusp area")
    src = sp.add_mutually_exclusive_group()
    src.add_argument("-i", "--input")
    src.add_argument("--surface", choices=("icosahedron", "thrice-punctured"))
    sp.add_argument("--config", help="JSON file of optimizer settings")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--restarts", type=int)
    sp.add_argument("--warm-start", action="store_true", help="start from the input decoration")
    sp.add_argument("--trace", help="write the iteration trace as CSV")
    sp.add_argument("-o", "--output", help="write the best decoration")

    sp = add("slope", cmd_slope, "length of a slope on a cusp torus")
    sp.add_argument("--tau1", type=_pair, required=True, help="re,im")
    sp.add_argument("--tau2", type=_pair, required=True, help="re,im")
    sp.add_argument("--pq", type=_int_pair, required=True, help="p,q")
    sp.add_argument("--gate", action="store_true", help="also compare with the length records")

    sp = add("gate", cmd_gate, "compare slope lengths with 6 and the observed records")
    sp.add_argument("lengths", type=float, nargs="+")

    sp = add("obstruct", cmd_obstruct, "grid probe for disks cut by a transverse horoball")
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--resolution", type=float, default=2e-3)
    sp.add_argument("--tolerance", type=float, default=1e-2)
    sp.add_argument("--timing", action="store_true", help="include wall-clock time")
    sp.add_argument("--expect-empty", action="store_true",
                    help="exit 1 when feasible candidates remain")
    return p


def main(argv: Optional[Sequence[str]] = None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        stderr.write(f"horopack: error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:          # --help / --version
        return int(exc.code or 0)
    ctx = _Ctx(args, stdin, stdout, stderr)
    try:
        return args.func(ctx)
    except UsageError as exc:
        stderr.write(f"horopack {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except SurfaceFileError as exc:
        stderr.write(f"horopack {args.command}: invalid input: {exc}\n")
        return EXIT_IO
    except OSError as exc:
        stderr.write(f"horopack {args.command}: {exc}\n")
        return EXIT_IO
    except ValueError as exc:
        stderr.write(f"horopack {args.command}: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

"""Corner-area decorations of ideal triangulations.

A decoration assigns a cusp area to every corner ``(t, i)``.  The two
corners on a side of a triangle determine the distance between their
horoballs, ``-log(a * b)``, so a decoration whose side products agree across
every edge is the same data as one signed length per edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .surface import Triangulation, VertexType, classify_vertices, vertex_lattice

__all__ = [
    "CornerDecoration", "EdgeLengths", "DecorationParams", "GeometricityReport",
    "CuspAreaReport", "RecursionAnalysis", "FixedPoints", "ConditionCError",
    "TARGET_AREA", "C1_SATURATING", "check_geometric", "corner_to_edge",
    "edge_to_corner", "side_products", "paper_decoration", "cusp_areas",
    "recursion_step", "recursion_sequence", "fixed_points", "analyze_recursion",
    "choose_m_for_epsilon", "uniform_decoration",
]

SQRT3 = math.sqrt(3.0)
TARGET_AREA = 10.0 / SQRT3
# solves 2/c^2 + 4/c = 10/sqrt(3)
C1_SATURATING = (SQRT3 + math.sqrt(3.0 + 5.0 * SQRT3)) / 5.0
MAX_CORNER_AREA = 2.0
C_TOL = 1e-9


class ConditionCError(ValueError):
    """Side products disagree across an edge."""


@dataclass(frozen=True, eq=False)
class CornerDecoration:
    """Positive area for each corner, stored as an (F, 3) array."""

    areas: np.ndarray

    def __post_init__(self):
        a = np.array(self.areas, dtype=float)
        if a.ndim != 2 or a.shape[1] != 3:
            raise ValueError("corner areas must have shape (F, 3)")
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            t, i = np.argwhere(~(np.isfinite(a) & (a > 0)))[0]
            raise ValueError(f"corner ({t}, {i}) has non-positive area {a[t, i]!r}")
        a.setflags(write=False)
        object.__setattr__(self, "areas", a)

    def check_total(self, T: Triangulation):
        if self.areas.shape[0] != T.n_triangles:
            raise ValueError(
                f"decoration covers {self.areas.shape[0]} triangles, "
                f"triangulation has {T.n_triangles}")

    def perturbed(self, t: int, i: int, factor: float) -> "CornerDecoration":
        a = self.areas.copy()
        a[t, i] *= factor
        return CornerDecoration(a)

    def with_side_factor(self, t: int, i: int, factor: float) -> "CornerDecoration":
        """Multiply the product on side i of triangle t by ``factor``.

        The two other side products of t are unchanged, so only the gluing
        condition across that one edge is affected.
        """
        if not factor > 0:
            raise ValueError("factor must be positive")
        a = self.areas.copy()
        r = math.sqrt(factor)
        a[t, i] *= r
        a[t, (i + 1) % 3] *= r
        a[t, (i + 2) % 3] /= r
        return CornerDecoration(a)


@dataclass(frozen=True, eq=False)
class EdgeLengths:
    lengths: np.ndarray

    def __post_init__(self):
        d = np.array(self.lengths, dtype=float).ravel()
        if not np.all(np.isfinite(d)):
            raise ValueError("edge lengths must be finite")
        d.setflags(write=False)
        object.__setattr__(self, "lengths", d)


def uniform_decoration(T: Triangulation, area: float = 1.0) -> CornerDecoration:
    return CornerDecoration(np.full((T.n_triangles, 3), float(area)))


def side_products(dec: CornerDecoration) -> np.ndarray:
    """Product of the two corner areas on each half-edge, indexed by half-edge."""
    a = dec.areas
    return (a * a[:, [1, 2, 0]]).ravel()


# --------------------------------------------------------------------------
# geometricity

@dataclass
class GeometricityReport:
    """Violations of conditions (A), (B), (C); empty lists mean geometric.

    ``area_violations`` holds ``(t, i, area)``, ``pair_violations`` holds
    ``(t, i, j, product)`` and ``edge_violations`` holds
    ``(edge, product_side0, product_side1)``.
    """

    area_violations: list = field(default_factory=list)
    pair_violations: list = field(default_factory=list)
    edge_violations: list = field(default_factory=list)
    tol: float = C_TOL

    @property
    def ok(self) -> bool:
        return not (self.area_violations or self.pair_violations or self.edge_violations)

    def __bool__(self):
        return self.ok

    def summary(self) -> str:
        if self.ok:
            return "geometric"
        return (f"{len(self.area_violations)} (A), {len(self.pair_violations)} (B), "
                f"{len(self.edge_violations)} (C) violations")

    def to_dict(self) -> dict:
        return {
            "geometric": self.ok,
            "tolerance": self.tol,
            "A": [{"triangle": t, "corner": i, "area": a} for t, i, a in self.area_violations],
            "B": [{"triangle": t, "corners": [i, j], "product": p}
                  for t, i, j, p in self.pair_violations],
            "C": [{"edge": e, "products": [p, q]} for e, p, q in self.edge_violations],
        }


def check_geometric(T: Triangulation, dec: CornerDecoration, tol: float = C_TOL) -> GeometricityReport:
    """Check (A) areas <= 2, (B) pairwise products <= 1 in each triangle,
    (C) equal side products across each edge.  Inequalities are weak and
    all comparisons are relative to ``tol``."""
    dec.check_total(T)
    a = dec.areas
    rep = GeometricityReport(tol=tol)
    for t, i in np.argwhere(a > MAX_CORNER_AREA * (1 + tol)):
        rep.area_violations.append((int(t), int(i), float(a[t, i])))
    prod = side_products(dec).reshape(-1, 3)
    for t, i in np.argwhere(prod > 1 + tol):
        rep.pair_violations.append((int(t), int(i), int((i + 1) % 3), float(prod[t, i])))
    sp = side_products(dec)
    pairs = T.edge_halfedges
    p0, p1 = sp[pairs[:, 0]], sp[pairs[:, 1]]
    bad = np.abs(p0 - p1) > tol * np.maximum(p0, p1)
    for e in np.flatnonzero(bad):
        rep.edge_violations.append((int(e), float(p0[e]), float(p1[e])))
    return rep


def corner_to_edge(T: Triangulation, dec: CornerDecoration, tol: float = C_TOL) -> EdgeLengths:
    dec.check_total(T)
    sp = side_products(dec)
    pairs = T.edge_halfedges
    p0, p1 = sp[pairs[:, 0]], sp[pairs[:, 1]]
    bad = np.flatnonzero(np.abs(p0 - p1) > tol * np.maximum(p0, p1))
    if len(bad):
        e = int(bad[0])
        raise ConditionCError(
            f"edge {e}: side products {p0[e]!r} and {p1[e]!r} differ "
            f"({len(bad)} edges violate condition (C))")
    return EdgeLengths(-np.log(p0))


def edge_to_corner(T: Triangulation, lengths: EdgeLengths) -> CornerDecoration:
    """Corner area at A is exp((d_BC - d_AB - d_CA) / 2)."""
    d = np.asarray(lengths.lengths if isinstance(lengths, EdgeLengths) else lengths, dtype=float)
    if d.shape != (T.n_edges,):
        raise ValueError(f"expected {T.n_edges} edge lengths, got {d.shape}")
    dh = d[T.edge_of_halfedge].reshape(-1, 3)     # dh[t, i]: side from corner i to i+1
    opp = dh[:, [1, 2, 0]]
    prev = dh[:, [2, 0, 1]]
    return CornerDecoration(np.exp((opp - dh - prev) / 2.0))


# --------------------------------------------------------------------------
# the explicit family decoration

@dataclass(frozen=True)
class DecorationParams:
    m: int
    c: tuple

    def __post_init__(self):
        c = tuple(float(x) for x in self.c)
        object.__setattr__(self, "c", c)
        if self.m < 1 or len(c) != self.m:
            raise ValueError(f"need m >= 1 and exactly m values of c, got m={self.m}, {len(c)} values")
        if any(not (x > 0 and math.isfinite(x)) for x in c):
            raise ValueError("c values must be positive")

    @classmethod
    def of(cls, c: Sequence[float]) -> "DecorationParams":
        return cls(len(c), tuple(c))

    def admissible(self) -> bool:
        return all(1.0 <= x <= 2.0 for x in self.c)


def paper_decoration(T: Triangulation, params: DecorationParams) -> CornerDecoration:
    """Explicit decoration of the colored family triangulation T_m.

    In the white region at an icosahedral corner, the small triangles pair
    up into diamonds stacked by level (distance from the gray boundary); a
    diamond whose top vertex sits at level l carries ``[c_l, 1/c_l, 1/c_l]``
    with ``c_l`` on its top and bottom vertices.  The row touching the gray
    region is ``[c_1, 1/c_1, 1/c_1]`` with ``c_1`` on top.  Gray triangles
    are ``[1, 1, 1]`` except those sharing a side with white: a single such
    side gives ``[c_1, 1/c_1, 1/c_1]`` with ``c_1`` opposite it, two sides
    (the gray corners) give ``[1, 1, 1/c_1^2]`` with ``1/c_1^2`` at the
    edge midpoint.  For m = 1 the lone gray triangle has three white sides
    and condition (C) forces ``[1/c_1, 1/c_1, 1/c_1]``.
    """
    if not T.is_family or T.colors is None:
        raise ValueError("paper_decoration needs a colored family triangulation")
    if params.m != T.m:
        raise ValueError(f"params are for m={params.m}, triangulation has m={T.m}")
    m = T.m
    c = np.asarray(params.c)
    kind, ijk = T.cell[:, 0], T.cell[:, 1:]
    F = T.n_triangles
    out = np.ones((F, 3))
    rows = np.arange(F)

    axis = np.argmax(ijk, axis=1)
    top = ijk[rows, axis]
    white = top >= m
    up = kind == 0

    # white up triangles: top vertex is corner `axis`, level top + 1 - m
    sel = white & up
    lvl = top[sel] + 1 - m
    cl = c[lvl - 1]
    out[sel] = (1.0 / cl)[:, None]
    out[rows[sel], axis[sel]] = cl

    # white down triangles: bottom vertex is corner (axis + 1) % 3, level top + 2 - m
    sel = white & ~up
    lvl = top[sel] + 2 - m
    cl = c[lvl - 1]
    out[sel] = (1.0 / cl)[:, None]
    out[rows[sel], (axis[sel] + 1) % 3] = cl

    # gray down triangles on the boundary of the gray region
    gray_down = ~white & ~up
    on_side = ijk == m - 1
    nb = on_side.sum(axis=1)
    c1 = c[0]
    sel = gray_down & (nb == 1)
    r = np.argmax(on_side[sel], axis=1)
    out[sel] = 1.0 / c1
    out[rows[sel], (r + 1) % 3] = c1
    sel = gray_down & (nb == 2)
    r0 = np.argmin(on_side[sel], axis=1)
    out[sel] = 1.0
    out[rows[sel], (r0 + 1) % 3] = 1.0 / c1 ** 2
    sel = gray_down & (nb == 3)
    out[sel] = 1.0 / c1
    return CornerDecoration(out)


# --------------------------------------------------------------------------
# cusp areas

@dataclass
class CuspAreaReport:
    """Per-vertex cusp areas with the matching closed forms when known.

    ``closed_form`` is NaN where no closed form applies; ``form`` names the
    expression used and ``convention`` records which written variant of the
    formula it agrees with.
    """

    areas: np.ndarray
    types: np.ndarray
    closed_form: np.ndarray
    form: list
    convention: list
    min_area: float
    min_vertex: int
    target: float = TARGET_AREA

    @property
    def margin(self) -> float:
        return self.min_area - self.target

    def max_closed_form_error(self) -> float:
        known = ~np.isnan(self.closed_form)
        if not known.any():
            return 0.0
        return float(np.max(np.abs(self.areas[known] - self.closed_form[known])))

    def by_type(self) -> dict:
        out = {}
        for t in VertexType:
            sel = self.types == t
            if sel.any():
                out[t.name] = {"count": int(sel.sum()), "min": float(self.areas[sel].min()),
                               "max": float(self.areas[sel].max())}
        return out

    def to_dict(self, per_vertex: bool = True) -> dict:
        d = {
            "min_area": self.min_area,
            "min_vertex": self.min_vertex,
            "target": self.target,
            "margin": self.margin,
            "total_area": float(self.areas.sum()),
            "max_closed_form_error": self.max_closed_form_error(),
            "by_type": self.by_type(),
        }
        if per_vertex:
            d["vertices"] = [
                {"vertex": v, "area": float(self.areas[v]), "type": int(self.types[v]),
                 "closed_form": None if np.isnan(self.closed_form[v]) else float(self.closed_form[v]),
                 "form": self.form[v], "convention": self.convention[v]}
                for v in range(len(self.areas))
            ]
        return d


def cusp_areas(T: Triangulation, dec: CornerDecoration,
               params: Optional[DecorationParams] = None) -> CuspAreaReport:
    dec.check_total(T)
    V = T.n_vertices
    areas = np.bincount(T.corner_vertex, weights=dec.areas.ravel(), minlength=V)
    types = classify_vertices(T)
    closed = np.full(V, np.nan)
    form = [""] * V
    conv = [""] * V
    if params is not None and T.is_family and T.colors is not None and params.m == T.m:
        _fill_closed_forms(T, params, types, closed, form, conv)
    vmin = int(np.argmin(areas))
    return CuspAreaReport(areas, types, closed, form, conv, float(areas[vmin]), vmin)


def _fill_closed_forms(T, params, types, closed, form, conv):
    m = T.m
    c = (None,) + params.c          # 1-based
    lat = vertex_lattice(T)
    level = lat[:, 1:].max(axis=1) - m

    def put(v, val, name, convention="statement"):
        closed[v] = val
        form[v] = name
        conv[v] = convention

    ev = T.edge_vertices
    t4 = types == VertexType.GRAY_CORNER
    n4 = np.bincount(ev[:, 0], weights=t4[ev[:, 1]], minlength=T.n_vertices) + \
        np.bincount(ev[:, 1], weights=t4[ev[:, 0]], minlength=T.n_vertices)
    n_side = (lat[:, 1:] == m - 1).sum(axis=1)

    for v in range(T.n_vertices):
        ty = types[v]
        if ty == VertexType.CORNER:
            put(v, 5 * c[m], "5*c_m")
        elif ty == VertexType.WHITE_EDGE:
            j = int(level[v])
            put(v, 4 / c[j + 1] + 2 * c[j], f"L_{j} = 4/c_{j + 1} + 2c_{j}")
        elif ty == VertexType.WHITE_INTERIOR:
            j = int(level[v])
            # the proof's 4/c_j' + c_{j'+1} + c_{j'-1} is the same number at j' = j + 1
            put(v, 4 / c[j + 1] + c[j] + c[j + 2],
                f"L'_{j} = 4/c_{j + 1} + c_{j} + c_{j + 2}", f"statement (= proof at index {j + 1})")
        elif ty == VertexType.GRAY_CORNER:
            if m == 1:
                put(v, 6 / c[1], "6/c_1", "m=1: lone gray triangle [1/c_1]*3")
            else:
                put(v, 2 / c[1] ** 2 + 4 / c[1], "2/c_1^2 + 4/c_1")
        elif ty == VertexType.GRAY_EDGE:
            k = int(n4[v])
            if k == 0:
                put(v, c[2] + 1 + 4 / c[1], "c_2 + 1 + 4/c_1", "statement and proof")
            elif k == 1:
                same = c[2] == c[1]
                put(v, c[2] + 2 + 3 / c[1], "c_2 + 2 + 3/c_1",
                    "statement and proof" if same else "statement (proof has c_1 for c_2)")
            else:
                put(v, c[2] + 3 + 2 / c[1], "c_2 + 3 + 2/c_1", "m=2: next to two gray corners")
        elif ty == VertexType.GRAY_INTERIOR:
            k = int(n_side[v])
            names = {0: "6", 1: "c_1 + 5", 2: "2c_1 + 4", 3: "3c_1 + 3"}
            put(v, 6 - k + k * c[1], names[k],
                "m=3: centre of the gray region" if k == 3 else "statement and proof")


# --------------------------------------------------------------------------
# the c_j recursion

def recursion_step(L: float, c: float) -> float:
    den = L - 2.0 * c
    if den == 0:
        raise ZeroDivisionError(f"pole of the recursion at c = L/2 = {c!r}")
    return 4.0 / den


def recursion_sequence(L: float, c1: float, steps: int) -> list:
    seq = [float(c1)]
    for _ in range(steps - 1):
        seq.append(recursion_step(L, seq[-1]))
    return seq


@dataclass(frozen=True)
class FixedPoints:
    low: float
    high: float
    low_kind: str
    high_kind: str

    def as_tuple(self):
        return (self.low, self.high)


def _kind(x: float) -> str:
    # derivative of 4/(L - 2x) at a fixed point is x^2 / 2
    deriv = x * x / 2.0
    if abs(deriv - 1.0) < 1e-12:
        return "neutral"
    return "attracting" if deriv < 1.0 else "repelling"


def fixed_points(L: float) -> FixedPoints:
    """Fixed points of c -> 4/(L - 2c), i.e. roots of 2x^2 - Lx + 4."""
    disc = L * L - 32.0
    if disc < 0:
        raise ValueError(f"L = {L!r} < sqrt(32): the fixed points are not real")
    r = math.sqrt(disc)
    hi = (L + r) / 4.0
    lo = 2.0 / hi        # product of the roots is 2; avoids cancellation
    return FixedPoints(lo, hi, _kind(lo), _kind(hi))


@dataclass(frozen=True)
class RecursionAnalysis:
    L: float
    sequence: tuple
    fixed: FixedPoints
    increasing: bool
    converged: bool

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "sequence": list(self.sequence),
            "fixed_points": [
                {"value": self.fixed.low, "kind": self.fixed.low_kind},
                {"value": self.fixed.high, "kind": self.fixed.high_kind},
            ],
            "increasing": self.increasing,
            "converged": self.converged,
        }


def analyze_recursion(L: float, c1: float, steps: int, tol: float = 1e-6) -> RecursionAnalysis:
    seq = recursion_sequence(L, c1, steps)
    fp = fixed_points(L)
    attractor = fp.low if fp.low_kind == "attracting" else None
    inc = all(b > a for a, b in zip(seq, seq[1:]))
    conv = attractor is not None and abs(seq[-1] - attractor) < tol
    return RecursionAnalysis(L, tuple(seq), fp, inc, conv)


def choose_m_for_epsilon(eps: float, c1: float = C1_SATURATING, L: float = TARGET_AREA,
                         max_m: int = 100_000) -> DecorationParams:
    """Smallest m whose recursion from c1 reaches 5 c_m > L - eps."""
    if not eps > 0:
        raise ValueError("epsilon must be positive")
    seq = [float(c1)]
    while not 5.0 * seq[-1] > L - eps:
        if len(seq) >= max_m:
            raise ValueError(f"no m <= {max_m} reaches the requested epsilon {eps!r}")
        seq.append(recursion_step(L, seq[-1]))
    return DecorationParams(len(seq), tuple(seq))

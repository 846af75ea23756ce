"""Developing a decorated triangulation into the upper half-plane.

Each triangle has a *standard frame*: corner 0 at infinity with its horoball
at height 1, corner 1 at 0 and corner 2 at ``a0``.  The development stores,
for every triangle, the Moebius map from that frame to the developed picture.
Neighbours are glued along a spanning tree so that the shared edge coincides
and the two horoballs on it agree.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .decor import CornerDecoration, DecorationParams, check_geometric
from .figure import Figure, Window
from .hyp2 import (INF, TANGENCY_TOL, Horoball, IdealTriangleGeom, Mobius,
                   horoball_distance)
from .surface import Triangulation, vertex_star

__all__ = [
    "NotGeometricError",
    "DevelopedSurface",
    "develop",
    "standard_frame",
    "Holonomy",
    "cusp_holonomy",
    "EmbeddingReport",
    "embedded_cusp_check",
    "corner_labels",
    "render_svg",
    "fit_window",
    "block_center",
]


class NotGeometricError(ValueError):
    """Raised when asked to develop a decoration that fails the checks."""


def standard_frame(areas: Sequence[float], top: int = 0):
    """Vertices and horoballs of a decorated triangle with corner ``top`` at infinity.

    Returns two tuples indexed by corner.
    """
    a = [float(x) for x in areas]
    r = top % 3
    s, t = (r + 1) % 3, (r + 2) % 3
    pts = [None] * 3
    balls = [None] * 3
    pts[r], pts[s], pts[t] = INF, 0.0, a[r]
    balls[r] = Horoball(INF, 1.0)
    balls[s] = Horoball(0.0, a[r] * a[s])
    balls[t] = Horoball(a[r], a[r] * a[t])
    return tuple(pts), tuple(balls)


def _rotation(areas, top: int, src_top: int = 0) -> Mobius:
    """Map from the top-``src_top`` standard frame to the top-``top`` frame."""
    if (top - src_top) % 3 == 0:
        return Mobius.identity()
    src, _ = standard_frame(areas, src_top)
    dst, _ = standard_frame(areas, top)
    return Mobius.from_triples(src, dst)


def _pole_height(A: Mobius, p, H: Horoball) -> float:
    # evaluating A at its own pole can miss INF by roundoff
    if p is INF:
        return A(H).size
    return 1.0 / (A.c * A.c * H.size)


def _edge_match(p, q, Hp, Hq, p2, q2, Hp2, Hq2) -> Mobius:
    """Map sending p2 -> p, q2 -> q and the horoballs as closely as possible.

    The shear along the edge is the geometric mean of the one matching the
    horoballs at p and the one matching those at q; the two agree whenever
    the edge lengths agree.
    """
    A = Mobius.normalizing(p, q)
    A2 = Mobius.normalizing(p2, q2)
    s, s2 = _pole_height(A, p, Hp), _pole_height(A2, p2, Hp2)
    d, d2 = A(Hq).size, A2(Hq2).size
    lam = math.sqrt((s / s2) * (d / d2))
    return A.inverse() @ Mobius.dilation(lam) @ A2


@dataclass
class DevelopedSurface:
    """Placement of every triangle in one chart of the upper half-plane.

    ``placements[t]`` maps the standard frame of triangle t with corner
    ``tops[t]`` at infinity into the chart.
    ``parent[t]`` is the spanning-tree parent (-1 at the base) and
    ``parent_side[t]`` the side of t glued to it.
    """

    triangulation: Triangulation
    decoration: CornerDecoration
    base: int
    placements: list
    tops: np.ndarray
    parent: np.ndarray
    parent_side: np.ndarray
    depth: np.ndarray
    order: list

    def triangle(self, t: int) -> IdealTriangleGeom:
        pts, _ = standard_frame(self.decoration.areas[t], self.tops[t])
        return IdealTriangleGeom(pts).image(self.placements[t])

    def horoballs(self, t: int) -> tuple:
        _, balls = standard_frame(self.decoration.areas[t], self.tops[t])
        g = self.placements[t]
        return tuple(g(H) for H in balls)

    def tree_edges(self) -> list:
        """Half-edges crossed by the spanning tree, as (parent, child) pairs of half-edges."""
        out = []
        for t in self.order[1:]:
            h = 3 * t + int(self.parent_side[t])
            out.append((int(self.triangulation.twin[h]), h))
        return out

    def edge_length_errors(self, lengths=None) -> np.ndarray:
        """|developed horoball distance - stored edge length| for every half-edge."""
        from .decor import corner_to_edge

        T = self.triangulation
        if lengths is None:
            lengths = corner_to_edge(T, self.decoration, tol=math.inf).lengths
        eoh = T.edge_of_halfedge
        err = np.empty(3 * T.n_triangles)
        for t in range(T.n_triangles):
            balls = self.horoballs(t)
            for i in range(3):
                dist = horoball_distance(balls[i], balls[(i + 1) % 3])
                err[3 * t + i] = abs(dist - lengths[eoh[3 * t + i]])
        return err


def develop(T: Triangulation, dec: CornerDecoration, base: int = 0,
            base_corner: int = 0, require_geometric: bool = True) -> DevelopedSurface:
    """Develop ``dec`` along a breadth-first spanning tree rooted at ``base``.

    The base triangle has corner ``base_corner`` at infinity, the next corner
    at 0, and the horoball at infinity at height 1.  Neighbours are visited
    side by side in increasing triangle order, so the result is deterministic.
    """
    dec.check_total(T)
    if require_geometric:
        rep = check_geometric(T, dec)
        if not rep.ok:
            raise NotGeometricError(rep.summary())
    F = T.n_triangles
    if not 0 <= base < F:
        raise IndexError(f"base triangle {base} out of range")
    areas = dec.areas
    tops = np.zeros(F, dtype=np.int64)
    tops[base] = base_corner % 3
    frames = [standard_frame(areas[t], tops[t]) for t in range(F)]
    placements: list = [None] * F
    parent = np.full(F, -1, dtype=np.int64)
    parent_side = np.full(F, -1, dtype=np.int64)
    depth = np.full(F, -1, dtype=np.int64)
    # base: corner base_corner at infinity, height 1
    placements[base] = Mobius.identity()
    depth[base] = 0
    order = [base]
    queue = deque([base])
    twin = T.twin
    while queue:
        t = queue.popleft()
        pts, balls = frames[t]
        g = placements[t]
        for i in range(3):
            h2 = int(twin[3 * t + i])
            t2, j = divmod(h2, 3)
            if depth[t2] >= 0:
                continue
            pts2, balls2 = frames[t2]
            i1, j1 = (i + 1) % 3, (j + 1) % 3
            G = _edge_match(pts[i], pts[i1], balls[i], balls[i1],
                            pts2[j1], pts2[j], balls2[j1], balls2[j])
            placements[t2] = g @ G
            parent[t2], parent_side[t2], depth[t2] = t, j, depth[t] + 1
            order.append(t2)
            queue.append(t2)
    if len(order) != F:
        raise ValueError("triangulation is not connected")
    return DevelopedSurface(T, dec, base, placements, tops, parent, parent_side, depth, order)


# --------------------------------------------------------------------------
# cusp charts and holonomy

@dataclass
class _CuspChart:
    """Star of a cusp unrolled once around, with the cusp at infinity.

    ``local[k]`` maps the standard frame of ``star[k]`` that has the cusp
    corner at infinity into the chart; it is affine, so the cusp stays at
    infinity exactly.
    The map ``z -> lam z + b`` carries triangle 0 to its copy after one turn.
    """

    vertex: int
    star: list
    local: list
    lam: float
    b: float


def _cusp_chart(T: Triangulation, areas: np.ndarray, v: int) -> _CuspChart:
    star = vertex_star(T, v)
    prod = (areas * areas[:, [1, 2, 0]]).ravel()
    x, height = 0.0, 1.0
    local = []
    for k, (t, i) in enumerate(star):
        step = Mobius.translation(x) @ Mobius.dilation(height)
        local.append(step)
        x += float(areas[t, i]) * height
        # cross the edge towards the next triangle, matching the far horoball
        t2, i2 = star[(k + 1) % len(star)]
        p_out = prod[3 * t + (i + 2) % 3]
        p_in = prod[3 * t2 + i2]
        height *= float(p_out / p_in)
    return _CuspChart(v, star, local, height, x)


@dataclass(frozen=True)
class Holonomy:
    """Peripheral holonomy of one cusp.

    ``local`` is the map in the cusp chart (cusp at infinity, first star
    triangle in its frame with height 1).  ``matrix`` is the same map in the
    coordinates of a development.  ``scaling`` is the squared lower-right
    entry of ``local`` after normalisation, which is the derivative at the
    fixed point at infinity; it equals 1 exactly for a parabolic map.
    """

    vertex: int
    local: Mobius
    matrix: Optional[Mobius]
    scaling: float
    translation_length: float

    def is_parabolic(self, tol: float = 1e-9) -> bool:
        return abs(self.scaling - 1.0) <= tol

    def to_dict(self) -> dict:
        return {
            "vertex": self.vertex,
            "scaling": self.scaling,
            "translation_length": self.translation_length,
            "parabolic": self.is_parabolic(),
            "local": list(self.local.as_tuple()),
            "matrix": None if self.matrix is None else list(self.matrix.as_tuple()),
        }


def cusp_holonomy(surface, v: int, dec: Optional[CornerDecoration] = None) -> Holonomy:
    """Holonomy around cusp ``v``.

    ``surface`` is either a :class:`DevelopedSurface` (the result is then also
    expressed in its coordinates) or a bare triangulation together with
    ``dec``.
    """
    if isinstance(surface, DevelopedSurface):
        T, dec, dev = surface.triangulation, surface.decoration, surface
    else:
        if dec is None:
            raise TypeError("a decoration is needed with a bare triangulation")
        T, dev = surface, None
    chart = _cusp_chart(T, dec.areas, v)
    lam, b = chart.lam, chart.b
    r = math.sqrt(lam)
    local = Mobius(r, b / r, 0.0, 1.0 / r)
    matrix = None
    if dev is not None:
        t0, i0 = chart.star[0]
        # chart -> developed coordinates through the frame of the first triangle
        R = _rotation(dec.areas[t0], int(dev.tops[t0]), src_top=i0)
        M = dev.placements[t0] @ R.inverse() @ chart.local[0].inverse()
        matrix = M @ local @ M.inverse()
    return Holonomy(v, local, matrix, float(1.0 / lam), float(abs(b)))


# --------------------------------------------------------------------------
# embedding check

@dataclass
class EmbeddingReport:
    """Pairs of horoballs found overlapping in the local cusp charts."""

    radius: int
    n_pairs: int = 0
    n_tangent: int = 0
    min_distance: float = math.inf
    overlaps: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.overlaps

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "pairs_checked": self.n_pairs,
            "tangent_pairs": self.n_tangent,
            "min_distance": self.min_distance if math.isfinite(self.min_distance) else None,
            "embedded": self.ok,
            "overlaps": [
                {"cusp": c, "vertices": [a, b], "distance": d if math.isfinite(d) else None}
                for c, a, b, d in self.overlaps
            ],
        }


def embedded_cusp_check(surface, radius: int = 1, dec: Optional[CornerDecoration] = None,
                        tol: float = TANGENCY_TOL, max_report: int = 50) -> EmbeddingReport:
    """Look for overlapping horoballs near every cusp.

    For each cusp the star is unrolled over three turns with the cusp at
    infinity, then ``radius`` further layers of neighbours are glued on.  All
    horoballs of all placed triangles are compared pairwise; balls on the same
    ideal point are skipped.  Overlaps are listed as (cusp, vertex, vertex,
    distance) with at most ``max_report`` entries.
    """
    if isinstance(surface, DevelopedSurface):
        T, dec = surface.triangulation, surface.decoration
    else:
        T = surface
        if dec is None:
            raise TypeError("a decoration is needed with a bare triangulation")
    areas = dec.areas
    frames = [[standard_frame(areas[t], r) for r in range(3)] for t in range(T.n_triangles)]
    twin = T.twin
    rep = EmbeddingReport(radius)
    for v in range(T.n_vertices):
        chart = _cusp_chart(T, areas, v)
        r = math.sqrt(chart.lam)
        turn = Mobius(r, chart.b / r, 0.0, 1.0 / r)
        # entries are (triangle, map, frame top, side glued to the parent)
        placed = []
        for shift in (turn.inverse(), Mobius.identity(), turn):
            for (t, i), L in zip(chart.star, chart.local):
                placed.append((t, shift @ L, i, None))
        # from the star only the side opposite the cusp leads outwards
        frontier = [(k, [(i + 1) % 3]) for k, (_, _, i, _) in enumerate(placed)]
        for _ in range(radius):
            nxt = []
            for idx, sides in frontier:
                t, g, top, _ = placed[idx]
                pts, balls = frames[t][top]
                for i in sides:
                    t2, j = divmod(int(twin[3 * t + i]), 3)
                    pts2, balls2 = frames[t2][0]
                    i1, j1 = (i + 1) % 3, (j + 1) % 3
                    G = _edge_match(pts[i], pts[i1], balls[i], balls[i1],
                                    pts2[j1], pts2[j], balls2[j1], balls2[j])
                    placed.append((t2, g @ G, 0, j))
                    nxt.append((len(placed) - 1, [k for k in range(3) if k != j]))
            frontier = nxt
        _check_pairs(T, frames, placed, v, rep, tol, max_report)
    return rep


def _check_pairs(T, frames, placed, cusp, rep, tol, max_report):
    xs, ds, vs = [], [], []
    hs, hv = [], []
    for t, g, top, _ in placed:
        pts, balls = frames[t][top]
        for i in range(3):
            H = g(balls[i])
            vid = int(T.tris[t, i])
            if H.center is INF:
                hs.append(H.size)
                hv.append(vid)
            else:
                xs.append(H.center)
                ds.append(H.size)
                vs.append(vid)
    x = np.array(xs)
    d = np.array(ds)
    vid = np.array(vs)
    dist_parts = []
    labels = []
    if len(x) > 1:
        iu, ju = np.triu_indices(len(x), k=1)
        dx = x[iu] - x[ju]
        # one ideal point reached through two triangles; compare against the
        # ball sizes since absolute coordinates can be large
        same = (vid[iu] == vid[ju]) & (np.abs(dx) <= 1e-8 * (d[iu] + d[ju]))
        iu, ju, dx = iu[~same], ju[~same], dx[~same]
        with np.errstate(divide="ignore"):
            dist_parts.append(np.log(dx * dx / (d[iu] * d[ju])))
        labels.append((vid[iu], vid[ju]))
    for h, hvid in zip(hs, hv):
        if len(x):
            dist_parts.append(np.log(h / d))
            labels.append((np.full(len(x), hvid), vid))
    if not dist_parts:
        return
    dist = np.concatenate(dist_parts)
    la = np.concatenate([a for a, _ in labels])
    lb = np.concatenate([b for _, b in labels])
    rep.n_pairs += int(dist.size)
    rep.n_tangent += int(np.count_nonzero(np.abs(dist) <= tol))
    rep.min_distance = min(rep.min_distance, float(dist.min()))
    bad = np.flatnonzero(dist < -tol)
    for k in bad:
        if len(rep.overlaps) >= max_report:
            break
        entry = (cusp, int(la[k]), int(lb[k]), float(dist[k]))
        if entry not in rep.overlaps:
            rep.overlaps.append(entry)


# --------------------------------------------------------------------------
# pictures

def corner_labels(dec: CornerDecoration, params: Optional[DecorationParams] = None,
                  rel_tol: float = 1e-9) -> np.ndarray:
    """Symbolic name for every corner value, e.g. ``c2``, ``1/c1`` or ``1/c1^2``.

    Values that match nothing are printed numerically.
    """
    names = [(1.0, "1")]
    if params is not None:
        for k, c in enumerate(params.c, start=1):
            names += [(c, f"c{k}"), (1.0 / c, f"1/c{k}")]
        names.append((1.0 / params.c[0] ** 2, "1/c1^2"))
    out = np.empty(dec.areas.shape, dtype=object)
    for (t, i), val in np.ndenumerate(dec.areas):
        lab = f"{val:.4g}"
        for ref, name in names:
            if abs(val - ref) <= rel_tol * ref:
                lab = name
                break
        out[t, i] = lab
    return out


def _apply_complex(m: Mobius, z: complex) -> complex:
    return (m.a * z + m.b) / (m.c * z + m.d)


def render_svg(dev: DevelopedSurface, window: Window, path=None,
               triangles: Optional[Sequence[int]] = None, labels=None,
               draw_horoballs: bool = True, scale: float = 400.0,
               title: Optional[str] = None) -> str:
    """Draw the developed triangles and horoballs that meet ``window``.

    ``labels`` is an (F, 3) array of strings written inside each corner.
    Returns the SVG text and writes it to ``path`` when given.
    """
    fig = Figure(window, scale=scale, title=title)
    tri_ids = range(dev.triangulation.n_triangles) if triangles is None else triangles
    areas = dev.decoration.areas
    if draw_horoballs:
        for t in tri_ids:
            for H in dev.horoballs(t):
                fig.horoball(H)
    for t in tri_ids:
        geo = dev.triangle(t)
        for i in range(3):
            fig.geodesic(geo[i], geo[(i + 1) % 3])
        if labels is not None:
            g = dev.placements[t]
            for i in range(3):
                # a point just beyond the horoball, on the bisector of the corner
                a = areas[t, i]
                z = _apply_complex(g @ _rotation(areas[t], i).inverse(), complex(a / 2.0, 1.25))
                fig.label(z.real, z.imag, str(labels[t, i]),
                          size=max(4.0, min(12.0, 0.25 * scale * z.imag)))
    text = fig.to_svg()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text


def fit_window(dev: DevelopedSurface, triangles: Optional[Sequence[int]] = None,
               margin: float = 0.1, height: Optional[float] = None) -> Window:
    """Smallest window around the finite vertices of the given triangles."""
    ids = range(dev.triangulation.n_triangles) if triangles is None else triangles
    xs = [p for t in ids for p in dev.triangle(t).vertices if p is not INF]
    if not xs:
        return Window(-1.0, 1.0, 0.0, 1.5 if height is None else height)
    lo, hi = min(xs), max(xs)
    pad = margin * max(hi - lo, 1e-9)
    top = height if height is not None else 1.25 * max(hi - lo, 1.0) / 1.5 + 0.25
    return Window(lo - pad, hi + pad, 0.0, top)


def block_center(T: Triangulation, block: int) -> int:
    """Triangle of an icosahedral block closest to its centre.

    Developing from there keeps the block shallow in the spanning tree, which
    matters for large m where deep triangles shrink below float resolution.
    """
    if T.block is None or T.cell is None:
        raise ValueError("block_center needs a family triangulation")
    ids = np.flatnonzero(T.block == block)
    if not len(ids):
        raise ValueError(f"no triangles in block {block}")
    n = 2 * T.m
    # centroid of a cell in lattice units: up cells sit 1/3 above their
    # (i, j, k) label, down cells 2/3
    centre = T.cell[ids, 1:] + np.where(T.cell[ids, :1] == 0, 1.0, 2.0) / 3.0
    dist = ((centre - n / 3.0) ** 2).sum(axis=1)
    return int(ids[np.argmin(dist)])

"""Ideal triangulations of punctured spheres.

Triangles are stored as counterclockwise vertex triples.  Half-edge
``3*t + i`` runs from ``tris[t, i]`` to ``tris[t, (i+1) % 3]``; the same
integer also names the corner ``(t, i)``, i.e. each corner is identified with
its outgoing half-edge.

Subdivision family
------------------
``subdivide(icosahedron(), m)`` cuts every icosahedral face (A, B, C) into
``(2m)^2`` small triangles.  A lattice point of the face is ``(i, j, k)`` with
``i + j + k = 2m`` and position ``(iA + jB + kC) / 2m``.  Small triangles are

* up ``(i, j, k)`` with ``i+j+k = 2m-1`` and corners
  ``(i+1,j,k), (i,j+1,k), (i,j,k+1)``;
* down ``(i, j, k)`` with ``i+j+k = 2m-2`` and corners
  ``(i+1,j+1,k), (i,j+1,k+1), (i+1,j,k+1)``.

The gray region of a face is the central inverted triangle with vertices at
the edge midpoints ``(m,m,0), (m,0,m), (0,m,m)``; a small triangle is gray
exactly when ``max(i, j, k) <= m - 1``.  The three white regions are the
corner triangles ``i >= m``, ``j >= m`` and ``k >= m``.  This is the only
placement of a central ``m^2``-triangle region invariant under the face's
rotations.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

__all__ = [
    "Triangulation", "TriangulationError", "VertexType", "Color",
    "icosahedron", "subdivide", "color_faces", "classify_vertices",
    "vertex_star", "thrice_punctured_sphere", "family", "vertex_lattice",
    "ICOSAHEDRON_COORDS",
]


class TriangulationError(ValueError):
    pass


class Color(enum.IntEnum):
    NONE = 0
    WHITE = 1
    GRAY = 2


class VertexType(enum.IntEnum):
    UNCLASSIFIED = 0
    CORNER = 1           # degree-5 corner of an icosahedral face
    WHITE_EDGE = 2       # interior of an icosahedral edge, inside white regions
    WHITE_INTERIOR = 3
    GRAY_CORNER = 4      # icosahedral edge midpoint: 4 white and 2 gray regions meet
    GRAY_EDGE = 5
    GRAY_INTERIOR = 6


UP, DOWN = 0, 1


def _readonly(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Triangulation:
    """Oriented ideal triangulation of a punctured sphere.

    Parameters
    ----------
    tris : (F, 3) int array
        Counterclockwise vertex indices of each triangle.
    n_vertices : int
    twin : (3F,) int array, optional
        Gluing of half-edges.  Derived from ``tris`` when omitted, which
        requires every oriented vertex pair to occur at most once.
    colors, block, cell, m :
        Subdivision-family metadata: per-triangle :class:`Color`, icosahedral
        face index, and ``(kind, i, j, k)`` lattice cell (kind 0 = up,
        1 = down); ``m`` is the subdivision parameter.
    """

    tris: np.ndarray
    n_vertices: int
    twin: Optional[np.ndarray] = None
    colors: Optional[np.ndarray] = None
    block: Optional[np.ndarray] = None
    cell: Optional[np.ndarray] = None
    m: Optional[int] = None

    def __post_init__(self):
        tris = _readonly(self.tris, np.int64).reshape(-1, 3)
        object.__setattr__(self, "tris", tris)
        object.__setattr__(self, "n_vertices", int(self.n_vertices))
        if self.twin is None:
            twin = _derive_twins(tris)
        else:
            twin = np.asarray(self.twin, dtype=np.int64)
        object.__setattr__(self, "twin", _readonly(twin, np.int64))
        for name in ("colors", "block"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, _readonly(val, np.int64))
        if self.cell is not None:
            object.__setattr__(self, "cell", _readonly(self.cell, np.int64).reshape(-1, 4))
        self.validate()

    # -- sizes -------------------------------------------------------------
    @property
    def n_triangles(self) -> int:
        return len(self.tris)

    @property
    def n_edges(self) -> int:
        return len(self.twin) // 2

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_triangles

    # -- validation ----------------------------------------------------------
    def validate(self):
        tris, twin, V = self.tris, self.twin, self.n_vertices
        F = len(tris)
        if F == 0:
            raise TriangulationError("triangulation has no triangles")
        bad = np.flatnonzero((tris < 0).any(axis=1) | (tris >= V).any(axis=1))
        if len(bad):
            raise TriangulationError(
                f"triangle {int(bad[0])} references a vertex outside 0..{V - 1}")
        if twin.shape != (3 * F,):
            raise TriangulationError("twin array must have one entry per half-edge")
        if ((twin < 0) | (twin >= 3 * F)).any():
            raise TriangulationError("twin index out of range")
        h = np.arange(3 * F)
        fixed = np.flatnonzero(twin == h)
        if len(fixed):
            raise TriangulationError(f"half-edge {int(fixed[0])} is glued to itself")
        not_inv = np.flatnonzero(twin[twin] != h)
        if len(not_inv):
            raise TriangulationError(
                f"gluing is not an involution at half-edge {int(not_inv[0])}")
        src, dst = self.half_edge_ends()
        mism = np.flatnonzero((src[twin] != dst) | (dst[twin] != src))
        if len(mism):
            t, i = divmod(int(mism[0]), 3)
            raise TriangulationError(
                f"triangle {t} side {i} is glued to a side with different or "
                "inconsistently oriented endpoints")
        used = np.zeros(V, dtype=bool)
        used[tris.ravel()] = True
        if not used.all():
            raise TriangulationError(f"vertex {int(np.flatnonzero(~used)[0])} lies in no triangle")
        # one cycle of corners per vertex (links are circles, not several)
        if self._n_corner_cycles() != V:
            raise TriangulationError("some vertex link is disconnected (not a surface)")
        if not self._connected():
            raise TriangulationError("triangulation is not connected")
        chi = self.euler_characteristic()
        if chi != 2:
            raise TriangulationError(
                f"Euler characteristic {chi} != 2; only punctured spheres are supported")
        if self.colors is not None and self.colors.shape != (F,):
            raise TriangulationError("colors must have one entry per triangle")
        if self.block is not None and self.block.shape != (F,):
            raise TriangulationError("block ids must have one entry per triangle")
        if self.cell is not None and self.cell.shape != (F, 4):
            raise TriangulationError("cells must be (kind, i, j, k) per triangle")

    def _n_corner_cycles(self) -> int:
        nxt = self.corner_next
        n = len(nxt)
        g = sparse.csr_matrix((np.ones(n), (np.arange(n), nxt)), shape=(n, n))
        return connected_components(g, directed=False)[0]

    def _connected(self) -> bool:
        n = len(self.twin)
        nb = self.twin // 3
        t = np.arange(n) // 3
        F = self.n_triangles
        g = sparse.csr_matrix((np.ones(n), (t, nb)), shape=(F, F))
        return connected_components(g, directed=False)[0] == 1

    # -- half-edges, corners and edges ---------------------------------------
    def half_edge_ends(self):
        src = self.tris.ravel()
        dst = self.tris[:, [1, 2, 0]].ravel()
        return src, dst

    @cached_property
    def corner_vertex(self) -> np.ndarray:
        return self.tris.ravel()

    @cached_property
    def corner_next(self) -> np.ndarray:
        """Next corner counterclockwise around the same vertex."""
        c = np.arange(3 * self.n_triangles)
        prev = 3 * (c // 3) + (c % 3 + 2) % 3
        return _readonly(self.twin[prev], np.int64)

    @cached_property
    def edge_halfedges(self) -> np.ndarray:
        """(E, 2) array of glued half-edge pairs, smaller index first."""
        h = np.arange(3 * self.n_triangles)
        first = h[h < self.twin]
        return _readonly(np.stack([first, self.twin[first]], axis=1), np.int64)

    @cached_property
    def edge_of_halfedge(self) -> np.ndarray:
        e = np.empty(3 * self.n_triangles, dtype=np.int64)
        pairs = self.edge_halfedges
        e[pairs[:, 0]] = np.arange(len(pairs))
        e[pairs[:, 1]] = np.arange(len(pairs))
        return _readonly(e, np.int64)

    @cached_property
    def edge_vertices(self) -> np.ndarray:
        src, dst = self.half_edge_ends()
        h = self.edge_halfedges[:, 0]
        return _readonly(np.stack([src[h], dst[h]], axis=1), np.int64)

    @cached_property
    def first_corner(self) -> np.ndarray:
        fc = np.full(self.n_vertices, -1, dtype=np.int64)
        cv = self.corner_vertex
        # reversed so the smallest corner index wins
        fc[cv[::-1]] = np.arange(len(cv))[::-1]
        return _readonly(fc, np.int64)

    @cached_property
    def degrees(self) -> np.ndarray:
        return _readonly(np.bincount(self.corner_vertex, minlength=self.n_vertices), np.int64)

    @property
    def is_family(self) -> bool:
        return self.m is not None and self.block is not None and self.cell is not None

    def with_colors(self, colors) -> "Triangulation":
        return Triangulation(self.tris, self.n_vertices, self.twin, colors,
                             self.block, self.cell, self.m)

    def same_structure(self, other: "Triangulation") -> bool:
        def eq(a, b):
            if a is None or b is None:
                return a is None and b is None
            return np.array_equal(a, b)
        return (self.n_vertices == other.n_vertices and self.m == other.m
                and np.array_equal(self.tris, other.tris)
                and np.array_equal(self.twin, other.twin)
                and eq(self.colors, other.colors) and eq(self.block, other.block)
                and eq(self.cell, other.cell))


def _derive_twins(tris: np.ndarray) -> np.ndarray:
    F = len(tris)
    src = tris.ravel()
    dst = tris[:, [1, 2, 0]].ravel()
    n = int(max(src.max(), dst.max())) + 1 if F else 1
    key = src * n + dst
    order = np.argsort(key, kind="stable")
    sk = key[order]
    dup = np.flatnonzero(sk[1:] == sk[:-1])
    if len(dup):
        h = int(order[dup[0]])
        raise TriangulationError(
            f"oriented edge {int(src[h])}->{int(dst[h])} occurs twice; "
            "pass explicit gluings for triangulations with multi-edges")
    want = dst * n + src
    pos = np.searchsorted(sk, want)
    pos = np.clip(pos, 0, len(sk) - 1)
    found = sk[pos] == want
    if not found.all():
        h = int(np.flatnonzero(~found)[0])
        raise TriangulationError(
            f"triangle {h // 3} side {h % 3} ({int(src[h])}->{int(dst[h])}) has no partner side")
    return order[pos]


def vertex_star(T: Triangulation, v: int) -> list:
    """Corners ``(t, i)`` around vertex v in counterclockwise order."""
    if not 0 <= v < T.n_vertices:
        raise KeyError(f"unknown vertex {v}")
    start = int(T.first_corner[v])
    nxt = T.corner_next
    out = []
    c = start
    while True:
        out.append((c // 3, c % 3))
        c = int(nxt[c])
        if c == start:
            break
    return out


# --------------------------------------------------------------------------
# concrete triangulations

_PHI = (1 + 5 ** 0.5) / 2


def _ico_coords():
    lat = np.arctan(0.5)
    pts = [(0.0, 0.0, 1.0)]
    for k in range(5):
        a = 2 * np.pi * k / 5
        pts.append((np.cos(lat) * np.cos(a), np.cos(lat) * np.sin(a), np.sin(lat)))
    for k in range(5):
        a = 2 * np.pi * k / 5 + np.pi / 5
        pts.append((np.cos(lat) * np.cos(a), np.cos(lat) * np.sin(a), -np.sin(lat)))
    pts.append((0.0, 0.0, -1.0))
    return np.array(pts)


ICOSAHEDRON_COORDS = _ico_coords()


def _ico_faces():
    faces = []
    for k in range(5):
        u, u1 = 1 + k, 1 + (k + 1) % 5
        l, l1 = 6 + k, 6 + (k + 1) % 5
        faces.append((0, u, u1))
        faces.append((u, l, u1))
        faces.append((u1, l, l1))
        faces.append((11, l1, l))
    return faces


def icosahedron() -> Triangulation:
    """The 12-punctured sphere triangulated as an icosahedron (m = 0)."""
    return Triangulation(np.array(_ico_faces()), 12, m=0)


def thrice_punctured_sphere() -> Triangulation:
    """Two triangles glued along all three sides."""
    return Triangulation(np.array([[0, 1, 2], [0, 2, 1]]), 3)


def _lattice_cells(n: int):
    """Up and down cells of the n-subdivided triangle as (kind, i, j, k) rows."""
    up = [(UP, i, j, n - 1 - i - j) for i in range(n) for j in range(n - i)]
    down = [(DOWN, i, j, n - 2 - i - j) for i in range(n - 1) for j in range(n - 1 - i)]
    return np.array(up + down, dtype=np.int64)


def _cell_corners(cells: np.ndarray):
    """Lattice coordinates of the three corners of each cell, shape (N, 3, 3)."""
    kind, ijk = cells[:, 0], cells[:, 1:]
    e = np.eye(3, dtype=np.int64)
    up = np.stack([ijk + e[0], ijk + e[1], ijk + e[2]], axis=1)
    down = np.stack([ijk + e[0] + e[1], ijk + e[1] + e[2], ijk + e[0] + e[2]], axis=1)
    return np.where((kind == UP)[:, None, None], up, down)


def subdivide(T0: Triangulation, m: int) -> Triangulation:
    """Cut each icosahedral face into (2m)^2 triangles (see module docstring)."""
    if int(m) != m or m < 0:
        raise ValueError(f"m must be a non-negative integer, got {m!r}")
    m = int(m)
    if T0.m != 0 or T0.n_triangles != 20:
        raise ValueError("subdivide expects the base icosahedron")
    if m == 0:
        return T0
    n = 2 * m
    faces = T0.tris
    V0 = T0.n_vertices
    next_id = V0

    # ids of interior points of each icosahedral edge, ordered from the lower vertex
    edge_ids = {}
    for a, b in T0.edge_vertices:
        key = (min(a, b), max(a, b))
        edge_ids[key] = np.arange(next_id, next_id + n - 1)
        next_id += n - 1

    def edge_point(a, b, s):
        # point s steps from a towards b, 0 < s < n
        if a < b:
            return edge_ids[(a, b)][s - 1]
        return edge_ids[(b, a)][n - s - 1]

    cells = _lattice_cells(n)
    corners = _cell_corners(cells)                       # (n^2, 3, 3)
    tris, block, cell_rows = [], [], []
    for f, (A, B, C) in enumerate(faces):
        grid = np.full((n + 1, n + 1), -1, dtype=np.int64)   # grid[i, j], k = n-i-j
        grid[n, 0], grid[0, n], grid[0, 0] = A, B, C
        for s in range(1, n):
            grid[n - s, s] = edge_point(A, B, s)           # k = 0
            grid[0, n - s] = edge_point(B, C, s)           # i = 0, k = s
            grid[s, 0] = edge_point(C, A, s)               # j = 0, i = s
        inner = [(i, j) for i in range(1, n) for j in range(1, n - i)]
        for i, j in inner:
            grid[i, j] = next_id
            next_id += 1
        tris.append(grid[corners[:, :, 0], corners[:, :, 1]])
        block.append(np.full(len(cells), f))
        cell_rows.append(cells)
    return Triangulation(np.concatenate(tris), next_id, block=np.concatenate(block),
                         cell=np.concatenate(cell_rows), m=m)


def family(m: int) -> Triangulation:
    """Colored T_m (the bare icosahedron for m = 0)."""
    T = subdivide(icosahedron(), m)
    return color_faces(T) if m >= 1 else T


def color_faces(T: Triangulation) -> Triangulation:
    if not T.is_family or T.m < 1:
        raise ValueError("color_faces needs a subdivided family triangulation (m >= 1)")
    gray = T.cell[:, 1:].max(axis=1) <= T.m - 1
    colors = np.where(gray, int(Color.GRAY), int(Color.WHITE))
    return T.with_colors(colors)


def vertex_lattice(T: Triangulation) -> np.ndarray:
    """(V, 4) rows ``(block, i, j, k)`` locating each vertex in one incident face."""
    if not T.is_family:
        raise ValueError("lattice coordinates exist only for family triangulations")
    corners = _cell_corners(T.cell).reshape(-1, 3)
    fc = T.first_corner
    out = np.empty((T.n_vertices, 4), dtype=np.int64)
    out[:, 0] = T.block[fc // 3]
    out[:, 1:] = corners[fc]
    return out


def classify_vertices(T: Triangulation) -> np.ndarray:
    """VertexType code of every vertex, from colors and block ids.

    Non-family or uncolored input gives all ``UNCLASSIFIED``.
    """
    V = T.n_vertices
    out = np.zeros(V, dtype=np.int64)
    if not T.is_family or T.colors is None or T.m < 1:
        return out
    cv = T.corner_vertex
    gray_corner = np.repeat(T.colors == Color.GRAY, 3)
    n_gray = np.bincount(cv, weights=gray_corner, minlength=V).astype(np.int64)
    deg = T.degrees
    blk = np.repeat(T.block, 3)
    bmin = np.full(V, np.iinfo(np.int64).max)
    bmax = np.full(V, -1)
    np.minimum.at(bmin, cv, blk)
    np.maximum.at(bmax, cv, blk)
    one_block = bmin == bmax
    six = deg == 6
    out[deg == 5] = VertexType.CORNER
    out[six & (n_gray == 0) & ~one_block] = VertexType.WHITE_EDGE
    out[six & (n_gray == 0) & one_block] = VertexType.WHITE_INTERIOR
    out[six & (n_gray == 2)] = VertexType.GRAY_CORNER
    out[six & (n_gray == 3)] = VertexType.GRAY_EDGE
    out[six & (n_gray == 6)] = VertexType.GRAY_INTERIOR
    return out

import time
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horopack.surface import (Color, Triangulation, TriangulationError, VertexType,
                              classify_vertices, family, icosahedron, thrice_punctured_sphere,
                              vertex_star)

from conftest import family_surface


def expected_type_counts(m):
    # counted on the icosahedron: 12 corners, 30 edge midpoints, 2m-2 further
    # points on each edge, 3(m-1) boundary points and (m-1)(m-2)/2 interior
    # points of each of the 20 central gray triangles; the rest is white interior
    V = 40 * m * m + 2
    gray_edge = 20 * 3 * (m - 1)
    gray_interior = 20 * (m - 1) * (m - 2) // 2
    white_edge = 30 * (2 * m - 2)
    return {
        VertexType.CORNER: 12,
        VertexType.GRAY_CORNER: 30,
        VertexType.WHITE_EDGE: white_edge,
        VertexType.GRAY_EDGE: gray_edge,
        VertexType.GRAY_INTERIOR: gray_interior,
        VertexType.WHITE_INTERIOR: V - 42 - white_edge - gray_edge - gray_interior,
    }


def test_icosahedron_counts():
    T = icosahedron()
    assert (T.n_triangles, T.n_vertices, T.n_edges) == (20, 12, 30)
    assert set(T.degrees.tolist()) == {5}


@pytest.mark.parametrize("m", range(1, 7))
def test_family_counts(m):
    T = family_surface(m)
    assert T.n_triangles == 80 * m * m
    assert T.n_vertices == 40 * m * m + 2
    assert T.n_edges == 120 * m * m
    assert T.euler_characteristic() == 2
    hist = Counter(T.degrees.tolist())
    assert hist == {5: 12, 6: T.n_vertices - 12}


def test_family_counts_are_fast():
    t0 = time.perf_counter()
    for m in range(1, 7):
        family(m)
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_twins_reverse_sides(m):
    T = family_surface(m)
    h = np.arange(3 * T.n_triangles)
    tw = T.twin
    assert np.array_equal(tw[tw], h)
    assert not np.any(tw == h)
    src = T.tris.ravel()
    dst = T.tris[:, [1, 2, 0]].ravel()
    assert np.array_equal(src[tw], dst)
    assert np.array_equal(dst[tw], src)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_vertex_types(m):
    T = family_surface(m)
    counts = Counter(classify_vertices(T).tolist())
    want = {k: v for k, v in expected_type_counts(m).items() if v}
    assert counts == want


@pytest.mark.parametrize("m", [1, 2, 4])
def test_gray_region_size(m):
    T = family_surface(m)
    # one m^2-triangle gray region per icosahedral face
    assert int(np.sum(T.colors == Color.GRAY)) == 20 * m * m
    assert np.bincount(T.block[T.colors == Color.GRAY]).tolist() == [m * m] * 20


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.data())
def test_star_walks_once_around(m, data):
    T = family_surface(m)
    v = data.draw(st.integers(0, T.n_vertices - 1))
    star = vertex_star(T, v)
    assert len(star) == T.degrees[v]
    assert all(T.tris[t, i] == v for t, i in star)
    assert len(set(star)) == len(star)


def test_thrice_punctured_sphere():
    T = thrice_punctured_sphere()
    assert (T.n_triangles, T.n_vertices, T.n_edges) == (2, 3, 3)
    # V - E + F counts the filled-in punctures, so the sphere gives 2
    assert T.euler_characteristic() == 2
    assert T.degrees.tolist() == [2, 2, 2]


def test_unglued_side_rejected():
    with pytest.raises(TriangulationError):
        Triangulation(np.array([[0, 1, 2]]), 3)


def test_bad_vertex_index_rejected():
    with pytest.raises(TriangulationError):
        Triangulation(np.array([[0, 1, 5], [0, 5, 1]]), 3)

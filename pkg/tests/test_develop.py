import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horopack.decor import (CornerDecoration, DecorationParams, edge_to_corner, paper_decoration,
                            uniform_decoration)
from horopack.develop import (NotGeometricError, block_center, corner_labels, cusp_holonomy, develop,
                              embedded_cusp_check, fit_window, render_svg)
from horopack.figure import Window
from horopack.hyp2 import cross_ratio, horoball_distance
from horopack.surface import icosahedron, thrice_punctured_sphere

from conftest import family_surface, paper_surface


def tree_cross_ratios(dev):
    """Cross ratio of the quadrilateral across each spanning-tree edge, keyed by edge."""
    T = dev.triangulation
    out = {}
    for hp, hc in dev.tree_edges():
        t, i = divmod(int(hp), 3)
        t2, j = divmod(int(hc), 3)
        g1, g2 = dev.triangle(t), dev.triangle(t2)
        p, q = g1[i], g1[(i + 1) % 3]
        r, s = g1[(i + 2) % 3], g2[(j + 2) % 3]
        out[int(T.edge_of_halfedge[hp])] = cross_ratio(p, q, r, s)
    return out


def pair_decoration(a, b, c):
    # the two triangles of the thrice-punctured sphere with equal areas at
    # each cusp satisfy the gluing condition on every edge
    return CornerDecoration(np.array([[a, b, c], [a, c, b]]))


# --------------------------------------------------------------------------
# development

def test_icosahedron_uniform_edge_lengths():
    T = icosahedron()
    dev = develop(T, uniform_decoration(T))
    assert dev.edge_length_errors().max() < 1e-12
    assert len(dev.order) == 20


@pytest.mark.parametrize("m", [1])
def test_family_edge_lengths(m):
    T, dec, _ = paper_surface(m)
    assert develop(T, dec).edge_length_errors().max() < 1e-9


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 2.0), st.floats(0.01, 2.0), st.floats(0.01, 2.0))
def test_developed_distance_is_minus_log_ab(a, b, c):
    T = thrice_punctured_sphere()
    dev = develop(T, pair_decoration(a, b, c), require_geometric=False)
    # half-edge 0 joins the corners of area a and b, and so on
    want = {0: -math.log(a * b), 1: -math.log(b * c), 2: -math.log(c * a)}
    balls = dev.horoballs(1)
    got = horoball_distance(balls[0], balls[2])      # corners a and b of the second triangle
    assert got == pytest.approx(want[0], abs=1e-12)
    assert dev.edge_length_errors().max() < 1e-12


def test_development_independent_of_tree():
    # neighbours glued along both spanning trees must form the same quadrilateral
    T, dec, _ = paper_surface(1)
    cr0 = tree_cross_ratios(develop(T, dec, base=0))
    cr1 = tree_cross_ratios(develop(T, dec, base=57, base_corner=2))
    common = sorted(set(cr0) & set(cr1))
    assert len(common) > 40
    for e in common:
        assert cr0[e] == pytest.approx(cr1[e], rel=1e-8)


def test_triangles_positively_oriented():
    T, dec, _ = paper_surface(1)
    dev = develop(T, dec)
    assert all(dev.triangle(t).is_positive() for t in range(T.n_triangles))


def test_develop_refuses_non_geometric():
    T = icosahedron()
    with pytest.raises(NotGeometricError):
        develop(T, uniform_decoration(T, 1.5))


# --------------------------------------------------------------------------
# holonomy

@pytest.mark.parametrize("m", [1, 2, 3])
def test_completeness_for_random_admissible_c(m):
    rng = np.random.default_rng(m)
    T = family_surface(m)
    for _ in range(5):
        params = DecorationParams.of(rng.uniform(1.0, 2.0, m).tolist())
        dec = paper_decoration(T, params)
        worst = max(abs(cusp_holonomy(T, v, dec).scaling - 1.0) for v in range(T.n_vertices))
        assert worst < 1e-9


@pytest.mark.parametrize("m", [1, 2, 3])
def test_side_factor_moves_only_incident_cusps(m):
    T, dec, _ = paper_surface(m)
    t, i = 5, 1
    bad = dec.with_side_factor(t, i, math.e)
    ends = {int(T.tris[t, i]), int(T.tris[t, (i + 1) % 3])}
    scal = np.array([cusp_holonomy(T, v, bad).scaling for v in range(T.n_vertices)])
    others = np.delete(scal, sorted(ends))
    assert np.abs(others - 1.0).max() < 1e-9
    got = sorted(scal[sorted(ends)])
    assert got[0] == pytest.approx(1 / math.e, abs=1e-6)
    assert got[1] == pytest.approx(math.e, abs=1e-6)


def test_icosahedron_holonomy_is_translation_by_five():
    T = icosahedron()
    dev = develop(T, uniform_decoration(T))
    for v in range(12):
        hol = cusp_holonomy(dev, v)
        assert hol.is_parabolic()
        assert hol.translation_length == pytest.approx(5.0, abs=1e-12)
        # the developed matrix is parabolic too: trace 2 up to sign
        assert abs(abs(hol.matrix.trace()) - 2.0) < 1e-8


# --------------------------------------------------------------------------
# embedding

def test_uniform_icosahedron_embedded_with_tangencies():
    T = icosahedron()
    rep = embedded_cusp_check(T, 1, dec=uniform_decoration(T))
    assert rep.ok
    assert rep.n_tangent > 0
    assert abs(rep.min_distance) < 1e-9


@pytest.mark.parametrize("m", [1, 2, 3])
def test_family_embedded(m):
    T, dec, _ = paper_surface(m)
    assert embedded_cusp_check(T, 2, dec=dec).ok


def test_negative_edge_overlaps_exactly_there():
    T = icosahedron()
    d = np.zeros(30)
    d[4] = -0.3
    rep = embedded_cusp_check(T, 1, dec=edge_to_corner(T, d))
    assert not rep.ok
    assert rep.min_distance == pytest.approx(-0.3, abs=1e-12)
    ends = set(T.edge_vertices[4].tolist())
    assert all({a, b} == ends for _, a, b, _ in rep.overlaps)


# --------------------------------------------------------------------------
# figures

def test_corner_labels():
    T, dec, params = paper_surface(2)
    labels = corner_labels(dec, params)
    assert set(labels.ravel()) <= {"1", "c1", "c2", "1/c1", "1/c2", "1/c1^2"}
    assert "1/c1^2" in labels


def test_render_block_is_valid_svg():
    T, dec, params = paper_surface(1)
    dev = develop(T, dec)
    tris = np.flatnonzero(T.block == 0).tolist()
    win = fit_window(dev, tris)
    text = render_svg(dev, win, triangles=tris, labels=corner_labels(dec, params))
    root = ET.fromstring(text.split("\n", 2)[2])
    ns = "{http://www.w3.org/2000/svg}"
    assert root.tag == ns + "svg"
    texts = [e.text for e in root.iter(ns + "text")]
    assert {"c1", "1/c1"} <= set(texts)
    assert render_svg(dev, win, triangles=tris, labels=corner_labels(dec, params)) == text


def test_window_skips_far_geodesics():
    T = icosahedron()
    dev = develop(T, uniform_decoration(T))
    tiny = render_svg(dev, Window(1000.0, 1001.0), draw_horoballs=False)
    assert "<path" not in tiny


def test_edge_match_near_roundoff_pole():
    # these frame coordinates put c*p + d at 1e-16 instead of 0; matching the
    # horoball at p must not read the resulting huge finite point
    from horopack.develop import _edge_match, standard_frame
    from horopack.hyp2 import mobius_apply
    pts, balls = standard_frame([1.15200909, 0.86804871, 0.86804871], 2)
    pts2, balls2 = standard_frame([0.8673711299565862, 1.15290902, 0.8673711299565862], 0)
    G = _edge_match(pts[0], pts[1], balls[0], balls[1], pts2[2], pts2[1], balls2[2], balls2[1])
    assert mobius_apply(G, pts2[2]) == pytest.approx(pts[0], abs=1e-12)
    assert mobius_apply(G, pts2[1]) == pytest.approx(pts[1], abs=1e-12)
    assert abs(G.a) < 10 and abs(G.d) < 10


def test_block_center_is_the_gray_cell_at_m1():
    T, _, _ = paper_surface(1)
    t = block_center(T, 0)
    assert T.block[t] == 0
    assert T.cell[t].tolist() == [1, 0, 0, 0]       # the lone down cell


def test_block_render_at_large_m():
    # developing from the block centre keeps every block triangle resolvable
    T, dec, _ = paper_surface(11)
    t0 = block_center(T, 0)
    dev = develop(T, dec, base=t0)
    for t in np.flatnonzero(T.block == 0):
        dev.triangle(int(t))

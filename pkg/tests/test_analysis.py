import math
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horopack.analysis import (LENGTH_RECORDS, CuspBasis, Slope, dense_packing, farey_points,
                               lattice_norm, six_theorem_gate, slope_length,
                               transverse_disk_obstruction)
from horopack.hyp2 import horoball_distance

sys.path.insert(0, str(Path(__file__).parent / "oracles"))
from obstruction_grid import max_disk_radius  # noqa: E402


# --------------------------------------------------------------------------
# slopes

def test_length_five_slope():
    # tau1 = 2 - i, tau2 = 1 + 2i, slope (2, 1): 2(2 - i) + (1 + 2i) = 5
    B = CuspBasis(2 - 1j, 1 + 2j)
    assert abs(slope_length(B, Slope(2, 1)) - 5.0) < 1e-12


@settings(max_examples=100)
@given(st.integers(-50, 50), st.integers(-50, 50),
       st.floats(-3, 3), st.floats(0.2, 3), st.floats(-3, 3))
def test_slope_length_matches_complex_modulus(p, q, x1, y2, x2):
    if (p, q) == (0, 0) or math.gcd(p, q) != 1:
        return
    B = CuspBasis(1.0 + 0j, complex(x2, y2))
    z = p * complex(1.0, 0.0) + q * complex(x2, y2)
    assert slope_length(B, (p, q)) == pytest.approx(math.hypot(z.real, z.imag), rel=1e-12)
    assert slope_length(B, (-p, -q)) == slope_length(B, (p, q))


def test_non_primitive_slope_rejected():
    with pytest.raises(ValueError):
        Slope(2, 4)
    with pytest.raises(ValueError):
        Slope(0, 0)
    assert lattice_norm(CuspBasis(1, 1j), 2, 4) == pytest.approx(math.sqrt(20))


def test_dependent_basis_rejected():
    with pytest.raises(ValueError):
        CuspBasis(1 + 1j, 2 + 2j)


# --------------------------------------------------------------------------
# the gate

def positions(report, i=0):
    return {(r["type"], r["cusps"]): (r["position"], r["exceptional_known"])
            for r in report["lengths"][i]["records"]}


def test_gate_at_ten_over_root_three():
    rep = six_theorem_gate([10 / math.sqrt(3)])
    pos = positions(rep)
    # the reducible multi-cusp record is approached, never attained
    assert pos[("reducible", "multi")] == ("at", False)
    assert pos[("toroidal", "one")] == ("below", True)
    assert pos[("small_sfs", "one")] == ("above", False)
    assert rep["verdict"] == "exceptional-not-excluded"


def test_gate_at_5_318():
    pos = positions(six_theorem_gate([5.318]))
    assert pos[("finite", "one")][0] == "above"
    assert pos[("finite", "multi")][0] == "above"
    assert pos[("reducible", "one")][0] == "above"
    assert pos[("reducible", "multi")] == ("below", True)
    assert pos[("small_sfs", "one")][0] == "above"
    assert pos[("small_sfs", "multi")][0] == "above"
    assert pos[("toroidal", "multi")] == ("below", True)


def test_gate_at_six():
    rep = six_theorem_gate([6.0])
    pos = positions(rep)
    assert pos[("toroidal", "one")] == ("at", True)
    assert all(p == "above" for (k, _), (p, _) in pos.items() if k != "toroidal")
    assert rep["lengths"][0]["hyperbolic_forced"] is False
    assert six_theorem_gate([6.0 + 1e-6])["verdict"] == "hyperbolic-forced"


def test_records_sorted_by_type():
    kinds = [r.kind for r in LENGTH_RECORDS]
    assert kinds == sorted(kinds, key=["finite", "reducible", "small_sfs", "toroidal"].index)


def test_gate_rejects_nonpositive():
    with pytest.raises(ValueError):
        six_theorem_gate([0.0])


# --------------------------------------------------------------------------
# Farey packing

@pytest.mark.parametrize("depth", range(6))
def test_farey_neighbours_unimodular(depth):
    pts = farey_points(depth)
    assert len(pts) == 2 ** depth + 1
    for a, b in zip(pts, pts[1:]):
        assert b.numerator * a.denominator - a.numerator * b.denominator == 1


def test_farey_neighbours_tangent():
    balls = dense_packing(4)
    finite = sorted(balls[1:], key=lambda H: H.center)
    for H1, H2 in zip(finite, finite[1:]):
        assert abs(horoball_distance(H1, H2)) < 1e-12
    # the integer balls touch the line at height 1
    for H in finite:
        if H.size == 1.0:
            assert abs(horoball_distance(balls[0], H)) < 1e-12


# --------------------------------------------------------------------------
# transverse disk probe

@pytest.mark.parametrize("depth", range(0, 6))
def test_probe_matches_brute_force(depth):
    h = 1e-2
    oracle, _ = max_disk_radius(depth, h)
    got = transverse_disk_obstruction(depth, resolution=h).max_radius
    assert got == pytest.approx(oracle, abs=1e-9)


def test_depth_zero_bound():
    # one ball at each integer and the line y = 1: the best disk at depth 0
    # has radius at most 1/8 for any resolution
    rep = transverse_disk_obstruction(0, resolution=1e-3)
    assert rep.max_radius <= 0.125 + 1e-12
    assert rep.max_radius > 0.12


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6), st.sampled_from([1e-2, 5e-3, 4e-3]))
def test_probe_monotone_in_depth(d1, d2, h):
    lo, hi = sorted((d1, d2))
    a = transverse_disk_obstruction(lo, resolution=h).max_radius
    b = transverse_disk_obstruction(hi, resolution=h).max_radius
    assert b <= a + 1e-15


def test_probe_empty_at_fixed_threshold():
    rep = transverse_disk_obstruction(6, resolution=2e-3, tolerance=1e-2)
    assert rep.empty
    assert "no feasible candidate" in rep.statement()
    assert "wall_clock_seconds" not in rep.to_dict(timing=False)


def test_probe_not_empty_at_depth_four():
    # a shallower packing still admits disks above the tolerance
    assert not transverse_disk_obstruction(4, resolution=2e-3, tolerance=1e-2).empty

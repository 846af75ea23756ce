import io
import math
import time

import numpy as np
import pytest

from horopack.decor import check_geometric, edge_to_corner, uniform_decoration
from horopack.optimize import (OptimizeConfig, OptimizeError, corner_sum_excess, density,
                               maximize_min_cusp_area)
from horopack.surface import icosahedron, thrice_punctured_sphere

from conftest import paper_surface


def grid_oracle_thrice_punctured(step=0.01):
    """Brute-force max of the smallest cusp area over edge lengths in [0, 1]^3.

    Edges 0, 1, 2 join cusps (0,1), (1,2), (2,0).  Each cusp has one corner
    in each triangle, both of area exp((d_opposite - d_adjacent1 - d_adjacent2)/2).
    Negative lengths break the pair bound, so the box starts at 0.
    """
    g = np.arange(0.0, 1.0 + step / 2, step)
    d01, d12, d20 = np.meshgrid(g, g, g, indexing="ij")
    cusp0 = 2 * np.exp((d12 - d01 - d20) / 2)
    cusp1 = 2 * np.exp((d20 - d01 - d12) / 2)
    cusp2 = 2 * np.exp((d01 - d12 - d20) / 2)
    corners_ok = np.maximum(np.maximum(cusp0, cusp1), cusp2) / 2 <= 2.0
    worst = np.where(corners_ok, np.minimum(np.minimum(cusp0, cusp1), cusp2), -np.inf)
    k = np.unravel_index(np.argmax(worst), worst.shape)
    return float(worst[k]), (g[k[0]], g[k[1]], g[k[2]])


def random_start(T, seed):
    rng = np.random.default_rng(seed)
    return edge_to_corner(T, rng.uniform(0.0, 1.0, T.n_edges))


def test_grid_oracle_finds_two():
    best, arg = grid_oracle_thrice_punctured()
    assert best == pytest.approx(2.0, abs=1e-12)
    assert arg == (0.0, 0.0, 0.0)


def test_thrice_punctured_optimum_matches_grid():
    T = thrice_punctured_sphere()
    oracle, _ = grid_oracle_thrice_punctured()
    t0 = time.perf_counter()
    res = maximize_min_cusp_area(T, OptimizeConfig(initial=random_start(T, 1)))
    assert time.perf_counter() - t0 < 60
    assert abs(res.min_area - oracle) < 1e-3
    assert abs(res.min_area - 2.0) < 1e-3
    assert res.report.ok


def test_icosahedron_optimum_is_five():
    # the packing density bound 3/pi caps the total at 3F = 60 over 12 cusps
    T = icosahedron()
    t0 = time.perf_counter()
    res = maximize_min_cusp_area(T, OptimizeConfig(initial=random_start(T, 2)))
    assert time.perf_counter() - t0 < 60
    assert abs(res.min_area - 5.0) < 1e-3
    assert res.min_area <= 5.0 + 1e-9
    assert res.report.ok


def test_trace_best_is_monotone():
    T = icosahedron()
    res = maximize_min_cusp_area(T, OptimizeConfig(initial=random_start(T, 3), restarts=2))
    best = [r.best for r in res.trace]
    assert all(b2 >= b1 for b1, b2 in zip(best, best[1:]))
    assert best[-1] == pytest.approx(res.min_area, abs=1e-9)
    buf = io.StringIO()
    res.write_trace_csv(buf)
    assert buf.getvalue().splitlines()[0] == "iteration,objective,best,temperature,penalty,restart"


def test_same_seed_same_result():
    T = icosahedron()
    cfg = OptimizeConfig(initial=random_start(T, 4), restarts=3, seed=7)
    r1 = maximize_min_cusp_area(T, cfg)
    r2 = maximize_min_cusp_area(T, cfg)
    assert np.array_equal(r1.lengths, r2.lengths)
    assert [r.objective for r in r1.trace] == [r.objective for r in r2.trace]


def test_result_is_geometric_from_family_start():
    T, dec, _ = paper_surface(1)
    res = maximize_min_cusp_area(T, OptimizeConfig(initial=dec, restarts=1))
    assert check_geometric(T, res.decoration).ok
    assert res.min_area >= 5.0


def test_inconsistent_start_rejected():
    T = icosahedron()
    bad = uniform_decoration(T).with_side_factor(0, 0, 1.5)
    with pytest.raises(OptimizeError):
        maximize_min_cusp_area(T, OptimizeConfig(initial=bad))


def test_config_round_trip():
    cfg = OptimizeConfig(restarts=2, seed=3, temperatures=(1.0, 0.1))
    assert OptimizeConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ValueError):
        OptimizeConfig.from_dict({"bogus": 1})


@pytest.mark.parametrize("T", [icosahedron(), thrice_punctured_sphere()])
def test_density_of_unit_packing(T):
    assert abs(density(T, uniform_decoration(T)) - 3 / math.pi) < 1e-12


def test_corner_sum_excess():
    T = icosahedron()
    assert corner_sum_excess(uniform_decoration(T)) == []
    assert [t for t, _ in corner_sum_excess(uniform_decoration(T, 1.2))] == list(range(20))

"""Search for decorations with large minimal cusp area.

The search runs in edge-length coordinates, where every corner area is
``exp`` of a linear form and the edge-matching condition holds identically.
Corner areas are capped at 2 through a hinge penalty, and nonnegative edge
lengths are imposed as box bounds.  A soft minimum with falling temperature
is followed by an epigraph polish and a hard-minimum coordinate ascent.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize
from scipy.special import logsumexp, softmax

from .decor import (MAX_CORNER_AREA, TARGET_AREA, ConditionCError, CornerDecoration,
                    GeometricityReport, check_geometric, corner_to_edge, edge_to_corner,
                    uniform_decoration)
from .surface import Triangulation

__all__ = [
    "OptimizeError",
    "OptimizeConfig",
    "TraceRow",
    "OptimizeResult",
    "maximize_min_cusp_area",
    "density",
    "corner_sum_excess",
]

LOG_MAX = math.log(MAX_CORNER_AREA)


class OptimizeError(ValueError):
    pass


@dataclass(frozen=True)
class OptimizeConfig:
    """Settings for :func:`maximize_min_cusp_area`.

    ``initial`` defaults to all corners equal to 1.  Restart 0 starts there
    exactly; later restarts add Gaussian noise of size ``perturbation`` to the
    edge lengths.
    """

    initial: Optional[CornerDecoration] = None
    area_bound: bool = True
    pair_bound: bool = True
    temperatures: tuple = (1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001)
    inner_iters: int = 200
    restarts: int = 3
    seed: int = 0
    perturbation: float = 0.1
    penalty: float = 100.0
    tol: float = 1e-10
    max_iter: int = 5000
    polish: str = "auto"

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if not (self.tol > 0 and self.penalty > 0 and self.perturbation >= 0):
            raise ValueError("tolerances and penalty weight must be positive")
        temps = tuple(float(x) for x in self.temperatures)
        if not temps or any(t <= 0 for t in temps):
            raise ValueError("temperatures must be positive")
        object.__setattr__(self, "temperatures", temps)
        if self.inner_iters < 1 or self.max_iter < 1:
            raise ValueError("iteration caps must be positive")
        if self.polish not in ("auto", "slsqp", "coordinate", "none"):
            raise ValueError(f"unknown polish mode {self.polish!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "OptimizeConfig":
        known = {f for f in cls.__dataclass_fields__ if f != "initial"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown optimizer settings: {sorted(extra)}")
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("initial")
        d["temperatures"] = list(self.temperatures)
        return d


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    objective: float
    best: float
    temperature: float
    penalty: float
    restart: int


@dataclass
class OptimizeResult:
    decoration: CornerDecoration
    lengths: np.ndarray
    min_area: float
    min_vertex: int
    restart: int
    trace: list
    report: GeometricityReport
    cusp_areas: np.ndarray = field(repr=False)

    @property
    def conjecture_margin(self) -> float:
        """min area - 10/sqrt(3); positive values would exceed the conjectured bound."""
        return self.min_area - TARGET_AREA

    def write_trace_csv(self, path_or_file):
        cols = ["iteration", "objective", "best", "temperature", "penalty", "restart"]
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for r in self.trace:
                w.writerow([r.iteration, repr(r.objective), repr(r.best),
                            repr(r.temperature), repr(r.penalty), r.restart])
        finally:
            if own:
                fh.close()

    def to_dict(self) -> dict:
        return {
            "min_area": self.min_area,
            "min_vertex": self.min_vertex,
            "restart": self.restart,
            "conjecture_margin": self.conjecture_margin,
            "geometric": self.report.ok,
            "iterations": len(self.trace),
            "cusp_areas": [float(x) for x in self.cusp_areas],
        }


class _Problem:
    """Corner log-areas ``K d`` and the corner-to-vertex incidence."""

    def __init__(self, T: Triangulation, cfg: OptimizeConfig):
        F, E, V = T.n_triangles, T.n_edges, T.n_vertices
        eoh = T.edge_of_halfedge.reshape(-1, 3)
        rows = np.repeat(np.arange(3 * F), 3)
        cols = np.empty((F, 3, 3), dtype=np.int64)
        vals = np.empty((F, 3, 3))
        for i in range(3):
            cols[:, i] = eoh[:, [(i + 1) % 3, i, (i + 2) % 3]]
            vals[:, i] = (0.5, -0.5, -0.5)
        self.K = sp.csr_matrix((vals.ravel(), (rows, cols.ravel())), shape=(3 * F, E))
        cv = T.corner_vertex
        self.P = sp.csr_matrix((np.ones(3 * F), (cv, np.arange(3 * F))), shape=(V, 3 * F))
        self.E, self.V = E, V
        self.cfg = cfg

    def corners(self, d):
        return np.exp(self.K @ d)

    def areas(self, d):
        return self.P @ self.corners(d)

    def penalty(self, d):
        if not self.cfg.area_bound:
            return 0.0, np.zeros_like(d)
        h = np.maximum(self.K @ d - LOG_MAX, 0.0)
        return float(h @ h), 2.0 * (self.K.T @ h)

    def soft_objective(self, d, tau):
        """Negative soft-min plus penalty, with gradient."""
        a = self.corners(d)
        A = self.P @ a
        smin = -tau * logsumexp(-A / tau)
        w = softmax(-A / tau)
        g_smin = self.K.T @ (a * (self.P.T @ w))
        pen, g_pen = self.penalty(d)
        mu = self.cfg.penalty
        return -smin + mu * pen, -g_smin + mu * g_pen

    def repair(self, d):
        """Nearest point obtained by clipping and a uniform shift.

        Adding s to every edge scales every corner by exp(-s/2), which keeps
        nonnegative lengths and can pull all corners under the cap.
        """
        d = np.asarray(d, dtype=float)
        if self.cfg.pair_bound:
            d = np.maximum(d, 0.0)
        if self.cfg.area_bound:
            top = float(np.max(self.K @ d))
            if top > LOG_MAX:
                d = d + 2.0 * (top - LOG_MAX)
        return d

    def feasible(self, d, tol=1e-12) -> bool:
        if self.cfg.pair_bound and np.any(d < -tol):
            return False
        if self.cfg.area_bound and np.any(self.K @ d > LOG_MAX + tol):
            return False
        return True

    def hard_min(self, d) -> float:
        return float(np.min(self.areas(d)))


def _polish_slsqp(prob: _Problem, d0, cfg):
    E = prob.E
    K = prob.K.toarray()
    P = prob.P.toarray()
    x0 = np.append(d0, prob.hard_min(d0))

    def cons_f(x):
        d, s = x[:E], x[E]
        a = np.exp(K @ d)
        out = [P @ a - s]
        if cfg.area_bound:
            out.append(LOG_MAX - K @ d)
        return np.concatenate(out)

    def cons_j(x):
        d = x[:E]
        a = np.exp(K @ d)
        top = np.hstack([P @ (a[:, None] * K), -np.ones((prob.V, 1))])
        if not cfg.area_bound:
            return top
        return np.vstack([top, np.hstack([-K, np.zeros((K.shape[0], 1))])])

    bounds = [(0.0, None) if cfg.pair_bound else (None, None)] * E + [(None, None)]
    res = minimize(lambda x: -x[E], x0, jac=lambda x: np.append(np.zeros(E), -1.0),
                   method="SLSQP", bounds=bounds,
                   constraints=[{"type": "ineq", "fun": cons_f, "jac": cons_j}],
                   options={"maxiter": 500, "ftol": 1e-14})
    return prob.repair(res.x[:E])


def _polish_coordinate(prob: _Problem, d, tol, max_sweeps=200):
    d = d.copy()
    best = prob.hard_min(d)
    step = 0.05
    sweeps = 0
    while step > tol and sweeps < max_sweeps:
        improved = False
        for e in range(prob.E):
            for sgn in (1.0, -1.0):
                trial = d.copy()
                trial[e] += sgn * step
                if not prob.feasible(trial):
                    continue
                val = prob.hard_min(trial)
                if val > best:
                    d, best, improved = trial, val, True
                    break
        sweeps += 1
        if not improved:
            step /= 2.0
    return d


def _run(prob: _Problem, d0, cfg: OptimizeConfig, restart: int, trace: list, budget: list):
    d = prob.repair(d0)
    best_d, best = d, prob.hard_min(d)
    trace.append(TraceRow(len(trace), best, best, math.nan, prob.penalty(d)[0], restart))

    def record(x, tau):
        nonlocal best_d, best
        if budget[0] <= 0:
            return
        budget[0] -= 1
        cand = prob.repair(x)
        val = prob.hard_min(cand)
        if val > best:
            best_d, best = cand, val
        trace.append(TraceRow(len(trace), val, best, tau, prob.penalty(x)[0], restart))

    bounds = [(0.0, None)] * prob.E if cfg.pair_bound else None
    for tau in cfg.temperatures:
        if budget[0] <= 0:
            break
        res = minimize(prob.soft_objective, d, args=(tau,), jac=True, method="L-BFGS-B",
                       bounds=bounds, callback=lambda x, tau=tau: record(x, tau),
                       options={"maxiter": cfg.inner_iters, "ftol": cfg.tol, "gtol": cfg.tol})
        d = res.x
        record(d, tau)
    mode = cfg.polish
    if mode == "auto":
        mode = "slsqp" if prob.E <= 600 else "coordinate"
    if mode == "slsqp":
        cand = _polish_slsqp(prob, best_d, cfg)
        if prob.feasible(cand) and prob.hard_min(cand) > best:
            best_d, best = cand, prob.hard_min(cand)
        trace.append(TraceRow(len(trace), best, best, 0.0, prob.penalty(best_d)[0], restart))
    if mode in ("slsqp", "coordinate"):
        cand = _polish_coordinate(prob, best_d, cfg.tol * 1e3)
        if prob.hard_min(cand) > best:
            best_d, best = cand, prob.hard_min(cand)
        trace.append(TraceRow(len(trace), best, best, 0.0, prob.penalty(best_d)[0], restart))
    return best_d, best


def maximize_min_cusp_area(T: Triangulation, cfg: Optional[OptimizeConfig] = None) -> OptimizeResult:
    """Best decoration found for the smallest cusp area of ``T``.

    The result is deterministic for a fixed configuration.  Restarts are
    merged by (min area, then lowest restart index).  The returned
    ``trace`` holds one row per ascent step; its ``best`` column never
    decreases.
    """
    cfg = cfg or OptimizeConfig()
    init = cfg.initial if cfg.initial is not None else uniform_decoration(T)
    init.check_total(T)
    try:
        d_init = corner_to_edge(T, init).lengths.copy()
    except ConditionCError as exc:
        raise OptimizeError(f"initial decoration is not consistent across edges: {exc}") from exc
    prob = _Problem(T, cfg)
    if not prob.feasible(prob.repair(d_init), tol=1e-9):
        raise OptimizeError("initial point could not be repaired into the feasible set")
    trace: list = []
    budget = [cfg.max_iter]
    best = None
    for k in range(cfg.restarts):
        if k == 0:
            start = d_init
        else:
            rng = np.random.default_rng([cfg.seed, k])
            start = d_init + cfg.perturbation * rng.standard_normal(prob.E)
        d, val = _run(prob, start, cfg, k, trace, budget)
        if best is None or val > best[1]:
            best = (d, val, k)
    # keep the trace's best column monotone across restarts
    running = -math.inf
    for i, r in enumerate(trace):
        running = max(running, r.best)
        trace[i] = TraceRow(i, r.objective, running, r.temperature, r.penalty, r.restart)
    d, _, k = best
    dec = edge_to_corner(T, d)
    areas = np.bincount(T.corner_vertex, weights=dec.areas.ravel(), minlength=T.n_vertices)
    v = int(np.argmin(areas))
    return OptimizeResult(dec, d, float(areas[v]), v, k, trace, check_geometric(T, dec), areas)


def density(T: Triangulation, dec: CornerDecoration) -> float:
    """Total cusp area over the hyperbolic area pi * F of the surface."""
    dec.check_total(T)
    return float(dec.areas.sum()) / (math.pi * T.n_triangles)


def corner_sum_excess(dec: CornerDecoration, bound: float = 3.0, tol: float = 1e-9) -> list:
    """Triangles whose corner areas sum to more than ``bound``.

    For a decoration passing the geometric checks no such triangle is known;
    any hit is a candidate counterexample worth reporting.
    """
    s = dec.areas.sum(axis=1)
    return [(int(t), float(s[t])) for t in np.flatnonzero(s > bound + tol)]

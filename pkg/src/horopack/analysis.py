"""Slope lengths on cusp tori, the length-6 gate, and the transverse disk probe."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .hyp2 import INF, Horoball

__all__ = [
    "CuspBasis",
    "Slope",
    "slope_length",
    "lattice_norm",
    "LengthRecord",
    "LENGTH_RECORDS",
    "six_theorem_gate",
    "farey_points",
    "dense_packing",
    "ObstructionReport",
    "transverse_disk_obstruction",
    "SIX_THEOREM_BOUND",
]

SIX_THEOREM_BOUND = 6.0
_AT_TOL = 1e-12


@dataclass(frozen=True)
class CuspBasis:
    """Translations of the (1,0) and (0,1) slopes on a horospherical torus."""

    tau1: complex
    tau2: complex

    def __post_init__(self):
        t1, t2 = complex(self.tau1), complex(self.tau2)
        object.__setattr__(self, "tau1", t1)
        object.__setattr__(self, "tau2", t2)
        # signed area of the fundamental parallelogram
        area = (t1.conjugate() * t2).imag
        if abs(area) <= 1e-14 * max(abs(t1), abs(t2), 1.0) ** 2:
            raise ValueError(f"translations {t1} and {t2} are linearly dependent")

    @property
    def area(self) -> float:
        return abs((self.tau1.conjugate() * self.tau2).imag)


@dataclass(frozen=True)
class Slope:
    p: int
    q: int

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if (p, q) != (self.p, self.q):
            raise ValueError("slope entries must be integers")
        if p == 0 and q == 0:
            raise ValueError("(0, 0) is not a slope")
        if math.gcd(p, q) != 1:
            raise ValueError(f"({p}, {q}) is not a primitive pair")

    @classmethod
    def parse(cls, text: str) -> "Slope":
        p, q = (int(v) for v in text.split(","))
        return cls(p, q)


def lattice_norm(basis: CuspBasis, p, q) -> float:
    """|p tau1 + q tau2| for any integer (or real) pair, primitive or not."""
    return abs(p * basis.tau1 + q * basis.tau2)


def slope_length(basis: CuspBasis, s: Slope) -> float:
    if not isinstance(s, Slope):
        s = Slope(*s)
    return lattice_norm(basis, s.p, s.q)


# --------------------------------------------------------------------------
# the gate

@dataclass(frozen=True)
class LengthRecord:
    """Longest observed slope of one exceptional type.

    ``asymptotic`` records are approached by a sequence of examples but not
    attained, so only strictly shorter lengths have been observed.
    """

    kind: str
    cusps: str
    length: float
    asymptotic: bool


LENGTH_RECORDS = (
    LengthRecord("finite", "one", 4.0, True),
    LengthRecord("finite", "multi", math.sqrt(21.0), False),
    LengthRecord("reducible", "one", 4.0, True),
    LengthRecord("reducible", "multi", 10.0 / math.sqrt(3.0), True),
    LengthRecord("small_sfs", "one", 5.0, True),
    LengthRecord("small_sfs", "multi", 5.0, False),
    LengthRecord("toroidal", "one", 6.0, False),
    LengthRecord("toroidal", "multi", 6.0, False),
)


def _position(L: float, rec: LengthRecord) -> str:
    if abs(L - rec.length) <= _AT_TOL * max(1.0, rec.length):
        return "at"
    return "below" if L < rec.length else "above"


def six_theorem_gate(lengths: Iterable[float]) -> dict:
    """Compare slope lengths with the length-6 bound and the observed records.

    A filling is forced hyperbolic when every slope is longer than 6.
    For each length and record the report gives the position (``below``,
    ``at`` or ``above``), the margin ``length - record`` and whether an
    exceptional filling of that type is known at that length or beyond.
    """
    Ls = [float(x) for x in lengths]
    if not Ls:
        raise ValueError("no lengths given")
    for x in Ls:
        if not (x > 0 and math.isfinite(x)):
            raise ValueError(f"slope length must be positive, got {x!r}")
    per_length = []
    for L in Ls:
        rows = []
        for rec in LENGTH_RECORDS:
            pos = _position(L, rec)
            known = pos == "below" or (pos == "at" and not rec.asymptotic)
            rows.append({
                "type": rec.kind, "cusps": rec.cusps, "record": rec.length,
                "asymptotic": rec.asymptotic, "position": pos,
                "margin": L - rec.length, "exceptional_known": known,
            })
        not_excluded = sorted({r["type"] for r in rows if r["position"] != "above"})
        per_length.append({
            "length": L,
            "hyperbolic_forced": L > SIX_THEOREM_BOUND,
            "types_not_excluded_by_records": not_excluded,
            "records": rows,
        })
    forced = all(p["hyperbolic_forced"] for p in per_length)
    return {
        "bound": SIX_THEOREM_BOUND,
        "verdict": "hyperbolic-forced" if forced else "exceptional-not-excluded",
        "lengths": per_length,
    }


# --------------------------------------------------------------------------
# the modular packing

def farey_points(depth: int, lo: int = 0, hi: int = 1) -> list:
    """Mediant refinement of the integers lo..hi, ``depth`` times."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    pts = [Fraction(k) for k in range(lo, hi + 1)]
    for _ in range(depth):
        out = [pts[0]]
        for a, b in zip(pts, pts[1:]):
            out.append(Fraction(a.numerator + b.numerator, a.denominator + b.denominator))
            out.append(b)
        pts = out
    return pts


def dense_packing(depth: int, window: tuple = (0, 1)) -> list:
    """The height-1 ball at infinity and the Farey balls over ``window``.

    The ball at p/q has diameter 1/q^2.  ``window`` is an integer range.
    """
    lo, hi = int(math.floor(window[0])), int(math.ceil(window[1]))
    balls = [Horoball(INF, 1.0)]
    for f in farey_points(depth, lo, hi):
        balls.append(Horoball(f.numerator / f.denominator, 1.0 / f.denominator ** 2))
    return balls


# --------------------------------------------------------------------------
# transverse disk probe

@dataclass
class ObstructionReport:
    """Result of the grid search at one depth and resolution.

    A candidate is a ball of radius r <= 1/2 tangent to the boundary at
    distance d from the vertical plane over the real line; it meets the plane
    in a disk of radius sqrt(r^2 - d^2) centred at height r.
    """

    depth: int
    resolution: float
    tolerance: float
    n_candidates: int
    n_feasible: int
    max_radius: float
    argmax: Optional[tuple]
    min_center_height: Optional[float]
    seconds: float

    @property
    def empty(self) -> bool:
        return self.max_radius < self.tolerance

    def statement(self) -> str:
        if self.empty:
            return (f"no feasible candidate found at depth {self.depth}, resolution "
                    f"{self.resolution:g} (disk radius < {self.tolerance:g})")
        return (f"feasible candidates at depth {self.depth}, resolution {self.resolution:g}: "
                f"max disk radius {self.max_radius:.6g}")

    def to_dict(self, timing: bool = True) -> dict:
        x0, r, d = self.argmax if self.argmax else (None, None, None)
        h = math.sqrt(3.0) / 2.0
        out = {
            "depth": self.depth,
            "resolution": self.resolution,
            "tolerance": self.tolerance,
            "candidates": self.n_candidates,
            "feasible": self.n_feasible,
            "max_disk_radius": self.max_radius,
            "argmax": None if x0 is None else {"x0": x0, "r": r, "d": d, "center_height": r},
            "min_center_height": self.min_center_height,
            "argmax_center_at_least_sqrt3_over_2": None if r is None else bool(r >= h),
            "empty": self.empty,
            "statement": self.statement(),
        }
        if timing:
            out["wall_clock_seconds"] = self.seconds
        return out


def transverse_disk_obstruction(depth: int, resolution: float = 2e-3,
                                tolerance: float = 1e-2) -> ObstructionReport:
    """Largest disk cut from the packing plane by an admissible ball.

    The grid runs over tangency abscissa x0 in [0, 1] (the packing is
    invariant under z -> z + 1) and radius r in (0, 1/2].  For each pair the
    smallest distance d allowed by the Farey balls is solved exactly:
    (x0 - p/q)^2 + d^2 >= 2 r / q^2 for every ball, so
    d_min^2 = max(0, max (2r/q^2 - (x0 - p/q)^2)).  The pair is feasible when
    d_min < r.  A d_min of 0 stands for arbitrarily small positive d.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if not (0 < resolution <= 0.5 and math.isfinite(resolution)):
        raise ValueError(f"invalid grid resolution {resolution!r}")
    t0 = time.perf_counter()
    pts = farey_points(depth, -1, 2)
    c = np.array([float(f) for f in pts])
    inv_q2 = np.array([1.0 / f.denominator ** 2 for f in pts])
    nx = int(round(1.0 / resolution))
    x = np.linspace(0.0, 1.0, nx + 1)
    nr = int(math.floor(0.5 / resolution + 1e-9))
    rs = resolution * np.arange(1, nr + 1)
    best_rad, arg, min_h, n_feas = 0.0, None, None, 0
    dx2 = (x[:, None] - c[None, :]) ** 2          # (nx, nb)
    for r in rs:
        need = np.max(2.0 * r * inv_q2[None, :] - dx2, axis=1)
        dmin2 = np.maximum(need, 0.0)
        ok = dmin2 < r * r
        if not ok.any():
            continue
        n_feas += int(ok.sum())
        if min_h is None:
            min_h = float(r)
        rad2 = np.where(ok, r * r - dmin2, -1.0)
        k = int(np.argmax(rad2))
        if rad2[k] > best_rad ** 2:
            best_rad = math.sqrt(rad2[k])
            arg = (float(x[k]), float(r), math.sqrt(float(dmin2[k])))
    return ObstructionReport(depth, resolution, tolerance, len(x) * len(rs), n_feas,
                             float(best_rad), arg, min_h, time.perf_counter() - t0)

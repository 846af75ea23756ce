"""Upper half-plane primitives: ideal points, Moebius maps and horoballs.

Ideal points are plain floats, except the point at infinity which is the
singleton :data:`INF`.  A :class:`Horoball` centred at a finite point stores
its Euclidean diameter; one centred at infinity stores the height of its
bounding horizontal line.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence, Union

__all__ = [
    "INF", "IdealPoint", "Mobius", "Horoball", "IdealTriangleGeom", "Contact",
    "DegenerateError", "is_inf", "as_ideal_point", "mobius_apply",
    "mobius_on_horoball", "horoball_distance", "corner_area",
    "horoball_for_corner_area", "horoballs_disjoint", "cross_ratio",
    "TANGENCY_TOL",
]

TANGENCY_TOL = 1e-9
# |det - 1| allowed after normalisation
NORMALIZATION_TOL = 1e-12
# finite results beyond this magnitude are treated as the point at infinity
_HUGE = 1e300


class DegenerateError(ValueError):
    """Raised for coincident ideal points where distinct ones are required."""


class _Infinity:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self


INF = _Infinity()
IdealPoint = Union[float, _Infinity]


def is_inf(p) -> bool:
    return p is INF


def as_ideal_point(p) -> IdealPoint:
    """Validate ``p`` and return it as an ideal point.

    ``math.inf`` (either sign) and the string ``"inf"`` are accepted as
    spellings of :data:`INF`; NaN is rejected.
    """
    if p is INF:
        return INF
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity", "oo"):
            return INF
        p = float(p)
    p = float(p)
    if math.isnan(p):
        raise ValueError("ideal point cannot be NaN")
    if math.isinf(p):
        return INF
    return p


def _same_point(p, q) -> bool:
    if p is INF or q is INF:
        return p is q
    return p == q


@dataclass(frozen=True)
class Mobius:
    """Orientation preserving isometry z -> (az + b) / (cz + d) of H^2.

    Build instances with :meth:`from_coefficients`, which rescales to unit
    determinant; the raw constructor trusts its arguments.
    """

    a: float
    b: float
    c: float
    d: float

    @classmethod
    def from_coefficients(cls, a, b, c, d) -> "Mobius":
        det = a * d - b * c
        if not det > 0:
            raise ValueError(
                f"determinant {det!r} is not positive; only PSL(2,R) is modelled")
        s = math.sqrt(det)
        m = cls(a / s, b / s, c / s, d / s)
        if abs(m.det() - 1.0) > NORMALIZATION_TOL * max(1.0, abs(m.a * m.d)):
            raise ValueError("Moebius coefficients too ill-conditioned to normalise")
        return m

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def translation(cls, t: float) -> "Mobius":
        return cls(1.0, float(t), 0.0, 1.0)

    @classmethod
    def dilation(cls, lam: float) -> "Mobius":
        """z -> lam * z for lam > 0."""
        if not lam > 0:
            raise ValueError("dilation factor must be positive")
        r = math.sqrt(lam)
        return cls(r, 0.0, 0.0, 1.0 / r)

    @classmethod
    def normalizing(cls, p: IdealPoint, q: IdealPoint) -> "Mobius":
        """A map sending p to infinity and q to 0."""
        p, q = as_ideal_point(p), as_ideal_point(q)
        if _same_point(p, q):
            raise DegenerateError("normalizing map needs two distinct points")
        if p is INF:
            return cls(1.0, -q, 0.0, 1.0)
        if q is INF:
            return cls.from_coefficients(0.0, -1.0, 1.0, -p)
        # (z - q) / (z - p), sign flipped when that would reverse orientation
        if q > p:
            return cls.from_coefficients(1.0, -q, 1.0, -p)
        return cls.from_coefficients(-1.0, q, 1.0, -p)

    @classmethod
    def from_triples(cls, src: Sequence[IdealPoint], dst: Sequence[IdealPoint]) -> "Mobius":
        """The unique map taking the ideal triple ``src`` to ``dst``.

        Both triples must have the same cyclic orientation on the boundary,
        otherwise no orientation preserving map exists.
        """
        fa, fb, fc, fd = _to_zero_one_inf(*src)
        ga, gb, gc, gd = _to_zero_one_inf(*dst)
        # adjugate of g times f; the scalar factor is removed by normalising
        ia, ib, ic, id_ = gd, -gb, -gc, ga
        if (ga * gd - gb * gc) < 0:
            ia, ib, ic, id_ = -ia, -ib, -ic, -id_
        a = ia * fa + ib * fc
        b = ia * fb + ib * fd
        c = ic * fa + id_ * fc
        d = ic * fb + id_ * fd
        if (fa * fd - fb * fc) < 0:
            a, b, c, d = -a, -b, -c, -d
        det = a * d - b * c
        if not det > 0:
            raise ValueError("triples have opposite orientations")
        return cls.from_coefficients(a, b, c, d)

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "Mobius") -> "Mobius":
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        # re-normalise to stop drift over long products
        det = a * d - b * c
        s = math.sqrt(det) if det > 0 else 1.0
        return Mobius(a / s, b / s, c / s, d / s)

    def __call__(self, p):
        if isinstance(p, Horoball):
            return mobius_on_horoball(self, p)
        return mobius_apply(self, p)

    def trace(self) -> float:
        return self.a + self.d

    def as_tuple(self) -> tuple:
        return (self.a, self.b, self.c, self.d)


def _to_zero_one_inf(z1, z2, z3) -> tuple:
    # raw coefficients (determinant of either sign) of z1 -> 0, z2 -> 1, z3 -> inf
    z1, z2, z3 = (as_ideal_point(z) for z in (z1, z2, z3))
    if _same_point(z1, z2) or _same_point(z2, z3) or _same_point(z1, z3):
        raise DegenerateError("ideal triple has repeated points")
    if z3 is INF:
        a, b, c, d = 1.0, -z1, 0.0, z2 - z1
    elif z1 is INF:
        a, b, c, d = 0.0, z2 - z3, 1.0, -z3
    elif z2 is INF:
        a, b, c, d = 1.0, -z1, 1.0, -z3
    else:
        a, b, c, d = z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1)
    return a, b, c, d


def mobius_apply(m: Mobius, p: IdealPoint) -> IdealPoint:
    p = as_ideal_point(p)
    if p is INF:
        if m.c == 0.0:
            return INF
        return m.a / m.c
    num = m.a * p + m.b
    den = m.c * p + m.d
    if den == 0.0:
        return INF
    w = num / den
    if not math.isfinite(w) or abs(w) > _HUGE:
        return INF
    return w


@dataclass(frozen=True)
class Horoball:
    """Horoball at an ideal point.

    ``size`` is the Euclidean diameter for a finite centre and the height of
    the bounding line when the centre is :data:`INF`.
    """

    center: IdealPoint
    size: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_ideal_point(self.center))
        size = float(self.size)
        if not (size > 0 and math.isfinite(size)):
            raise ValueError(f"horoball size must be positive and finite, got {size!r}")
        object.__setattr__(self, "size", size)

    @property
    def at_infinity(self) -> bool:
        return self.center is INF


def mobius_on_horoball(m: Mobius, H: Horoball) -> Horoball:
    """Image of a horoball.

    A finite centre z0 not sent to infinity scales its diameter by
    1/(c z0 + d)^2.  A finite centre sent to infinity becomes a horoball of
    height 1/(c^2 diam); a centre at infinity with height t goes to diameter
    1/(c^2 t) at a/c, or stays at infinity with height a^2 t when c = 0.
    These are the same calibration as z -> -h/z sending the diameter-h ball
    at 0 to the height-1 ball at infinity.
    """
    z = H.center
    if z is INF:
        if m.c == 0.0:
            return Horoball(INF, H.size * m.a * m.a)
        return Horoball(m.a / m.c, 1.0 / (m.c * m.c * H.size))
    den = m.c * z + m.d
    w = mobius_apply(m, z)
    if w is INF or den * den == 0.0:        # den^2 underflow: z is the pole to working precision
        return Horoball(INF, 1.0 / (m.c * m.c * H.size))
    return Horoball(w, H.size / (den * den))


def horoball_distance(H1: Horoball, H2: Horoball) -> float:
    """Signed hyperbolic distance between two horoballs.

    Negative when they overlap, zero when tangent.
    """
    z1, z2 = H1.center, H2.center
    if _same_point(z1, z2):
        raise DegenerateError("horoballs share a centre")
    if z1 is INF:
        return math.log(H1.size / H2.size)
    if z2 is INF:
        return math.log(H2.size / H1.size)
    dz = z1 - z2
    return math.log(dz * dz / (H1.size * H2.size))


class Contact(enum.Enum):
    DISJOINT = "disjoint"
    TANGENT = "tangent"
    OVERLAPPING = "overlapping"


def horoballs_disjoint(H1: Horoball, H2: Horoball, tol: float = TANGENCY_TOL) -> Contact:
    dist = horoball_distance(H1, H2)
    if dist > tol:
        return Contact.DISJOINT
    if dist < -tol:
        return Contact.OVERLAPPING
    return Contact.TANGENT


@dataclass(frozen=True)
class IdealTriangleGeom:
    """Ideal triangle given by three distinct boundary points."""

    vertices: tuple

    def __post_init__(self):
        pts = tuple(as_ideal_point(p) for p in self.vertices)
        if len(pts) != 3:
            raise ValueError("an ideal triangle has three vertices")
        for i in range(3):
            if _same_point(pts[i], pts[(i + 1) % 3]):
                raise DegenerateError("ideal triangle has repeated vertices")
        object.__setattr__(self, "vertices", pts)

    def __getitem__(self, i):
        return self.vertices[i]

    def is_positive(self) -> bool:
        """True when the vertices run counterclockwise around the triangle."""
        return cross_ratio(*self.vertices, None) > 0

    def image(self, m: Mobius) -> "IdealTriangleGeom":
        return IdealTriangleGeom(tuple(mobius_apply(m, p) for p in self.vertices))


def _others(T: IdealTriangleGeom, v: int):
    return T.vertices[(v + 1) % 3], T.vertices[(v + 2) % 3]


def corner_area(T: IdealTriangleGeom, v: int, H: Horoball) -> float:
    """Area of the part of H inside T, for H centred at vertex v of T."""
    p = T.vertices[v]
    if not _same_point(p, H.center):
        raise ValueError(f"horoball centre {H.center!r} is not vertex {v} ({p!r})")
    u, w = _others(T, v)
    if p is INF:
        return abs(u - w) / H.size
    if u is INF:
        return H.size / abs(w - p)
    if w is INF:
        return H.size / abs(u - p)
    return H.size * abs(u - w) / (abs(u - p) * abs(w - p))


def horoball_for_corner_area(T: IdealTriangleGeom, v: int, area: float) -> Horoball:
    """The horoball at vertex v of T cutting out the given corner area."""
    if not area > 0:
        raise ValueError("corner area must be positive")
    p = T.vertices[v]
    u, w = _others(T, v)
    if p is INF:
        return Horoball(INF, abs(u - w) / area)
    if u is INF:
        return Horoball(p, area * abs(w - p))
    if w is INF:
        return Horoball(p, area * abs(u - p))
    return Horoball(p, area * abs(u - p) * abs(w - p) / abs(u - w))


def cross_ratio(z1, z2, z3, z4=None) -> float:
    """(z1, z2; z3, z4) = (z1-z3)(z2-z4) / ((z2-z3)(z1-z4)).

    With ``z4=None`` the orientation sign of the triple z1, z2, z3 is
    returned instead (+1 counterclockwise, -1 clockwise).
    """
    if z4 is None:
        pts = [as_ideal_point(z) for z in (z1, z2, z3)]
        if INF in pts:
            k = pts.index(INF)
            a, b = pts[(k + 1) % 3], pts[(k + 2) % 3]
            return 1.0 if a < b else -1.0
        x, y, z = pts
        # cyclic order on the circle R u {inf}
        s = (y - x) * (z - y) * (x - z)
        return 1.0 if s < 0 else -1.0
    pts = [as_ideal_point(z) for z in (z1, z2, z3, z4)]
    num = [(0, 2), (1, 3)]
    den = [(1, 2), (0, 3)]

    def diff(i, j):
        if pts[i] is INF or pts[j] is INF:
            return None
        return pts[i] - pts[j]

    n_terms = [diff(*ij) for ij in num]
    d_terms = [diff(*ij) for ij in den]
    # an infinite point cancels between one numerator and one denominator factor
    n = math.prod(t for t in n_terms if t is not None)
    d = math.prod(t for t in d_terms if t is not None)
    if d == 0:
        return math.inf
    return n / d

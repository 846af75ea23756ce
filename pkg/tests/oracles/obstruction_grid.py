"""Brute-force grid search for the transverse disk probe.

Independent of the package: scans (x0, r, d) on a regular grid and keeps the
points satisfying every tangency constraint directly.  Run as a script to
print the max feasible disk radius per Farey depth.
"""

import sys
from fractions import Fraction

import numpy as np


def farey(depth):
    """Stern-Brocot points between -1 and 2 down to the given depth."""
    pts = [Fraction(k) for k in range(-1, 3)]
    for _ in range(depth):
        new = [pts[0]]
        for a, b in zip(pts, pts[1:]):
            new.append(Fraction(a.numerator + b.numerator, a.denominator + b.denominator))
            new.append(b)
        pts = new
    return pts


def max_disk_radius(depth, h):
    balls = farey(depth)
    x = np.arange(0.0, 1.0 + h / 2, h)
    best = (0.0, None)
    for r in np.arange(h, 0.5 + h / 2, h):
        d = np.arange(0.0, r, h)
        X, D = np.meshgrid(x, d, indexing="ij")
        ok = np.ones_like(X, dtype=bool)
        for f in balls:
            c, q2 = f.numerator / f.denominator, f.denominator ** 2
            ok &= (X - c) ** 2 + D ** 2 >= 2 * r / q2 - 1e-15
        if ok.any():
            rad = np.sqrt(r * r - D[ok] ** 2)
            k = int(np.argmax(rad))
            if rad[k] > best[0]:
                best = (float(rad[k]), (float(X[ok][k]), float(r), float(D[ok][k])))
    return best


if __name__ == "__main__":
    h = float(sys.argv[1]) if len(sys.argv) > 1 else 2e-3
    for depth in range(0, int(sys.argv[2]) + 1 if len(sys.argv) > 2 else 7):
        print(depth, max_disk_radius(depth, h), flush=True)

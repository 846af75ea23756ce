"""Minimal deterministic SVG writer for upper half-plane pictures.

Coordinates are math coordinates (y up); the writer flips them.  All numbers
are printed with a fixed format so identical input gives identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple
from xml.sax.saxutils import escape

from .hyp2 import INF, Horoball

__all__ = ["Window", "Figure"]

PREAMBLE = """\
<?xml version="1.0" encoding="UTF-8" standalone="no"?>
<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" "http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">
"""


def _f(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


@dataclass(frozen=True)
class Window:
    xmin: float
    xmax: float
    ymin: float = 0.0
    ymax: float = 1.5

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError(f"degenerate window {self}")

    @classmethod
    def parse(cls, text: str) -> "Window":
        vals = [float(v) for v in text.split(",")]
        if len(vals) not in (2, 4):
            raise ValueError("window is xmin,xmax[,ymin,ymax]")
        return cls(*vals)

    @property
    def width(self):
        return self.xmax - self.xmin

    @property
    def height(self):
        return self.ymax - self.ymin

    def meets_box(self, x0, x1, y0, y1) -> bool:
        return not (x1 < self.xmin or x0 > self.xmax or y1 < self.ymin or y0 > self.ymax)


@dataclass
class Figure:
    window: Window
    scale: float = 400.0
    title: Optional[str] = None
    _items: list = field(default_factory=list)
    _seen: set = field(default_factory=set)

    def _add(self, item: str):
        # shared horoballs and edges are reached from several triangles
        if item not in self._seen:
            self._seen.add(item)
            self._items.append(item)

    def _px(self, x, y) -> Tuple[str, str]:
        w = self.window
        return _f((x - w.xmin) * self.scale), _f((w.ymax - y) * self.scale)

    def __len__(self):
        return len(self._items)

    def geodesic(self, p, q, stroke="#000000", width=1.0):
        """Geodesic between two ideal points; skipped when outside the window."""
        w = self.window
        if p is INF and q is INF:
            return
        if p is INF or q is INF:
            x = q if p is INF else p
            if not w.meets_box(x, x, 0.0, w.ymax):
                return
            x0, y0 = self._px(x, max(w.ymin, 0.0))
            x1, y1 = self._px(x, w.ymax)
            self._add(
                f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" '
                f'stroke="{stroke}" stroke-width="{_f(width)}" fill="none"/>')
            return
        lo, hi = min(p, q), max(p, q)
        r = (hi - lo) / 2.0
        if not w.meets_box(lo, hi, 0.0, r) or r * self.scale < 1e-3:
            return
        x0, y0 = self._px(lo, 0.0)
        x1, y1 = self._px(hi, 0.0)
        rr = _f(r * self.scale)
        self._add(
            f'<path d="M {x0} {y0} A {rr} {rr} 0 0 1 {x1} {y1}" '
            f'stroke="{stroke}" stroke-width="{_f(width)}" fill="none"/>')

    def horoball(self, H: Horoball, fill="#9ecae1", stroke="#3182bd", opacity=0.6):
        w = self.window
        if H.center is INF:
            if H.size >= w.ymax:
                return
            x0, y0 = self._px(w.xmin, H.size)
            _, y1 = self._px(w.xmin, w.ymax)
            ww = _f(w.width * self.scale)
            hh = _f((w.ymax - H.size) * self.scale)
            self._add(
                f'<rect x="{x0}" y="{y1}" width="{ww}" height="{hh}" fill="{fill}" '
                f'fill-opacity="{opacity}" stroke="none"/>')
            x1, _ = self._px(w.xmax, H.size)
            self._add(
                f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="{stroke}" '
                f'stroke-width="1.000000"/>')
            return
        r = H.size / 2.0
        if not w.meets_box(H.center - r, H.center + r, 0.0, H.size) or r * self.scale < 1e-3:
            return
        cx, cy = self._px(H.center, r)
        self._add(
            f'<circle cx="{cx}" cy="{cy}" r="{_f(r * self.scale)}" fill="{fill}" '
            f'fill-opacity="{opacity}" stroke="{stroke}" stroke-width="1.000000"/>')

    def label(self, x, y, text, size=10.0):
        if not self.window.meets_box(x, x, y, y):
            return
        px, py = self._px(x, y)
        self._add(
            f'<text x="{px}" y="{py}" font-size="{_f(size)}" font-family="sans-serif" '
            f'text-anchor="middle">{escape(text)}</text>')

    def to_svg(self) -> str:
        w = self.window
        W, H = w.width * self.scale, w.height * self.scale
        out = [PREAMBLE]
        out.append(f"<!-- window xmin={w.xmin!r} xmax={w.xmax!r} ymin={w.ymin!r} ymax={w.ymax!r} -->\n")
        out.append(f"<!-- scale {self.scale!r} px per unit; y axis points up in figure coordinates -->\n")
        out.append(
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(W)}" '
            f'height="{_f(H)}" viewBox="0 0 {_f(W)} {_f(H)}">\n')
        if self.title:
            out.append(f"<title>{escape(self.title)}</title>\n")
        out.append('<defs><clipPath id="window"><rect x="0" y="0" '
                   f'width="{_f(W)}" height="{_f(H)}"/></clipPath></defs>\n')
        out.append('<g clip-path="url(#window)">\n')
        for item in self._items:
            out.append(item + "\n")
        if w.ymin <= 0.0 <= w.ymax:
            x0, y0 = self._px(w.xmin, 0.0)
            x1, _ = self._px(w.xmax, 0.0)
            out.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="#000000" '
                       'stroke-width="0.500000"/>\n')
        out.append("</g>\n</svg>\n")
        return "".join(out)

    def save(self, path) -> Path:
        path = Path(path)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_svg())
        return path


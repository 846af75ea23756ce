"""Canonical JSON files for surfaces and reports.

Output is a pure function of the data: keys sorted, one table row per line,
LF line endings, floats written with the shortest repr that reads back to
the same double.
"""

from __future__ import annotations

import io
import json
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional, Union

import jsonschema
import numpy as np

from .decor import CornerDecoration, DecorationParams
from .surface import Color, Triangulation, TriangulationError

__all__ = [
    "FORMAT_VERSION",
    "SurfaceFileError",
    "SurfaceData",
    "canonical_json",
    "surface_to_dict",
    "surface_from_dict",
    "dump_surface",
    "save_surface",
    "load_surface",
    "make_report",
    "validate_report",
    "dump_report",
    "save_report",
    "load_report",
]

FORMAT_VERSION = 1

_COLOR_NAMES = {int(Color.WHITE): "white", int(Color.GRAY): "gray"}
_COLOR_CODES = {v: k for k, v in _COLOR_NAMES.items()}


class SurfaceFileError(ValueError):
    """Invalid surface or report file; ``location`` points into the document."""

    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}")
        self.location = location
        self.detail = message


@dataclass
class SurfaceData:
    triangulation: Triangulation
    decoration: Optional[CornerDecoration] = None
    params: Optional[DecorationParams] = None

    def __iter__(self):
        return iter((self.triangulation, self.decoration, self.params))


# --------------------------------------------------------------------------
# canonical text

def _scalar(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            raise ValueError(f"cannot serialise non-finite number {x!r}")
        return repr(x)
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _is_scalar(x) -> bool:
    return not isinstance(x, (dict, list, tuple, np.ndarray))


def _fast_row(obj):
    # plain int or float rows dominate large surfaces
    kinds = set(map(type, obj))
    if kinds == {int}:
        return "[" + ", ".join(map(str, obj)) + "]"
    if kinds == {float} and all(map(math.isfinite, obj)):
        return "[" + ", ".join(map(repr, obj)) + "]"
    if kinds == {str}:
        return json.dumps(obj, ensure_ascii=False, separators=(", ", ": "))
    return None


def _fast_table(obj):
    # a list of flat numeric rows, formatted by the json module in one call;
    # its float output is repr, the same as _scalar
    if not obj or not all(type(r) is list and r for r in obj):
        return None
    try:
        text = json.dumps(obj, allow_nan=False, separators=(", ", ": "))
    except (TypeError, ValueError):
        return None
    if '"' in text or "true" in text or "false" in text or "null" in text \
            or text.count("[") != len(obj) + 1:
        return None
    return text[2:-2].split("], [")


def _emit(obj, indent: int, out: list):
    pad = " " * indent
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj)
        for n, k in enumerate(keys):
            if not isinstance(k, str):
                raise TypeError("object keys must be strings")
            out.append(f"{pad}  {json.dumps(k)}: ")
            _emit(obj[k], indent + 2, out)
            out.append(",\n" if n + 1 < len(keys) else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        row = _fast_row(obj)
        if row is not None:
            out.append(row)
            return
        if all(_is_scalar(x) for x in obj):
            out.append("[" + ", ".join(_scalar(x) for x in obj) + "]")
            return
        rows = _fast_table(obj)
        if rows is not None:
            out.append("[\n")
            out.append(",\n".join(pad + "  [" + r + "]" for r in rows))
            out.append("\n" + pad + "]")
            return
        out.append("[\n")
        for n, x in enumerate(obj):
            out.append(pad + "  ")
            _emit(x, indent + 2, out)
            out.append(",\n" if n + 1 < len(obj) else "\n")
        out.append(pad + "]")
    else:
        out.append(_scalar(obj))


def canonical_json(obj) -> str:
    """Deterministic JSON text ending in a newline."""
    out: list = []
    _emit(obj, 0, out)
    out.append("\n")
    return "".join(out)


# --------------------------------------------------------------------------
# schemas

@lru_cache(maxsize=None)
def _schema(name: str) -> dict:
    text = resources.files("horopack").joinpath("schemas", name).read_text(encoding="utf-8")
    return json.loads(text)


def _location(path) -> str:
    loc = "$"
    for p in path:
        loc += f"[{p}]" if isinstance(p, int) else f".{p}"
    return loc


def _validate(doc, schema_name: str):
    validator = jsonschema.Draft202012Validator(_schema(schema_name))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        e = errors[0]
        raise SurfaceFileError(e.message, _location(e.absolute_path))


# --------------------------------------------------------------------------
# surfaces

def surface_to_dict(T: Triangulation, dec: Optional[CornerDecoration] = None,
                    params: Optional[DecorationParams] = None) -> dict:
    pairs = T.edge_halfedges
    doc = {
        "format": "horopack-surface",
        "version": FORMAT_VERSION,
        "n_vertices": T.n_vertices,
        "triangles": T.tris.tolist(),
        "gluings": np.column_stack([pairs[:, 0] // 3, pairs[:, 0] % 3,
                                    pairs[:, 1] // 3, pairs[:, 1] % 3]).tolist(),
        "colors": None if T.colors is None else [_COLOR_NAMES[int(c)] for c in T.colors],
        "family": None,
        "corner_areas": None,
        "params": None,
    }
    if T.m is not None:
        fam = {"m": int(T.m)}
        if T.block is not None:
            fam["block"] = T.block.tolist()
        if T.cell is not None:
            fam["cell"] = T.cell.tolist()
        doc["family"] = fam
    if dec is not None:
        dec.check_total(T)
        doc["corner_areas"] = dec.areas.tolist()
    if params is not None:
        doc["params"] = {"c": list(params.c)}
    return doc


def _twin_from_gluings(tris: np.ndarray, gluings: list) -> np.ndarray:
    F = len(tris)
    g = np.asarray(gluings, dtype=np.int64).reshape(-1, 4)
    if len(g) and g[:, 0].max() < F and g[:, 2].max() < F and g[:, [1, 3]].max() <= 2:
        h1, h2 = 3 * g[:, 0] + g[:, 1], 3 * g[:, 2] + g[:, 3]
        hits = np.bincount(np.concatenate([h1, h2]), minlength=3 * F)
        a1, b1 = tris[g[:, 0], g[:, 1]], tris[g[:, 0], (g[:, 1] + 1) % 3]
        a2, b2 = tris[g[:, 2], g[:, 3]], tris[g[:, 2], (g[:, 3] + 1) % 3]
        if (h1 != h2).all() and (hits == 1).all() and (a1 == b2).all() and (b1 == a2).all():
            twin = np.empty(3 * F, dtype=np.int64)
            twin[h1], twin[h2] = h2, h1
            return twin
    # something is wrong: the row-by-row pass finds and names it
    twin = np.full(3 * F, -1, dtype=np.int64)
    for n, (t1, i1, t2, i2) in enumerate(gluings):
        loc = f"$.gluings[{n}]"
        for t, i in ((t1, i1), (t2, i2)):
            if t >= F or i > 2:
                raise SurfaceFileError(f"side ({t}, {i}) does not exist ({F} triangles)", loc)
        h1, h2 = 3 * t1 + i1, 3 * t2 + i2
        if h1 == h2:
            raise SurfaceFileError(f"side ({t1}, {i1}) is glued to itself", loc)
        for h in (h1, h2):
            if twin[h] >= 0:
                raise SurfaceFileError(f"side ({h // 3}, {h % 3}) is glued twice", loc)
        a1, b1 = tris[t1, i1], tris[t1, (i1 + 1) % 3]
        a2, b2 = tris[t2, i2], tris[t2, (i2 + 1) % 3]
        if (a1, b1) != (b2, a2):
            raise SurfaceFileError(
                f"side ({t1}, {i1}) runs {a1}->{b1} but side ({t2}, {i2}) runs {a2}->{b2}; "
                "glued sides must have opposite directions", loc)
        twin[h1], twin[h2] = h2, h1
    missing = np.flatnonzero(twin < 0)
    if len(missing):
        h = int(missing[0])
        raise SurfaceFileError(f"side ({h // 3}, {h % 3}) of triangle {h // 3} is not glued",
                               "$.gluings")
    return twin


# (path, row width, value check) of the large tables in a surface file
_TABLES = (
    (("triangles",), 3, "index"),
    (("gluings",), 4, "index"),
    (("corner_areas",), 3, "positive"),
    (("family", "cell"), 4, "index"),
)


def _table_ok(rows, width: int, check: str) -> bool:
    if type(rows) is not list or not rows:
        return False
    if not all(type(r) is list and len(r) == width for r in rows):
        return False
    flat = [x for r in rows for x in r]
    if check == "index":
        return all(type(x) is int for x in flat) and min(flat) >= 0
    return all(type(x) in (int, float) for x in flat) and min(flat) > 0


def _validate_surface(doc):
    # jsonschema is slow on 10^5-row tables; tables that pass an equivalent
    # direct check are cut to one row before the schema runs
    if isinstance(doc, dict):
        short = dict(doc)
        for path, width, check in _TABLES:
            holder = short
            for key in path[:-1]:
                sub = holder.get(key)
                if not isinstance(sub, dict):
                    holder = None
                    break
                holder[key] = holder = dict(sub)
            if holder is None or path[-1] not in holder:
                continue
            rows = holder[path[-1]]
            if _table_ok(rows, width, check):
                holder[path[-1]] = rows[:1]
        colors = short.get("colors")
        if type(colors) is list and set(colors) <= {"white", "gray"}:
            short["colors"] = colors[:1]
        block = short.get("family", {}).get("block") if isinstance(short.get("family"), dict) else None
        if type(block) is list and block and all(type(x) is int for x in block) and min(block) >= 0:
            short["family"]["block"] = block[:1]
        doc = short
    _validate(doc, "surface.schema.json")


def surface_from_dict(doc) -> SurfaceData:
    _validate_surface(doc)
    if doc["version"] != FORMAT_VERSION:
        raise SurfaceFileError(f"unsupported format version {doc['version']}", "$.version")
    n = doc["n_vertices"]
    tris = np.array(doc["triangles"], dtype=np.int64)
    F = len(tris)
    for t, row in enumerate(doc["triangles"]):
        for i, v in enumerate(row):
            if v >= n:
                raise SurfaceFileError(
                    f"triangle {t} references vertex {v}, but n_vertices is {n}",
                    f"$.triangles[{t}][{i}]")
    twin = _twin_from_gluings(tris, doc["gluings"])
    kw = {}
    if doc.get("colors") is not None:
        if len(doc["colors"]) != F:
            raise SurfaceFileError(f"{len(doc['colors'])} colors for {F} triangles", "$.colors")
        kw["colors"] = np.array([_COLOR_CODES[c] for c in doc["colors"]])
    fam = doc.get("family")
    if fam is not None:
        kw["m"] = fam["m"]
        for key in ("block", "cell"):
            if key in fam:
                if len(fam[key]) != F:
                    raise SurfaceFileError(f"{len(fam[key])} entries for {F} triangles",
                                           f"$.family.{key}")
                kw[key] = np.array(fam[key], dtype=np.int64)
    try:
        T = Triangulation(tris, n, twin=twin, **kw)
    except TriangulationError as exc:
        raise SurfaceFileError(str(exc), "$") from exc
    dec = None
    if doc.get("corner_areas") is not None:
        if len(doc["corner_areas"]) != F:
            raise SurfaceFileError(
                f"{len(doc['corner_areas'])} rows of corner areas for {F} triangles",
                "$.corner_areas")
        dec = CornerDecoration(np.array(doc["corner_areas"], dtype=float))
    params = None
    if doc.get("params") is not None:
        params = DecorationParams.of(doc["params"]["c"])
    return SurfaceData(T, dec, params)


def dump_surface(T: Triangulation, dec: Optional[CornerDecoration] = None,
                 params: Optional[DecorationParams] = None) -> str:
    return canonical_json(surface_to_dict(T, dec, params))


PathOrFile = Union[str, os.PathLike, io.IOBase]


def _write_text(text: str, dest):
    if hasattr(dest, "write"):
        dest.write(text)
        return
    with open(dest, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _read_text(src) -> str:
    if hasattr(src, "read"):
        return src.read()
    with open(src, "r", encoding="utf-8") as fh:
        return fh.read()


def _parse(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SurfaceFileError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc


def save_surface(T: Triangulation, dec: Optional[CornerDecoration], dest: PathOrFile,
                 params: Optional[DecorationParams] = None):
    _write_text(dump_surface(T, dec, params), dest)


def load_surface(src: PathOrFile) -> SurfaceData:
    return surface_from_dict(_parse(_read_text(src)))


# --------------------------------------------------------------------------
# reports

def make_report(kind: str, data: dict) -> dict:
    doc = {"format": "horopack-report", "version": FORMAT_VERSION, "kind": kind, "data": data}
    # round trip through the canonical text so numpy scalars are normalised
    doc = json.loads(canonical_json(doc))
    validate_report(doc)
    return doc


def validate_report(doc):
    _validate(doc, "report.schema.json")


def dump_report(doc: dict) -> str:
    return canonical_json(doc)


def save_report(doc: dict, dest: PathOrFile):
    _write_text(dump_report(doc), dest)


def load_report(src: PathOrFile) -> dict:
    doc = _parse(_read_text(src))
    validate_report(doc)
    return doc

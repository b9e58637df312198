"""Mesh and data writers.

All numbers are written with 17 significant digits so that text output
round-trips to the same doubles, and nothing depends on dict or set order.

PLY colour map (per vertex, from mean curvature ``H``):

* ``Hc = clip(H, -1e4, 1e4)`` with ``+-inf`` mapped to the clip bounds
  and NaN to 0;
* ``s = sign(Hc) * log10(1 + |Hc|) / log10(1 + 1e4)``, so ``s`` is in [-1, 1];
* ``s >= 0``: ``(r, g, b) = (255, q, q)`` with ``q = round(255 * (1 - s))``;
* ``s < 0``: ``(r, g, b) = (q, q, 255)`` with ``q = round(255 * (1 + s))``.

White is flat-ish, saturated red/blue mark the singular set where ``H``
blows up.  ``round`` is numpy's round-half-even.
"""

import csv
import io
import json
import os

import numpy as np

from .frames import H_CLIP

CSV_COLUMNS = ("x", "y", "f1", "f2", "f3", "N1", "N2", "N3",
               "A", "B", "phi", "mu", "H")
FORMATS = ("obj", "ply", "csv", "json")


def _g(v):
    return format(float(v), ".17g")


def clip_h(H):
    H = np.nan_to_num(np.asarray(H, dtype=float), nan=0.0, posinf=H_CLIP, neginf=-H_CLIP)
    return np.clip(H, -H_CLIP, H_CLIP)


def symlog_colors(H):
    """``(n, 3)`` uint8 colours of the map documented in the module docstring."""
    Hc = clip_h(H).ravel()
    s = np.sign(Hc) * np.log10(1.0 + np.abs(Hc)) / np.log10(1.0 + H_CLIP)
    q = np.round(255.0 * (1.0 - np.abs(s))).astype(np.uint8)
    full = np.full_like(q, 255)
    pos = s >= 0
    r = np.where(pos, full, q)
    b = np.where(pos, q, full)
    return np.stack([r, q, b], axis=-1)


def grid_quads(shape):
    """0-based quad vertex indices for a row-major ``(n_a, n_b)`` node grid."""
    na, nb = shape
    i, j = np.meshgrid(np.arange(na - 1), np.arange(nb - 1), indexing="ij")
    k = (i * nb + j).ravel()
    return np.stack([k, k + nb, k + nb + 1, k + 1], axis=-1)


def _vertices(surface):
    f = np.asarray(surface.f, dtype=float).reshape(-1, 3)
    if not np.all(np.isfinite(f)):
        raise ValueError("surface has non-finite vertices")
    return f, np.asarray(surface.N, dtype=float).reshape(-1, 3)


def obj_text(surface):
    f, n = _vertices(surface)
    out = io.StringIO()
    out.write("# pseudofront frontal mesh\n")
    for p in f:
        out.write("v %s %s %s\n" % tuple(_g(c) for c in p))
    for p in n:
        out.write("vn %s %s %s\n" % tuple(_g(c) for c in p))
    for q in grid_quads(surface.f.shape[:2]) + 1:
        out.write("f %d//%d %d//%d %d//%d %d//%d\n" % tuple(np.repeat(q, 2)))
    return out.getvalue()


def ply_text(surface):
    f, n = _vertices(surface)
    col = symlog_colors(surface.H)
    Hc = clip_h(surface.H).ravel()
    quads = grid_quads(surface.f.shape[:2])
    out = io.StringIO()
    out.write("ply\nformat ascii 1.0\n")
    out.write(f"element vertex {len(f)}\n")
    for name in ("x", "y", "z", "nx", "ny", "nz"):
        out.write(f"property double {name}\n")
    for name in ("red", "green", "blue"):
        out.write(f"property uchar {name}\n")
    out.write("property double mean_curvature\n")
    out.write(f"element face {len(quads)}\n")
    out.write("property list uchar int vertex_indices\nend_header\n")
    for p, m, c, h in zip(f, n, col, Hc):
        out.write(" ".join([_g(v) for v in p] + [_g(v) for v in m]
                           + [str(int(v)) for v in c] + [_g(h)]) + "\n")
    for q in quads:
        out.write("4 %d %d %d %d\n" % tuple(q))
    return out.getvalue()


def node_table(surface):
    """``(n, 13)`` float array in CSV column order; ``H`` is the raw value."""
    cols = [surface.x, surface.y, *np.moveaxis(surface.f, -1, 0),
            *np.moveaxis(surface.N, -1, 0), surface.A, surface.B, surface.phi,
            surface.mu, surface.H]
    return np.stack([np.asarray(c, dtype=float).ravel() for c in cols], axis=-1)


def csv_text(surface):
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in node_table(surface):
        w.writerow([_g(v) for v in row])
    return out.getvalue()


def read_csv_table(path):
    """Inverse of :func:`csv_text`: returns ``(columns, array)``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = tuple(rows[0])
    return header, np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)


def jsonable(obj):
    """Recursively convert numpy scalars/arrays; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else repr(v)
    return obj


def dumps(obj):
    return json.dumps(jsonable(obj), indent=1, sort_keys=True) + "\n"


def singular_json(singular, grid=None, extra=None):
    doc = {"singular_set": singular.to_dict() if singular is not None else None}
    if grid is not None:
        doc["grid"] = grid.to_dict()
    if extra:
        doc.update(extra)
    return dumps(doc)


def write_text(path, text):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def export_mesh(surface, singular, out_dir, formats=FORMATS, basename="surface",
                grid=None):
    """Write the requested formats into ``out_dir``; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for fmt in formats:
        if fmt not in FORMATS:
            raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
        path = os.path.join(out_dir, f"{basename}.{fmt}")
        if fmt == "obj":
            text = obj_text(surface)
        elif fmt == "ply":
            text = ply_text(surface)
        elif fmt == "csv":
            text = csv_text(surface)
        else:
            text = singular_json(singular, grid or surface.grid)
        paths.append(write_text(path, text))
    return paths

"""CSV / JSON writers with bit-exact float formatting."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .response import FidelityScan, PolarContour
from .wigner import WignerField


def fmt(value) -> str:
    """17 significant digits for floats, plain text otherwise; ``None`` is empty."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(value)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if isinstance(row, dict):
            row = [row.get(h) for h in header]
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.write_text(csv_text(header, rows))
    return path


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return None if math.isnan(v) else float(fmt(v))
    return value


def json_text(payload) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json_text(payload))
    return path


def wigner_rows(field: WignerField):
    xs, ps = field.grid.xs, field.grid.ps
    for i, x in enumerate(xs):
        for j, p in enumerate(ps):
            yield (float(x), float(p), float(field.values[i, j]))


def wigner_csv(field: WignerField) -> str:
    return csv_text(("x", "p", "w"), wigner_rows(field))


def wigner_envelope(field: WignerField, **meta) -> dict:
    g = field.grid
    return {
        "grid": {
            "x_min": g.x_min,
            "x_max": g.x_max,
            "p_min": g.p_min,
            "p_max": g.p_max,
            "n_x": g.n_x,
            "n_p": g.n_p,
            "order": "row-major, x outer, p inner",
        },
        "normalization": field.normalization,
        "window_limited": field.window_limited,
        **meta,
    }


def scan_rows(scans: list[FidelityScan]):
    for s in scans:
        for e, f in zip(s.epsilons, s.fidelities):
            yield (s.phi, float(e), float(f))


SCAN_HEADER = ("phi", "epsilon", "fidelity")
CONTOUR_HEADER = ("phi", "radius", "is_lower_bound")


def contour_rows(contour: PolarContour):
    for phi, r in zip(contour.angles, contour.radii):
        yield (float(phi), r.radius, r.is_lower_bound)


def contour_envelope(contour: PolarContour, **meta) -> dict:
    return {
        "threshold": contour.radii[0].threshold,
        "convention": "epsilon is the complex amplitude in D(epsilon e^{i phi}); phi from +x",
        "r_max": contour.r_max,
        "r_min": contour.r_min,
        "anisotropy": contour.anisotropy,
        "has_lower_bounds": contour.has_lower_bounds,
        "angles": list(map(float, contour.angles)),
        "radii": [r.radius for r in contour.radii],
        "is_lower_bound": [r.is_lower_bound for r in contour.radii],
        **meta,
    }

"""
JSON, CSV and OBJ input and output of grids, curves, Cauchy data and reports.
"""

import dataclasses
import json
import logging
from pathlib import Path

from django.core.serializers.json import DjangoJSONEncoder
import numpy as np

from .cauchy_solver import CauchyData
from .exceptions import InvalidLegendreCurve, InvalidLegendreSurface, InvalidRunConfig, InvalidSurfaceGrid
from .legendre_curves import LegendreCurveSamples
from .lie_core import LieGroupElement, QuadricPoint
from .series import BivariateSeries, PowerSeries
from .surface_invariants import PARTIALS, PHI_PARTIALS, EuclideanSurfaceGrid, LegendreSurfaceGrid

logger = logging.getLogger(__name__)

EUCLIDEAN_COLUMNS = ("u", "v", "fx", "fy", "fz", "nx", "ny", "nz")
LEGENDRE_COLUMNS = ("u", "v") + tuple(f"phi{k}_{i}" for k in (0, 1) for i in range(6))


class LiegeoJSONEncoder(DjangoJSONEncoder):
    """
    DjangoJSONEncoder that also knows numpy values, group elements, sphere
    elements, power series and dataclasses.
    """

    def default(self, o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, LieGroupElement):
            return o.matrix.reshape(-1).tolist()
        if isinstance(o, QuadricPoint):
            return o.rep.tolist()
        if isinstance(o, (PowerSeries, BivariateSeries)):
            return {"order": o.order, "coef": o.coef.tolist()}
        if dataclasses.is_dataclass(o) and not isinstance(o, type):
            out = {f.name: getattr(o, f.name) for f in dataclasses.fields(o) if f.repr}
            kind = getattr(o, "kind", None)
            if kind is not None:
                out["kind"] = kind
            return out
        return super().default(o)


def dumps(obj):
    """
    Deterministic JSON: sorted keys and a fixed indent.
    """
    return json.dumps(obj, cls=LiegeoJSONEncoder, sort_keys=True, indent=2) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InvalidRunConfig(f"input file {path} does not exist")
    except json.JSONDecodeError as error:
        raise InvalidRunConfig(f"{path} is not valid JSON: {error}")


def _read_csv(path, columns):
    try:
        table = np.genfromtxt(path, delimiter=",", names=True)
    except (OSError, ValueError) as error:
        raise InvalidRunConfig(f"cannot read {path}: {error}")
    missing = [name for name in columns if name not in (table.dtype.names or ())]
    if missing:
        raise InvalidRunConfig(f"{path} lacks the columns {', '.join(missing)}")
    return np.atleast_1d(table)


def _grid_from_rows(table, error):
    """
    (u, v, order) of the rows of a complete u x v table, sorted u-major.
    """
    u = np.unique(table["u"])
    v = np.unique(table["v"])
    if len(table) != len(u) * len(v):
        raise error(f"{len(table)} rows do not fill a {len(u)} x {len(v)} grid")
    return u, v, np.lexsort((table["v"], table["u"]))


def _columns(table, names, order, shape):
    return np.stack([table[name][order] for name in names], -1).reshape(shape + (len(names),))


# Surfaces

def euclidean_grid_from_dict(payload):
    try:
        extra = {name: payload[name] for name in PARTIALS if name in payload}
        return EuclideanSurfaceGrid(payload["u"], payload["v"], payload["f"], payload["n"], **extra)
    except KeyError as error:
        raise InvalidSurfaceGrid(f"surface JSON lacks {error.args[0]!r}")


def read_euclidean_grid(path):
    if Path(path).suffix.lower() == ".csv":
        table = _read_csv(path, EUCLIDEAN_COLUMNS)
        u, v, order = _grid_from_rows(table, InvalidSurfaceGrid)
        shape = (len(u), len(v))
        f = _columns(table, ("fx", "fy", "fz"), order, shape)
        n = _columns(table, ("nx", "ny", "nz"), order, shape)
        return EuclideanSurfaceGrid(u, v, f, n)
    return euclidean_grid_from_dict(read_json(path))


def legendre_grid_from_dict(payload):
    try:
        extra = {name: payload[name] for name in PHI_PARTIALS if name in payload}
        return LegendreSurfaceGrid(payload["u"], payload["v"], payload["phi0"], payload["phi1"], **extra)
    except KeyError as error:
        raise InvalidLegendreSurface(f"surface JSON lacks {error.args[0]!r}")


def legendre_grid_to_dict(s):
    """
    The JSON form read back by `legendre_grid_from_dict`, with the exact
    partials when the grid carries them.
    """
    out = {"u": s.u, "v": s.v, "phi0": s.phi0, "phi1": s.phi1}
    if s.exact:
        out.update(zip(PHI_PARTIALS, s.partials()))
    return out


def read_legendre_grid(path):
    if Path(path).suffix.lower() == ".csv":
        table = _read_csv(path, LEGENDRE_COLUMNS)
        u, v, order = _grid_from_rows(table, InvalidLegendreSurface)
        shape = (len(u), len(v))
        phi0 = _columns(table, LEGENDRE_COLUMNS[2:8], order, shape)
        phi1 = _columns(table, LEGENDRE_COLUMNS[8:], order, shape)
        return LegendreSurfaceGrid(u, v, phi0, phi1)
    return legendre_grid_from_dict(read_json(path))


def read_surface(path):
    """
    A Legendre grid when the file carries phi0/phi1, else a Euclidean grid.
    """
    if Path(path).suffix.lower() == ".csv":
        header = Path(path).read_text(encoding="utf-8").splitlines()[:1]
        if header and "phi0_0" in header[0]:
            return read_legendre_grid(path)
        return read_euclidean_grid(path)
    payload = read_json(path)
    if "phi0" in payload:
        return legendre_grid_from_dict(payload)
    return euclidean_grid_from_dict(payload)


# Curves

def curve_from_dict(payload):
    """
    {"t": [...], "V0": [[6], ...], "V1": ...} or {"series": {"V0": coef, "V1": coef}}.
    """
    if "series" in payload:
        series = payload["series"]
        try:
            return LegendreCurveSamples(PowerSeries(series["V0"]), PowerSeries(series["V1"]))
        except KeyError as error:
            raise InvalidLegendreCurve(f"curve series lacks {error.args[0]!r}")
    try:
        return LegendreCurveSamples(payload["V0"], payload["V1"], payload["t"])
    except KeyError as error:
        raise InvalidLegendreCurve(f"curve JSON lacks {error.args[0]!r}")


def read_curve(path):
    return curve_from_dict(read_json(path))


def curve_to_dict(curve):
    if curve.is_series:
        return {"series": {"V0": curve.V0.coef, "V1": curve.V1.coef}}
    return {"t": curve.t, "V0": curve.V0, "V1": curve.V1}


# Cauchy data

def cauchy_from_dict(payload):
    """
    CauchyData and the requested order (or None) from the Cauchy JSON layout.
    """
    missing = [name for name in ("k0", "k1", "k2", "k3", "h", "w") if name not in payload]
    if missing:
        raise InvalidRunConfig(f"Cauchy data lacks {', '.join(missing)}")
    frame0 = payload.get("R0", "identity")
    if isinstance(frame0, str):
        if frame0 != "identity":
            raise InvalidRunConfig(f"R0 must be 'identity' or 36 numbers, got {frame0!r}")
        frame0 = None
    else:
        frame0 = np.asarray(frame0, dtype=float)
        if frame0.size != 36:
            raise InvalidRunConfig(f"R0 has {frame0.size} entries, expected 36")
        frame0 = frame0.reshape(6, 6)
    data = CauchyData(
        payload["k0"], payload["k1"], payload["k2"], payload["k3"], payload["h"], payload["w"],
        frame0=frame0, mu=payload.get("mu"),
    )
    order = payload.get("order")
    return data, None if order is None else int(order)


def read_cauchy(path):
    return cauchy_from_dict(read_json(path))


# Writers

def grid_columns(u, v, fields):
    """
    Flatten (nu, nv, ...) fields into CSV columns next to the u and v columns.
    """
    U, V = np.meshgrid(u, v, indexing="ij")
    columns = {"u": U.reshape(-1), "v": V.reshape(-1)}
    for name, value in fields.items():
        value = np.asarray(value, dtype=float)
        flat = value.reshape(U.size, -1)
        if flat.shape[1] == 1:
            columns[name] = flat[:, 0]
        else:
            for i in range(flat.shape[1]):
                columns[f"{name}_{i}"] = flat[:, i]
    return columns


def write_csv(path, columns):
    names = list(columns)
    table = np.column_stack([np.asarray(columns[name], dtype=float) for name in names])
    np.savetxt(path, table, delimiter=",", header=",".join(names), comments="", fmt="%.17g")


def write_obj(path, points, normals=None):
    """
    Wavefront OBJ of a (nu, nv, 3) point grid, two triangles per cell.
    """
    points = np.asarray(points, dtype=float)
    nu, nv = points.shape[:2]
    lines = [f"v {x:.12g} {y:.12g} {z:.12g}" for x, y, z in points.reshape(-1, 3)]
    if normals is not None:
        lines += [f"vn {x:.12g} {y:.12g} {z:.12g}" for x, y, z in np.asarray(normals).reshape(-1, 3)]

    def ref(i, j):
        k = i * nv + j + 1
        return f"{k}//{k}" if normals is not None else f"{k}"

    for i in range(nu - 1):
        for j in range(nv - 1):
            lines.append(f"f {ref(i, j)} {ref(i + 1, j)} {ref(i + 1, j + 1)}")
            lines.append(f"f {ref(i, j)} {ref(i + 1, j + 1)} {ref(i, j + 1)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.debug(f"wrote {nu * nv} vertices to {path}")

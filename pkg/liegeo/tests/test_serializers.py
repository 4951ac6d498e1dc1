import json

import numpy as np
import pytest

from liegeo import surfaces
from liegeo.exceptions import InvalidLegendreCurve, InvalidRunConfig, InvalidSurfaceGrid
from liegeo.lie_core import LieGroupElement, Sphere
from liegeo.serializers import (
    cauchy_from_dict,
    curve_from_dict,
    dumps,
    grid_columns,
    read_euclidean_grid,
    read_json,
    read_surface,
    write_csv,
    write_json,
    write_obj,
)
from liegeo.series import PowerSeries
from liegeo.surface_invariants import EuclideanSurfaceGrid, LegendreSurfaceGrid, lift_euclidean


@pytest.fixture
def small_grid():
    return surfaces.ellipsoid(5, 4)


def euclidean_columns(grid, reverse=False):
    U, V = np.meshgrid(grid.u, grid.v, indexing="ij")
    columns = {"u": U.reshape(-1), "v": V.reshape(-1)}
    for prefix, value in (("f", grid.f), ("n", grid.n)):
        for i, axis in enumerate("xyz"):
            columns[prefix + axis] = value[..., i].reshape(-1)
    if reverse:
        columns = {name: column[::-1] for name, column in columns.items()}
    return columns


def test_encoder_knows_the_domain_types():
    payload = json.loads(dumps({
        "float": np.float64(1.5),
        "array": np.arange(3),
        "flag": np.bool_(True),
        "frame": LieGroupElement.identity(),
        "series": PowerSeries([1.0, 2.0]),
        "sphere": Sphere((0.0, 0.0, 1.0), 2.0),
    }))
    assert payload["float"] == 1.5
    assert payload["array"] == [0, 1, 2]
    assert payload["flag"] is True
    assert payload["frame"] == np.eye(6).reshape(-1).tolist()
    assert payload["series"] == {"order": 1, "coef": [1.0, 2.0]}
    assert payload["sphere"] == {"center": [0.0, 0.0, 1.0], "radius": 2.0, "kind": "sphere"}


def test_dumps_is_deterministic():
    assert dumps({"b": 1, "a": [2]}) == '{\n  "a": [\n    2\n  ],\n  "b": 1\n}\n'


def test_csv_grid_rows_may_come_in_any_order(tmp_path, small_grid):
    path = tmp_path / "grid.csv"
    write_csv(path, euclidean_columns(small_grid, reverse=True))
    grid = read_euclidean_grid(path)
    assert isinstance(grid, EuclideanSurfaceGrid)
    np.testing.assert_array_equal(grid.u, small_grid.u)
    np.testing.assert_array_equal(grid.f, small_grid.f)
    np.testing.assert_array_equal(grid.n, small_grid.n)


def test_csv_grid_errors(tmp_path, small_grid):
    columns = euclidean_columns(small_grid)
    incomplete = tmp_path / "incomplete.csv"
    write_csv(incomplete, {name: column[:-1] for name, column in columns.items()})
    with pytest.raises(InvalidSurfaceGrid):
        read_euclidean_grid(incomplete)
    missing = tmp_path / "missing.csv"
    write_csv(missing, {name: column for name, column in columns.items() if name != "nz"})
    with pytest.raises(InvalidRunConfig):
        read_euclidean_grid(missing)


def test_read_surface_detects_the_grid_kind(tmp_path, small_grid):
    euclidean = tmp_path / "euclidean.json"
    write_json(euclidean, {"u": small_grid.u, "v": small_grid.v, "f": small_grid.f, "n": small_grid.n})
    assert isinstance(read_surface(euclidean), EuclideanSurfaceGrid)
    assert not read_surface(euclidean).exact

    lifted = lift_euclidean(small_grid)
    legendre = tmp_path / "legendre.csv"
    write_csv(legendre, grid_columns(lifted.u, lifted.v, {"phi0": lifted.phi0, "phi1": lifted.phi1}))
    grid = read_surface(legendre)
    assert isinstance(grid, LegendreSurfaceGrid)
    np.testing.assert_array_equal(grid.phi1, lifted.phi1)


def test_read_json_errors(tmp_path):
    with pytest.raises(InvalidRunConfig):
        read_json(tmp_path / "absent.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(InvalidRunConfig):
        read_json(broken)


def test_cauchy_payloads():
    payload = {"k0": [0.1, 0.2], "k1": 0.0, "k2": 0.0, "k3": 0.0, "h": 1.0, "w": 0.0, "order": 4}
    data, order = cauchy_from_dict(payload)
    assert order == 4
    assert data.k0.coef.tolist() == [0.1, 0.2]
    assert data.mu.coef.tolist() == [1.0]
    assert data.frame0 == LieGroupElement.identity()
    with pytest.raises(InvalidRunConfig):
        cauchy_from_dict(dict(payload, R0="rotation"))
    with pytest.raises(InvalidRunConfig):
        cauchy_from_dict(dict(payload, R0=[0.0] * 35))
    with pytest.raises(InvalidRunConfig):
        cauchy_from_dict({name: value for name, value in payload.items() if name != "w"})


def test_curve_payloads():
    curve = curve_from_dict({"series": {"V0": np.eye(6)[[0, 2, 0]].tolist(), "V1": np.eye(6)[[1, 0, 0]].tolist()}})
    assert curve.is_series
    assert curve.V0.order == 2
    with pytest.raises(InvalidLegendreCurve):
        curve_from_dict({"t": [0.0, 0.5, 1.0], "V0": np.zeros((3, 6)).tolist()})


def test_obj_mesh(tmp_path):
    points = np.random.default_rng(0).normal(size=(3, 4, 3))
    path = tmp_path / "mesh.obj"
    write_obj(path, points, normals=points)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert sum(line.startswith("v ") for line in lines) == 12
    assert sum(line.startswith("vn ") for line in lines) == 12
    faces = [line for line in lines if line.startswith("f ")]
    assert len(faces) == 12
    assert faces[0] == "f 1//1 5//5 6//6"
    write_obj(path, points)
    assert "f 1 5 6" in path.read_text(encoding="utf-8").splitlines()

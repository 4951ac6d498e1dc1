from io import StringIO
import json

from django.core.management import call_command
from django.core.management.base import CommandError
import numpy as np
import pytest

from liegeo import models
from liegeo.cauchy_solver import random_cauchy_data
from liegeo.serializers import write_json

ELLIPSOID_WINDOW = "2.0,2.5,1.2,1.5,17,17"

CAUCHY = {"k0": [0.1, 0.05], "k1": 0.2, "k2": -0.1, "k3": 0.0, "h": 0.3, "w": 0.1, "order": 4}


def run(name, **options):
    out = StringIO()
    call_command(name, stdout=out, **options)
    return out.getvalue()


def run_json(name, **options):
    return json.loads(run(name, **options))


@pytest.fixture
def cauchy_input(tmp_path):
    path = tmp_path / "cauchy.json"
    write_json(path, CAUCHY)
    return str(path)


def test_lift_builtin_surface(tmp_path):
    out = tmp_path / "lifted.json"
    assert run("lift", surface="ellipsoid", window="2.0,2.5,1.2,1.5,9,9", out=str(out)) == ""
    report = json.loads(out.read_text(encoding="utf-8"))
    assert np.array(report["phi0"]).shape == (9, 9, 6)
    assert "phi1_v" in report
    assert report["residuals"]["isotropy"] < 1e-12


def test_lift_rejects_bad_input(tmp_path):
    path = tmp_path / "lifted.json"
    run("lift", surface="ellipsoid", window="2.0,2.5,1.2,1.5,5,5", out=str(path))
    with pytest.raises(CommandError) as excinfo:
        run("lift", input=str(path))
    assert excinfo.value.returncode == 2
    with pytest.raises(CommandError) as excinfo:
        run("lift", input=str(path), surface="ellipsoid")
    assert excinfo.value.returncode == 2
    with pytest.raises(CommandError) as excinfo:
        run("lift", surface="ellipsoid", window="0,1,0,1,5,5")
    assert excinfo.value.returncode == 2


def test_invariants_and_minimality(tmp_path):
    report = run_json("invariants", surface="ellipsoid", window=ELLIPSOID_WINDOW)
    assert set(report["invariants"]) == {"q1", "q2", "p1", "p2", "r1", "r2"}
    assert report["coframe"]["orientation"] in (1, -1)
    assert set(report["residuals"]) == {"pfaffian", "invariants", "structure", "zero_curvature"}

    csv = tmp_path / "invariants.csv"
    run("invariants", surface="ellipsoid", window=ELLIPSOID_WINDOW, out=str(csv))
    header = csv.read_text(encoding="utf-8").splitlines()[0].split(",")
    assert header[:4] == ["u", "v", "q1", "q2"]
    assert header[-2:] == ["a", "b"]

    report = run_json("check_minimal", surface="ellipsoid", window="2.0,2.5,1.2,1.5,33,33", margin=3)
    assert report["is_minimal"] is False
    assert report["mean_curvature_vanishes"] is False
    assert report["max_R1"] > report["threshold"]
    assert report["lie_area"] != 0.0


def test_degenerate_surface_exits_with_a_numerical_failure():
    with pytest.raises(CommandError) as excinfo:
        run("invariants", surface="torus")
    assert excinfo.value.returncode == 3
    assert str(excinfo.value).startswith("surface_invariants.DegenerateSurface")


def test_synthesized_curve_through_frenet(tmp_path):
    curvatures = tmp_path / "k.json"
    write_json(curvatures, {"k0": 0.3, "k1": -0.5, "k2": 0.8, "k3": 0.2})
    curve = tmp_path / "curve.json"
    run("synth_curve", input=str(curvatures), order=8, out=str(curve))
    report = run_json("frenet", input=str(curve))
    assert report["mu"] == pytest.approx([1.0])
    assert report["curvatures"]["k2"] == pytest.approx([0.8])
    assert report["linearly_full"] == [True]
    assert report["polarization"] == [True]

    sampled = tmp_path / "sampled.json"
    write_json(curvatures, {"k0": 0.3, "k1": -0.5, "k2": 0.8, "k3": 0.2, "samples": 11, "t1": 0.1})
    run("synth_curve", input=str(curvatures), out=str(sampled))
    assert len(json.loads(sampled.read_text(encoding="utf-8"))["t"]) == 11


def test_synth_curve_needs_all_curvatures(tmp_path):
    path = tmp_path / "k.json"
    write_json(path, {"k0": 0.3, "k1": "steep"})
    with pytest.raises(CommandError) as excinfo:
        run("synth_curve", input=str(path))
    assert excinfo.value.returncode == 2


def test_eds_report():
    report = run_json("eds_report", samples=3, seed=2)
    assert report["is_involutive"] is True
    assert report["samples"] == 3
    assert report["v2_dimensions"] == {"6": 3}
    with pytest.raises(CommandError) as excinfo:
        run("eds_report", samples=0)
    assert excinfo.value.returncode == 2


def test_cauchy(tmp_path, cauchy_input):
    report = run_json("cauchy", input=cauchy_input)
    assert report["order"] == 4
    assert report["verification"]["violations"] == []
    assert "trust" not in report

    mesh = tmp_path / "patch.obj"
    report = run_json("cauchy", input=cauchy_input, order=6, window="-0.02,0.02,-0.02,0.02,5,5", export=str(mesh))
    assert report["order"] == 6
    assert report["trust"] < 1e-3
    assert sum(line.startswith("v ") for line in mesh.read_text(encoding="utf-8").splitlines()) == 25


def test_cauchy_output_passes_check_minimal(tmp_path):
    data = tmp_path / "random.json"
    write_json(data, dict(random_cauchy_data(seed=3, order=6, scale=0.3).as_dict(), order=10))
    surface = tmp_path / "patch.json"
    run("cauchy", input=str(data), window="-0.02,0.02,-0.02,0.02,21,21", export=str(surface))
    report = run_json("check_minimal", input=str(surface), margin=3)
    assert report["is_minimal"] is True
    assert report["mean_curvature_vanishes"] is True
    assert report["max_R1"] <= report["threshold"]


def test_cauchy_errors(tmp_path, cauchy_input):
    with pytest.raises(CommandError) as excinfo:
        run("cauchy", input=cauchy_input, tol=0.0)
    assert excinfo.value.returncode == 2
    with pytest.raises(CommandError) as excinfo:
        run("cauchy", input=str(tmp_path / "absent.json"))
    assert excinfo.value.returncode == 2
    with pytest.raises(CommandError) as excinfo:
        run("cauchy", input=cauchy_input, window="-5,5,-5,5,5,5")
    assert excinfo.value.returncode == 2
    assert str(excinfo.value).startswith("cauchy_solver.WindowTooLarge")


def test_export_obj(tmp_path, cauchy_input):
    mesh = tmp_path / "ellipsoid.obj"
    run("export_obj", surface="ellipsoid", window="2.0,2.5,1.2,1.5,4,3", out=str(mesh))
    lines = mesh.read_text(encoding="utf-8").splitlines()
    assert sum(line.startswith("v ") for line in lines) == 12
    assert sum(line.startswith("f ") for line in lines) == 12

    run("export_obj", input=cauchy_input, order=6, window="-0.02,0.02,-0.02,0.02,3,3", out=str(mesh))
    assert sum(line.startswith("v ") for line in mesh.read_text(encoding="utf-8").splitlines()) == 9
    with pytest.raises(CommandError):
        run("export_obj", input=cauchy_input, out=str(mesh))
    with pytest.raises(CommandError):
        run("export_obj", surface="ellipsoid")


def test_record_persists_runs(db):
    run("eds_report", samples=1, record=True)
    recorded = models.Run.objects.get()
    assert recorded.ok
    assert recorded.command == "eds_report"
    assert recorded.config["samples"] == 1
    assert recorded.report["samples"] == 1

    with pytest.raises(CommandError):
        run("eds_report", samples=0, record=True)
    failed = models.Run.objects.failed().get()
    assert failed.exit_code == 2
    assert failed.error_code == "cli.InvalidRunConfig"
    assert failed.report is None

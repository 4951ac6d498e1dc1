from dataclasses import replace
import re

import numpy as np
import pytest

from liegeo.cauchy_solver import (
    CauchyData,
    evaluate_surface,
    hat_frame,
    hat_transform,
    initial_invariants,
    pde_residuals,
    prolong,
    random_cauchy_data,
    verify_solution,
)
from liegeo.exceptions import CharacteristicData, WindowTooLarge
from liegeo.lie_core import group_residual
from liegeo.series import PowerSeries
from liegeo.surface_invariants import (
    INVARIANTS,
    el_residuals,
    extract_invariants,
    mean_curvature_vanishes,
    reduce_to_normal_frame,
    shape_and_mean_curvature,
    zero_curvature_residual,
)


def interior(x, margin):
    return np.asarray(x)[margin:-margin, margin:-margin]


def reduced_patch(j, radius, n, trust_rtol=None):
    grid = np.linspace(-radius, radius, n)
    patch = evaluate_surface(j, grid, grid, trust_rtol)
    frame, cof = reduce_to_normal_frame(patch.surface)
    return patch, cof, extract_invariants(frame, cof)


def invariant_error(patch, inv, margin):
    return max(
        float(np.max(np.abs(interior(getattr(inv, name) - getattr(patch.invariants, name), margin))))
        for name in INVARIANTS
    )


@pytest.fixture(scope="module")
def sharp_jet():
    return prolong(random_cauchy_data(seed=3, order=6, scale=0.3), 10)


def test_hat_transform_is_a_group_element():
    x = hat_transform(0.7)
    assert group_residual(x) < 1e-14
    assert np.linalg.det(x) == pytest.approx(1.0)
    series = hat_transform(PowerSeries([0.7, 0.2, -0.1]))
    np.testing.assert_allclose(series.coef[0], x)


def test_hatted_curvatures_of_constant_h():
    data = CauchyData(0.0, 0.0, 0.0, 0.0, 2.0, 0.0)
    hat = hat_frame(data, order=4)
    np.testing.assert_allclose(hat.K1.coef, -0.5 * np.eye(5)[0], atol=1e-14)
    np.testing.assert_allclose(hat.K2.coef, 0.5 * np.eye(5)[0], atol=1e-14)
    np.testing.assert_allclose(hat.K3.coef, -1.0 * np.eye(5)[0], atol=1e-14)
    assert hat.residual < 1e-10


def test_initial_invariants_of_a_unit_k0():
    values = initial_invariants(CauchyData(1.0, 0.0, 0.0, 0.0, 0.0, 0.0), order=3)
    base = [float(values[name].coef[0]) for name in ("q1", "q2", "p1", "p2", "r1", "r2")]
    assert base == pytest.approx([-1.0, 1.0, 0.0, 0.0, 0.0, 0.0])


def test_initial_invariants_encode_h_and_w(random_data):
    values = initial_invariants(random_data, order=5)
    h = random_data.padded("h", 5)
    w = random_data.padded("w", 5)
    np.testing.assert_allclose((-3.0 * (values["q1"] + values["q2"])).coef, h.coef, atol=1e-14)
    np.testing.assert_allclose(((values["p1"] - values["p2"]) / 3.0).coef, w.coef, atol=1e-14)


def test_zero_data(zero_data):
    report = verify_solution(prolong(zero_data, 4))
    assert report.order == 4
    assert report.violations() == []
    assert report.max_residual < 1e-12


def test_random_data_satisfy_the_system(random_jet):
    report = verify_solution(random_jet)
    assert report.violations() == []
    assert set(report.two_forms) == {"Theta1", "Theta2", "Omega1", "Omega2", "Omega3", "Omega4"}
    assert len(report.pde) == 8
    assert {"h", "w", "L", "alpha1+alpha2"} <= set(report.boundary)


def test_corrupted_jet_is_flagged(random_jet):
    report = verify_solution(replace(random_jet, r1=random_jet.r1 + 0.1))
    assert "two_forms.Theta1" in report.violations()
    assert "boundary.r1" in report.violations()


def test_curve_carries_the_hatted_frame(random_jet):
    np.testing.assert_allclose(random_jet.on_curve("A").coef, random_jet.hat.frame.coef, atol=1e-10)
    np.testing.assert_allclose(random_jet.on_curve("a").coef, random_jet.on_curve("b").coef, atol=1e-12)


def test_prolongation_is_deterministic(random_data):
    first = prolong(random_data, 4)
    second = prolong(random_data, 4)
    for name, s in first.series().items():
        np.testing.assert_array_equal(s.coef, second.series()[name].coef)


def test_window_must_be_small(random_jet):
    grid = np.linspace(-5.0, 5.0, 11)
    with pytest.raises(WindowTooLarge) as excinfo:
        evaluate_surface(random_jet, grid, grid)
    degree, name = re.match(r"the degree (\d+) terms of (\w+) ", excinfo.value.message).groups()
    assert int(degree) == getattr(random_jet, name).order


def test_evaluated_patch_is_lie_minimal(random_jet):
    grid = np.linspace(-0.05, 0.05, 21)
    patch = evaluate_surface(random_jet, grid, grid)
    patch.surface.validate()
    assert patch.trust < 1e-3
    report = el_residuals(patch.invariants, patch.coframe, margin=1)
    assert report.max_R1 < 1e-3
    assert report.max_R2 < 1e-3


def test_vanishing_line_element_is_characteristic():
    with pytest.raises(CharacteristicData):
        CauchyData(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, mu=0.0)


def test_evolution_equations_vanish_below_the_order(random_jet):
    residuals = pde_residuals(random_jet)
    assert set(residuals) == {"a_v", "b_u", "q1_v", "q2_u", "r1_u", "r2_v", "p1_v", "p2_u"}
    assert max(s.max_abs() for s in residuals.values()) < 1e-10


def test_evaluated_patch_is_integrable(random_jet):
    grid = np.linspace(-0.05, 0.05, 21)
    patch = evaluate_surface(random_jet, grid, grid)
    assert zero_curvature_residual(patch.invariants, patch.coframe) < 1e-3


def test_frame_is_carried_one_degree_further(random_data):
    j = prolong(random_data, 5)
    longer = prolong(random_data, 7)
    assert j.A.order == j.a.order == j.b.order == 6
    assert all(getattr(j, name).order == 5 for name in INVARIANTS)
    for name in ("A", "a", "b"):
        np.testing.assert_allclose(getattr(j, name).coef, getattr(longer, name).truncate(6).coef, rtol=1e-9, atol=1e-12)
    assert j.truncate(4).A.order == 4


def test_invariants_survive_the_pipeline(sharp_jet):
    errors = []
    for n, margin in ((17, 2), (33, 4)):
        patch, _, inv = reduced_patch(sharp_jet, 0.02, n)
        errors.append(invariant_error(patch, inv, margin))
    assert errors[1] < 1e-5
    assert errors[1] < errors[0] / 2.5


def test_cauchy_output_is_minimal(sharp_jet):
    _, cof, inv = reduced_patch(sharp_jet, 0.02, 21)
    report = el_residuals(inv, cof, margin=3)
    assert report.is_minimal
    assert max(report.max_R1, report.max_R2) < 1e-3
    assert mean_curvature_vanishes(shape_and_mean_curvature(inv, cof), report, margin=3)


def test_pipeline_error_decays_with_the_jet_order(random_data):
    j = prolong(random_data, 6)
    radii = np.array([0.08, 0.04, 0.02])
    el, inv_errors = [], []
    for radius in radii:
        patch, cof, inv = reduced_patch(j, radius, 41, trust_rtol=1e-2)
        report = el_residuals(inv, cof, margin=3)
        el.append(max(report.max_R1, report.max_R2))
        inv_errors.append(invariant_error(patch, inv, 3))
    el_slope = np.polyfit(np.log(radii), np.log(el), 1)[0]
    inv_slope = np.polyfit(np.log(radii), np.log(inv_errors), 1)[0]
    assert inv_slope > j.order - 2.5
    assert el_slope > j.order - 3.5

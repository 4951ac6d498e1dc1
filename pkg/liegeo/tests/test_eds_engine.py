import numpy as np
import pytest

from liegeo.eds_engine import (
    DIM,
    TWO_FORMS,
    ConfigPoint,
    TangentValue,
    eval_one_forms,
    eval_two_forms,
    from_coframe,
    integral_elements,
    involutivity_report,
    line_element,
    noncharacteristic_test,
    pair_two_forms,
    polar_system,
    random_config_point,
    random_line_element,
    tangent_of_frames,
    to_coframe,
    two_form_matrices,
    v2_fiber_dimension,
)
from liegeo.exceptions import NotIntegralElement
from liegeo.lie_core import LieGroupElement, algebra_matrix, algebra_residual


@pytest.fixture
def point(rng):
    return random_config_point(rng)


def test_one_forms_on_a_single_direction():
    z = ConfigPoint(LieGroupElement.identity(), q1=1.0, r1=0.5, r2=-0.25)
    t = to_coframe(z, algebra_matrix({(3, 0): 1.0}))
    assert t.a.tolist() == [1.0, 0.0]
    expected = np.zeros(13)
    expected[5] = -1.0
    expected[8] = 2.0
    expected[9] = 1.0
    expected[10] = -0.5
    expected[12] = -0.25
    np.testing.assert_allclose(eval_one_forms(z, t), expected)


def test_coframe_conversions_are_inverse(point, rng):
    t = TangentValue(rng.normal(size=DIM))
    omega, dq, dp, dr = from_coframe(point, t)
    assert algebra_residual(omega) < 1e-12
    np.testing.assert_allclose(to_coframe(point, omega, dq, dp, dr).coords, t.coords, atol=1e-12)

    frame = point.frame.matrix
    np.testing.assert_allclose(tangent_of_frames(point, frame, frame @ omega, dq, dp, dr).coords, t.coords, atol=1e-9)


def test_two_form_matrices_match_pairings(point, rng):
    x, y = rng.normal(size=(2, DIM))
    values = pair_two_forms(point, x, y)
    for name, F in two_form_matrices(point).items():
        np.testing.assert_allclose(F, -F.T)
        assert x @ F @ y == pytest.approx(values[name])


def test_polar_dimensions(point, rng):
    E1 = random_line_element(rng)
    matrix, dim = polar_system(point, E1)
    assert matrix.shape == (19, DIM)
    assert dim == 2
    assert noncharacteristic_test(point, E1)

    characteristic = random_line_element(rng, characteristic=True)
    assert polar_system(point, characteristic)[1] > 2
    assert not noncharacteristic_test(point, characteristic)


def test_polar_system_needs_an_integral_line(point):
    t = line_element(1.0, 1.0).coords.copy()
    t[4] = 0.1
    with pytest.raises(NotIntegralElement):
        polar_system(point, TangentValue(t))


def test_integral_elements_of_the_ideal(point, rng):
    assert v2_fiber_dimension(point) == 6
    for E in integral_elements(point, count=3, seed=rng):
        assert E.t1.a.tolist() == [1.0, 0.0]
        assert E.t2.a.tolist() == [0.0, 1.0]
        assert np.max(np.abs(E.plane[:26])) < 1e-12
        values = eval_two_forms(point, E)
        assert values.shape == (len(TWO_FORMS),)
        assert np.max(np.abs(values)) < 1e-10 * max(1.0, float(np.max(np.abs(E.plane))))


def test_involutivity_report_is_reproducible():
    report = involutivity_report(samples=5, seed=1)
    assert report == involutivity_report(samples=5, seed=1)
    assert report.samples == 5
    assert report.noncharacteristic == 5
    assert report.polar_dims == {2: 5}
    assert report.v2_dimensions == {6: 5}
    assert report.is_involutive
    assert report.max_two_form_residual < 1e-8

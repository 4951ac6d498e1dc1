from math import factorial

import numpy as np
import pytest

from liegeo.lie_core import inner
from liegeo.series import BivariateSeries, PowerSeries, stack


def test_reciprocal_of_geometric_series():
    s = PowerSeries([1.0, -1.0, 0.0, 0.0, 0.0])
    np.testing.assert_allclose(s.reciprocal().coef, np.ones(5))
    np.testing.assert_allclose((s * s.reciprocal()).coef, [1, 0, 0, 0, 0], atol=1e-15)


def test_exp_sqrt_and_calculus():
    t = PowerSeries.variable(6)
    np.testing.assert_allclose(t.exp().coef, [1.0 / factorial(n) for n in range(7)])
    square = (1.0 + t) * (1.0 + t)
    np.testing.assert_allclose(square.sqrt().coef, [1, 1, 0, 0, 0, 0, 0], atol=1e-15)
    s = PowerSeries([2.0, 3.0, 4.0])
    assert s.deriv().coef.tolist() == [3.0, 8.0]
    np.testing.assert_allclose(s.integ(1.0).coef, [1.0, 2.0, 1.5, 4.0 / 3.0])
    np.testing.assert_allclose(s.derivatives(), [2.0, 3.0, 8.0])
    assert s(0.5) == pytest.approx(2.0 + 1.5 + 1.0)


def test_mixed_orders_truncate_to_the_lower():
    a = PowerSeries(np.arange(1.0, 6.0))
    b = PowerSeries([1.0, 1.0])
    assert (a * b).order == 1
    assert (a + b).order == 1
    with pytest.raises(ValueError):
        b.truncate(3)


def test_matrix_valued_products():
    X = np.array([[0.0, 1.0], [-1.0, 0.0]])
    A = PowerSeries(np.stack([np.eye(2), X, np.zeros((2, 2))]))
    B = PowerSeries(np.stack([np.eye(2), -X, np.zeros((2, 2))]))
    product = A @ B
    np.testing.assert_allclose(product.coef[0], np.eye(2))
    np.testing.assert_allclose(product.coef[1], 0.0)
    np.testing.assert_allclose(product.coef[2], -X @ X)


def test_inner_product_runs_on_vector_series():
    V = PowerSeries(np.stack([[1.0, 0, 0, 0, 0, 0], [0, 0, 1.0, 0, 0, 0]]))
    W = PowerSeries(np.stack([[0, 0, 0, 0, 0, -1.0], [0, 0, 1.0, 0, 0, 0]]))
    # <e0, -e5> = 1, and the linear cross terms vanish
    np.testing.assert_allclose(inner(V, W).coef, [1.0, 0.0])


def test_bivariate_reciprocal_and_partials():
    u, v = BivariateSeries.variables(4)
    s = (1.0 - u - v).reciprocal()
    for i in range(5):
        for j in range(5 - i):
            assert s.coef[i, j] == pytest.approx(factorial(i + j) / (factorial(i) * factorial(j)))
    assert (u * u * v).deriv("u").coef[1, 1] == pytest.approx(2.0)
    assert (u * u * v).deriv("v").coef[2, 0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        u.deriv("w")


def test_restriction_to_the_antidiagonal():
    u, v = BivariateSeries.variables(3)
    np.testing.assert_allclose((u * v).along(1.0, -1.0).coef, [0, 0, -1, 0])
    assert (2.0 + u * v)(0.5, -0.5) == pytest.approx(1.75)


def test_stack_truncates_to_the_lowest_order():
    a = PowerSeries([1.0, 2.0, 3.0])
    b = PowerSeries([4.0, 5.0])
    s = stack([a, b])
    assert s.order == 1
    assert s.shape == (2,)
    np.testing.assert_allclose(s.coef, [[1.0, 4.0], [2.0, 5.0]])

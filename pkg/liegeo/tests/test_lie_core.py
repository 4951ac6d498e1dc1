import numpy as np
import pytest
from scipy import linalg

from liegeo.exceptions import (
    InvalidContactElement,
    InvalidGroupElement,
    InvalidQuadricPoint,
    NonUnitNormal,
    SignAlignmentFailure,
    SignatureFailure,
)
from liegeo.legendre_curves import curvature_matrix
from liegeo.lie_core import (
    METRIC,
    ContactElement,
    DupinElement,
    Infinity,
    LieAlgebraElement,
    LieGroupElement,
    Plane,
    PointSphere,
    QuadricPoint,
    Sphere,
    algebra_basis,
    algebra_matrix,
    algebra_residual,
    align_signs,
    complete_frame,
    contact_element_point,
    contact_lift,
    dupin_metric_eval,
    g0_element,
    group_action,
    group_residual,
    inner,
    maurer_cartan,
    oriented_contact,
    project_to_group,
    quadric_to_sphere,
    random_algebra_element,
    signature,
    sphere_to_quadric,
    sphere_vector,
)


def test_metric_signature():
    assert signature(METRIC) == (4, 2, 0)


def test_sphere_round_trips():
    sphere = quadric_to_sphere(sphere_to_quadric(Sphere((1.0, 2.0, 3.0), 0.5)))
    assert isinstance(sphere, Sphere)
    assert sphere.center == pytest.approx((1.0, 2.0, 3.0))
    assert sphere.radius == pytest.approx(0.5)

    # negative radius is the opposite orientation
    assert quadric_to_sphere(sphere_to_quadric(Sphere((0.0, 0.0, 0.0), -2.0))).radius == pytest.approx(-2.0)

    point = quadric_to_sphere(sphere_to_quadric(PointSphere((0.5, -1.0, 2.0))))
    assert isinstance(point, PointSphere)
    assert point.point == pytest.approx((0.5, -1.0, 2.0))

    plane = quadric_to_sphere(sphere_to_quadric(Plane((0.0, 0.0, 1.0), (0.0, 0.0, 1.0))))
    assert isinstance(plane, Plane)
    assert plane.normal == pytest.approx((0.0, 0.0, 1.0))
    assert plane.point == pytest.approx((0.0, 0.0, 1.0))

    assert isinstance(quadric_to_sphere(sphere_to_quadric(Infinity())), Infinity)


def test_quadric_point_validation():
    with pytest.raises(InvalidQuadricPoint):
        QuadricPoint(np.eye(6)[2])
    with pytest.raises(InvalidQuadricPoint):
        QuadricPoint(np.zeros(6))
    with pytest.raises(NonUnitNormal):
        Plane((0.0, 0.0, 0.0), (0.0, 0.0, 2.0))
    # representatives are normalized, so proportional vectors are equal points
    v = sphere_vector(np.array([1.0, 0.0, 0.0]), 1.0)
    assert QuadricPoint(v) == QuadricPoint(-3.0 * v)


def test_random_spheres_are_isotropic(rng):
    centers = rng.normal(size=(500, 3)) * 10.0
    radii = rng.normal(size=500) * 5.0
    V = sphere_vector(centers, radii)
    norms = np.linalg.norm(V, axis=-1)
    assert np.all(np.abs(inner(V, V)) <= 1e-12 * norms ** 2)


def test_oriented_contact_agrees_with_tangency(rng):
    for _ in range(200):
        c = rng.normal(size=3)
        r, s = rng.normal(size=2)
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        first = sphere_to_quadric(Sphere(tuple(c), r))
        tangent = sphere_to_quadric(Sphere(tuple(c + (r - s) * d), s))
        assert oriented_contact(first, tangent)
        # |c - c'| = |r - s| fails once the second sphere is shrunk
        apart = sphere_to_quadric(Sphere(tuple(c + (r - s) * d), s + 0.5))
        assert not oriented_contact(first, apart)


def test_contact_lift_and_projection():
    p = np.array([0.3, -1.2, 2.0])
    n = np.array([1.0, 2.0, 2.0]) / 3.0
    element = contact_lift(p, n)
    point, normal = contact_element_point(element)
    np.testing.assert_allclose(point, p, atol=1e-12)
    np.testing.assert_allclose(normal, n, atol=1e-12)
    with pytest.raises(NonUnitNormal):
        contact_lift(p, 2.0 * n)
    with pytest.raises(InvalidContactElement):
        ContactElement(element.V, element.V)


def test_group_elements(group_element):
    a = group_element
    assert group_residual(a.matrix) < 1e-10
    assert (a @ a.inverse()) == LieGroupElement.identity()
    # A and -A are the same transformation
    assert LieGroupElement(-a.matrix) == a
    with pytest.raises(InvalidGroupElement):
        LieGroupElement(2.0 * np.eye(6))
    q = sphere_to_quadric(Sphere((1.0, 1.0, 0.0), 0.7))
    moved = group_action(a, q)
    assert abs(inner(moved.rep, moved.rep)) < 1e-10


def test_algebra_basis():
    basis = algebra_basis()
    assert basis.shape == (15, 6, 6)
    assert max(algebra_residual(x) for x in basis) < 1e-15
    assert np.linalg.matrix_rank(basis.reshape(15, 36)) == 15
    x = LieAlgebraElement(algebra_matrix({(0, 0): 0.3, (3, 0): 1.0, (0, 4): -0.2}))
    assert x.coordinates()[0] == pytest.approx(0.3)
    assert group_residual(x.exp().matrix) < 1e-12


def test_structure_group_elements(rng):
    theta = 0.4
    rotation = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    x = g0_element(D=[[2.0, 0.3], [0.0, 0.5]], B=rotation, Y=rng.normal(size=(2, 2)), b=0.7)
    assert group_residual(x) < 1e-12
    assert np.linalg.det(x) == pytest.approx(1.0)


def test_projection_and_sign_alignment(group_element, rng):
    noisy = group_element.matrix + 1e-6 * rng.normal(size=(6, 6))
    assert group_residual(project_to_group(noisy)) < 1e-10

    samples = np.stack([np.eye(6) * (1.0 + 0.01 * i) for i in range(5)])
    samples[2] *= -1.0
    aligned, signs = align_signs(samples)
    assert signs.tolist() == [1.0, 1.0, -1.0, 1.0, 1.0]
    assert np.all(aligned[:, 0, 0] > 0)
    with pytest.raises(SignAlignmentFailure):
        align_signs(np.stack([np.eye(6), 3.0 * np.eye(6)]))


def test_complete_frame_of_a_contact_lift():
    element = contact_lift(np.array([0.1, 0.2, 0.3]), np.array([0.0, 0.6, 0.8]))
    frame = complete_frame(element.V, element.W)
    assert group_residual(frame) < 1e-10
    assert np.linalg.det(frame) == pytest.approx(1.0)
    np.testing.assert_allclose(frame[:, 0], element.V)
    np.testing.assert_allclose(frame[:, 1], element.W)


def test_dupin_elements():
    e = np.eye(6)
    element = DupinElement((e[2], e[3], e[0] + e[5]))
    assert signature(element.gram()) == (2, 1, 0)
    with pytest.raises(SignatureFailure):
        DupinElement((e[2], e[3], e[0]))


def test_random_algebra_elements(rng):
    x = random_algebra_element(rng)
    assert algebra_residual(x) < 1e-12


def test_maurer_cartan_of_one_parameter_subgroup(rng):
    x = random_algebra_element(rng, 0.5)
    t = np.linspace(0.0, 1.0, 201)
    frames = [linalg.expm(s * x) for s in t]
    frames[1::2] = [-a for a in frames[1::2]]
    omega = maurer_cartan(frames, t[1] - t[0])
    assert omega.shape == (201, 6, 6)
    assert np.max(np.abs(omega - x)) < 1e-3
    assert max(algebra_residual(w) for w in omega) < 1e-3

    constant = maurer_cartan([np.eye(6)] * 5, 0.1)
    assert np.max(np.abs(constant)) == 0.0


def test_dupin_metric():
    assert dupin_metric_eval(np.zeros((6, 6))) == 0.0
    w = np.zeros((6, 6))
    w[3, 2] = 2.0
    assert dupin_metric_eval(w) == pytest.approx(-2.0)
    assert dupin_metric_eval(curvature_matrix(0.3, -0.5, 0.8, 0.2)) == pytest.approx(-1.0)

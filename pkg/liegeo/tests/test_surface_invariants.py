import numpy as np
import pytest

from liegeo import surfaces
from liegeo.exceptions import (
    DegenerateSurface,
    InvalidSurfaceGrid,
    NonUnitNormal,
    NotCurvatureLineCoordinates,
    StalkCollapse,
)
from liegeo.lie_core import DUPIN_CROSS_WEIGHT, algebra_residual, group_residual, random_group_element
from liegeo.surface_invariants import (
    INVARIANTS,
    InvariantField,
    Coframe,
    EuclideanSurfaceGrid,
    blaschke_coframe_closed_form,
    el_residuals,
    extract_invariants,
    frame_matrices,
    gauss_map,
    lie_area,
    lift_euclidean,
    mean_curvature_vanishes,
    pfaffian_residuals,
    principal_data,
    reduce_to_normal_frame,
    shape_and_mean_curvature,
    stalk_ranks,
    structure_residuals,
)


def pipeline(grid):
    frame, cof = reduce_to_normal_frame(lift_euclidean(grid))
    return frame, cof, extract_invariants(frame, cof)


def interior(x, margin=3):
    return np.asarray(x)[margin:-margin, margin:-margin]


@pytest.fixture
def reduced(ellipsoid):
    return pipeline(ellipsoid)


def helicoidal_cylinder(n=9):
    u = np.linspace(0.0, 0.5, n)
    v = np.linspace(0.0, 0.5, n)
    U, V = np.meshgrid(u, v, indexing="ij")
    c, s = np.cos(U + V), np.sin(U + V)
    zero = np.zeros_like(U)
    stack = lambda *xs: np.stack(xs, axis=-1)
    curved = stack(-c, -s, zero)
    return EuclideanSurfaceGrid(
        u, v, stack(c, s, V), stack(c, s, zero),
        f_u=stack(-s, c, zero), f_v=stack(-s, c, zero + 1.0),
        f_uu=curved, f_uv=curved, f_vv=curved,
    )


def test_lift_is_a_legendre_map(ellipsoid):
    s = lift_euclidean(ellipsoid)
    assert s.exact
    residuals = s.residuals()
    assert residuals["isotropy"] < 1e-12
    assert residuals["contact"] < 1e-12
    points, normals = s.points()
    np.testing.assert_allclose(points, ellipsoid.f, atol=1e-10)
    np.testing.assert_allclose(normals, ellipsoid.n, atol=1e-10)
    assert np.all(stalk_ranks(s) == 2)


def test_grid_validation(ellipsoid):
    with pytest.raises(NonUnitNormal):
        EuclideanSurfaceGrid(ellipsoid.u, ellipsoid.v, ellipsoid.f, 2.0 * ellipsoid.n)
    with pytest.raises(InvalidSurfaceGrid):
        EuclideanSurfaceGrid(ellipsoid.u ** 2, ellipsoid.v, ellipsoid.f, ellipsoid.n)
    f = ellipsoid.f.copy()
    f[4, 5, 1] = np.nan
    with pytest.raises(InvalidSurfaceGrid) as excinfo:
        EuclideanSurfaceGrid(ellipsoid.u, ellipsoid.v, f, ellipsoid.n)
    assert excinfo.value.location == (4, 5)


def test_coordinates_must_be_curvature_lines():
    with pytest.raises(NotCurvatureLineCoordinates):
        lift_euclidean(helicoidal_cylinder())


def test_umbilic_and_flat_patches_collapse():
    with pytest.raises(StalkCollapse):
        reduce_to_normal_frame(lift_euclidean(surfaces.sphere(17, 17)))
    with pytest.raises(StalkCollapse):
        reduce_to_normal_frame(lift_euclidean(surfaces.plane()))


def test_torus_is_degenerate():
    with pytest.raises(DegenerateSurface):
        reduce_to_normal_frame(lift_euclidean(surfaces.torus()))


@pytest.fixture(scope="module")
def resolutions():
    return {n: pipeline(surfaces.ellipsoid(n, n)) for n in (33, 65, 129)}


def discretization_error(coarse, fine, names, margin=4):
    return max(
        float(np.max(np.abs(interior(getattr(coarse, name), margin) - interior(getattr(fine, name)[::2, ::2], margin))))
        for name in names
    )


def test_normal_frame_of_the_ellipsoid(reduced):
    frame, cof, inv = reduced
    assert frame.order == 5
    assert group_residual(frame.frames) < 1e-8
    report = pfaffian_residuals(frame, margin=2)
    scale = float(np.max(np.abs(cof.a * cof.b)))
    assert report["max"] < 5e-2 * scale
    assert report["orientation"] == cof.orientation
    assert np.all(cof.a * cof.b * cof.orientation > 0)
    assert all(np.all(np.isfinite(getattr(inv, name))) for name in INVARIANTS)


def test_pfaffian_residuals_converge_at_second_order(resolutions):
    residuals = [pfaffian_residuals(resolutions[n][0], margin=(n - 1) // 16)["max"] for n in (33, 65, 129)]
    for coarse, fine in zip(residuals, residuals[1:]):
        assert np.log2(coarse / fine) == pytest.approx(2.0, abs=0.3)


def test_invariants_agree_across_resolutions(resolutions):
    _, _, coarse = resolutions[33]
    _, _, fine = resolutions[65]
    for name in INVARIANTS:
        x = interior(getattr(coarse, name), 4)
        y = interior(getattr(fine, name)[::2, ::2], 4)
        scale = max(float(np.max(np.abs(y))), 1.0)
        assert np.max(np.abs(x - y)) < 5e-2 * scale, name


def test_invariants_are_lie_invariant(ellipsoid, resolutions, rng):
    _, cof, inv = resolutions[33]
    _, cof_fine, inv_fine = resolutions[65]
    bound = 10.0 * discretization_error(inv, inv_fine, INVARIANTS)
    coframe_bound = 10.0 * discretization_error(cof, cof_fine, ("a", "b"))
    s = lift_euclidean(ellipsoid)
    for k in range(20):
        frame_t, cof_t = reduce_to_normal_frame(s.transformed(random_group_element(rng, 0.4)))
        inv_t = extract_invariants(frame_t, cof_t)
        for name in INVARIANTS:
            x, y = interior(getattr(inv, name), 4), interior(getattr(inv_t, name), 4)
            assert np.max(np.abs(x - y)) <= bound, (k, name)
        for name in ("a", "b"):
            x, y = np.abs(interior(getattr(cof, name), 4)), np.abs(interior(getattr(cof_t, name), 4))
            assert np.max(np.abs(x - y)) <= coframe_bound, (k, name)


def test_structure_and_euler_lagrange(reduced):
    _, cof, inv = reduced
    residuals = structure_residuals(inv, cof, margin=3)
    assert set(residuals) == {"d_alpha1", "d_alpha2", "Omega1", "Omega2", "Omega3", "Omega4", "Theta1-Theta2"}
    assert residuals["d_alpha1"]["max"] < 1e-2 * float(np.max(np.abs(cof.a * cof.b)))
    report = el_residuals(inv, cof, margin=3)
    assert not report.is_minimal
    assert report.R1.shape == cof.a.shape
    assert report.max_R1 > report.threshold


def test_mean_curvature_is_the_sum_of_the_euler_lagrange_forms(reduced):
    _, cof, inv = reduced
    shape = shape_and_mean_curvature(inv, cof)
    report = el_residuals(inv, cof, margin=3)
    assert shape.S11.shape == cof.a.shape + (7,)
    np.testing.assert_allclose(shape.H, shape.S12[..., 0] + shape.S21[..., 0])
    np.testing.assert_allclose(shape.H, report.R1 + report.R2, rtol=1e-12, atol=1e-12)
    assert not mean_curvature_vanishes(shape, report, margin=3)


def test_mean_curvature_without_r_vanishes():
    u = np.linspace(0.0, 1.0, 7)
    inv = InvariantField.constant((7, 7), q1=0.3, q2=-0.2, p1=1.5, p2=0.4, r1=0.0, r2=0.0)
    shape = shape_and_mean_curvature(inv, Coframe(u, u, 2.0, 3.0))
    assert np.max(np.abs(shape.H)) == 0.0
    assert shape.discrepancy == pytest.approx(4.0 * 1.5 * 0.3)


def test_gauss_map_pulls_back_the_dupin_metric(reduced):
    frame, _, _ = reduced
    report = gauss_map(frame)
    assert report.relative_deviation < 1e-2
    assert report.element(*frame.anchor).gram().shape == (3, 3)
    assert gauss_map(frame, cross_weight=DUPIN_CROSS_WEIGHT).deviation == report.deviation


def test_closed_form_coframe(resolutions):
    _, cof, _ = resolutions[129]
    closed = blaschke_coframe_closed_form(surfaces.ellipsoid(129, 129))
    np.testing.assert_allclose(np.abs(interior(closed.a, 8)), np.abs(interior(cof.a, 8)), rtol=1e-3)
    np.testing.assert_allclose(np.abs(interior(closed.b, 8)), np.abs(interior(cof.b, 8)), rtol=1e-3)


def test_lie_area_of_a_constant_coframe():
    u = np.linspace(0.0, 1.0, 5)
    v = np.linspace(0.0, 2.0, 9)
    assert lie_area(Coframe(u, v, 2.0, 3.0)) == pytest.approx(12.0)


def test_principal_curvatures_of_a_sphere():
    data = principal_data(surfaces.sphere(9, 9))
    np.testing.assert_allclose(np.abs(data.k1), 1.0, atol=1e-12)
    np.testing.assert_allclose(data.k1, data.k2, atol=1e-12)
    assert np.all(data.g11 > 0) and np.all(data.g22 > 0)


def test_reversed_v_keeps_the_curvatures(ellipsoid):
    flipped = ellipsoid.reversed_v()
    assert np.all(np.diff(flipped.v) > 0)
    np.testing.assert_allclose(flipped.f, ellipsoid.f[:, ::-1])
    before, after = principal_data(ellipsoid), principal_data(flipped)
    np.testing.assert_allclose(after.k1, before.k1[:, ::-1], rtol=1e-10)
    np.testing.assert_allclose(after.k2, before.k2[:, ::-1], rtol=1e-10)


def test_frame_matrices_are_in_the_algebra():
    inv = InvariantField.constant((3, 2), q1=0.3, q2=-0.2, p1=1.5, p2=0.4, r1=0.1, r2=-0.7)
    M1, M2 = frame_matrices(inv)
    assert M1.shape == M2.shape == (3, 2, 6, 6)
    assert algebra_residual(M1) < 1e-15
    assert algebra_residual(M2) < 1e-15
    assert np.all(M1[..., 0, 1] == 1.0) and np.all(M2[..., 1, 0] == 1.0)

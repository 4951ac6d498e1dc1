"""
Analytic surface patches in curvature-line coordinates, with exact first and
second partials. They back the test suite and the CLI demo inputs.
"""

import numpy as np

from .surface_invariants import EuclideanSurfaceGrid

# squared semi-axes of the default triaxial ellipsoid: axes 1.7, 1.3, 1
ELLIPSOID_AXES_SQUARED = (2.89, 1.69, 1.0)


def _mesh(u_range, v_range, nu, nv):
    u = np.linspace(u_range[0], u_range[1], nu)
    v = np.linspace(v_range[0], v_range[1], nv)
    U, V = np.meshgrid(u, v, indexing="ij")
    return u, v, U, V


def ellipsoid(nu=33, nv=33, u_range=(2.0, 2.5), v_range=(1.2, 1.5), axes_squared=ELLIPSOID_AXES_SQUARED):
    """
    Triaxial ellipsoid x^2/e1 + y^2/e2 + z^2/e3 = 1 in elliptic coordinates
    e3 < v < e2 < u < e1, positive octant:

        x_i^2 = e_i (e_i - u)(e_i - v) / prod_{j != i} (e_i - e_j)
    """
    e = np.asarray(axes_squared, dtype=float)
    if not (e[0] > u_range[1] and u_range[0] > e[1] and e[1] > v_range[1] and v_range[0] > e[2]):
        raise ValueError(f"patch u={u_range}, v={v_range} is not inside the elliptic chart of {tuple(e)}")
    u, v, U, V = _mesh(u_range, v_range, nu, nv)
    denominators = np.array([
        (e[0] - e[1]) * (e[0] - e[2]),
        (e[1] - e[0]) * (e[1] - e[2]),
        (e[2] - e[0]) * (e[2] - e[1]),
    ])
    eu = e - U[..., None]
    ev = e - V[..., None]
    f = np.sqrt(e * eu * ev / denominators)
    normal = f / e
    normal = normal / np.linalg.norm(normal, axis=-1, keepdims=True)
    return EuclideanSurfaceGrid(
        u, v, f, normal,
        f_u=-f / (2.0 * eu),
        f_v=-f / (2.0 * ev),
        f_uu=-f / (4.0 * eu ** 2),
        f_uv=f / (4.0 * eu * ev),
        f_vv=-f / (4.0 * ev ** 2),
    )


def _tube(u, v, U, V, center_radius, radius):
    """
    Surface of revolution of a circle of `radius` whose center runs on a circle
    of `center_radius` about the z-axis; u is the angle on the profile circle.
    """
    cu, su = np.cos(U), np.sin(U)
    cv, sv = np.cos(V), np.sin(V)
    rho = center_radius + radius * cu
    zero = np.zeros_like(U)
    stack = lambda *xs: np.stack(xs, axis=-1)
    return EuclideanSurfaceGrid(
        u, v,
        stack(rho * cv, rho * sv, radius * su),
        stack(cu * cv, cu * sv, su),
        f_u=stack(-radius * su * cv, -radius * su * sv, radius * cu),
        f_v=stack(-rho * sv, rho * cv, zero),
        f_uu=stack(-radius * cu * cv, -radius * cu * sv, -radius * su),
        f_uv=stack(radius * su * sv, -radius * su * cv, zero),
        f_vv=stack(-rho * cv, -rho * sv, zero),
    )


def torus(nu=33, nv=33, u_range=(0.3, 1.0), v_range=(0.0, 0.6), center_radius=2.0, radius=1.0):
    """
    Torus of revolution. The profile curvature is constant, so one family of
    curvature spheres is constant along its lines.
    """
    return _tube(*_mesh(u_range, v_range, nu, nv), center_radius, radius)


def sphere(nu=33, nv=33, u_range=(0.2, 0.8), v_range=(0.1, 0.7), radius=1.0):
    """
    Round sphere patch in latitude/longitude; every point is umbilic.
    """
    return _tube(*_mesh(u_range, v_range, nu, nv), 0.0, radius)


def plane(nu=17, nv=17, u_range=(0.0, 1.0), v_range=(0.0, 1.0)):
    u, v, U, V = _mesh(u_range, v_range, nu, nv)
    zero = np.zeros_like(U)
    one = np.ones_like(U)
    stack = lambda *xs: np.stack(xs, axis=-1)
    flat = stack(zero, zero, zero)
    return EuclideanSurfaceGrid(
        u, v, stack(U, V, zero), stack(zero, zero, one),
        f_u=stack(one, zero, zero), f_v=stack(zero, one, zero),
        f_uu=flat, f_uv=flat, f_vv=flat,
    )


SURFACES = {
    "ellipsoid": ellipsoid,
    "torus": torus,
    "sphere": sphere,
    "plane": plane,
}

"""
Normal frames, Blaschke coframes and invariant functions of discretized
Legendre surfaces, and the structure, Euler-Lagrange and Gauss map checks
built on them.

Grids are (nu, nv, ...) arrays over a rectangular parameter grid with uniform
steps. Derivatives are second-order central differences (`numpy.gradient`
with second-order edges) unless exact partials are supplied.

The reduction to the normal frame runs in five stages. After each stage the
Maurer-Cartan coefficients of the current frame are recomputed and written
as alpha = P1 alpha^1 + P2 alpha^2, with alpha^1 = alpha^3_0 and
alpha^2 = alpha^2_1, and the next stage reads its fiber parameters off P1, P2.
"""

from dataclasses import dataclass, field, replace
import logging

import numpy as np
from scipy import integrate

from . import conf
from .exceptions import (
    DegenerateSurface,
    IllConditionedCoframe,
    InvalidLegendreSurface,
    InvalidSurfaceGrid,
    NonUnitNormal,
    NotCurvatureLineCoordinates,
    SignatureFailure,
    StalkCollapse,
    UmbilicPoint,
)
from .lie_core import (
    DUPIN_CROSS_WEIGHT,
    METRIC,
    SQRT2,
    DupinElement,
    LieGroupElement,
    algebra_matrix,
    align_grid,
    complete_frame,
    contact_lift_vectors,
    contact_points,
    dupin_metric_eval,
    frame_inverse,
    inner,
)

logger = logging.getLogger(__name__)

TINY = np.finfo(float).tiny

INVARIANTS = ("q1", "q2", "p1", "p2", "r1", "r2")

# reverses A1 and A4 and keeps the group
FLIP = np.array([1.0, -1.0, 1.0, 1.0, -1.0, 1.0])


def _d(x, step, axis):
    return np.gradient(x, step, axis=axis, edge_order=2)


def _grid_diff(du, dv):
    def d(x, var):
        return _d(x, du, 0) if var == "u" else _d(x, dv, 1)
    return d


def _first(mask):
    return tuple(int(i) for i in np.argwhere(mask)[0])


def _dot(x, y):
    return (x * y).sum(-1)


def _interior(x, margin):
    if margin <= 0:
        return x
    return x[margin:-margin, margin:-margin]


def _axis(values, name, error):
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or len(values) < 3:
        raise error(f"the {name} axis needs at least 3 samples")
    steps = np.diff(values)
    step = steps.mean()
    if step <= 0 or np.max(np.abs(steps - step)) > 1e-6 * step:
        raise error(f"the {name} axis is not uniformly increasing")
    return values


def _grid_field(value, shape, name, error):
    value = np.asarray(value, dtype=float)
    if value.shape != shape:
        raise error(f"{name} has shape {value.shape}, expected {shape}")
    bad = ~np.isfinite(value)
    if np.any(bad):
        raise error(f"{name} is not finite", location=_first(bad)[:2])
    return value


class _Grid:
    """
    Shared axis bookkeeping of the grid dataclasses.
    """

    @property
    def du(self):
        return float((self.u[-1] - self.u[0]) / (len(self.u) - 1))

    @property
    def dv(self):
        return float((self.v[-1] - self.v[0]) / (len(self.v) - 1))

    @property
    def shape(self):
        return len(self.u), len(self.v)

    @property
    def anchor(self):
        return len(self.u) // 2, len(self.v) // 2


# Euclidean input

PARTIALS = ("f_u", "f_v", "f_uu", "f_uv", "f_vv")


@dataclass(frozen=True, eq=False)
class EuclideanSurfaceGrid(_Grid):
    """
    Positions f and unit normals n over a (u, v) grid, optionally with exact
    partials of f. The coordinates must be curvature-line coordinates.
    """
    u: np.ndarray
    v: np.ndarray
    f: np.ndarray
    n: np.ndarray
    f_u: np.ndarray = None
    f_v: np.ndarray = None
    f_uu: np.ndarray = None
    f_uv: np.ndarray = None
    f_vv: np.ndarray = None
    tol: float = field(default=None, repr=False)

    def __post_init__(self):
        u = _axis(self.u, "u", InvalidSurfaceGrid)
        v = _axis(self.v, "v", InvalidSurfaceGrid)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        shape = (len(u), len(v), 3)
        for name in ("f", "n") + PARTIALS:
            value = getattr(self, name)
            if value is not None or name in ("f", "n"):
                object.__setattr__(self, name, _grid_field(value, shape, name, InvalidSurfaceGrid))
        norms = np.linalg.norm(self.n, axis=-1)
        bad = np.abs(norms - 1.0) > max(conf.tol(self.tol), 1e-12) * 10
        if np.any(bad):
            raise NonUnitNormal(f"|n| = {norms[bad][0]:.12g}", location=_first(bad))

    @property
    def exact(self):
        return all(getattr(self, name) is not None for name in PARTIALS)

    def partials(self):
        p = {name: getattr(self, name) for name in PARTIALS}
        if p["f_u"] is None:
            p["f_u"] = _d(self.f, self.du, 0)
        if p["f_v"] is None:
            p["f_v"] = _d(self.f, self.dv, 1)
        if p["f_uu"] is None:
            p["f_uu"] = _d(p["f_u"], self.du, 0)
        if p["f_uv"] is None:
            p["f_uv"] = _d(p["f_u"], self.dv, 1)
        if p["f_vv"] is None:
            p["f_vv"] = _d(p["f_v"], self.dv, 1)
        return p

    def scaled(self, factor):
        """
        The surface factor * f with the same normals.
        """
        partials = {name: None if getattr(self, name) is None else factor * getattr(self, name)
                    for name in PARTIALS}
        return replace(self, f=factor * self.f, **partials)

    def reversed_v(self):
        """
        Same surface in the coordinates (u, -v).
        """
        def flip(x, sign=1.0):
            return None if x is None else sign * x[:, ::-1]
        return replace(
            self, v=-self.v[::-1], f=flip(self.f), n=flip(self.n),
            f_u=flip(self.f_u), f_v=flip(self.f_v, -1.0),
            f_uu=flip(self.f_uu), f_uv=flip(self.f_uv, -1.0), f_vv=flip(self.f_vv),
        )


@dataclass(frozen=True, eq=False)
class PrincipalData:
    k1: np.ndarray
    k2: np.ndarray
    g11: np.ndarray
    g22: np.ndarray
    shape_operator: np.ndarray


def _sym2(a, b, c):
    return np.stack([np.stack([a, b], -1), np.stack([b, c], -1)], -2)


def principal_data(g, rtol=None):
    """
    Principal curvatures along the u- and v-lines and the metric coefficients
    g11, g22, from the shape operator S = I^-1 II (so that dn = -df S).

    Raises NotCurvatureLineCoordinates where S is not diagonal.
    """
    rtol = conf.get("CURVATURE_LINE_RTOL") if rtol is None else rtol
    p = g.partials()
    f_u, f_v = p["f_u"], p["f_v"]
    first = _sym2(_dot(f_u, f_u), _dot(f_u, f_v), _dot(f_v, f_v))
    second = _sym2(_dot(p["f_uu"], g.n), _dot(p["f_uv"], g.n), _dot(p["f_vv"], g.n))
    S = np.linalg.solve(first, second)
    off = np.abs(S[..., 0, 1]) + np.abs(S[..., 1, 0])
    bad = off > rtol * np.linalg.norm(S, axis=(-2, -1))
    if np.any(bad):
        raise NotCurvatureLineCoordinates(
            f"off-diagonal shape operator entry {np.max(off[bad]):.3e}", location=_first(bad)
        )
    return PrincipalData(S[..., 0, 0], S[..., 1, 1], first[..., 0, 0], first[..., 1, 1], S)


def _point_differential(f, x):
    zero = np.zeros(f.shape[:-1])
    return np.stack([
        zero, x[..., 0] / SQRT2, x[..., 1], x[..., 2], -x[..., 0] / SQRT2, _dot(f, x),
    ], axis=-1)


def _plane_differential(f, n, x, m):
    zero = np.zeros(f.shape[:-1])
    return np.stack([
        zero, m[..., 0] / 2.0, m[..., 1] / SQRT2, m[..., 2] / SQRT2, -m[..., 0] / 2.0,
        (_dot(m, f) + _dot(n, x)) / SQRT2,
    ], axis=-1)


def lift_euclidean(g, rtol=None):
    """
    The contact lift phi0 = F0(f), phi1 = F1(f, n) of a curvature-line grid.

    Exact partials of f carry over to exact partials of phi0 and phi1 through
    the Weingarten equations.
    """
    data = principal_data(g, rtol)
    phi0, phi1 = contact_lift_vectors(g.f, g.n)
    exact = {}
    if g.exact:
        S = data.shape_operator
        n_u = -(S[..., 0, 0, None] * g.f_u + S[..., 1, 0, None] * g.f_v)
        n_v = -(S[..., 0, 1, None] * g.f_u + S[..., 1, 1, None] * g.f_v)
        exact = dict(
            phi0_u=_point_differential(g.f, g.f_u),
            phi0_v=_point_differential(g.f, g.f_v),
            phi1_u=_plane_differential(g.f, g.n, g.f_u, n_u),
            phi1_v=_plane_differential(g.f, g.n, g.f_v, n_v),
        )
    logger.debug(f"lifted {g.shape[0]}x{g.shape[1]} Euclidean grid, exact partials: {g.exact}")
    return LegendreSurfaceGrid(g.u, g.v, phi0, phi1, tol=g.tol, **exact)


# Legendre surfaces

PHI_PARTIALS = ("phi0_u", "phi0_v", "phi1_u", "phi1_v")


def _relative_inner(x, y):
    scale = np.linalg.norm(x, axis=-1) * np.linalg.norm(y, axis=-1)
    return np.abs(inner(x, y)) / np.maximum(scale, TINY)


@dataclass(frozen=True, eq=False)
class LegendreSurfaceGrid(_Grid):
    """
    The spanning maps phi0, phi1 of a Legendre surface over a (u, v) grid,
    optionally with exact first partials.
    """
    u: np.ndarray
    v: np.ndarray
    phi0: np.ndarray
    phi1: np.ndarray
    phi0_u: np.ndarray = None
    phi0_v: np.ndarray = None
    phi1_u: np.ndarray = None
    phi1_v: np.ndarray = None
    tol: float = field(default=None, repr=False)

    def __post_init__(self):
        u = _axis(self.u, "u", InvalidLegendreSurface)
        v = _axis(self.v, "v", InvalidLegendreSurface)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        shape = (len(u), len(v), 6)
        for name in ("phi0", "phi1") + PHI_PARTIALS:
            value = getattr(self, name)
            if value is not None or name in ("phi0", "phi1"):
                object.__setattr__(self, name, _grid_field(value, shape, name, InvalidLegendreSurface))

    @property
    def exact(self):
        return all(getattr(self, name) is not None for name in PHI_PARTIALS)

    def partials(self):
        """
        (phi0_u, phi0_v, phi1_u, phi1_v), exact where supplied.
        """
        out = []
        for name in PHI_PARTIALS:
            value = getattr(self, name)
            if value is None:
                base = getattr(self, name[:4])
                value = _d(base, self.du, 0) if name.endswith("u") else _d(base, self.dv, 1)
            out.append(value)
        return tuple(out)

    def transformed(self, a):
        """
        A . phi for a group element A.
        """
        m = a.matrix if isinstance(a, LieGroupElement) else LieGroupElement(a).matrix
        values = {name: None if getattr(self, name) is None else getattr(self, name) @ m.T
                  for name in ("phi0", "phi1") + PHI_PARTIALS}
        return replace(self, **values)

    def reversed_v(self):
        def flip(x, sign=1.0):
            return None if x is None else sign * x[:, ::-1]
        return replace(
            self, v=-self.v[::-1], phi0=flip(self.phi0), phi1=flip(self.phi1),
            phi0_u=flip(self.phi0_u), phi0_v=flip(self.phi0_v, -1.0),
            phi1_u=flip(self.phi1_u), phi1_v=flip(self.phi1_v, -1.0),
        )

    def points(self):
        """
        Euclidean projection: point and unit normal of each contact element.
        """
        return contact_points(self.phi0, self.phi1)

    def _residual_fields(self):
        p0u, p0v, _, _ = self.partials()
        isotropy = np.maximum.reduce([
            _relative_inner(self.phi0, self.phi0),
            _relative_inner(self.phi1, self.phi1),
            _relative_inner(self.phi0, self.phi1),
        ])
        contact = np.maximum(_relative_inner(p0u, self.phi1), _relative_inner(p0v, self.phi1))
        return isotropy, contact

    def residuals(self):
        isotropy, contact = self._residual_fields()
        return {"isotropy": float(np.max(isotropy)), "contact": float(np.max(contact))}

    def validate(self, isotropy_rtol=None, contact_rtol=None):
        isotropy_rtol = conf.get("ISOTROPY_RTOL") if isotropy_rtol is None else isotropy_rtol
        contact_rtol = conf.get("CONTACT_RTOL") if contact_rtol is None else contact_rtol
        isotropy, contact = self._residual_fields()
        for label, values, limit in (
            ("phi0, phi1 do not span a null plane", isotropy, isotropy_rtol),
            ("<dphi0, phi1> does not vanish", contact, contact_rtol),
        ):
            bad = values > limit
            if np.any(bad):
                raise InvalidLegendreSurface(
                    f"{label}: relative residual {np.max(values):.3e}", location=_first(bad)
                )
        return self


def stalk_ranks(s, rtol=None):
    """
    Rank at each node of the quadratic forms <dphi0, dphi0>, <dphi0, dphi1>,
    <dphi1, dphi1> in the basis du^2, du dv, dv^2.
    """
    rtol = conf.get("STALK_RTOL") if rtol is None else rtol
    p0u, p0v, p1u, p1v = s.partials()

    def form(xu, xv, yu, yv):
        return np.stack([inner(xu, yu), inner(xu, yv) + inner(xv, yu), inner(xv, yv)], -1)

    forms = np.stack([
        form(p0u, p0v, p0u, p0v),
        form(p0u, p0v, p1u, p1v),
        form(p1u, p1v, p1u, p1v),
    ], -2)
    sv = np.linalg.svd(forms, compute_uv=False)
    return np.sum(sv > rtol * np.maximum(sv[..., :1], TINY), axis=-1)


# Frames and coframes

@dataclass(frozen=True, eq=False)
class ReductionState:
    """
    P1, P2 of the final frame and the fiber parameters used by each stage.
    """
    P1: np.ndarray
    P2: np.ndarray
    parameters: dict = field(default_factory=dict)
    orientation: int = 1


@dataclass(frozen=True, eq=False)
class FrameField(_Grid):
    u: np.ndarray
    v: np.ndarray
    frames: np.ndarray
    order: int = 5
    state: ReductionState = None

    def maurer_cartan(self):
        """
        (U, V) with A^-1 dA = U du + V dv.
        """
        return _maurer_cartan(self.frames, self.du, self.dv)

    def element(self, i, j):
        return LieGroupElement(self.frames[i, j])

    def transformed(self, a):
        m = a.matrix if isinstance(a, LieGroupElement) else LieGroupElement(a).matrix
        return replace(self, frames=m @ self.frames)


@dataclass(frozen=True, eq=False)
class Coframe(_Grid):
    """
    alpha^1 = a du, alpha^2 = b dv.

    `orientation` is -1 when the reduction had to reverse the frame
    orientation; a b < 0 in that case.
    """
    u: np.ndarray
    v: np.ndarray
    a: np.ndarray
    b: np.ndarray
    orientation: int = 1

    def __post_init__(self):
        shape = (len(self.u), len(self.v))
        for name in ("a", "b"):
            value = np.broadcast_to(np.asarray(getattr(self, name), dtype=float), shape)
            object.__setattr__(self, name, np.array(value))


def _maurer_cartan(frames, du, dv):
    inv = frame_inverse(frames)
    return inv @ _d(frames, du, 0), inv @ _d(frames, dv, 1)


def reduction_coefficients(U, V, tol=None):
    """
    P1, P2 with U du + V dv = P1 alpha^1 + P2 alpha^2.
    """
    u30, v30, u21, v21 = U[..., 3, 0], V[..., 3, 0], U[..., 2, 1], V[..., 2, 1]
    det = u30 * v21 - v30 * u21
    scale = np.abs(u30 * v21) + np.abs(v30 * u21)
    bad = np.abs(det) <= conf.tol(tol) * max(float(np.max(scale)), TINY)
    if np.any(bad):
        raise IllConditionedCoframe("alpha^1 ^ alpha^2 vanishes", location=_first(bad))

    def w(x):
        return x[..., None, None]

    P1 = (U * w(v21) - V * w(u21)) / w(det)
    P2 = (V * w(u30) - U * w(v30)) / w(det)
    return P1, P2


def _curvature_sphere(d0, d1, w2, w3):
    """
    Unit (x, y) with x d0 + y d1 free of W-components: the right null vector
    of the W-part of [d0 | d1].
    """
    m = np.stack([
        np.stack([inner(d0, w2), inner(d1, w2)], -1),
        np.stack([inner(d0, w3), inner(d1, w3)], -1),
    ], -2)
    _, _, vh = np.linalg.svd(m)
    return vh[..., -1, :]


def _gauge(coefficients, anchor, jump):
    c = np.array(coefficients)
    base = c[anchor]
    if base[np.argmax(np.abs(base))] < 0:
        c[anchor] = -base
    return align_grid(c, anchor, jump)


def _columns(frames):
    return [frames[..., :, k] for k in range(6)]


def _frame(columns):
    return np.stack(columns, axis=-1)


def _times(scalar, vector):
    return scalar[..., None] * vector


def _first_order(s, jump):
    """
    A0, A1 the curvature spheres along v and u, W rotated so that
    alpha^2_0 = 0 and a > 0, and b > 0 at the anchor.
    """
    anchor = s.anchor
    p0u, p0v, p1u, p1v = s.partials()
    t = complete_frame(s.phi0, s.phi1)
    c0 = _gauge(_curvature_sphere(p0v, p1v, t[..., 2], t[..., 3]), anchor, jump)
    c1 = _gauge(_curvature_sphere(p0u, p1u, t[..., 2], t[..., 3]), anchor, jump)
    a0 = c0[..., :1] * s.phi0 + c0[..., 1:] * s.phi1
    a1 = c1[..., :1] * s.phi0 + c1[..., 1:] * s.phi1

    t = complete_frame(a0, a1)
    d = _d(a0, s.du, 0)
    c = np.stack([inner(d, t[..., 2]), inner(d, t[..., 3])], -1)
    norm = np.linalg.norm(c, axis=-1)
    bad = norm <= conf.tol(s.tol) * max(float(np.max(norm)), TINY)
    if np.any(bad):
        raise DegenerateSurface("curvature sphere A0 is constant along u", location=_first(bad))
    e2 = (_times(c[..., 1], t[..., 2]) - _times(c[..., 0], t[..., 3])) / norm[..., None]
    e3 = (_times(c[..., 0], t[..., 2]) + _times(c[..., 1], t[..., 3])) / norm[..., None]
    frames = _frame([a0, a1, e2, e3, t[..., 4], t[..., 5]])

    _, V = _maurer_cartan(frames, s.du, s.dv)
    if V[anchor][2, 1] < 0:
        frames = frames * FLIP
    return frames


def _second_order(frames, P1, P2):
    """
    Kills P^1_01 and P^0_12.
    """
    r0, r1, r2, r3, r4, r5 = _columns(frames)
    y34 = P1[..., 1, 0]
    y25 = P2[..., 0, 1]
    frames = _frame([
        r0,
        r1,
        r2 + _times(y25, r0),
        r3 + _times(y34, r1),
        r4 + _times(y34, r3) + _times(y34 ** 2 / 2.0, r1),
        r5 + _times(y25, r2) + _times(y25 ** 2 / 2.0, r0),
    ])
    return frames, {"y34": y34, "y25": y25}


def _third_order(frames, P1, P2):
    """
    Kills P^0_22 and P^1_31, which agree up to sign on an order-2 frame.
    """
    r0, r1, r2, r3, r4, r5 = _columns(frames)
    b = P2[..., 0, 2] - P1[..., 1, 3]
    frames = _frame([r0, r1, r2, r3, r4 + _times(b / 2.0, r0), r5 - _times(b / 2.0, r1)])
    return frames, {"b": b}


def _fourth_order(frames, P1, P2, anchor, rtol):
    """
    Scales so that alpha^0_1 = alpha^1 and alpha^1_0 = alpha^2.
    """
    p10 = P2[..., 1, 0]
    p01 = P1[..., 0, 1]
    scale = float(np.median(np.linalg.norm(np.concatenate([P1, P2], -1), axis=(-2, -1))))
    for label, value in (("P^1_02", p10), ("P^0_11", p01)):
        bad = np.abs(value) <= rtol * scale
        if np.any(bad):
            raise DegenerateSurface(
                f"{label} vanishes: a curvature sphere map is not an immersion", location=_first(bad)
            )
    orientation = 1
    if p10[anchor] * p01[anchor] < 0:
        logger.warning("P^1_02 and P^0_11 have opposite signs; reversing the frame orientation")
        frames = frames * FLIP
        # the flip negates alpha^0_1 and alpha^2 together, so only P^0_11 changes sign
        p01 = -p01
        orientation = -1
    eps = np.sign(p10)
    A = eps * p10
    B = eps * p01
    bad = B <= 0
    if np.any(bad):
        raise DegenerateSurface("P^1_02 P^0_11 changes sign", location=_first(bad))
    r = np.cbrt(A * B * B)
    s = np.cbrt(A * A * B)
    r0, r1, r2, r3, r4, r5 = _columns(frames)
    frames = _frame([
        _times(r, r0), _times(s, r1), _times(eps, r2), _times(eps, r3),
        _times(1.0 / s, r4), _times(1.0 / r, r5),
    ])
    return frames, {"r": r, "s": s, "epsilon": eps}, orientation


def _fifth_order(frames, P1, P2):
    """
    Kills alpha^0_2 and alpha^1_3.
    """
    r0, r1, r2, r3, r4, r5 = _columns(frames)
    p = -P1[..., 0, 2] / P1[..., 0, 1]
    q = -P2[..., 1, 3] / P2[..., 1, 0]
    frames = _frame([
        r0,
        r1,
        r2 + _times(p, r1),
        r3 + _times(q, r0),
        r4 + _times(p, r2) + _times(p ** 2 / 2.0, r1),
        r5 + _times(q, r3) + _times(q ** 2 / 2.0, r0),
    ])
    return frames, {"p": p, "q": q}


def reduce_to_normal_frame(s, tol=None, jump=None):
    """
    Reduce a nondegenerate Legendre surface grid to its normal frame.

    Returns the order-5 FrameField and the Blaschke coframe. The gauge is
    fixed at the central anchor node (a > 0 there) and propagated by
    nearest-neighbour sign alignment. When P^1_02 and P^0_11 have opposite
    signs the frame orientation is reversed, so that the stage-4 roots are
    real, and the coframe is returned with orientation -1.
    """
    s.validate()
    ranks = stalk_ranks(s)
    bad = ranks < 2
    if np.any(bad):
        raise StalkCollapse(
            "the quadratic forms of dphi0, dphi1 span a 1-dimensional space", location=_first(bad)
        )
    du, dv = s.du, s.dv
    parameters = {}

    def coefficients(frames):
        return reduction_coefficients(*_maurer_cartan(frames, du, dv), tol=tol)

    frames = _first_order(s, jump)
    logger.debug("reduction: first order frame built")
    frames, params = _second_order(frames, *coefficients(frames))
    parameters.update(params)
    frames, params = _third_order(frames, *coefficients(frames))
    parameters.update(params)
    frames, params, orientation = _fourth_order(
        frames, *coefficients(frames), s.anchor, conf.get("DEGENERACY_RTOL")
    )
    parameters.update(params)
    frames, params = _fifth_order(frames, *coefficients(frames))
    parameters.update(params)
    logger.debug("reduction: normal frame reached")

    U, V = _maurer_cartan(frames, du, dv)
    P1, P2 = reduction_coefficients(U, V, tol=tol)
    state = ReductionState(P1, P2, parameters, orientation)
    frame = FrameField(s.u, s.v, frames, order=5, state=state)
    return frame, Coframe(s.u, s.v, U[..., 3, 0], V[..., 2, 1], orientation)


NORMAL_FRAME_CONDITIONS = (
    ("alpha^4_0", lambda w: w[..., 4, 0]),
    ("alpha^2_0", lambda w: w[..., 2, 0]),
    ("alpha^3_1", lambda w: w[..., 3, 1]),
    ("alpha^3_2", lambda w: w[..., 3, 2]),
    ("alpha^1_0-alpha^2_1", lambda w: w[..., 1, 0] - w[..., 2, 1]),
    ("alpha^0_1-alpha^3_0", lambda w: w[..., 0, 1] - w[..., 3, 0]),
    ("alpha^0_2", lambda w: w[..., 0, 2]),
    ("alpha^1_3", lambda w: w[..., 1, 3]),
)


def pfaffian_residuals(frame, margin=0):
    """
    Max |.| of each normal-frame Pfaffian condition over both coordinate
    directions, on the grid minus `margin` boundary layers.
    """
    U, V = frame.maurer_cartan()
    report = {}
    for name, entry in NORMAL_FRAME_CONDITIONS:
        report[name] = float(max(
            np.max(np.abs(_interior(entry(U), margin))),
            np.max(np.abs(_interior(entry(V), margin))),
        ))
    report["max"] = max(report.values())
    area = U[..., 3, 0] * V[..., 2, 1] - V[..., 3, 0] * U[..., 2, 1]
    report["orientation"] = 1 if np.all(area > 0) else -1 if np.all(area < 0) else 0
    return report


# Invariant functions

@dataclass(frozen=True, eq=False)
class InvariantField:
    q1: np.ndarray
    q2: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    residuals: dict = field(default_factory=dict)

    def as_dict(self):
        return {name: getattr(self, name) for name in INVARIANTS}

    @classmethod
    def constant(cls, shape, **values):
        return cls(**{name: np.full(shape, float(values.get(name, 0.0))) for name in INVARIANTS})


def _check_coframe(a, b, tol):
    tol = conf.tol(tol)
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))), TINY)
    bad = (np.abs(a) <= tol * scale) | (np.abs(b) <= tol * scale)
    if np.any(bad):
        raise IllConditionedCoframe("a coframe coefficient vanishes", location=_first(bad))


def extract_invariants(frame, cof, tol=None):
    """
    q, p, r from the normal frame's Maurer-Cartan coefficients:

        alpha^0_0 = -2 q1 alpha^1 + q2 alpha^2
        alpha^1_1 = -q1 alpha^1 + 2 q2 alpha^2
        alpha^0_3 = r1 alpha^1 + p2 alpha^2
        alpha^1_2 = p1 alpha^1 + r2 alpha^2
        alpha^0_4 = -r2 alpha^1 + r1 alpha^2

    Each unknown is the least-squares solution over both coordinate
    directions; the leftover of every relation is reported.
    """
    a, b = cof.a, cof.b
    _check_coframe(a, b, tol)
    U, V = frame.maurer_cartan()
    q1 = -(2.0 * U[..., 0, 0] + U[..., 1, 1]) / (5.0 * a)
    q2 = (V[..., 0, 0] + 2.0 * V[..., 1, 1]) / (5.0 * b)
    p1 = U[..., 1, 2] / a
    p2 = V[..., 0, 3] / b
    r1 = (a * U[..., 0, 3] + b * V[..., 0, 4]) / (a * a + b * b)
    r2 = (b * V[..., 1, 2] - a * U[..., 0, 4]) / (a * a + b * b)
    leftovers = {
        "alpha^0_0": (U[..., 0, 0] + 2.0 * q1 * a, V[..., 0, 0] - q2 * b),
        "alpha^1_1": (U[..., 1, 1] + q1 * a, V[..., 1, 1] - 2.0 * q2 * b),
        "alpha^0_3": (U[..., 0, 3] - r1 * a, V[..., 0, 3] - p2 * b),
        "alpha^1_2": (U[..., 1, 2] - p1 * a, V[..., 1, 2] - r2 * b),
        "alpha^0_4": (U[..., 0, 4] + r2 * a, V[..., 0, 4] - r1 * b),
    }
    residuals = {name: float(max(np.max(np.abs(x)), np.max(np.abs(y))))
                 for name, (x, y) in leftovers.items()}
    return InvariantField(q1, q2, p1, p2, r1, r2, residuals)


def frame_matrices(inv):
    """
    M1, M2 with omega = M1 alpha^1 + M2 alpha^2 on a normal frame with
    invariants `inv`. Works on arrays and on power series.
    """
    one = inv.q1 * 0.0 + 1.0
    m1 = {
        (3, 0): one, (0, 1): one, (0, 0): -2.0 * inv.q1, (1, 1): -1.0 * inv.q1,
        (0, 3): inv.r1, (1, 2): inv.p1, (0, 4): -1.0 * inv.r2,
    }
    m2 = {
        (2, 1): one, (1, 0): one, (0, 0): inv.q2, (1, 1): 2.0 * inv.q2,
        (0, 3): inv.p2, (1, 2): inv.r2, (0, 4): inv.r1,
    }
    return algebra_matrix(m1), algebra_matrix(m2)


def zero_curvature_residual(inv, cof):
    """
    max |d(b M2)/du - d(a M1)/dv + a b [M1, M2]|: the integrability condition
    of a frame with Maurer-Cartan form a M1 du + b M2 dv.
    """
    M1, M2 = frame_matrices(inv)
    a = cof.a[..., None, None]
    b = cof.b[..., None, None]
    z = _d(b * M2, cof.du, 0) - _d(a * M1, cof.dv, 1) + a * b * (M1 @ M2 - M2 @ M1)
    return float(np.max(np.abs(z)))


# Structure equations and the Euler-Lagrange system

def structure_forms(a, b, inv, d):
    """
    du ^ dv coefficients of the structure equations in curvature-line
    coordinates, with alpha^1 = a du, alpha^2 = b dv and pi = dq, upsilon = dp,
    zeta = dr. `d(x, "u")` differentiates; arrays and series both work.
    """
    q1, q2, p1, p2, r1, r2 = (getattr(inv, name) for name in INVARIANTS)
    ab = a * b
    return {
        "d_alpha1": -1.0 * d(a, "v") + q2 * ab,
        "d_alpha2": d(b, "u") + q1 * ab,
        "Omega1": -2.0 * a * d(q1, "v") - b * d(q2, "u") + (p2 - q1 * q2 - 1.0) * ab,
        "Omega2": -1.0 * a * d(q1, "v") - 2.0 * b * d(q2, "u") + (1.0 - p1 + q1 * q2) * ab,
        "Omega3": -1.0 * a * d(r1, "v") + b * d(p2, "u") - (2.0 * r1 * q2 + 3.0 * q1 * p2) * ab,
        "Omega4": -1.0 * a * d(p1, "v") + b * d(r2, "u") - (3.0 * p1 * q2 + 2.0 * r2 * q1) * ab,
        "Theta1-Theta2": a * d(r2, "v") + b * d(r1, "u") - 4.0 * (q1 * r1 - q2 * r2) * ab,
    }


def euler_lagrange_forms(a, b, inv, d):
    """
    du ^ dv coefficients of Theta1 = dr1 ^ alpha^2 - 4 q1 r1 alpha^1 ^ alpha^2
    and Theta2 = dr2 ^ alpha^1 - 4 q2 r2 alpha^1 ^ alpha^2.
    """
    ab = a * b
    theta1 = b * d(inv.r1, "u") - 4.0 * inv.q1 * inv.r1 * ab
    theta2 = -1.0 * a * d(inv.r2, "v") - 4.0 * inv.q2 * inv.r2 * ab
    return theta1, theta2


def _norms(x, cof, margin):
    x = _interior(np.asarray(x), margin)
    return {
        "max": float(np.max(np.abs(x))),
        "l2": float(np.sqrt(np.sum(x * x) * cof.du * cof.dv)),
    }


def structure_residuals(inv, cof, margin=0):
    forms = structure_forms(cof.a, cof.b, inv, _grid_diff(cof.du, cof.dv))
    return {name: _norms(value, cof, margin) for name, value in forms.items()}


@dataclass(frozen=True, eq=False)
class ELReport:
    """
    R1, R2 are the Euler-Lagrange forms per unit alpha^1 ^ alpha^2; theta1,
    theta2 the same per du ^ dv.

    `consistency` is max |R1 - R2|, the Theta1 - Theta2 structure equation,
    which vanishes on every surface and so measures the discretization error
    of R1 and R2. The surface counts as minimal when both stay below
    `threshold` = tol * scale + EL_SAFETY * consistency, with `scale` the
    size of the terms that make up R1 and R2.
    """
    R1: np.ndarray
    R2: np.ndarray
    theta1: np.ndarray
    theta2: np.ndarray
    max_R1: float
    max_R2: float
    consistency: float
    threshold: float
    is_minimal: bool


def el_residuals(inv, cof, tol=None, margin=0, safety=None):
    tol = conf.tol(tol)
    safety = conf.get("EL_SAFETY") if safety is None else safety
    d = _grid_diff(cof.du, cof.dv)
    theta1, theta2 = euler_lagrange_forms(cof.a, cof.b, inv, d)
    ab = cof.a * cof.b
    R1 = theta1 / ab
    R2 = theta2 / ab
    max_R1 = float(np.max(np.abs(_interior(R1, margin))))
    max_R2 = float(np.max(np.abs(_interior(R2, margin))))
    consistency = float(np.max(np.abs(_interior(R1 - R2, margin))))
    terms = (
        np.abs(d(inv.r1, "u") / cof.a) + np.abs(4.0 * inv.q1 * inv.r1)
        + np.abs(d(inv.r2, "v") / cof.b) + np.abs(4.0 * inv.q2 * inv.r2)
    )
    scale = max(float(np.max(_interior(terms, margin))), 1.0)
    threshold = tol * scale + safety * consistency
    is_minimal = max_R1 <= threshold and max_R2 <= threshold
    logger.debug(f"max R1 {max_R1:.3e}, max R2 {max_R2:.3e} against {threshold:.3e}")
    return ELReport(R1, R2, theta1, theta2, max_R1, max_R2, consistency, threshold, is_minimal)


def mean_curvature_vanishes(shape, el, margin=0):
    """
    Whether H = R1 + R2 stays within the Euler-Lagrange threshold of `el`.
    """
    return float(np.max(np.abs(_interior(shape.H, margin)))) <= 2.0 * el.threshold


def lie_area(cof):
    """
    Trapezoidal integral of alpha^1 ^ alpha^2 = a b du dv.
    """
    inner_ = integrate.trapezoid(cof.a * cof.b, cof.v, axis=1)
    return float(integrate.trapezoid(inner_, cof.u))


# Gauss map and the shape operator

@dataclass(frozen=True, eq=False)
class GaussMapReport:
    basis: np.ndarray
    deviation: float
    relative_deviation: float

    def element(self, i, j):
        return DupinElement(tuple(self.basis[i, j, :, k] for k in range(3)))


def gauss_map(frame, tol=None, cross_weight=DUPIN_CROSS_WEIGHT):
    """
    D = [A0 ^ A3 ^ A5] at every node, and the largest deviation between the
    pullback of the Dupin metric and Phi = alpha^1 alpha^2 on du, dv.
    """
    tol = conf.tol(tol)
    basis = frame.frames[..., :, [0, 3, 5]]
    gram = np.einsum("...ia,ij,...jb->...ab", basis, METRIC, basis)
    eig = np.linalg.eigvalsh(gram)
    scale = np.max(np.abs(eig), axis=-1, keepdims=True)
    pos = np.sum(eig > tol * scale, axis=-1)
    neg = np.sum(eig < -tol * scale, axis=-1)
    bad = (pos != 2) | (neg != 1)
    if np.any(bad):
        raise SignatureFailure("span(A0, A3, A5) is not of signature (2,1)", location=_first(bad))

    U, V = frame.maurer_cartan()
    quu = dupin_metric_eval(U, cross_weight)
    qvv = dupin_metric_eval(V, cross_weight)
    quv = (dupin_metric_eval(U + V, cross_weight) - quu - qvv) / 2.0
    phi_uu = U[..., 3, 0] * U[..., 2, 1]
    phi_vv = V[..., 3, 0] * V[..., 2, 1]
    phi_uv = (U[..., 3, 0] * V[..., 2, 1] + V[..., 3, 0] * U[..., 2, 1]) / 2.0
    deviation = float(max(
        np.max(np.abs(quu - phi_uu)), np.max(np.abs(qvv - phi_vv)), np.max(np.abs(quv - phi_uv)),
    ))
    scale = max(float(np.max(np.abs(phi_uv))), TINY)
    return GaussMapReport(basis, deviation, deviation / scale)


# coefficients of S(X_i)(X_j) are stored against B3..B9 in this order
NORMAL_BASIS = ("B3", "B4", "B5", "B6", "B7", "B8", "B9")


@dataclass(frozen=True, eq=False)
class ShapeData:
    S11: np.ndarray
    S12: np.ndarray
    S21: np.ndarray
    S22: np.ndarray
    H: np.ndarray
    printed_H: np.ndarray
    discrepancy: float


def shape_and_mean_curvature(inv, cof, tol=None):
    """
    Shape operator coefficients S(X_i)(X_j) on the normal bundle basis and the
    mean curvature coefficient along B3,

        H = S(X1)(X2) + S(X2)(X1) = dr1(X1) - 4 r1 q1 - dr2(X2) - 4 r2 q2,

    with X1, X2 dual to alpha^1, alpha^2.

    `printed_H` uses -4 p1 q1 in place of -4 r1 q1; it only agrees with H
    where (p1 - r1) q1 vanishes, and the disagreement is logged.
    """
    d = _grid_diff(cof.du, cof.dv)
    a, b = cof.a, cof.b
    q1, q2, p1, p2, r1, r2 = (getattr(inv, name) for name in INVARIANTS)
    dr1_x1, dr1_x2 = d(r1, "u") / a, d(r1, "v") / b
    dr2_x1, dr2_x2 = d(r2, "u") / a, d(r2, "v") / b
    zero = np.zeros_like(a)
    one = np.ones_like(a)
    S11 = np.stack([-(dr2_x1 - 2.0 * r2 * q1), zero, zero, -p1, -r2, one, zero], -1)
    S12 = np.stack([-(dr2_x2 + 4.0 * r2 * q2), zero, zero, zero, zero, zero, zero], -1)
    S21 = np.stack([dr1_x1 - 4.0 * r1 * q1, zero, zero, zero, zero, zero, zero], -1)
    S22 = np.stack([dr1_x2 + 2.0 * r1 * q2, zero, one, -r1, -p2, zero, zero], -1)
    H = S12[..., 0] + S21[..., 0]
    printed_H = dr1_x1 - 4.0 * p1 * q1 - dr2_x2 - 4.0 * r2 * q2
    discrepancy = float(np.max(np.abs(H - printed_H)))
    if discrepancy > conf.tol(tol) * max(float(np.max(np.abs(H))), 1.0):
        logger.warning(f"mean curvature with the -4 p1 q1 term differs by {discrepancy:.3e}")
    return ShapeData(S11, S12, S21, S22, H, printed_H, discrepancy)


# Closed-form Blaschke coframe

def blaschke_coframe_closed_form(g, tol=None, rtol=None):
    """
    alpha^1 = (k1 - k2)^-1 (sqrt(g11/g22) (d1 k1)^2 d2 k2)^(1/3) du,
    alpha^2 = -(k1 - k2)^-1 (sqrt(g22/g11) d1 k1 (d2 k2)^2)^(1/3) dv,
    with real cube roots.
    """
    tol = conf.tol(tol)
    rtol = conf.get("DEGENERACY_RTOL") if rtol is None else rtol
    data = principal_data(g)
    k1, k2 = data.k1, data.k2
    K = k1 - k2
    bad = np.abs(K) <= tol * np.maximum(np.abs(k1), np.abs(k2))
    if np.any(bad):
        raise UmbilicPoint("k1 = k2", location=_first(bad))
    d1k1, d2k1 = _d(k1, g.du, 0), _d(k1, g.dv, 1)
    d1k2, d2k2 = _d(k2, g.du, 0), _d(k2, g.dv, 1)
    scale = max(float(np.max(np.sqrt(d1k1 ** 2 + d2k1 ** 2 + d1k2 ** 2 + d2k2 ** 2))), TINY)
    for label, value in (("d1 k1", d1k1), ("d2 k2", d2k2)):
        bad = np.abs(value) <= rtol * scale
        if np.any(bad):
            raise DegenerateSurface(f"{label} vanishes", location=_first(bad))
    a = np.cbrt(d1k1 ** 2 * d2k2 * np.sqrt(data.g11 / data.g22)) / K
    b = -np.cbrt(d1k1 * d2k2 ** 2 * np.sqrt(data.g22 / data.g11)) / K
    orientation = 1 if np.median(a * b) > 0 else -1
    return Coframe(g.u, g.v, a, b, orientation)

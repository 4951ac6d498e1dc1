"""
Linear algebra of R^(4,2): the Lie quadric, oriented spheres, contact
elements, the Lie sphere group and its Maurer-Cartan coefficients.

Minkowski vectors are numpy arrays whose last axis has length 6, so every
function here also works on whole grids of vectors. The helpers marked
"duck-typed" only use `*`, `@`, `.sum(-1)` and indexing on the last axes,
which lets them run on `liegeo.series` power series as well.
"""

from dataclasses import dataclass, field
import itertools
import logging

import numpy as np
from scipy import linalg

from . import conf
from .exceptions import (
    InvalidAlgebraElement,
    InvalidContactElement,
    InvalidGroupElement,
    InvalidQuadricPoint,
    NondecodableQuadricPoint,
    NonUnitNormal,
    SignAlignmentFailure,
    SignatureFailure,
)

logger = logging.getLogger(__name__)

SQRT2 = np.sqrt(2.0)

# <V, W> = -(v0 w5 + v5 w0) - (v1 w4 + v4 w1) + v2 w2 + v3 w3
METRIC = np.array([
    [0, 0, 0, 0, 0, -1],
    [0, 0, 0, 0, -1, 0],
    [0, 0, 1, 0, 0, 0],
    [0, 0, 0, 1, 0, 0],
    [0, -1, 0, 0, 0, 0],
    [-1, 0, 0, 0, 0, 0],
], dtype=float)

# g[I, PARTNER[I]] == SIGMA[I]
PARTNER = (5, 4, 2, 3, 1, 0)
SIGMA = (-1.0, -1.0, 1.0, 1.0, -1.0, -1.0)

# Entries (I, J) of omega^I_J that determine an element of so(4,2).
ALGEBRA_ENTRIES = (
    (0, 0), (1, 1), (1, 0), (0, 1), (2, 0), (3, 0), (2, 1), (3, 1),
    (4, 0), (3, 2), (0, 2), (0, 3), (1, 2), (1, 3), (0, 4),
)

BASIS = np.eye(6)


def mink(*components):
    v = np.asarray(components if len(components) > 1 else components[0], dtype=float)
    if v.shape[-1] != 6:
        raise ValueError(f"Minkowski vectors have 6 components, got shape {v.shape}")
    return v


def inner(v, w):
    """
    The (4,2) inner product over the last axis. Duck-typed.
    """
    return (v * (w @ METRIC)).sum(-1)


def _transpose(a):
    if isinstance(a, np.ndarray):
        return np.swapaxes(a, -1, -2)
    return a.T


def frame_inverse(a):
    """
    A^-1 = g A^T g for A in O(4,2). Duck-typed.
    """
    return METRIC @ _transpose(a) @ METRIC


def _sqrt(x):
    return x.sqrt() if hasattr(x, "sqrt") else np.sqrt(x)


def _rel_norm(v):
    return float(np.linalg.norm(v))


def signature(gram, tol=None):
    """
    (positive, negative, zero) eigenvalue counts of a symmetric matrix, zero
    meaning below `tol` times the largest eigenvalue magnitude.
    """
    tol = conf.tol(tol)
    eig = np.linalg.eigvalsh(np.asarray(gram, dtype=float))
    scale = max(float(np.max(np.abs(eig))), np.finfo(float).tiny)
    pos = int(np.sum(eig > tol * scale))
    neg = int(np.sum(eig < -tol * scale))
    return pos, neg, len(eig) - pos - neg


def gram_matrix(*vectors):
    return np.array([[inner(a, b) for b in vectors] for a in vectors])


# Points of the Lie quadric and oriented spheres

@dataclass(frozen=True, eq=False)
class QuadricPoint:
    """
    A point [rep] of the Lie quadric, stored with its first nonzero coordinate equal to +1.
    """
    rep: np.ndarray
    tol: float = field(default=None, repr=False)

    def __post_init__(self):
        rep = np.asarray(self.rep, dtype=float)
        tol = conf.tol(self.tol)
        scale = _rel_norm(rep)
        if rep.shape != (6,) or not np.all(np.isfinite(rep)) or scale == 0.0:
            raise InvalidQuadricPoint(f"representative must be a finite nonzero 6-vector, got {rep!r}")
        if abs(inner(rep, rep)) > tol * scale ** 2:
            raise InvalidQuadricPoint(f"<V,V> = {inner(rep, rep):.3e} is not isotropic")
        lead = np.flatnonzero(np.abs(rep) > tol * scale)[0]
        object.__setattr__(self, "rep", rep / rep[lead])

    def __eq__(self, other):
        if not isinstance(other, QuadricPoint):
            return NotImplemented
        stacked = np.vstack([self.rep, other.rep])
        return np.linalg.matrix_rank(stacked, tol=conf.tol(self.tol) * 10 * _rel_norm(stacked)) == 1

    __hash__ = None


@dataclass(frozen=True)
class Sphere:
    center: tuple
    radius: float
    kind = "sphere"


@dataclass(frozen=True)
class Plane:
    point: tuple
    normal: tuple
    tol: float = field(default=None, repr=False, compare=False)
    kind = "plane"

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        if abs(np.linalg.norm(n) - 1.0) > max(conf.tol(self.tol), 1e-12) * 10:
            raise NonUnitNormal(f"plane normal {tuple(n)} does not have unit length")


@dataclass(frozen=True)
class PointSphere:
    point: tuple
    kind = "point"


@dataclass(frozen=True)
class Infinity:
    kind = "infinity"


def _as3(x):
    return tuple(float(c) for c in np.asarray(x, dtype=float).reshape(3))


def sphere_vector(center, radius):
    """
    Representative of the oriented sphere (center, radius); radius 0 gives the point sphere.
    """
    c = np.asarray(center, dtype=float)
    r = np.asarray(radius, dtype=float)
    return np.stack([
        np.ones_like(r),
        (r + c[..., 0]) / SQRT2,
        c[..., 1],
        c[..., 2],
        (r - c[..., 0]) / SQRT2,
        ((c * c).sum(-1) - r * r) / 2.0,
    ], axis=-1)


def plane_vector(point, normal):
    p = np.asarray(point, dtype=float)
    n = np.asarray(normal, dtype=float)
    return np.stack([
        np.zeros(n.shape[:-1]),
        (1.0 + n[..., 0]) / 2.0,
        n[..., 1] / SQRT2,
        n[..., 2] / SQRT2,
        (1.0 - n[..., 0]) / 2.0,
        (n * p).sum(-1) / SQRT2,
    ], axis=-1)


def sphere_to_quadric(s):
    if isinstance(s, Sphere):
        return QuadricPoint(sphere_vector(s.center, s.radius))
    if isinstance(s, PointSphere):
        return QuadricPoint(sphere_vector(s.point, 0.0))
    if isinstance(s, Plane):
        return QuadricPoint(plane_vector(s.point, s.normal))
    if isinstance(s, Infinity):
        return QuadricPoint(BASIS[5])
    raise TypeError(f"not an oriented sphere element: {s!r}")


def quadric_to_sphere(q, tol=None):
    tol = conf.tol(tol)
    v = q.rep
    scale = _rel_norm(v)
    if abs(v[0]) > tol * scale:
        w = v / v[0]
        radius = (w[1] + w[4]) / SQRT2
        center = ((w[1] - w[4]) / SQRT2, w[2], w[3])
        if abs(radius) <= tol * (1.0 + np.linalg.norm(center)):
            return PointSphere(_as3(center))
        return Sphere(_as3(center), float(radius))
    lam = v[1] + v[4]
    if abs(lam) > tol * scale:
        w = v / lam
        n = np.array([w[1] - w[4], SQRT2 * w[2], SQRT2 * w[3]])
        n = n / np.linalg.norm(n)
        return Plane(_as3(SQRT2 * w[5] * n), _as3(n))
    if np.all(np.abs(v[:5]) <= tol * scale):
        return Infinity()
    raise NondecodableQuadricPoint(
        f"v0 = 0 and v1 + v4 = 0 but {tuple(v)} is not proportional to e5"
    )


def oriented_contact(q1, q2, tol=None):
    tol = conf.tol(tol)
    return bool(abs(inner(q1.rep, q2.rep)) <= tol * _rel_norm(q1.rep) * _rel_norm(q2.rep))


# Contact elements and Dupin elements

@dataclass(frozen=True, eq=False)
class ContactElement:
    """
    A null 2-plane span(V, W) of R^(4,2).
    """
    V: np.ndarray
    W: np.ndarray
    tol: float = field(default=None, repr=False)

    def __post_init__(self):
        V = np.asarray(self.V, dtype=float)
        W = np.asarray(self.W, dtype=float)
        tol = conf.tol(self.tol)
        scale = _rel_norm(V) * _rel_norm(W)
        for label, value, s in (
            ("<V,V>", inner(V, V), _rel_norm(V) ** 2),
            ("<W,W>", inner(W, W), _rel_norm(W) ** 2),
            ("<V,W>", inner(V, W), scale),
        ):
            if abs(value) > tol * max(s, np.finfo(float).tiny):
                raise InvalidContactElement(f"{label} = {value:.3e} is not zero")
        if np.linalg.matrix_rank(np.vstack([V, W]), tol=tol * max(_rel_norm(V), _rel_norm(W))) < 2:
            raise InvalidContactElement("basis vectors are linearly dependent")
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "W", W)

    @property
    def basis(self):
        return self.V, self.W

    def __eq__(self, other):
        if not isinstance(other, ContactElement):
            return NotImplemented
        tol = conf.tol(self.tol)
        stacked = np.vstack([self.V, self.W, other.V, other.W])
        return np.linalg.matrix_rank(stacked, tol=tol * 10 * _rel_norm(stacked)) == 2

    __hash__ = None


@dataclass(frozen=True, eq=False)
class DupinElement:
    """
    A 3-plane of R^(4,2) whose Gram matrix has signature (2,1).
    """
    basis: tuple
    tol: float = field(default=None, repr=False)

    def __post_init__(self):
        basis = tuple(np.asarray(b, dtype=float) for b in self.basis)
        if len(basis) != 3:
            raise ValueError("a Dupin element is spanned by three vectors")
        sig = signature(gram_matrix(*basis), self.tol)
        if sig != (2, 1, 0):
            raise SignatureFailure(f"span has signature {sig[:2]} with {sig[2]} null directions, expected (2,1)")
        object.__setattr__(self, "basis", basis)

    def gram(self):
        return gram_matrix(*self.basis)

    def __eq__(self, other):
        if not isinstance(other, DupinElement):
            return NotImplemented
        stacked = np.vstack(self.basis + other.basis)
        return np.linalg.matrix_rank(stacked, tol=conf.tol(self.tol) * 10 * _rel_norm(stacked)) == 3

    __hash__ = None


def contact_lift_vectors(p, n):
    """
    F0(p) and F1(p, n) for arrays of points and unit normals.
    """
    p = np.asarray(p, dtype=float)
    n = np.asarray(n, dtype=float)
    f0 = np.stack([
        np.ones(p.shape[:-1]),
        p[..., 0] / SQRT2,
        p[..., 1],
        p[..., 2],
        -p[..., 0] / SQRT2,
        (p * p).sum(-1) / 2.0,
    ], axis=-1)
    return f0, plane_vector(p, n)


def contact_lift(p, n, tol=None):
    tol = conf.tol(tol)
    n = np.asarray(n, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > max(tol, 1e-12) * 10:
        raise NonUnitNormal(f"|n| = {np.linalg.norm(n):.12g}")
    f0, f1 = contact_lift_vectors(p, n)
    return ContactElement(f0, f1)


def contact_points(V, W):
    """
    Euclidean point and unit normal of the contact elements span(V, W), vectorized.

    The point comes from the point sphere of the pencil, the normal from its plane.
    """
    V = np.asarray(V, dtype=float)
    W = np.asarray(W, dtype=float)
    lam_v = V[..., 1] + V[..., 4]
    lam_w = W[..., 1] + W[..., 4]
    z = lam_w[..., None] * V - lam_v[..., None] * W
    point = np.stack([
        (z[..., 1] - z[..., 4]) / SQRT2,
        z[..., 2],
        z[..., 3],
    ], axis=-1) / z[..., 0:1]
    plane = W[..., 0:1] * V - V[..., 0:1] * W
    lam = plane[..., 1] + plane[..., 4]
    normal = np.stack([
        plane[..., 1] - plane[..., 4],
        SQRT2 * plane[..., 2],
        SQRT2 * plane[..., 3],
    ], axis=-1) / lam[..., None]
    return point, normal


def contact_element_point(element):
    point, normal = contact_points(element.V, element.W)
    if not (np.all(np.isfinite(point)) and np.all(np.isfinite(normal))):
        raise NondecodableQuadricPoint("contact element has no Euclidean point")
    return point, normal


# The Lie sphere group and its algebra

def group_residual(a):
    a = np.asarray(a, dtype=float)
    return float(np.max(np.abs(_transpose(a) @ METRIC @ a - METRIC)))


def algebra_residual(x):
    x = np.asarray(x, dtype=float)
    return float(np.max(np.abs(_transpose(x) @ METRIC + METRIC @ x)))


@dataclass(frozen=True, eq=False)
class LieGroupElement:
    """
    A in SO(4,2), identified with -A. `sign` records which lift is stored.
    """
    matrix: np.ndarray
    sign: int = 1
    tol: float = field(default=None, repr=False)

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        if a.shape != (6, 6) or not np.all(np.isfinite(a)):
            raise InvalidGroupElement(f"expected a finite 6x6 matrix, got shape {a.shape}")
        tol = conf.tol(self.tol) * max(1.0, float(np.linalg.norm(a)) ** 2)
        if group_residual(a) > tol:
            raise InvalidGroupElement(f"A^T g A differs from g by {group_residual(a):.3e}")
        if abs(np.linalg.det(a) - 1.0) > tol:
            raise InvalidGroupElement(f"det A = {np.linalg.det(a):.12g}")
        object.__setattr__(self, "matrix", a)

    @classmethod
    def identity(cls):
        return cls(np.eye(6))

    @property
    def columns(self):
        return tuple(self.matrix[:, j] for j in range(6))

    def inverse(self):
        return LieGroupElement(frame_inverse(self.matrix), self.sign, self.tol)

    def __matmul__(self, other):
        if isinstance(other, LieGroupElement):
            return LieGroupElement(self.matrix @ other.matrix, self.sign * other.sign, self.tol)
        return self.matrix @ other

    def __eq__(self, other):
        if not isinstance(other, LieGroupElement):
            return NotImplemented
        tol = conf.tol(self.tol) * 10 * max(1.0, float(np.linalg.norm(self.matrix)))
        return bool(
            np.max(np.abs(self.matrix - other.matrix)) <= tol
            or np.max(np.abs(self.matrix + other.matrix)) <= tol
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class LieAlgebraElement:
    matrix: np.ndarray
    tol: float = field(default=None, repr=False)

    def __post_init__(self):
        x = np.asarray(self.matrix, dtype=float)
        if x.shape != (6, 6):
            raise InvalidAlgebraElement(f"expected a 6x6 matrix, got shape {x.shape}")
        if algebra_residual(x) > conf.tol(self.tol) * max(1.0, float(np.linalg.norm(x))):
            raise InvalidAlgebraElement(f"X^T g + g X = {algebra_residual(x):.3e}")
        object.__setattr__(self, "matrix", x)

    def coordinates(self):
        return np.array([self.matrix[i, j] for i, j in ALGEBRA_ENTRIES])

    def exp(self):
        return LieGroupElement(linalg.expm(self.matrix))


def fill_algebra(x):
    """
    Complete the dependent entries of an so(4,2) matrix from the entries in ALGEBRA_ENTRIES.
    """
    x = np.array(x, dtype=float)
    for a, j in ALGEBRA_ENTRIES:
        x[..., PARTNER[j], PARTNER[a]] = -SIGMA[a] * SIGMA[j] * x[..., a, j]
    return x


def algebra_matrix(entries):
    """
    The so(4,2) matrix with the given {(I, J): value} entries, the partner
    entries filled in and zeros elsewhere. Values may be numbers, arrays of a
    common shape or power series.
    """
    full = {}
    for (i, j), value in entries.items():
        full[i, j] = value
        full[PARTNER[j], PARTNER[i]] = -SIGMA[i] * SIGMA[j] * value
    zero = sum(value * 0.0 for value in entries.values())
    rows = [[full.get((i, j), 0.0) + zero for j in range(6)] for i in range(6)]
    if isinstance(zero, np.ndarray) or np.isscalar(zero):
        return np.stack([np.stack([np.asarray(x, dtype=float) for x in row], -1) for row in rows], -2)
    from .series import stack
    return stack([stack(row, axis=-1) for row in rows], axis=-2)


def algebra_basis():
    out = []
    for a, j in ALGEBRA_ENTRIES:
        e = np.zeros((6, 6))
        e[a, j] = 1.0
        out.append(fill_algebra(e))
    return np.stack(out)


def algebra_from_coordinates(coords):
    coords = np.asarray(coords, dtype=float)
    return np.tensordot(coords, algebra_basis(), axes=([-1], [0]))


def random_algebra_element(seed=None, scale=1.0):
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    s = rng.normal(size=(6, 6)) * scale
    return METRIC @ (s - s.T) / 2.0


def random_group_element(seed=None, scale=0.5):
    """
    exp of a pseudo-random algebra element with entries of size `scale`.
    """
    return LieGroupElement(linalg.expm(random_algebra_element(seed, scale)))


def _matrix_of(a):
    if isinstance(a, LieGroupElement):
        return a.matrix
    return LieGroupElement(a).matrix


def group_action(a, x):
    """
    A.[V], A.[V ^ W], A.[V ^ V' ^ V'']: the action on representatives, column-wise.
    """
    a = _matrix_of(a)
    if isinstance(x, QuadricPoint):
        return QuadricPoint(a @ x.rep, x.tol)
    if isinstance(x, ContactElement):
        return ContactElement(a @ x.V, a @ x.W, x.tol)
    if isinstance(x, DupinElement):
        return DupinElement(tuple(a @ b for b in x.basis), x.tol)
    raise TypeError(f"group does not act on {type(x).__name__}")


def project_to_group(a):
    """
    Nearest group element in the polar sense: A (g A^T g A)^(-1/2).
    """
    a = np.asarray(a, dtype=float)
    m = frame_inverse(a) @ a
    return a @ np.linalg.inv(linalg.sqrtm(m).real)


def align_signs(samples, jump=None):
    """
    Flip samples along the leading axis so consecutive ones are nearest neighbours.

    Returns the aligned copy and the applied signs.
    """
    jump = conf.get("SIGN_JUMP") if jump is None else jump
    out = np.array(samples, dtype=float)
    signs = np.ones(len(out))
    for i in range(1, len(out)):
        prev = out[i - 1]
        keep = np.linalg.norm(out[i] - prev)
        flip = np.linalg.norm(out[i] + prev)
        if flip < keep:
            out[i] = -out[i]
            signs[i] = -1.0
        if min(keep, flip) > jump * max(np.linalg.norm(prev), np.finfo(float).tiny):
            raise SignAlignmentFailure(
                f"both lifts jump by more than {jump} relative", location=i
            )
    flips = int(np.sum(signs < 0))
    if flips:
        logger.debug(f"sign alignment flipped {flips} of {len(out)} samples")
    return out, signs


def align_grid(field_, anchor=(0, 0), jump=None):
    """
    Raster-sweep sign alignment of a (nu, nv, ...) field outward from `anchor`.
    """
    out = np.array(field_, dtype=float)
    iu, iv = anchor
    column = out[:, iv]
    lower, _ = align_signs(column[iu::-1], jump)
    upper, _ = align_signs(column[iu:], jump)
    out[:iu + 1, iv] = lower[::-1]
    out[iu:, iv] = upper
    for i in range(out.shape[0]):
        row = out[i]
        left, _ = align_signs(row[iv::-1], jump)
        right, _ = align_signs(row[iv:], jump)
        out[i, :iv + 1] = left[::-1]
        out[i, iv:] = right
    return out


def maurer_cartan(frame_samples, step, jump=None):
    """
    Central-difference estimates of A^-1 dA/dt along a sampled frame path.

    Returns an (n, 6, 6) array; each slice is an so(4,2) element up to O(step**2).
    """
    frames = np.stack([_matrix_of(a) if isinstance(a, LieGroupElement) else np.asarray(a, dtype=float)
                       for a in frame_samples])
    frames, _ = align_signs(frames, jump)
    edge = 2 if len(frames) > 2 else 1
    derivative = np.gradient(frames, step, axis=0, edge_order=edge)
    return frame_inverse(frames) @ derivative


# weight of the alpha^1_3 alpha^3_1 term of the Dupin metric
DUPIN_CROSS_WEIGHT = 2.0


def dupin_metric_eval(omega, cross_weight=DUPIN_CROSS_WEIGHT):
    """
    g_D on one tangent value, read off the Maurer-Cartan coefficients. Duck-typed.
    """
    w = omega
    return (
        w[..., 1, 0] * w[..., 0, 1]
        + w[..., 0, 4] * w[..., 4, 0]
        + w[..., 2, 0] * w[..., 0, 2]
        + cross_weight * (w[..., 1, 3] * w[..., 3, 1])
        - 0.5 * (w[..., 3, 2] * w[..., 3, 2])
    )


def _base_value(x):
    """
    Representative sample used to fix discrete choices: the series constant
    term or the middle sample of an array field.
    """
    if hasattr(x, "coef"):
        return x.coef[(0,) * x.naxes]
    x = np.asarray(x, dtype=float)
    flat = x.reshape(-1, x.shape[-1])
    return flat[len(flat) // 2]


def _stack(columns):
    if isinstance(columns[0], np.ndarray):
        return np.stack(columns, axis=-1)
    from .series import stack
    return stack(columns, axis=-1)


def _col(coefficient):
    """
    Scalar field -> broadcastable against vector fields.
    """
    if isinstance(coefficient, np.ndarray) or np.isscalar(coefficient):
        return np.asarray(coefficient)[..., None]
    return coefficient[..., None]


def null_pair_seeds(v0, v1):
    b0, b1 = _base_value(v0), _base_value(v1)
    best, best_det = None, 0.0
    for i, j in itertools.combinations(range(6), 2):
        det = inner(b0, BASIS[i]) * inner(b1, BASIS[j]) - inner(b0, BASIS[j]) * inner(b1, BASIS[i])
        if abs(det) > abs(best_det):
            best, best_det = (i, j), det
    if best is None:
        raise InvalidContactElement("null pair is degenerate")
    return best


def _w_projection(v0, v1, a4, a5, x):
    """
    Component of x orthogonal to span(V0, V1, A4, A5).
    """
    return (
        x
        + _col(inner(a5, x)) * v0
        + _col(inner(a4, x)) * v1
        + _col(inner(v1, x)) * a4
        + _col(inner(v0, x)) * a5
    )


def complete_frame(v0, v1, seeds=None, w_seeds=None):
    """
    Complete a null pair (V0, V1) with <V0, V1> = 0 to a frame [V0, V1, A2, A3, A4, A5] of SO(4,2).

    Duck-typed over arrays of pairs and power series. Discrete choices are
    made once at the base value and reused, so the frame is smooth.
    """
    i, j = seeds or null_pair_seeds(v0, v1)
    ei, ej = BASIS[i], BASIS[j]
    g00, g01 = inner(v0, ei), inner(v0, ej)
    g10, g11 = inner(v1, ei), inner(v1, ej)
    inv_det = _col(1.0 / (g00 * g11 - g01 * g10))
    u4 = (_col(g01) * ei - _col(g00) * ej) * inv_det
    u5 = (_col(g10) * ej - _col(g11) * ei) * inv_det
    a4 = u4 + _col(inner(u4, u4) / 2.0) * v1
    a5 = u5 + _col(inner(u5, u5) / 2.0) * v0 + _col(inner(u4, u5)) * v1

    if w_seeds is None:
        base = [_base_value(t) for t in (v0, v1, a4, a5)]
        best, best_det = None, 0.0
        for k, l in itertools.combinations(range(6), 2):
            pk = _w_projection(*base, BASIS[k])
            pl = _w_projection(*base, BASIS[l])
            gram = inner(pk, pk) * inner(pl, pl) - inner(pk, pl) ** 2
            if gram > best_det:
                best, best_det = (k, l), gram
        w_seeds = best
    k, l = w_seeds
    p2 = _w_projection(v0, v1, a4, a5, BASIS[k])
    p3 = _w_projection(v0, v1, a4, a5, BASIS[l])
    t2 = p2 * _col(1.0 / _sqrt(inner(p2, p2)))
    t3 = p3 - _col(inner(p3, t2)) * t2
    t3 = t3 * _col(1.0 / _sqrt(inner(t3, t3)))
    frame = _stack([v0, v1, t2, t3, a4, a5])
    if isinstance(frame, np.ndarray):
        t3 = t3 * np.sign(np.linalg.det(frame))[..., None]
    elif np.linalg.det(frame.coef[(0,) * frame.naxes]) < 0:
        t3 = -t3
    return _stack([v0, v1, t2, t3, a4, a5])


def g0_element(D=None, B=None, Y=None, b=0.0):
    """
    The structure-group element X(D, B, Y, b) in blocks {0,1}, {2,3}, {4,5}:

        [[D, D J Y^T B, D J (Y^T Y + K) / 2],
         [0, B,         Y                  ],
         [0, 0,         J D^-T J           ]]

    with J = [[0,1],[1,0]] and K = [[0,-b],[b,0]].
    """
    D = np.eye(2) if D is None else np.asarray(D, dtype=float)
    B = np.eye(2) if B is None else np.asarray(B, dtype=float)
    Y = np.zeros((2, 2)) if Y is None else np.asarray(Y, dtype=float)
    J = np.array([[0.0, 1.0], [1.0, 0.0]])
    K = np.array([[0.0, -b], [b, 0.0]])
    x = np.zeros((6, 6))
    x[0:2, 0:2] = D
    x[0:2, 2:4] = D @ J @ Y.T @ B
    x[0:2, 4:6] = 0.5 * D @ J @ (Y.T @ Y + K)
    x[2:4, 2:4] = B
    x[2:4, 4:6] = Y
    x[4:6, 4:6] = J @ np.linalg.inv(D).T @ J
    return x

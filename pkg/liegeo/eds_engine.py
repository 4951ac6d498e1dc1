"""
The Pfaffian differential system of Lie-minimal surfaces on P = G x R^6.

A point of P is a frame A with the six invariants (q1, q2, p1, p2, r1, r2).
Tangent vectors are handled in the coframe

    omega1, omega2, eta1..eta13, pi1, pi2, upsilon1, upsilon2, zeta1, zeta2

where omega = A^-1 dA, pi = dq, upsilon = dp, zeta = dr and

    omega1 = omega^3_0             omega2 = omega^2_1
    eta1 = omega^4_0               eta2 = omega^2_0
    eta3 = omega^3_1               eta4 = omega^3_2
    eta5 = omega^1_0 - omega2      eta6 = omega^0_1 - omega1
    eta7 = omega^0_2               eta8 = omega^1_3
    eta9 = omega^0_0 + 2 q1 omega1 - q2 omega2
    eta10 = omega^1_1 + q1 omega1 - 2 q2 omega2
    eta11 = omega^0_3 - r1 omega1 - p2 omega2
    eta12 = omega^1_2 - p1 omega1 - r2 omega2
    eta13 = omega^0_4 + r2 omega1 - r1 omega2

The eta vanish on the normal frame of a surface with these invariants. The
six 2-forms of the ideal are, with w = omega1 ^ omega2,

    Theta1 = zeta1 ^ omega2 - 4 q1 r1 w
    Theta2 = zeta2 ^ omega1 - 4 q2 r2 w
    Omega1 = 2 pi1 ^ omega1 - pi2 ^ omega2 + (p2 - q1 q2 - 1) w
    Omega2 = pi1 ^ omega1 - 2 pi2 ^ omega2 + (1 - p1 + q1 q2) w
    Omega3 = zeta1 ^ omega1 + upsilon2 ^ omega2 - (2 r1 q2 + 3 q1 p2) w
    Omega4 = upsilon1 ^ omega1 + zeta2 ^ omega2 - (3 p1 q2 + 2 r2 q1) w

Theta1 - Theta2 is the harmonicity form of the Gauss map.
"""

from collections import Counter
from dataclasses import dataclass, field
import logging

import numpy as np
from scipy import linalg

from . import conf
from .exceptions import NotIntegralElement
from .lie_core import LieGroupElement, algebra_matrix, frame_inverse, random_group_element

logger = logging.getLogger(__name__)

INVARIANTS = ("q1", "q2", "p1", "p2", "r1", "r2")

COFRAME = (
    ("omega1", "omega2")
    + tuple(f"eta{i}" for i in range(1, 14))
    + ("pi1", "pi2", "upsilon1", "upsilon2", "zeta1", "zeta2")
)
DIM = len(COFRAME)

OMEGA1, OMEGA2 = 0, 1
ETA = slice(2, 15)
PI1, PI2, UPSILON1, UPSILON2, ZETA1, ZETA2 = range(15, 21)

TWO_FORMS = ("Theta1", "Theta2", "Omega1", "Omega2", "Omega3", "Omega4")

# 13 x 2 eta values, then the 2 x 2 blocks of pi, upsilon and zeta values
PLANE_DIM = 26 + 12


@dataclass(frozen=True, eq=False)
class ConfigPoint:
    frame: LieGroupElement
    q1: float = 0.0
    q2: float = 0.0
    p1: float = 0.0
    p2: float = 0.0
    r1: float = 0.0
    r2: float = 0.0

    def __post_init__(self):
        if not isinstance(self.frame, LieGroupElement):
            object.__setattr__(self, "frame", LieGroupElement(self.frame))
        for name in INVARIANTS:
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def invariants(self):
        return tuple(getattr(self, name) for name in INVARIANTS)


@dataclass(frozen=True, eq=False)
class TangentValue:
    """
    A tangent vector of P by its 21 coframe values.
    """
    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.shape != (DIM,):
            raise ValueError(f"a tangent value has {DIM} coframe coordinates, got shape {c.shape}")
        object.__setattr__(self, "coords", c)

    @property
    def a(self):
        return self.coords[[OMEGA1, OMEGA2]]

    @property
    def x(self):
        return self.coords[ETA]

    @property
    def y(self):
        return self.coords[[PI1, PI2]]

    @property
    def u(self):
        return self.coords[[UPSILON1, UPSILON2]]

    @property
    def v(self):
        return self.coords[[ZETA1, ZETA2]]

    def __mul__(self, scale):
        return TangentValue(self.coords * scale)

    __rmul__ = __mul__

    def __add__(self, other):
        return TangentValue(self.coords + other.coords)


def line_element(a1, a2, y=(0.0, 0.0), u=(0.0, 0.0), v=(0.0, 0.0)):
    """
    The tangent value with all eta equal to zero and the given remaining coordinates.
    """
    c = np.zeros(DIM)
    c[OMEGA1], c[OMEGA2] = a1, a2
    c[[PI1, PI2]] = y
    c[[UPSILON1, UPSILON2]] = u
    c[[ZETA1, ZETA2]] = v
    return TangentValue(c)


def coframe_components(inv, omega, dq, dp, dr):
    """
    The 21 coframe values of (A^-1 dA, dq, dp, dr) as a list. `inv` is any
    object with attributes q1..r2; numbers, arrays and series all work.
    """
    q1, q2, p1, p2, r1, r2 = (getattr(inv, name) for name in INVARIANTS)
    w = omega
    w1, w2 = w[3, 0], w[2, 1]
    return [
        w1,
        w2,
        w[4, 0],
        w[2, 0],
        w[3, 1],
        w[3, 2],
        w[1, 0] - w2,
        w[0, 1] - w1,
        w[0, 2],
        w[1, 3],
        w[0, 0] + 2.0 * q1 * w1 - q2 * w2,
        w[1, 1] + q1 * w1 - 2.0 * q2 * w2,
        w[0, 3] - r1 * w1 - p2 * w2,
        w[1, 2] - p1 * w1 - r2 * w2,
        w[0, 4] + r2 * w1 - r1 * w2,
        dq[0], dq[1], dp[0], dp[1], dr[0], dr[1],
    ]


def to_coframe(z, omega, dq=(0.0, 0.0), dp=(0.0, 0.0), dr=(0.0, 0.0)):
    """
    TangentValue of the tangent vector with A^-1 dA = omega at z.
    """
    omega = np.asarray(omega, dtype=float)
    return TangentValue(np.array(coframe_components(z, omega, dq, dp, dr), dtype=float))


def from_coframe(z, t):
    """
    (omega, dq, dp, dr) of a TangentValue at z; inverse of `to_coframe`.
    """
    q1, q2, p1, p2, r1, r2 = z.invariants
    c = t.coords
    w1, w2 = c[OMEGA1], c[OMEGA2]
    eta = c[ETA]
    omega = algebra_matrix({
        (3, 0): w1,
        (2, 1): w2,
        (4, 0): eta[0],
        (2, 0): eta[1],
        (3, 1): eta[2],
        (3, 2): eta[3],
        (1, 0): eta[4] + w2,
        (0, 1): eta[5] + w1,
        (0, 2): eta[6],
        (1, 3): eta[7],
        (0, 0): eta[8] - 2.0 * q1 * w1 + q2 * w2,
        (1, 1): eta[9] - q1 * w1 + 2.0 * q2 * w2,
        (0, 3): eta[10] + r1 * w1 + p2 * w2,
        (1, 2): eta[11] + p1 * w1 + r2 * w2,
        (0, 4): eta[12] - r2 * w1 + r1 * w2,
    })
    return omega, c[[PI1, PI2]], c[[UPSILON1, UPSILON2]], c[[ZETA1, ZETA2]]


def tangent_of_frames(z, frame, dframe, dq=(0.0, 0.0), dp=(0.0, 0.0), dr=(0.0, 0.0)):
    """
    TangentValue of a curve through z with frame derivative `dframe`.
    """
    return to_coframe(z, frame_inverse(np.asarray(frame, dtype=float)) @ np.asarray(dframe, dtype=float), dq, dp, dr)


# The ideal

def eval_one_forms(z, t):
    return t.coords[ETA].copy()


def two_form_terms(inv):
    """
    {name: ((coefficient, i, j), ...)} with the form equal to the sum of
    coefficient * e_i ^ e_j over the coframe.
    """
    q1, q2, p1, p2, r1, r2 = (getattr(inv, name) for name in INVARIANTS)
    return {
        "Theta1": ((1.0, ZETA1, OMEGA2), (-4.0 * q1 * r1, OMEGA1, OMEGA2)),
        "Theta2": ((1.0, ZETA2, OMEGA1), (-4.0 * q2 * r2, OMEGA1, OMEGA2)),
        "Omega1": (
            (2.0, PI1, OMEGA1), (-1.0, PI2, OMEGA2), (p2 - q1 * q2 - 1.0, OMEGA1, OMEGA2),
        ),
        "Omega2": (
            (1.0, PI1, OMEGA1), (-2.0, PI2, OMEGA2), (1.0 - p1 + q1 * q2, OMEGA1, OMEGA2),
        ),
        "Omega3": (
            (1.0, ZETA1, OMEGA1), (1.0, UPSILON2, OMEGA2), (-(2.0 * r1 * q2 + 3.0 * q1 * p2), OMEGA1, OMEGA2),
        ),
        "Omega4": (
            (1.0, UPSILON1, OMEGA1), (1.0, ZETA2, OMEGA2), (-(3.0 * p1 * q2 + 2.0 * r2 * q1), OMEGA1, OMEGA2),
        ),
    }


def pair_two_forms(inv, x, y):
    """
    Every 2-form of the ideal on the pair (x, y) of coframe value lists.
    Duck-typed like `coframe_components`.
    """
    return {
        name: sum(c * (x[i] * y[j] - x[j] * y[i]) for c, i, j in terms)
        for name, terms in two_form_terms(inv).items()
    }


def two_form_matrices(z):
    """
    21 x 21 antisymmetric F with Phi(X, Y) = X^T F Y, one per 2-form.
    """
    out = {}
    for name, terms in two_form_terms(z).items():
        F = np.zeros((DIM, DIM))
        for c, i, j in terms:
            F[i, j] += c
            F[j, i] -= c
        out[name] = F
    return out


@dataclass(frozen=True, eq=False)
class IntegralElement2:
    """
    A 2-plane spanned by t1, t2 with omega^a(t_j) = delta^a_j.
    """
    t1: TangentValue
    t2: TangentValue

    @classmethod
    def from_plane(cls, plane):
        """
        From the 38 plane coordinates: X (13 x 2), Y, U, V (2 x 2 each), row-major.
        """
        plane = np.asarray(plane, dtype=float)
        if plane.shape != (PLANE_DIM,):
            raise ValueError(f"expected {PLANE_DIM} plane coordinates, got shape {plane.shape}")
        X = plane[:26].reshape(13, 2)
        Y, U, V = (plane[26 + 4 * k:30 + 4 * k].reshape(2, 2) for k in range(3))
        columns = []
        for j in range(2):
            c = np.zeros(DIM)
            c[j] = 1.0
            c[ETA] = X[:, j]
            c[[PI1, PI2]] = Y[:, j]
            c[[UPSILON1, UPSILON2]] = U[:, j]
            c[[ZETA1, ZETA2]] = V[:, j]
            columns.append(TangentValue(c))
        return cls(*columns)

    @property
    def plane(self):
        t = np.stack([self.t1.coords, self.t2.coords], -1)
        blocks = [t[ETA], t[[PI1, PI2]], t[[UPSILON1, UPSILON2]], t[[ZETA1, ZETA2]]]
        return np.concatenate([b.reshape(-1) for b in blocks])


def eval_two_forms(z, E):
    """
    Theta1, Theta2, Omega1..Omega4 on the plane (E.t1, E.t2), in that order.
    """
    values = pair_two_forms(z, E.t1.coords, E.t2.coords)
    return np.array([values[name] for name in TWO_FORMS])


# Rank decisions

def numerical_rank(matrix, rtol=None):
    rtol = conf.get("RANK_RTOL") if rtol is None else rtol
    s = linalg.svdvals(np.atleast_2d(matrix))
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def _require_integral(t, tol):
    scale = max(1.0, float(np.max(np.abs(t.coords))))
    bad = np.abs(t.x) > conf.tol(tol) * scale
    if np.any(bad):
        k = int(np.argmax(bad))
        raise NotIntegralElement(f"eta{k + 1} = {t.x[k]:.3e} on the line element")


def polar_system(z, E1, tol=None, rtol=None):
    """
    The polar equations of the integral line E1: the 13 eta plus the
    contractions Phi(E1, .) of the six 2-forms, as a 19 x 21 matrix, and the
    dimension 21 - rank of the polar space.
    """
    _require_integral(E1, tol)
    rows = [np.eye(DIM)[ETA]]
    rows += [E1.coords @ F for F in two_form_matrices(z).values()]
    matrix = np.vstack(rows)
    return matrix, DIM - numerical_rank(matrix, rtol)


def plane_system(z):
    """
    The V2 equations as matrix @ plane = rhs over the 38 plane coordinates:
    X = 0 and the six 2-forms on (t1, t2), which are affine in the plane.
    """
    matrix = np.zeros((32, PLANE_DIM))
    matrix[:26, :26] = np.eye(26)
    base = eval_two_forms(z, IntegralElement2.from_plane(np.zeros(PLANE_DIM)))
    for k in range(PLANE_DIM):
        e = np.zeros(PLANE_DIM)
        e[k] = 1.0
        matrix[26:, k] = eval_two_forms(z, IntegralElement2.from_plane(e)) - base
    rhs = np.concatenate([np.zeros(26), -base])
    return matrix, rhs


def v2_fiber_dimension(z, rtol=None):
    matrix, rhs = plane_system(z)
    rank = numerical_rank(matrix, rtol)
    if numerical_rank(np.column_stack([matrix, rhs]), rtol) != rank:
        logger.warning("the V2 equations are inconsistent")
        return -1
    return PLANE_DIM - rank


def integral_elements(z, count=1, seed=None, rtol=None):
    """
    Random elements of V2 over z: the least-squares particular solution plus
    a normally distributed combination of the null space.
    """
    rtol = conf.get("RANK_RTOL") if rtol is None else rtol
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    matrix, rhs = plane_system(z)
    particular = linalg.lstsq(matrix, rhs)[0]
    kernel = linalg.null_space(matrix, rcond=rtol)
    return [
        IntegralElement2.from_plane(particular + kernel @ rng.normal(size=kernel.shape[1]))
        for _ in range(count)
    ]


def noncharacteristic_test(z, E1, tol=None, rtol=None):
    """
    E1 is non-characteristic when a1 a2 != 0 and its polar space is a plane.
    """
    a1, a2 = E1.a
    scale = max(1.0, float(np.max(np.abs(E1.coords)))) ** 2
    if abs(a1 * a2) <= conf.tol(tol) * scale:
        return False
    return polar_system(z, E1, tol, rtol)[1] == 2


# Randomized sweeps

def random_config_point(seed=None, scale=1.0):
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    frame = random_group_element(rng, 0.5)
    return ConfigPoint(frame, *rng.normal(scale=scale, size=6))


def random_line_element(seed=None, characteristic=False):
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    a1, a2 = rng.normal(size=2)
    if characteristic:
        a1, a2 = 1.0, 0.0
    return line_element(a1, a2, rng.normal(size=2), rng.normal(size=2), rng.normal(size=2))


@dataclass(frozen=True)
class InvolutivityReport:
    seed: int
    samples: int
    polar_dims: dict
    characteristic_polar_dims: dict
    v2_dimensions: dict
    noncharacteristic: int
    max_two_form_residual: float
    failures: list = field(default_factory=list)

    @property
    def is_involutive(self):
        return (
            not self.failures
            and set(self.polar_dims) == {2}
            and set(self.v2_dimensions) == {6}
        )


def _sample(seed):
    rng = np.random.default_rng(seed)
    z = random_config_point(rng)
    E1 = random_line_element(rng)
    _, polar_dim = polar_system(z, E1)
    _, characteristic_dim = polar_system(z, random_line_element(rng, characteristic=True))
    v2 = v2_fiber_dimension(z)
    (E,) = integral_elements(z, 1, rng)
    residual = float(np.max(np.abs(eval_two_forms(z, E))))
    return noncharacteristic_test(z, E1), polar_dim, characteristic_dim, v2, residual


def involutivity_report(samples=100, seed=0):
    """
    Polar dimensions of random non-characteristic and characteristic line
    elements and V2 fiber dimensions at `samples` random points. Each sample
    draws from its own child of SeedSequence(seed), so results do not depend
    on the thread count.
    """
    children = np.random.SeedSequence(seed).spawn(samples)
    results = conf.thread_map(_sample, children)
    failures = [i for i, (ok, dim, _, v2, _) in enumerate(results) if ok and (dim != 2 or v2 != 6)]
    report = InvolutivityReport(
        seed=seed,
        samples=samples,
        polar_dims=dict(Counter(dim for ok, dim, *_ in results if ok)),
        characteristic_polar_dims=dict(Counter(r[2] for r in results)),
        v2_dimensions=dict(Counter(r[3] for r in results)),
        noncharacteristic=sum(1 for r in results if r[0]),
        max_two_form_residual=max((r[4] for r in results), default=0.0),
        failures=failures,
    )
    if failures:
        logger.warning(f"{len(failures)} of {samples} samples are not involutive, first at {failures[0]}")
    return report

"""
Lie-minimal surfaces from Cauchy data along a curve.

The data are a polarized Legendre curve, given by its Frenet curvatures
k0..k3, line element mu dt and initial frame, together with two functions h
and w of t. The solution is built in curvature-line coordinates (u, v) with
the curve on the anti-diagonal (u, v) = (t, -t) and alpha^1 = a du,
alpha^2 = b dv. Along the curve the frame is the hatted Frenet frame
R X(h), a = b = mu, and the invariants are fixed by k0..k3, h and w.

Off the curve the normal frame A and a, b, q, p, r satisfy

    A_u = a A M1        A_v = b A M2
    a_v = q2 a b        b_u = -q1 a b
    3 a q1_v = c2 - 2 c1               3 b q2_u = c1 - 2 c2
    r1_u = 4 q1 r1 a                   r2_v = -4 q2 r2 b
    a p1_v = b r2_u - (3 p1 q2 + 2 r2 q1) a b
    b p2_u = a r1_v + (2 r1 q2 + 3 q1 p2) a b

with c1 = (1 + q1 q2 - p2) a b and c2 = (p1 - 1 - q1 q2) a b. Every scalar
unknown has one known partial, which the values on the curve complete; the
frame has both partials and its Taylor coefficients are overdetermined.
`prolong` solves for the coefficients one total degree at a time.
"""

from dataclasses import dataclass, field
import logging

import numpy as np
from scipy import linalg

from . import conf
from .eds_engine import (
    COFRAME,
    TWO_FORMS,
    ConfigPoint,
    coframe_components,
    line_element,
    noncharacteristic_test,
    pair_two_forms,
)
from .exceptions import CharacteristicData, OrderSolveFailure, WindowTooLarge
from .legendre_curves import curvature_matrix, frenet_series
from .lie_core import LieGroupElement, frame_inverse, g0_element, random_group_element
from .series import BivariateSeries, PowerSeries, stack
from .surface_invariants import (
    INVARIANTS,
    Coframe,
    FrameField,
    InvariantField,
    LegendreSurfaceGrid,
    frame_matrices,
)

logger = logging.getLogger(__name__)

TINY = np.finfo(float).tiny

DATA_FIELDS = ("k0", "k1", "k2", "k3", "h", "w")

# relative mismatch allowed between the equations of one degree
SOLVE_RTOL = 1e-8

# restriction to the curve (u, v) = (t, -t)
CURVE_DIRECTION = (1.0, -1.0)

# h/2 on the diagonal of the hatted generator
SHIFT = np.diag([1.0, 1.0, 0.0, 0.0, -1.0, -1.0])

# series carried one degree past the invariants
FRAME_SERIES = ("A", "a", "b")


def _series(x, order=None):
    if isinstance(x, PowerSeries):
        return x if order is None else PowerSeries(x.coef, order=order)
    coef = np.atleast_1d(np.asarray(x, dtype=float))
    return PowerSeries(coef, order=order)


@dataclass(frozen=True, eq=False)
class CauchyData:
    """
    Taylor coefficients at t = 0 of k0..k3, h, w and the line element mu
    (default 1), and the Frenet frame at t = 0. Coefficients that are not
    given count as zero, so the data are polynomials in t.
    """
    k0: PowerSeries
    k1: PowerSeries
    k2: PowerSeries
    k3: PowerSeries
    h: PowerSeries
    w: PowerSeries
    frame0: LieGroupElement = None
    mu: PowerSeries = None

    def __post_init__(self):
        for name in DATA_FIELDS:
            object.__setattr__(self, name, _series(getattr(self, name)))
        mu = _series(1.0 if self.mu is None else self.mu)
        if mu.coef[0] == 0.0:
            raise CharacteristicData("the line element vanishes at t = 0")
        object.__setattr__(self, "mu", mu)
        frame0 = self.frame0
        if frame0 is None:
            frame0 = LieGroupElement.identity()
        elif not isinstance(frame0, LieGroupElement):
            frame0 = LieGroupElement(frame0)
        object.__setattr__(self, "frame0", frame0)

    @classmethod
    def zero(cls):
        return cls(*([0.0] * len(DATA_FIELDS)))

    def padded(self, name, order):
        return PowerSeries(getattr(self, name).coef, order=order)

    def as_dict(self):
        out = {name: getattr(self, name).coef.tolist() for name in DATA_FIELDS}
        out["mu"] = self.mu.coef.tolist()
        out["R0"] = self.frame0.matrix.reshape(-1).tolist()
        return out


def random_cauchy_data(seed=None, order=6, scale=0.3):
    """
    Random polynomial data of degree `order` with coefficients decaying like 1/(n + 1).
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    decay = 1.0 / np.arange(1, order + 2)
    values = [scale * decay * rng.normal(size=order + 1) for _ in DATA_FIELDS]
    return CauchyData(*values, frame0=random_group_element(rng, scale))


# The hatted frame

def hat_transform(h):
    """
    X(h) = X(I, I, diag(h/2, -h/2), -h) in the structure group. Numbers give
    a matrix, power series a matrix-valued series.
    """
    if not isinstance(h, PowerSeries):
        h = float(h)
        return g0_element(Y=np.diag([h / 2.0, -h / 2.0]), b=-h)
    y = 0.5 * h
    one = h * 0.0 + 1.0
    zero = h * 0.0
    half_square = 0.5 * y * y
    rows = [
        [one, zero, zero, -1.0 * y, -1.0 * y, half_square],
        [zero, one, y, zero, half_square, y],
        [zero, zero, one, zero, y, zero],
        [zero, zero, zero, one, zero, -1.0 * y],
        [zero, zero, zero, zero, one, zero],
        [zero, zero, zero, zero, zero, one],
    ]
    return stack([stack(row, axis=-1) for row in rows], axis=-2)


def hatted_matrix(k0, h, K1, K2, K3):
    """
    R^-1 dR / (mu dt) of the hatted frame.
    """
    return curvature_matrix(k0, K1, K2, K3) + 0.5 * h * SHIFT


@dataclass(frozen=True, eq=False)
class HattedFrame:
    frame: PowerSeries
    frenet: PowerSeries
    transform: PowerSeries
    mu: PowerSeries
    k0: PowerSeries
    K1: PowerSeries
    K2: PowerSeries
    K3: PowerSeries
    h: PowerSeries
    residual: float


def hat_frame(data, order=None, tol=None):
    """
    The Frenet frame R of the data, R X(h), and the curvatures of R X(h):

        K1 = k1 - h'/2 - (h k0 + h^2/4)/2
        K2 = k2 + h'/2 - (h k0 - h^2/4)/2
        K3 = k3 - h'/2 - h^2/4

    with h' = dh / (mu dt). `residual` is the largest coefficient of
    (R X)^-1 (R X)' - mu hatted_matrix(...), which vanishes up to round-off.
    """
    order = conf.get("SERIES_ORDER") if order is None else order
    k0, k1, k2, k3 = (data.padded(name, order) for name in ("k0", "k1", "k2", "k3"))
    mu = data.padded("mu", order)
    h = data.padded("h", order + 1)
    _, R = frenet_series((k0, k1, k2, k3), mu, data.frame0, order)
    hn = h.truncate(order)
    X = hat_transform(hn)
    hatted = R @ X
    h_prime = h.deriv() / mu
    K1 = k1 - 0.5 * h_prime - 0.5 * (hn * k0 + 0.25 * hn * hn)
    K2 = k2 + 0.5 * h_prime - 0.5 * (hn * k0 - 0.25 * hn * hn)
    K3 = k3 - 0.5 * h_prime - 0.25 * hn * hn

    rho = frame_inverse(hatted) @ hatted.deriv()
    expected = mu * hatted_matrix(k0, hn, K1, K2, K3)
    difference = (rho - expected).coef
    residual = float(np.max(np.abs(difference))) if difference.size else 0.0
    scale = max(1.0, float(np.max(np.abs(expected.coef))))
    if residual > conf.tol(tol) * scale:
        logger.warning(f"hatted frame deviates from its Maurer-Cartan matrix by {residual:.3e}")
    return HattedFrame(hatted, R, X, mu, k0, K1, K2, K3, hn, residual)


def initial_invariants(data, order=None, hat=None):
    """
    The invariants along the curve, from the hatted curvatures:

        q1 = -k0 - h/6                  q2 = k0 - h/6
        p1 = -(K1 - K2 + K3 - 3w)/2     p2 = -(K1 - K2 + K3 + 3w)/2
        r1 = (K1 + K2 - K3 - 3w)/2      r2 = -(K1 + K2 + K3 - 3w)/2

    so that -3 (q1 + q2) = h and (p1 - p2)/3 = w.
    """
    hat = hat_frame(data, order) if hat is None else hat
    order = hat.frame.order
    k0, h = hat.k0, hat.h
    K1, K2, K3 = hat.K1, hat.K2, hat.K3
    w = data.padded("w", order)
    return {
        "q1": -1.0 * k0 - h / 6.0,
        "q2": k0 - h / 6.0,
        "p1": -0.5 * (K1 - K2 + K3 - 3.0 * w),
        "p2": -0.5 * (K1 - K2 + K3 + 3.0 * w),
        "r1": 0.5 * (K1 + K2 - K3 - 3.0 * w),
        "r2": -0.5 * (K1 + K2 + K3 - 3.0 * w),
    }


# Prolongation

@dataclass(frozen=True, eq=False)
class JetSolution:
    """
    Bivariate Taylor series of the normal frame A, the coframe coefficients
    a, b and the six invariants. The invariants have total degree `order`,
    A, a and b one more when they come from `prolong`. `boundary` holds the
    prescribed values along the curve as series in t.
    """
    order: int
    A: BivariateSeries
    a: BivariateSeries
    b: BivariateSeries
    q1: BivariateSeries
    q2: BivariateSeries
    p1: BivariateSeries
    p2: BivariateSeries
    r1: BivariateSeries
    r2: BivariateSeries
    boundary: dict = field(default_factory=dict)
    hat: HattedFrame = None
    data: CauchyData = None

    def series(self):
        return {name: getattr(self, name) for name in ("A", "a", "b") + INVARIANTS}

    def on_curve(self, name):
        return getattr(self, name).along(*CURVE_DIRECTION)

    def truncate(self, order):
        values = {name: s.truncate(order) for name, s in self.series().items()}
        return JetSolution(order, **values, boundary=self.boundary, hat=self.hat, data=self.data)


def evolution_rhs(j):
    """
    {name: (u-derivative, v-derivative)} of the frame, the coframe
    coefficients and q1, q2, r1, r2, with None where a partial is free.
    """
    M1, M2 = frame_matrices(j)
    a, b = j.a, j.b
    ab = a * b
    c1 = (1.0 + j.q1 * j.q2 - j.p2) * ab
    c2 = (j.p1 - 1.0 - j.q1 * j.q2) * ab
    return {
        "A": ((j.A @ M1) * a, (j.A @ M2) * b),
        "a": (None, j.q2 * ab),
        "b": (-1.0 * j.q1 * ab, None),
        "q1": (None, (c2 - 2.0 * c1) / (3.0 * a)),
        "q2": ((c1 - 2.0 * c2) / (3.0 * b), None),
        "r1": (4.0 * j.q1 * j.r1 * a, None),
        "r2": (None, -4.0 * j.q2 * j.r2 * b),
    }


def _p_rhs(j, r1, r2):
    """
    Partials of p1, p2; r1, r2 are one degree ahead of `j`.
    """
    a, b = j.a, j.b
    ab = a * b
    return {
        "p1": (None, (b * r2.deriv("u") - (3.0 * j.p1 * j.q2 + 2.0 * j.r2 * j.q1) * ab) / a),
        "p2": ((a * r1.deriv("v") + (2.0 * j.r1 * j.q2 + 3.0 * j.q1 * j.p2) * ab) / b, None),
    }


def _solve_degree(name, m, boundary, du, dv, rtol):
    """
    Coefficients c[i, m - i] from i c[i, m-i] = du[i-1, m-i],
    (m - i) c[i, m-i] = dv[i, m-i-1] and the degree-m coefficient of the
    restriction to the curve.
    """
    rows, rhs = [], []
    if du is not None:
        for i in range(1, m + 1):
            row = np.zeros(m + 1)
            row[i] = i
            rows.append(row)
            rhs.append(du.coef[i - 1, m - i])
    if dv is not None:
        for i in range(m):
            row = np.zeros(m + 1)
            row[i] = m - i
            rows.append(row)
            rhs.append(dv.coef[i, m - i - 1])
    rows.append(CURVE_DIRECTION[1] ** (m - np.arange(m + 1)))
    rhs.append(boundary.coef[m])
    matrix = np.array(rows)
    values = np.stack(rhs).reshape(len(rows), -1)
    solution, _, rank, _ = linalg.lstsq(matrix, values)
    if rank < m + 1:
        raise OrderSolveFailure(f"degree {m} of {name} is not determined", location=m)
    mismatch = float(np.max(np.abs(matrix @ solution - values)))
    if mismatch > rtol * max(1.0, float(np.max(np.abs(values)))):
        raise OrderSolveFailure(f"the degree {m} equations of {name} disagree by {mismatch:.3e}", location=m)
    return solution.reshape((m + 1,) + boundary.shape)


def _jets(coef, order, boundary, hat, data, frame_order=None):
    frame_order = order if frame_order is None else frame_order
    values = {
        name: BivariateSeries(c, order=frame_order if name in FRAME_SERIES else order)
        for name, c in coef.items()
    }
    return JetSolution(order, **values, boundary=boundary, hat=hat, data=data)


def certify(boundary, tol=None):
    """
    Raise CharacteristicData unless the tangent of the curve at t = 0 is a
    non-characteristic integral element.
    """
    values = {name: float(boundary[name].coef[0]) for name in INVARIANTS}
    slopes = {name: float(boundary[name].coef[1]) if boundary[name].order >= 1 else 0.0 for name in INVARIANTS}
    a, b = float(boundary["a"].coef[0]), float(boundary["b"].coef[0])
    if a * b == 0.0:
        raise CharacteristicData("a b vanishes at the base point")
    z = ConfigPoint(boundary["A"].coef[0], **values)
    E1 = line_element(
        a * CURVE_DIRECTION[0], b * CURVE_DIRECTION[1],
        (slopes["q1"], slopes["q2"]), (slopes["p1"], slopes["p2"]), (slopes["r1"], slopes["r2"]),
    )
    if not noncharacteristic_test(z, E1, tol):
        raise CharacteristicData("the curve is characteristic at t = 0")


def prolong(data, order=None, rtol=None):
    """
    The unique jet of total degree `order` of the Lie-minimal surface with
    Cauchy data `data`. The frame A and the coframe coefficients a, b are
    carried to degree `order + 1`, which the invariants of degree `order`
    already fix through A_u = a A M1, A_v = b A M2, a_v and b_u.
    """
    order = conf.get("SERIES_ORDER") if order is None else order
    if order < 1:
        raise ValueError(f"order must be at least 1, got {order}")
    rtol = SOLVE_RTOL if rtol is None else rtol
    hat = hat_frame(data, order + 1)
    invariants = {name: s.truncate(order) for name, s in initial_invariants(data, hat=hat).items()}
    boundary = {"A": hat.frame, "a": hat.mu, "b": hat.mu, **invariants}
    certify(boundary)

    coef = {}
    for name, s in boundary.items():
        n = order + 1 if name in FRAME_SERIES else order
        coef[name] = np.zeros((n + 1, n + 1) + s.shape)
        coef[name][0, 0] = s.coef[0]

    def assign(name, m, du, dv):
        solution = _solve_degree(name, m, boundary[name], du, dv, rtol)
        for i in range(m + 1):
            coef[name][i, m - i] = solution[i]

    for m in range(1, order + 1):
        j = _jets(coef, m - 1, boundary, hat, data)
        for name, (du, dv) in evolution_rhs(j).items():
            assign(name, m, du, dv)
        r1 = BivariateSeries(coef["r1"], order=m)
        r2 = BivariateSeries(coef["r2"], order=m)
        for name, (du, dv) in _p_rhs(j, r1, r2).items():
            assign(name, m, du, dv)
        logger.debug(f"solved degree {m} of {order}")
    rhs = evolution_rhs(_jets(coef, order, boundary, hat, data))
    for name in FRAME_SERIES:
        assign(name, order + 1, *rhs[name])
    return _jets(coef, order, boundary, hat, data, frame_order=order + 1)


def pde_residuals(j):
    """
    The eight scalar evolution equations, each written as a series that vanishes.
    """
    a, b = j.a, j.b
    ab = a * b
    c1 = (1.0 + j.q1 * j.q2 - j.p2) * ab
    c2 = (j.p1 - 1.0 - j.q1 * j.q2) * ab
    return {
        "a_v": a.deriv("v") - j.q2 * ab,
        "b_u": b.deriv("u") + j.q1 * ab,
        "q1_v": 3.0 * a * j.q1.deriv("v") - (c2 - 2.0 * c1),
        "q2_u": 3.0 * b * j.q2.deriv("u") - (c1 - 2.0 * c2),
        "r1_u": j.r1.deriv("u") - 4.0 * j.q1 * j.r1 * a,
        "r2_v": j.r2.deriv("v") + 4.0 * j.q2 * j.r2 * b,
        "p1_v": a * j.p1.deriv("v") - b * j.r2.deriv("u") + (3.0 * j.p1 * j.q2 + 2.0 * j.r2 * j.q1) * ab,
        "p2_u": b * j.p2.deriv("u") - a * j.r1.deriv("v") - (2.0 * j.r1 * j.q2 + 3.0 * j.q1 * j.p2) * ab,
    }


# Verification

@dataclass(frozen=True)
class VerificationReport:
    """
    Largest coefficient of every equation: the eta on du and dv, the 2-forms
    and the harmonicity form on (d/du, d/dv), the coordinate equations and
    the conditions along the curve.
    """
    order: int
    one_forms: dict
    two_forms: dict
    harmonicity: float
    pde: dict
    boundary: dict

    def equations(self):
        out = {f"one_forms.{k}": v for k, v in self.one_forms.items()}
        out.update({f"two_forms.{k}": v for k, v in self.two_forms.items()})
        out["harmonicity"] = self.harmonicity
        out.update({f"pde.{k}": v for k, v in self.pde.items()})
        out.update({f"boundary.{k}": v for k, v in self.boundary.items()})
        return out

    def violations(self, tol=1e-10):
        return sorted(name for name, value in self.equations().items() if value > tol)

    @property
    def max_residual(self):
        return max(self.equations().values())


def _coordinate_tangents(j):
    inverse = frame_inverse(j.A)
    tangents = []
    for var in ("u", "v"):
        omega = inverse @ j.A.deriv(var)
        tangents.append(coframe_components(
            j, omega,
            (j.q1.deriv(var), j.q2.deriv(var)),
            (j.p1.deriv(var), j.p2.deriv(var)),
            (j.r1.deriv(var), j.r2.deriv(var)),
        ))
    return tangents


def _max(s):
    return s.max_abs() if hasattr(s, "max_abs") else float(np.max(np.abs(s.coef)))


def verify_solution(j):
    """
    Substitute the jet into the Pfaffian system and the curve conditions.
    """
    tu, tv = _coordinate_tangents(j)
    eta = COFRAME[2:15]
    one_forms = {name: max(_max(tu[k]), _max(tv[k])) for k, name in enumerate(COFRAME) if name in eta}
    forms = pair_two_forms(j, tu, tv)
    two_forms = {name: _max(forms[name]) for name in TWO_FORMS}
    harmonicity = _max(forms["Theta1"] - forms["Theta2"])
    pde = {name: _max(s) for name, s in pde_residuals(j).items()}

    boundary = {}
    for name, target in j.boundary.items():
        boundary[name] = _max(j.on_curve(name) - target)
    boundary["alpha1+alpha2"] = _max(j.on_curve("a") - j.on_curve("b"))
    if j.hat is not None:
        boundary["L"] = _max(j.on_curve("A")[:, 0] - j.hat.frenet[:, 0])
    if j.data is not None:
        h = j.data.padded("h", j.order)
        w = j.data.padded("w", j.order)
        boundary["h"] = _max(-3.0 * (j.on_curve("q1") + j.on_curve("q2")) - h)
        boundary["w"] = _max((j.on_curve("p1") - j.on_curve("p2")) / 3.0 - w)
    report = VerificationReport(j.order, one_forms, two_forms, harmonicity, pde, boundary)
    logger.debug(f"largest residual coefficient {report.max_residual:.3e}")
    return report


# Evaluation

@dataclass(frozen=True, eq=False)
class SurfacePatch:
    surface: LegendreSurfaceGrid
    frame: FrameField
    invariants: InvariantField
    coframe: Coframe
    trust: float


def _top_degree(s):
    coef = np.zeros_like(s.coef)
    n = s.order
    for i in range(n + 1):
        coef[i, n - i] = s.coef[i, n - i]
    return BivariateSeries(coef)


def window_grid(u0, u1, v0, v1, nu, nv):
    return np.linspace(u0, u1, int(nu)), np.linspace(v0, v1, int(nv))


def evaluate_surface(j, u, v, trust_rtol=None):
    """
    Evaluate the jet on the grid u x v. Raises WindowTooLarge where the
    top-degree terms of any series exceed `trust_rtol` of its values.
    """
    trust_rtol = conf.get("TRUST_RTOL") if trust_rtol is None else trust_rtol
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    U, V = np.meshgrid(u, v, indexing="ij")
    trust = 0.0
    values = {}
    for name, s in j.series().items():
        value = s(U, V)
        values[name] = value
        top = np.abs(_top_degree(s)(U, V))
        scale = max(float(np.max(np.abs(value))), TINY)
        ratio = top / scale
        if ratio.ndim > 2:
            ratio = ratio.reshape(ratio.shape[:2] + (-1,)).max(-1)
        if np.max(ratio) > trust_rtol:
            worst = tuple(int(x) for x in np.unravel_index(np.argmax(ratio), ratio.shape))
            raise WindowTooLarge(
                f"the degree {s.order} terms of {name} reach {np.max(ratio):.3e} of its values",
                location=worst,
            )
        trust = max(trust, float(np.max(ratio)))

    frames = values["A"]
    A_u = j.A.deriv("u")(U, V)
    A_v = j.A.deriv("v")(U, V)
    surface = LegendreSurfaceGrid(
        u, v, frames[..., :, 0], frames[..., :, 1],
        phi0_u=A_u[..., :, 0], phi0_v=A_v[..., :, 0],
        phi1_u=A_u[..., :, 1], phi1_v=A_v[..., :, 1],
    )
    invariants = InvariantField(**{name: values[name] for name in INVARIANTS})
    orientation = 1 if float(j.a.coef[0, 0] * j.b.coef[0, 0]) > 0 else -1
    coframe = Coframe(u, v, values["a"], values["b"], orientation)
    return SurfacePatch(surface, FrameField(u, v, frames), invariants, coframe, trust)

"""
Polarized Legendre curves: fullness and fatness tests, the directrix, the
Frenet frame with its line element mu dt and curvatures k0..k3, and synthesis
of curves from prescribed curvatures.

A curve comes either as uniform samples of V0, V1 over t or as two power
series at t = 0. Sampled curves are turned into local Taylor jets by a
least-squares Legendre-polynomial fit around every sample, so all frame
computations below run on power series and differentiate exactly.

The Frenet reduction normalizes rho = R^-1 R' in five stages:

    1. rho^3_0 != 0, rho^2_0 = rho^3_1 = rho^3_0 + rho^2_1 = rho^4_0 = 0
    2. rho^1_0 + rho^0_1 = rho^3_2 = 0
    3. rho^3_0 = -rho^2_1 = -rho^1_0 = rho^0_1 = mu
    4. rho^1_1 + rho^0_0 = 0
    5. rho^0_2 = rho^1_3 = 0

after which rho = mu M(k0, k1, k2, k3) with M from `curvature_matrix`.
Every stage costs one order of the jets.
"""

from dataclasses import dataclass, field
import logging

import numpy as np
from numpy.polynomial import legendre

from . import conf
from .exceptions import (
    CurveNumerical,
    FatnessFailure,
    InsufficientOrder,
    InvalidLegendreCurve,
    LiegeoError,
    NotLinearlyFull,
    NotPolarized,
    StepFailure,
)
from .lie_core import (
    DupinElement,
    LieGroupElement,
    algebra_matrix,
    align_signs,
    complete_frame,
    dupin_metric_eval,
    frame_inverse,
    group_residual,
    inner,
    project_to_group,
)
from .series import PowerSeries, stack

logger = logging.getLogger(__name__)

TINY = np.finfo(float).tiny

# jet order used by the Frenet reduction; six orders are consumed
JET_ORDER = 8

CURVATURES = ("k0", "k1", "k2", "k3")

# largest tolerated A^T g A - g after a re-projected integration step
STEP_RESIDUAL = 1e-6


def curvature_matrix(k0, k1, k2, k3):
    """
    The Frenet generator M(k) with R^-1 dR = mu M(k) dt:

        [[ k0,  1,  0, k1, k3,   0],
         [ -1,-k0, k2,  0,  0, -k3],
         [  0, -1,  0,  0, k2,   0],
         [  1,  0,  0,  0,  0,  k1],
         [  0,  0, -1,  0, k0,  -1],
         [  0,  0,  0,  1,  1, -k0]]

    Works on numbers, arrays and power series.
    """
    return algebra_matrix({
        (0, 0): k0, (1, 1): -1.0 * k0,
        (0, 1): 1.0, (1, 0): -1.0, (3, 0): 1.0, (2, 1): -1.0,
        (0, 3): k1, (1, 2): k2, (0, 4): k3,
    })


# Jets of sampled curves

def curve_jets(t, values, order=JET_ORDER, at=None, degree=None, half_width=None):
    """
    Taylor coefficients of sampled data at the samples `at`.

    Around every requested sample the samples within `half_width` (the
    window is shifted inward at the ends) are fitted by a Legendre series of
    `degree` and differentiated. Returns an array of shape
    (len(at), order + 1) + values.shape[1:].
    """
    degree = conf.get("JET_DEGREE") if degree is None else degree
    half_width = conf.get("JET_HALF_WIDTH") if half_width is None else half_width
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    flat = values.reshape(len(t), -1)
    at = range(len(t)) if at is None else at
    if len(t) < 3:
        raise InsufficientOrder(f"{len(t)} samples cannot be differentiated")
    width = min(2.0 * half_width, t[-1] - t[0])
    slack = 1e-9 * (t[-1] - t[0])
    out = np.empty((len(at), order + 1, flat.shape[1]))
    for row, i in enumerate(at):
        lo = max(t[0], min(t[i] - 0.5 * width, t[-1] - width))
        hi = lo + width
        window = (t >= lo - slack) & (t <= hi + slack)
        center, scale = 0.5 * (lo + hi), 0.5 * width
        deg = min(degree, int(window.sum()) - 1)
        c = legendre.legfit((t[window] - center) / scale, flat[window], deg)
        x = (t[i] - center) / scale
        factorial = 1.0
        for k in range(order + 1):
            out[row, k] = legendre.legval(x, c) / factorial
            c = legendre.legder(c, 1, scl=1.0 / scale)
            factorial *= k + 1
    return out.reshape((len(at), order + 1) + values.shape[1:])


def _truncated(s, order):
    return s.truncate(order) if s.order > order else s


def _vectors(value, n, name):
    value = np.asarray(value, dtype=float)
    if value.shape != (n, 6):
        raise InvalidLegendreCurve(f"{name} has shape {value.shape}, expected {(n, 6)}")
    bad = ~np.all(np.isfinite(value), axis=-1)
    if np.any(bad):
        raise InvalidLegendreCurve(f"{name} is not finite", location=int(np.argmax(bad)))
    return value


def _series_vector(value, name):
    if not isinstance(value, PowerSeries) or value.shape != (6,):
        raise InvalidLegendreCurve(f"{name} must be a power series of R^(4,2) vectors")
    if value.order < 2:
        raise InsufficientOrder(f"{name} has order {value.order}, at least 2 is needed")
    return value


@dataclass(frozen=True, eq=False)
class LegendreCurveSamples:
    """
    Representatives V0, V1 of a Legendre curve: (n, 6) arrays over uniform
    parameter samples `t`, or power series at t = 0 with `t` left unset.
    """
    V0: object
    V1: object
    t: np.ndarray = None
    tol: float = field(default=None, repr=False)

    def __post_init__(self):
        if isinstance(self.V0, PowerSeries) or isinstance(self.V1, PowerSeries):
            _series_vector(self.V0, "V0")
            _series_vector(self.V1, "V1")
            return
        if self.t is None:
            raise InvalidLegendreCurve("sampled curves need parameter values t")
        t = np.asarray(self.t, dtype=float)
        if t.ndim != 1 or len(t) < 3:
            raise InvalidLegendreCurve("sampled curves need at least 3 parameter values")
        steps = np.diff(t)
        step = steps.mean()
        if step <= 0 or np.max(np.abs(steps - step)) > 1e-6 * step:
            raise InvalidLegendreCurve("parameter samples are not uniformly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "V0", _vectors(self.V0, len(t), "V0"))
        object.__setattr__(self, "V1", _vectors(self.V1, len(t), "V1"))

    @property
    def is_series(self):
        return isinstance(self.V0, PowerSeries)

    def __len__(self):
        return 1 if self.is_series else len(self.t)

    @property
    def step(self):
        return float((self.t[-1] - self.t[0]) / (len(self.t) - 1))

    @property
    def parameters(self):
        return np.zeros(1) if self.is_series else self.t

    def indices(self, at=None):
        if at is None:
            return list(range(len(self)))
        at = [int(i) for i in np.atleast_1d(at)]
        for i in at:
            if not 0 <= i < len(self):
                raise IndexError(f"sample {i} out of range for {len(self)} samples")
        return at

    def jets(self, order=JET_ORDER, at=None):
        """
        Local Taylor series (V0, V1) at the requested samples.
        """
        if self.is_series:
            return [(_truncated(self.V0, order), _truncated(self.V1, order))]
        values = np.concatenate([self.V0, self.V1], axis=-1)
        coef = curve_jets(self.t, values, order, at=self.indices(at))
        return [(PowerSeries(c[:, :6]), PowerSeries(c[:, 6:])) for c in coef]

    def residuals(self):
        """
        Relative defects of <V0,V0>, <V1,V1>, <V0,V1> and of both forms of
        the contact condition, <V0,dV1> and <dV0,V1>.
        """
        if self.is_series:
            V0, V1 = self.V0, self.V1
            scale = max(float(np.max(np.abs(V0.coef))), float(np.max(np.abs(V1.coef))), TINY) ** 2
            rel = lambda x: float(np.max(np.abs(x.coef))) / scale
            return {
                "<V0,V0>": rel(inner(V0, V0)),
                "<V1,V1>": rel(inner(V1, V1)),
                "<V0,V1>": rel(inner(V0, V1)),
                "<V0,dV1>": rel(inner(V0, V1.deriv())),
                "<dV0,V1>": rel(inner(V0.deriv(), V1)),
            }
        V0, V1 = self.V0, self.V1
        dV0 = np.gradient(V0, self.step, axis=0, edge_order=2)
        dV1 = np.gradient(V1, self.step, axis=0, edge_order=2)
        n0, n1 = np.linalg.norm(V0, axis=-1), np.linalg.norm(V1, axis=-1)
        m0, m1 = np.linalg.norm(dV0, axis=-1), np.linalg.norm(dV1, axis=-1)

        def rel(x, scale):
            return float(np.max(np.abs(x) / np.maximum(scale, TINY)))

        return {
            "<V0,V0>": rel(inner(V0, V0), n0 * n0),
            "<V1,V1>": rel(inner(V1, V1), n1 * n1),
            "<V0,V1>": rel(inner(V0, V1), n0 * n1),
            "<V0,dV1>": rel(inner(V0, dV1), n0 * m1),
            "<dV0,V1>": rel(inner(dV0, V1), m0 * n1),
        }

    def validate(self, rtol=None, contact_rtol=None):
        """
        Raise InvalidLegendreCurve unless V0, V1 span a null plane satisfying
        the contact condition. Sampled curves check the contact condition
        against the looser finite-difference threshold.
        """
        rtol = conf.get("ISOTROPY_RTOL") if rtol is None else rtol
        contact_rtol = conf.get("CONTACT_RTOL") if contact_rtol is None else contact_rtol
        if self.is_series:
            contact_rtol = rtol
        for name, value in self.residuals().items():
            limit = contact_rtol if "d" in name else rtol
            if value > limit:
                raise InvalidLegendreCurve(f"{name} has relative size {value:.3e} > {limit:.1e}")
        return self

    def transformed(self, a):
        """
        The curve A.[V0 ^ V1].
        """
        m = a.matrix if isinstance(a, LieGroupElement) else LieGroupElement(a).matrix
        if self.is_series:
            return LegendreCurveSamples(m @ self.V0, m @ self.V1, tol=self.tol)
        return LegendreCurveSamples(self.V0 @ m.T, self.V1 @ m.T, self.t, self.tol)


@dataclass(frozen=True, eq=False)
class PolarizationSection:
    """
    A nowhere-vanishing section V of the line bundle of `curve`, so
    V(t) lies in span(V0(t), V1(t)).
    """
    curve: LegendreCurveSamples
    V: object

    def __post_init__(self):
        c = self.curve
        if c.is_series:
            if not isinstance(self.V, PowerSeries) or self.V.shape != (6,):
                raise InvalidLegendreCurve("the section of a series curve must be a vector power series")
            V = self.V.coef[0]
            basis = np.stack([c.V0.coef[0], c.V1.coef[0]], axis=-1)[None]
            V = V[None]
        else:
            V = _vectors(self.V, len(c), "V")
            object.__setattr__(self, "V", V)
            basis = np.stack([c.V0, c.V1], axis=-1)
        coef = np.linalg.pinv(basis) @ V[..., None]
        leftover = np.linalg.norm(V - (basis @ coef)[..., 0], axis=-1)
        size = np.linalg.norm(V, axis=-1)
        if np.any(size <= TINY):
            raise InvalidLegendreCurve("the section vanishes", location=int(np.argmin(size)))
        bad = leftover > conf.get("ISOTROPY_RTOL") * size
        if np.any(bad):
            raise InvalidLegendreCurve("the section leaves the line bundle", location=int(np.argmax(bad)))

    @classmethod
    def first_vector(cls, curve):
        return cls(curve, curve.V0)

    def transformed(self, a):
        m = a.matrix if isinstance(a, LieGroupElement) else LieGroupElement(a).matrix
        V = m @ self.V if self.curve.is_series else self.V @ m.T
        return PolarizationSection(self.curve.transformed(a), V)

    def jets(self, order=JET_ORDER, at=None):
        """
        Local Taylor series (V0, V1, V) at the requested samples.
        """
        c = self.curve
        if c.is_series:
            return [(_truncated(c.V0, order), _truncated(c.V1, order), _truncated(self.V, order))]
        values = np.concatenate([c.V0, c.V1, self.V], axis=-1)
        coef = curve_jets(c.t, values, order, at=c.indices(at))
        return [tuple(PowerSeries(x[:, 6 * j:6 * j + 6]) for j in range(3)) for x in coef]


# Fullness, fatness and the directrix

def _rank(rows, rtol):
    rows = np.asarray(rows, dtype=float)
    norms = np.maximum(np.linalg.norm(rows, axis=-1, keepdims=True), TINY)
    s = np.linalg.svd(rows / norms, compute_uv=False)
    if s[0] <= 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def is_linearly_full(c, at=None, rtol=None):
    """
    Per-sample test of V0 ^ V1 ^ V0' ^ V1' ^ V0'' ^ V1'' != 0, with the
    determinant taken relative to the product of the column lengths.
    """
    rtol = conf.get("RANK_RTOL") if rtol is None else rtol
    full = []
    for V0, V1 in c.jets(2, at):
        d0, d1 = V0.derivatives(), V1.derivatives()
        columns = np.stack([d0[0], d1[0], d0[1], d1[1], d0[2], d1[2]], axis=-1)
        scale = float(np.prod(np.linalg.norm(columns, axis=0)))
        full.append(scale > TINY and abs(np.linalg.det(columns)) > rtol * scale)
    return np.array(full, dtype=bool)


@dataclass(frozen=True, eq=False)
class DirectrixReport:
    """
    Spanning vectors V, V', V'' of the directrix at every sample, and the
    rank of V, V', ..., V^(5) (6 for a fat section).
    """
    t: np.ndarray
    basis: np.ndarray
    fatness_rank: np.ndarray

    @property
    def is_fat(self):
        return bool(np.all(self.fatness_rank == 6))

    def element(self, i):
        return DupinElement(tuple(self.basis[i]))

    def elements(self):
        return [self.element(i) for i in range(len(self.basis))]


def directrix(p, at=None, rtol=None):
    """
    The directrix [V ^ V' ^ V''] of the polarization `p`.

    Raises FatnessFailure where V'' lies in span(V, V') and SignatureFailure
    where the span does not have signature (2,1).
    """
    rtol = conf.get("RANK_RTOL") if rtol is None else rtol
    indices = p.curve.indices(at)
    basis, ranks = [], []
    for index, (_, _, V) in zip(indices, p.jets(5, at)):
        d = V.derivatives()
        if _rank(d[:3], rtol) < 3:
            raise FatnessFailure("V'' lies in span(V, V')", location=index)
        ranks.append(_rank(d, rtol))
        basis.append(d[:3])
        try:
            DupinElement(tuple(d[:3]))
        except LiegeoError as error:
            error.location = index
            raise
    report = DirectrixReport(p.curve.parameters[indices], np.array(basis), np.array(ranks))
    if not report.is_fat:
        logger.debug(f"fatness rank drops to {report.fatness_rank.min()} along the section")
    return report


# Frenet reduction on power series

def _cols(frame):
    return [frame[:, j] for j in range(6)]


def _frame(columns):
    return stack(columns, axis=-1)


def _rho(frame):
    return frame_inverse(frame) @ frame.deriv()


def _require(value, scale, rtol, error, message):
    base = float(np.abs(value.coef[0]))
    if not np.isfinite(base) or base <= rtol * max(scale, TINY):
        raise error(message)


def _first_order(V0, V1, V, rtol):
    # the complement of V in the line bundle, with constant coefficients
    basis = np.stack([V0.coef[0], V1.coef[0]], axis=-1)
    (x, y), *_ = np.linalg.lstsq(basis, V.coef[0], rcond=None)
    R0 = V
    R1 = V0 * -y + V1 * x
    t = _cols(complete_frame(R0, R1))
    dR0, dR1 = R0.deriv(), R1.deriv()
    c0, c1 = inner(dR0, t[2]), inner(dR0, t[3])
    size2 = c0 * c0 + c1 * c1
    _require(size2, float(np.sum(dR0.coef[0] ** 2)), rtol, FatnessFailure,
             "V' lies in the contact element")
    size = size2.sqrt()
    R2 = (c1 * t[2] - c0 * t[3]) / size
    R3 = (c0 * t[2] + c1 * t[3]) / size
    kappa = -1.0 * inner(dR1, R3) / size
    # <R2, R0'> = 0, so the shear by kappa leaves this coefficient alone
    beta = inner(R2, dR1)
    _require(beta, float(np.linalg.norm(dR1.coef[0]) * np.linalg.norm(R2.coef[0])), rtol,
             NotLinearlyFull, "the curve does not leave its contact element in a second W direction")
    lam = -1.0 * size / beta
    return _frame([R0, lam * (R1 + kappa * R0), R2, R3, t[4] / lam, t[5] - kappa * t[4]])


def _second_order(R):
    rho = _rho(R)
    mu0 = rho[3, 0]
    A = -1.0 * (rho[1, 0] + rho[0, 1]) / mu0
    B = -1.0 * rho[3, 2] / mu0
    y25, y34 = 0.5 * (A + B), 0.5 * (B - A)
    r = _cols(R)
    return _frame([
        r[0], r[1], r[2] + y25 * r[0], r[3] + y34 * r[1],
        r[4] + y34 * r[3] + 0.5 * y34 * y34 * r[1],
        r[5] + y25 * r[2] + 0.5 * y25 * y25 * r[0],
    ])


def _third_order(R, rtol):
    rho = _rho(R)
    mu = rho[0, 1]
    _require(mu, float(np.linalg.norm(rho.coef[0])), rtol, NotPolarized, "the directrix is isotropic")
    scale = mu / rho[3, 0]
    r = _cols(R)
    return _frame([scale * r[0], scale * r[1], r[2], r[3], r[4] / scale, r[5] / scale])


def _fourth_order(R):
    rho = _rho(R)
    s = (rho[0, 0] + rho[1, 1]) / rho[0, 1]
    y24, y35 = -0.5 * s, 0.5 * s
    r = _cols(R)
    return _frame([
        r[0], r[1], r[2] + y24 * r[1], r[3] + y35 * r[0],
        r[4] + y24 * r[2] + 0.5 * y24 * y24 * r[1],
        r[5] + y35 * r[3] + 0.5 * y35 * y35 * r[0],
    ])


def _fifth_order(R):
    rho = _rho(R)
    mu = rho[0, 1]
    y = (rho[1, 3] - rho[0, 2]) / (2.0 * mu)
    b = -1.0 * (rho[0, 2] + rho[1, 3]) / mu
    r = _cols(R)
    return _frame([
        r[0], r[1], r[2] + y * r[1], r[3] + y * r[0],
        r[4] + y * r[2] + 0.5 * b * r[0] + 0.5 * y * y * r[1],
        r[5] + y * r[3] + 0.5 * y * y * r[0] - 0.5 * b * r[1],
    ])


def _frenet(V0, V1, V, rtol):
    """
    Frenet frame series and its Maurer-Cartan series from jets of V0, V1 and V.
    """
    R = _second_order(_first_order(V0, V1, V, rtol))
    R = _third_order(R, rtol)
    logger.debug("third-order frame reached")
    R = _fifth_order(_fourth_order(R))
    return R, _rho(R)


def _read_curvatures(rho):
    mu = rho[0, 1]
    return mu, (rho[0, 0] / mu, rho[0, 3] / mu, rho[1, 2] / mu, rho[0, 4] / mu)


@dataclass(frozen=True, eq=False)
class FrenetData:
    """
    Frenet frames R, line element coefficients mu and curvatures k0..k3
    (columns of `k`) at the samples `t`. Series inputs also keep the
    curvatures and mu as power series.
    """
    t: np.ndarray
    frames: np.ndarray
    mu: np.ndarray
    k: np.ndarray
    series: dict = None

    def curvatures(self):
        return {name: self.k[:, i] for i, name in enumerate(CURVATURES)}

    def frame(self, i):
        return LieGroupElement(self.frames[i])

    def generators(self):
        """
        mu M(k) at every sample; equals R^-1 dR/dt.
        """
        k = self.k.T
        return self.mu[:, None, None] * curvature_matrix(k[0], k[1], k[2], k[3])


def _located(function):
    def run(item):
        index, jets = item
        try:
            return function(*jets)
        except LiegeoError as error:
            error.location = index
            raise
    return run


def frenet_frame(c, p=None, at=None, rtol=None):
    """
    Reduce to the Frenet frame of the polarized curve (c, p) and read off mu
    and k0..k3. `p` defaults to the section V0; `at` restricts the samples.
    """
    rtol = conf.get("RANK_RTOL") if rtol is None else rtol
    p = PolarizationSection.first_vector(c) if p is None else p
    if p.curve is not c:
        raise InvalidLegendreCurve("the polarization belongs to a different curve")
    indices = c.indices(at)
    results = conf.thread_map(_located(lambda V0, V1, V: _frenet(V0, V1, V, rtol)), zip(indices, p.jets(JET_ORDER, at)))
    frames = np.array([R.coef[0] for R, _ in results])
    mu, k = [], []
    for _, rho in results:
        m, ks = _read_curvatures(rho)
        mu.append(float(m.coef[0]))
        k.append([float(x.coef[0]) for x in ks])
    if at is None and len(frames) > 1:
        frames, _ = align_signs(frames)
    series = None
    if c.is_series:
        m, ks = _read_curvatures(results[0][1])
        series = dict(zip(CURVATURES, ks), mu=m)
    data = FrenetData(c.parameters[indices], frames, np.array(mu), np.array(k), series)
    logger.debug(f"Frenet frame at {len(indices)} samples, mu in [{data.mu.min():.6g}, {data.mu.max():.6g}]")
    return data


@dataclass(frozen=True, eq=False)
class PolarizationReport:
    """
    Pullback of the Dupin metric by the directrix, pullback = -mu**2, per sample.
    """
    t: np.ndarray
    pullback: np.ndarray
    mu: np.ndarray
    mask: np.ndarray

    @property
    def is_polarization(self):
        return bool(np.all(self.mask))


def _second_order_rho(V0, V1, V, rtol):
    return _rho(_second_order(_first_order(V0, V1, V, rtol)))


def is_polarization(p, at=None, rtol=None):
    """
    Evaluate the Dupin metric on the Maurer-Cartan form of a second-order
    frame; the section is a polarization where the value does not vanish.
    Samples where no first-order frame exists count as failures.
    """
    rtol = conf.get("ISOTROPY_RTOL") if rtol is None else rtol
    indices = p.curve.indices(at)

    def evaluate(V0, V1, V):
        try:
            rho = _second_order_rho(V0, V1, V, conf.get("RANK_RTOL"))
        except CurveNumerical as error:
            logger.debug(f"no second-order frame: {error}")
            return np.nan, np.nan, 0.0
        base = rho.coef[0]
        return float(dupin_metric_eval(base)), float(base[0, 1]), float(np.sum(base ** 2))

    values = np.array(conf.thread_map(_located(evaluate), zip(indices, p.jets(4, at))))
    pullback, mu, scale = values.T
    mask = np.isfinite(pullback) & (np.abs(np.nan_to_num(pullback)) > rtol * scale)
    if not np.all(mask):
        logger.warning(f"directrix is isotropic at {int(np.sum(~mask))} of {len(mask)} samples")
    return PolarizationReport(p.curve.parameters[indices], pullback, mu, mask)


# Synthesis

def _function(x):
    if callable(x) and not isinstance(x, PowerSeries):
        return x
    if isinstance(x, PowerSeries):
        return lambda s: float(x(s))
    return lambda s: float(x)


def _group_matrix(frame0):
    if frame0 is None:
        return np.eye(6)
    if isinstance(frame0, LieGroupElement):
        return frame0.matrix
    return LieGroupElement(frame0).matrix


def curve_from_curvatures(k, mu=1.0, t=None, frame0=None):
    """
    Integrate R' = mu(t) R M(k(t)) with classical Runge-Kutta steps on the
    samples `t`, projecting onto the group after every step.

    `k` is a sequence of four numbers, callables or power series, `mu` one of
    those. Returns the curve (V0, V1) = (R e0, R e1) and its FrenetData.
    """
    if len(k) != 4:
        raise ValueError(f"expected 4 curvature functions, got {len(k)}")
    t = np.linspace(0.0, 1.0, 1001) if t is None else np.asarray(t, dtype=float)
    curvature = [_function(x) for x in k]
    line = _function(mu)

    def generator(s):
        return line(s) * curvature_matrix(*(f(s) for f in curvature))

    R = _group_matrix(frame0)
    frames = np.empty((len(t), 6, 6))
    frames[0] = R
    for i in range(len(t) - 1):
        s, h = t[i], t[i + 1] - t[i]
        middle = generator(s + 0.5 * h)
        k1 = R @ generator(s)
        k2 = (R + 0.5 * h * k1) @ middle
        k3 = (R + 0.5 * h * k2) @ middle
        k4 = (R + h * k3) @ generator(s + h)
        step = R + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(step)):
            raise StepFailure("the integrated frame is not finite", location=i + 1)
        R = project_to_group(step)
        if not np.all(np.isfinite(R)) or group_residual(R) > STEP_RESIDUAL * max(1.0, np.linalg.norm(R) ** 2):
            raise StepFailure("re-projection onto the group diverged", location=i + 1)
        frames[i + 1] = R
    mus = np.array([line(s) for s in t])
    ks = np.array([[f(s) for f in curvature] for s in t])
    logger.debug(f"integrated {len(t) - 1} Frenet steps, final group residual {group_residual(R):.3e}")
    curve = LegendreCurveSamples(frames[:, :, 0].copy(), frames[:, :, 1].copy(), t)
    return curve, FrenetData(t, frames, mus, ks)


def _as_series(x, order):
    if isinstance(x, PowerSeries):
        return x
    return PowerSeries.constant(float(x), order)


def integrate_frame(generator, frame0=None, order=None):
    """
    The power series R(t) with R' = R N(t) and R(0) = frame0, for a
    matrix-valued series N, solved coefficient by coefficient.
    """
    order = generator.order + 1 if order is None else order
    if generator.order < order - 1:
        raise InsufficientOrder(f"a generator of order {generator.order} fixes the frame to order {generator.order + 1}")
    N = generator.coef
    R = np.zeros((order + 1, 6, 6))
    R[0] = _group_matrix(frame0)
    for m in range(order):
        R[m + 1] = sum(R[j] @ N[m - j] for j in range(m + 1)) / (m + 1)
    return PowerSeries(R)


def frenet_series(k, mu=1.0, frame0=None, order=JET_ORDER):
    """
    Frenet frame of prescribed curvatures as an exact power series of `order`.
    Returns the series curve and the frame series.
    """
    if len(k) != 4:
        raise ValueError(f"expected 4 curvature series, got {len(k)}")
    ks = [_as_series(x, order) for x in k]
    generator = _as_series(mu, order) * curvature_matrix(*ks)
    R = integrate_frame(generator, frame0, order)
    return LegendreCurveSamples(R[:, 0], R[:, 1]), R

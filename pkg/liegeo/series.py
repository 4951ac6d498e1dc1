"""
Truncated power series with array-valued coefficients.

A `PowerSeries` of order N holds the Taylor coefficients c[0..N] of a function
of one variable t, where every c[n] is an array of a common "value shape"
(scalars, Minkowski vectors, 6x6 matrices, ...)::

    f(t) = c[0] + c[1] t + ... + c[N] t**N + O(t**(N+1))

A `BivariateSeries` of total order N holds c[i, j], the coefficient of
u**i v**j, for i + j <= N.

Coefficients above the order are unknown, not zero, so every binary operation
truncates to the lower of the two orders. Both classes behave like small
numpy arrays of functions: indexing, `sum`, `T` and `@` act on the value
dimensions, so code written for ndarrays (for example the inner product
`(v * (w @ METRIC)).sum(-1)`) runs unchanged on series.
"""

import numpy as np


def _vmatmul(x, y, xv, yv):
    """
    Matrix product over the trailing value dimensions, broadcasting leading ones.
    """
    if xv == 2 and yv == 2:
        return np.matmul(x, y)
    if xv == 2 and yv == 1:
        return np.matmul(x, y[..., None])[..., 0]
    if xv == 1 and yv == 2:
        return np.matmul(x[..., None, :], y)[..., 0, :]
    if xv == 1 and yv == 1:
        return (x * y).sum(-1)
    raise ValueError(f"matmul needs 1- or 2-dimensional values, got {xv} and {yv}")


def _expand(coef, naxes, shape):
    lead = coef.shape[:naxes]
    value = coef.shape[naxes:]
    coef = coef.reshape(lead + (1,) * (len(shape) - len(value)) + value)
    return np.broadcast_to(coef, lead + tuple(shape))


class _TruncatedSeries:
    # number of leading coefficient axes
    naxes = 1

    # let numpy defer to the reflected operators
    __array_ufunc__ = None

    def __init__(self, coef, order=None):
        coef = np.asarray(coef, dtype=float)
        if coef.ndim < self.naxes:
            raise ValueError("coefficient array has too few dimensions")
        if order is not None:
            coef = self._resize(coef, order)
        self.coef = coef

    # construction helpers

    @classmethod
    def _resize(cls, coef, order):
        raise NotImplementedError

    @classmethod
    def constant(cls, value, order):
        value = np.asarray(value, dtype=float)
        coef = np.zeros((order + 1,) * cls.naxes + value.shape)
        coef[(0,) * cls.naxes] = value
        return cls(coef)

    @classmethod
    def zeros(cls, shape, order):
        return cls(np.zeros((order + 1,) * cls.naxes + tuple(shape)))

    def _new(self, coef):
        return type(self)(coef)

    # shape bookkeeping

    @property
    def order(self):
        return self.coef.shape[0] - 1

    @property
    def shape(self):
        return self.coef.shape[self.naxes:]

    @property
    def ndim(self):
        return len(self.shape)

    def truncate(self, order):
        if order > self.order:
            raise ValueError(f"cannot raise series order from {self.order} to {order}")
        return self._new(self._resize(self.coef, order))

    def _align(self, other, broadcast=True):
        if isinstance(other, _TruncatedSeries):
            if type(other) is not type(self):
                raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
            n = min(self.order, other.order)
            a = self._resize(self.coef, n)
            b = self._resize(other.coef, n)
            if broadcast:
                shape = np.broadcast_shapes(self.shape, other.shape)
                a = _expand(a, self.naxes, shape)
                b = _expand(b, self.naxes, shape)
            return a, b, True
        b = np.asarray(other, dtype=float)
        a = self.coef
        if broadcast:
            a = _expand(a, self.naxes, np.broadcast_shapes(self.shape, b.shape))
        return a, b, False

    def _value_index(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return (slice(None),) * self.naxes + idx

    # value-dimension array protocol

    def __getitem__(self, idx):
        return self._new(self.coef[self._value_index(idx)])

    def __setitem__(self, idx, value):
        if isinstance(value, _TruncatedSeries):
            self.coef[self._value_index(idx)] = self._resize(value.coef, self.order)
        else:
            # constants only touch the zeroth coefficient
            self.coef[self._value_index(idx)] = 0.0
            self.coef[(0,) * self.naxes + (idx if isinstance(idx, tuple) else (idx,))] = value

    def sum(self, axis=None):
        if axis is None:
            axes = tuple(range(self.naxes, self.coef.ndim))
            return self._new(self.coef.sum(axis=axes))
        if axis >= 0:
            axis += self.naxes
        return self._new(self.coef.sum(axis=axis))

    @property
    def T(self):
        if self.ndim != 2:
            raise ValueError("transpose needs matrix values")
        return self._new(np.swapaxes(self.coef, -1, -2))

    def copy(self):
        return self._new(self.coef.copy())

    # arithmetic

    def __add__(self, other):
        a, b, is_series = self._align(other)
        if is_series:
            return self._new(a + b)
        coef = np.array(a)
        coef[(0,) * self.naxes] += b
        return self._new(coef)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.coef)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b, is_series = self._align(other)
        if is_series:
            return self._new(self._convolve(a, b, np.multiply))
        return self._new(a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, _TruncatedSeries):
            return self * other.reciprocal()
        return self._new(self.coef / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n):
        if int(n) != n or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = self.constant(np.ones(self.shape), self.order)
        for _ in range(int(n)):
            result = result * self
        return result

    def __matmul__(self, other):
        if isinstance(other, _TruncatedSeries):
            a, b, _ = self._align(other, broadcast=False)
            product = lambda x, y: _vmatmul(x, y, self.ndim, other.ndim)
            return self._new(self._convolve(a, b, product))
        other = np.asarray(other, dtype=float)
        return self._new(_vmatmul(self.coef, other, self.ndim, other.ndim))

    def __rmatmul__(self, other):
        other = np.asarray(other, dtype=float)
        return self._new(_vmatmul(other, self.coef, other.ndim, self.ndim))

    def _convolve(self, a, b, op):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(order={self.order}, shape={self.shape})"


class PowerSeries(_TruncatedSeries):
    """
    Univariate truncated Taylor series in t at t = 0.
    """
    naxes = 1

    @classmethod
    def _resize(cls, coef, order):
        n = coef.shape[0] - 1
        if order <= n:
            return coef[:order + 1]
        pad = np.zeros((order - n,) + coef.shape[1:])
        return np.concatenate([coef, pad])

    @classmethod
    def variable(cls, order):
        coef = np.zeros(order + 1)
        if order >= 1:
            coef[1] = 1.0
        return cls(coef)

    def _convolve(self, a, b, op):
        n = a.shape[0]
        out = None
        for k in range(n):
            term = op(a[k], b[:n - k])
            if out is None:
                out = np.zeros((n,) + term.shape[1:])
            out[k:] += term
        return out

    def reciprocal(self):
        a = self.coef
        if np.any(a[0] == 0):
            raise ZeroDivisionError("series with vanishing constant term is not invertible")
        b = np.zeros_like(a)
        b[0] = 1.0 / a[0]
        for n in range(1, a.shape[0]):
            acc = sum(a[k] * b[n - k] for k in range(1, n + 1))
            b[n] = -acc / a[0]
        return self._new(b)

    def sqrt(self):
        a = self.coef
        s = np.zeros_like(a)
        s[0] = np.sqrt(a[0])
        for n in range(1, a.shape[0]):
            acc = sum(s[k] * s[n - k] for k in range(1, n))
            s[n] = (a[n] - acc) / (2.0 * s[0])
        return self._new(s)

    def exp(self):
        a = self.coef
        e = np.zeros_like(a)
        e[0] = np.exp(a[0])
        for n in range(1, a.shape[0]):
            e[n] = sum(k * a[k] * e[n - k] for k in range(1, n + 1)) / n
        return self._new(e)

    def deriv(self, n=1):
        coef = self.coef
        for _ in range(n):
            if coef.shape[0] == 1:
                return self._new(np.zeros((1,) + coef.shape[1:]))
            k = np.arange(1, coef.shape[0]).reshape((-1,) + (1,) * (coef.ndim - 1))
            coef = coef[1:] * k
        return self._new(coef)

    def integ(self, x0=0.0):
        """
        Antiderivative vanishing at t = 0 plus `x0`; the order goes up by one.
        """
        coef = self.coef
        k = np.arange(1, coef.shape[0] + 1).reshape((-1,) + (1,) * (coef.ndim - 1))
        head = np.zeros((1,) + coef.shape[1:]) + np.asarray(x0, dtype=float)
        return self._new(np.concatenate([head, coef / k]))

    def derivatives(self):
        """
        Stack of f(0), f'(0), ..., f^(N)(0).
        """
        k = np.arange(self.order + 1)
        factorial = np.cumprod(np.maximum(k, 1)).astype(float)
        return self.coef * factorial.reshape((-1,) + (1,) * self.ndim)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        result = np.zeros(t.shape + self.shape)
        for c in self.coef[::-1]:
            result = result * t.reshape(t.shape + (1,) * self.ndim) + c
        return result

    def compose_linear(self, scale):
        """
        Series of f(scale * t).
        """
        powers = np.asarray(scale, dtype=float) ** np.arange(self.order + 1)
        return self._new(self.coef * powers.reshape((-1,) + (1,) * self.ndim))


class BivariateSeries(_TruncatedSeries):
    """
    Bivariate truncated Taylor series in (u, v) at the origin, total order N.
    """
    naxes = 2

    @staticmethod
    def mask(order):
        i, j = np.indices((order + 1, order + 1))
        return i + j <= order

    @classmethod
    def _resize(cls, coef, order):
        n = coef.shape[0] - 1
        if order <= n:
            out = coef[:order + 1, :order + 1].copy()
        else:
            out = np.zeros((order + 1, order + 1) + coef.shape[2:])
            out[:n + 1, :n + 1] = coef
        out[~cls.mask(order)] = 0.0
        return out

    @classmethod
    def variables(cls, order):
        u = np.zeros((order + 1, order + 1))
        v = np.zeros((order + 1, order + 1))
        if order >= 1:
            u[1, 0] = 1.0
            v[0, 1] = 1.0
        return cls(u), cls(v)

    def __init__(self, coef, order=None):
        super().__init__(coef, order)
        if self.coef.shape[0] != self.coef.shape[1]:
            raise ValueError("bivariate coefficients must be square in the leading axes")
        if order is None and np.any(self.coef[~self.mask(self.order)]):
            self.coef = self._resize(self.coef, self.order)

    def _convolve(self, a, b, op):
        n = a.shape[0]
        out = None
        for i in range(n):
            for j in range(n - i):
                term = op(a[i, j], b[:n - i, :n - j])
                if out is None:
                    out = np.zeros((n, n) + term.shape[2:])
                out[i:, j:] += term
        out[~self.mask(n - 1)] = 0.0
        return out

    def reciprocal(self):
        """
        Solved order by order: (a * b)[i, j] = delta_ij0.
        """
        a = self.coef
        n = a.shape[0]
        if np.any(a[0, 0] == 0):
            raise ZeroDivisionError("series with vanishing constant term is not invertible")
        b = np.zeros_like(a)
        for total in range(n):
            for i in range(total + 1):
                j = total - i
                acc = 1.0 if total == 0 else 0.0
                for k in range(i + 1):
                    for l in range(j + 1):
                        if k or l:
                            acc = acc - a[k, l] * b[i - k, j - l]
                b[i, j] = acc / a[0, 0]
        return self._new(b)

    def deriv(self, var):
        """
        Partial derivative in `var` ("u" or "v"); the order drops by one.
        """
        c = self.coef
        n = self.order
        if n == 0:
            return self._new(np.zeros((1, 1) + self.shape))
        out = np.zeros((n, n) + self.shape)
        k = np.arange(1, n + 1).reshape((-1,) + (1,) * self.ndim)
        if var == "u":
            for j in range(n):
                out[:n - j, j] = c[1:n + 1 - j, j] * k[:n - j]
        elif var == "v":
            for i in range(n):
                out[i, :n - i] = c[i, 1:n + 1 - i] * k[:n - i]
        else:
            raise ValueError(f"unknown variable {var!r}")
        return self._new(out)

    def homogeneous(self, degree):
        """
        Coefficients c[i, degree - i] for i = 0..degree.
        """
        return np.stack([self.coef[i, degree - i] for i in range(degree + 1)])

    def along(self, alpha, beta):
        """
        Restriction to the line (u, v) = (alpha t, beta t) as a PowerSeries in t.
        """
        n = self.order
        out = np.zeros((n + 1,) + self.shape)
        for i in range(n + 1):
            for j in range(n + 1 - i):
                out[i + j] += self.coef[i, j] * alpha ** i * beta ** j
        return PowerSeries(out)

    def max_abs(self, upto=None):
        """
        Largest coefficient magnitude among total degrees <= upto.
        """
        upto = self.order if upto is None else upto
        i, j = np.indices((self.order + 1, self.order + 1))
        sel = (i + j) <= upto
        if not np.any(sel):
            return 0.0
        return float(np.max(np.abs(self.coef[sel]))) if self.coef[sel].size else 0.0

    def __call__(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        u, v = np.broadcast_arrays(u, v)
        k = np.arange(self.order + 1)
        up = u.reshape(-1, 1) ** k
        vp = v.reshape(-1, 1) ** k
        flat = self.coef.reshape(self.order + 1, self.order + 1, -1)
        values = np.einsum("gi,gj,ijp->gp", up, vp, flat)
        return values.reshape(u.shape + self.shape)


def stack(items, axis=-1):
    """
    `numpy.stack` for series sharing a value shape; truncates to the lowest order.
    """
    kind = type(items[0])
    order = min(item.order for item in items)
    coefs = [kind._resize(item.coef, order) for item in items]
    if axis >= 0:
        axis += kind.naxes
    return kind(np.stack(coefs, axis=axis))

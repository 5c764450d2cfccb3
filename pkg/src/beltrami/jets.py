"""Truncated bivariate Taylor arithmetic.

A Jet holds the Taylor coefficients of a smooth function of two chart
variables at a point, cut off at a fixed total degree.  Arithmetic on Jets
propagates derivatives exactly (to rounding), so any quantity assembled
from chart jets carries its own partial derivatives; .partial(i, j) reads
them back.

Coefficients sit on the LAST axis of ``c``; leading axes are batch axes,
which is how the pipeline vectorizes over sample grids.  The same class
doubles as a one-variable jet (seed only the u axis) for derivatives along
curves.
"""

from __future__ import annotations

import math

import numpy as np

_FACT = [math.factorial(k) for k in range(20)]


def _pairs(deg: int):
    return [(i, s - i) for s in range(deg + 1) for i in range(s, -1, -1)]


class _Tables:
    """Index bookkeeping for one truncation degree."""

    def __init__(self, deg: int):
        self.deg = deg
        self.pairs = _pairs(deg)
        self.index = {p: k for k, p in enumerate(self.pairs)}
        self.n = len(self.pairs)
        # product rows: for left coefficient k, (cols into right, rows into out);
        # out rows are distinct within a row, so fancy-index += is safe
        mul_b, mul_out = [], []
        for (i1, j1) in self.pairs:
            bs, outs = [], []
            for kb, (i2, j2) in enumerate(self.pairs):
                if i1 + i2 + j1 + j2 <= deg:
                    bs.append(kb)
                    outs.append(self.index[(i1 + i2, j1 + j2)])
            mul_b.append(np.array(bs, dtype=int))
            mul_out.append(np.array(outs, dtype=int))
        self.mul_b = mul_b
        self.mul_out = mul_out
        if deg > 0:
            lower = _pairs(deg - 1)
            self.du_src = np.array([self.index[(i + 1, j)] for (i, j) in lower], dtype=int)
            self.du_fac = np.array([i + 1 for (i, j) in lower], dtype=float)
            self.dv_src = np.array([self.index[(i, j + 1)] for (i, j) in lower], dtype=int)
            self.dv_fac = np.array([j + 1 for (i, j) in lower], dtype=float)


_TABLES: dict[int, _Tables] = {}


def tables(deg: int) -> _Tables:
    t = _TABLES.get(deg)
    if t is None:
        t = _TABLES[deg] = _Tables(deg)
    return t


class Jet:
    __slots__ = ("deg", "c")

    # keep numpy from treating a Jet as an elementwise scalar: binary ops with
    # ndarrays must flow through the Jet operators below
    __array_ufunc__ = None

    def __init__(self, deg: int, c: np.ndarray):
        self.deg = deg
        self.c = c

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, value, deg: int) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros(value.shape + (tables(deg).n,))
        c[..., 0] = value
        return cls(deg, c)

    @classmethod
    def variable(cls, value, deg: int, axis: int) -> "Jet":
        """Seed a coordinate function: axis 0 -> u, 1 -> v."""
        t = tables(deg)
        value = np.asarray(value, dtype=float)
        c = np.zeros(value.shape + (t.n,))
        c[..., 0] = value
        if deg >= 1:
            c[..., t.index[(1, 0) if axis == 0 else (0, 1)]] = 1.0
        return cls(deg, c)

    @classmethod
    def from_partials(cls, partials: dict, deg: int) -> "Jet":
        """Build a jet from partial-derivative values {(i, j): d^{i+j}f/du^i dv^j}."""
        t = tables(deg)
        vals = {k: np.asarray(v, dtype=float) for k, v in partials.items()}
        shape = np.broadcast_shapes(*[v.shape for v in vals.values()]) if vals else ()
        c = np.zeros(shape + (t.n,))
        for (i, j), val in vals.items():
            if i + j <= deg:
                c[..., t.index[(i, j)]] = val / (_FACT[i] * _FACT[j])
        return cls(deg, c)

    # -- reads ---------------------------------------------------------

    @property
    def value(self):
        return self.c[..., 0]

    def partial(self, i: int, j: int):
        """Exact partial derivative d^{i+j}/du^i dv^j at the base point."""
        if i + j > self.deg:
            raise ValueError(f"jet of degree {self.deg} has no ({i},{j}) partial")
        return self.c[..., tables(self.deg).index[(i, j)]] * (_FACT[i] * _FACT[j])

    def truncate(self, deg: int) -> "Jet":
        if deg >= self.deg:
            return self
        return Jet(deg, self.c[..., : tables(deg).n])

    # -- ring operations ------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.deg == self.deg:
                return self, other
            d = min(self.deg, other.deg)
            return self.truncate(d), other.truncate(d)
        return self, Jet.constant(other, self.deg)

    def __add__(self, other):
        if not isinstance(other, Jet):
            arr = np.asarray(other, dtype=float)
            shape = np.broadcast_shapes(self.c.shape[:-1], arr.shape)
            c = np.zeros(shape + self.c.shape[-1:])
            c += self.c
            c[..., 0] += arr
            return Jet(self.deg, c)
        a, b = self._coerce(other)
        return Jet(a.deg, a.c + b.c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.deg, -self.c)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -np.asarray(other, dtype=float))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.deg, self.c * np.asarray(other, dtype=float)[..., None])
        a, b = self._coerce(other)
        t = tables(a.deg)
        shape = np.broadcast_shapes(a.c.shape[:-1], b.c.shape[:-1])
        out = np.zeros(shape + (t.n,))
        ac, bc = a.c, b.c
        for k in range(t.n):
            cols = t.mul_b[k]
            if cols.size:
                out[..., t.mul_out[k]] += ac[..., k, None] * bc[..., cols]
        return Jet(a.deg, out)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        x0 = self.c[..., 0]
        p = Jet(self.deg, self.c.copy())
        p.c[..., 0] = 0.0
        # 1/(x0 + p) = (1/x0) * sum_k (-p/x0)^k, exact at this truncation
        inv0 = 1.0 / x0
        acc = term = Jet.constant(inv0, self.deg)
        if self.deg > 0:
            step = p * (-inv0)
            for _ in range(self.deg):
                term = term * step
                acc = acc + term
        return acc

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.deg, self.c / np.asarray(other, dtype=float)[..., None])
        a, b = self._coerce(other)
        return a * b.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n):
        if isinstance(n, int):
            if n == 0:
                return Jet.constant(np.ones(self.c.shape[:-1]), self.deg)
            if n < 0:
                return self.reciprocal() ** (-n)
            out = self
            for _ in range(n - 1):
                out = out * self
            return out
        a = float(n)
        return self._series(lambda k, x0: _binom(a, k) * x0 ** (a - k))

    # -- analytic functions ----------------------------------------------

    def _series(self, coeff_k) -> "Jet":
        """Compose with a 1-D series: coeff_k(k, x0) must equal g^{(k)}(x0)/k!."""
        x0 = self.c[..., 0]
        p = Jet(self.deg, self.c.copy())
        p.c[..., 0] = 0.0
        acc = Jet.constant(coeff_k(0, x0), self.deg)
        pk = None
        for k in range(1, self.deg + 1):
            pk = p if pk is None else pk * p
            acc = acc + pk * coeff_k(k, x0)
        return acc

    def sin(self):
        return self._series(lambda k, x0: _trig(k)(x0) / _FACT[k])

    def cos(self):
        return self._series(lambda k, x0: _trig(k + 1)(x0) / _FACT[k])

    def exp(self):
        return self._series(lambda k, x0: np.exp(x0) / _FACT[k])

    def log(self):
        def ck(k, x0):
            if k == 0:
                return np.log(x0)
            return ((-1.0) ** (k + 1)) / (k * x0 ** k)

        return self._series(ck)

    def sqrt(self):
        return self._series(lambda k, x0: _binom(0.5, k) * x0 ** (0.5 - k))

    def tan(self):
        return self.sin() / self.cos()

    def atan(self):
        # g^{(k)}(x)/k! = (-1)^(k-1) sin(k t) / (k (1+x^2)^(k/2)), t = atan2(1, x)
        def ck(k, x0):
            if k == 0:
                return np.arctan(x0)
            t = np.arctan2(1.0, x0)
            return np.sin(k * t) * ((-1.0) ** (k - 1)) / (k * (1.0 + x0 * x0) ** (k / 2.0))

        return self._series(ck)

    # -- calculus ----------------------------------------------------------

    def d_du(self) -> "Jet":
        return self._shift(0)

    def d_dv(self) -> "Jet":
        return self._shift(1)

    def _shift(self, axis: int) -> "Jet":
        if self.deg == 0:
            raise ValueError("cannot differentiate a degree-0 jet")
        t = tables(self.deg)
        src = t.du_src if axis == 0 else t.dv_src
        fac = t.du_fac if axis == 0 else t.dv_fac
        return Jet(self.deg - 1, self.c[..., src] * fac)

    def eval_at(self, du, dv):
        """Evaluate the truncated polynomial at offsets (du, dv).

        Offsets may be floats, arrays, or Jets (composition along a curve).
        """
        t = tables(self.deg)
        pow_u: list = [1.0, du]
        pow_v: list = [1.0, dv]
        for _ in range(2, self.deg + 1):
            pow_u.append(pow_u[-1] * du)
            pow_v.append(pow_v[-1] * dv)
        acc = None
        for k, (i, j) in enumerate(t.pairs):
            term = self.c[..., k]
            if i:
                term = pow_u[i] * term
            if j:
                term = pow_v[j] * term
            acc = term if acc is None else acc + term
        return acc

    def __repr__(self):
        return f"Jet(deg={self.deg}, value={self.value!r})"


def _trig(k):
    return (np.sin, np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x))[k % 4]


def _binom(alpha: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= (alpha - i) / (i + 1)
    return out


# ---------------------------------------------------------------------------
# central finite-difference stencils, 4th-order accurate

D1_W = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0              # offsets -2..2
D2_W = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0          # offsets -2..2
D3_W = np.array([1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0]) / 8.0  # offsets -3..3

STENCILS = {
    0: (np.array([1.0]), np.array([0])),
    1: (D1_W, np.arange(-2, 3)),
    2: (D2_W, np.arange(-2, 3)),
    3: (D3_W, np.arange(-3, 4)),
}


def fd_partial(fn, u0, v0, i, j, hu, hv):
    """4th-order central estimate of d^{i+j} fn / du^i dv^j at (u0, v0).

    fn must accept array arguments and broadcast; the stencil axes are
    appended after the batch axes of (u0, v0) and summed out.
    """
    wi, oi = STENCILS[i]
    wj, oj = STENCILS[j]
    u0 = np.asarray(u0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    uu = u0[..., None, None] + oi.reshape(-1, 1) * hu
    vv = v0[..., None, None] + oj.reshape(1, -1) * hv
    vals = fn(uu + 0.0 * vv, vv + 0.0 * uu)
    w = wi.reshape(-1, 1) * wj.reshape(1, -1)
    est = np.sum(vals * w, axis=(-2, -1))
    return est / (hu ** i * hv ** j)

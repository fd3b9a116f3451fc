"""Truncated formal power series in hbar and the q-combinatorics built on them.

A series of order ``N`` stores the real coefficients of hbar^0 .. hbar^(N-1);
everything beyond is silently dropped.  The deformation parameter enters only
through ``q = exp(hbar)``, so every q-number below is itself a series.

Two layers live here:

* :class:`HSeries`, an immutable scalar value with operator overloading;
* array helpers (``*_coeffs`` functions, :func:`smat_inv`, :func:`skron`, ...)
  working on raw ``numpy`` arrays whose axis 0 is the hbar order.  The other
  modules use these for whole matrices at once.

The working order and comparison tolerance are per-session settings held in
context variables (see :func:`session`).
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from contextvars import ContextVar
from numbers import Real

import numpy as np

from . import kernels
from .errors import NegativeFactorial, NoRealSqrt, NotInvertible

DEFAULT_ORDER = 8
DEFAULT_TOL = 1e-9

_order: ContextVar[int] = ContextVar("qtwist_order", default=DEFAULT_ORDER)
_tol: ContextVar[float] = ContextVar("qtwist_tol", default=DEFAULT_TOL)


def get_order() -> int:
    return _order.get()


def set_order(order: int) -> None:
    if int(order) < 1:
        raise ValueError("order must be a positive integer")
    _order.set(int(order))


def get_tol() -> float:
    return _tol.get()


def set_tol(tol: float) -> None:
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    _tol.set(float(tol))


@contextmanager
def session(order: int | None = None, tol: float | None = None):
    """Temporarily set the working order and/or tolerance."""
    tokens = []
    if order is not None:
        if int(order) < 1:
            raise ValueError("order must be a positive integer")
        tokens.append((_order, _order.set(int(order))))
    if tol is not None:
        if not tol > 0:
            raise ValueError("tolerance must be positive")
        tokens.append((_tol, _tol.set(float(tol))))
    try:
        yield
    finally:
        for var, token in reversed(tokens):
            var.reset(token)


def _resolve(order):
    return get_order() if order is None else int(order)


# ---------------------------------------------------------------------------
# array layer

def const_coeffs(c: float, order: int | None = None) -> np.ndarray:
    out = np.zeros(_resolve(order))
    out[0] = c
    return out


def exp_coeffs(a: float, order: int | None = None) -> np.ndarray:
    """Coefficients of exp(hbar * a)."""
    n = _resolve(order)
    out = np.empty(n)
    term = 1.0
    out[0] = 1.0
    for p in range(1, n):
        term = term * a / p
        out[p] = term
    return out


def qnum_coeffs(n: int, order: int | None = None) -> np.ndarray:
    """[n] = (q^n - q^-n)/(q - q^-1) via the finite sum q^(n-1) + q^(n-3) + ... ."""
    size = _resolve(order)
    if n == 0:
        return np.zeros(size)
    if n < 0:
        return -qnum_coeffs(-n, size)
    out = np.zeros(size)
    for k in range(n):
        out += exp_coeffs(n - 1 - 2 * k, size)
    return out


def qfact_coeffs(n: int, order: int | None = None) -> np.ndarray:
    if n < 0:
        raise NegativeFactorial(f"[{n}]! is undefined")
    size = _resolve(order)
    out = const_coeffs(1.0, size)
    for k in range(2, n + 1):
        out = kernels.series_mul(out, qnum_coeffs(k, size))
    return out


def qbinom_qm2_coeffs(n: int, k: int, order: int | None = None) -> np.ndarray:
    """q-binomial with base q^-2: q^(k(k-n)) [n]! / ([n-k]! [k]!); zero off range."""
    size = _resolve(order)
    if k < 0 or k > n:
        return np.zeros(size)
    if k in (0, n):
        return const_coeffs(1.0, size)
    den = kernels.series_mul(qfact_coeffs(n - k, size), qfact_coeffs(k, size))
    out = kernels.series_mul(qfact_coeffs(n, size), inv_coeffs(den))
    return kernels.series_mul(exp_coeffs(k * (k - n), size), out)


def inv_coeffs(a: np.ndarray) -> np.ndarray:
    if a[0] == 0:
        raise NotInvertible("constant term is zero")
    return kernels.series_inv(a)


def sqrt_coeffs(a: np.ndarray) -> np.ndarray:
    if not a[0] > 0:
        raise NoRealSqrt(f"constant term {a[0]!r} is not positive")
    return kernels.series_sqrt(a)


def classical(a: np.ndarray) -> np.ndarray:
    """hbar -> 0 limit of a series array, kept at the same order."""
    out = np.zeros_like(a)
    out[0] = a[0]
    return out


def smat_inv(a: np.ndarray) -> np.ndarray:
    """Inverse of a series matrix ``(N, n, n)`` with invertible constant term."""
    n = a.shape[0]
    try:
        inv0 = np.linalg.inv(a[0])
    except np.linalg.LinAlgError as exc:
        raise NotInvertible("constant term of the matrix is singular") from exc
    out = np.zeros_like(a)
    out[0] = inv0
    for k in range(1, n):
        acc = np.zeros_like(inv0)
        for i in range(1, k + 1):
            acc += a[i] @ out[k - i]
        out[k] = -inv0 @ acc
    return out


def skron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of series matrices, first factor major."""
    n = min(a.shape[0], b.shape[0])
    ra, ca = a.shape[1:]
    rb, cb = b.shape[1:]
    # (N,ra,ca,1,1) x (N,1,1,rb,cb) convolved in hbar
    prod = kernels.series_mul(a[:n, :, None, :, None], b[:n, None, :, None, :])
    return prod.reshape(n, ra * rb, ca * cb)


def sidentity(dim: int, order: int | None = None) -> np.ndarray:
    out = np.zeros((_resolve(order), dim, dim))
    out[0] = np.eye(dim)
    return out


def max_deviation(a: np.ndarray, b: np.ndarray | float = 0.0) -> float:
    """Largest absolute coefficient difference (0.0 for empty arrays)."""
    d = np.abs(np.asarray(a) - np.asarray(b))
    return float(d.max()) if d.size else 0.0


# ---------------------------------------------------------------------------
# scalar values

class HSeries:
    """A truncated hbar-adic series with real coefficients.

    >>> s = HSeries([1.0, 1.0], order=4)      # 1 + hbar
    >>> (s * s.inv()).coeffs.tolist()
    [1.0, 0.0, 0.0, 0.0]
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs, order: int | None = None):
        c = np.array(coeffs, dtype=np.float64).reshape(-1)
        if order is not None:
            order = int(order)
            if order < 1:
                raise ValueError("order must be a positive integer")
            if c.size < order:
                c = np.concatenate([c, np.zeros(order - c.size)])
            c = c[:order]
        if c.size == 0:
            raise ValueError("a series needs at least one coefficient")
        c.flags.writeable = False
        self._c = c

    @classmethod
    def const(cls, value: float, order: int | None = None) -> HSeries:
        return cls(const_coeffs(value, order))

    @classmethod
    def hbar(cls, order: int | None = None) -> HSeries:
        c = np.zeros(_resolve(order))
        if c.size > 1:
            c[1] = 1.0
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def order(self) -> int:
        return self._c.size

    @property
    def constant(self) -> float:
        return float(self._c[0])

    def __len__(self):
        return self._c.size

    def __getitem__(self, k):
        return self._c[k]

    def _coerce(self, other):
        if isinstance(other, HSeries):
            n = min(self.order, other.order)
            return self._c[:n], other._c[:n]
        if isinstance(other, Real):
            return self._c, const_coeffs(float(other), self.order)
        return None

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return HSeries(pair[0] + pair[1])

    __radd__ = __add__

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return HSeries(pair[0] - pair[1])

    def __rsub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return HSeries(pair[1] - pair[0])

    def __neg__(self):
        return HSeries(-self._c)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Real):
            return HSeries(self._c * float(other))
        if not isinstance(other, HSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return HSeries(kernels.series_mul(self._c[:n], other._c[:n]))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Real):
            return HSeries(self._c / float(other))
        if not isinstance(other, HSeries):
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        if isinstance(other, Real):
            return self.inv() * float(other)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inv() ** (-k)
        out = HSeries.const(1.0, self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inv(self) -> HSeries:
        return HSeries(inv_coeffs(self._c))

    def sqrt(self) -> HSeries:
        return HSeries(sqrt_coeffs(self._c))

    def truncate(self, order: int) -> HSeries:
        return HSeries(self._c, order=min(order, self.order))

    def allclose(self, other, tol: float | None = None) -> bool:
        tol = get_tol() if tol is None else tol
        pair = self._coerce(other)
        if pair is None:
            raise TypeError(f"cannot compare HSeries with {type(other).__name__}")
        return max_deviation(*pair) <= tol

    def __eq__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        return bool(np.array_equal(*pair))

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        terms = []
        for p, c in enumerate(self._c):
            if c == 0 and p:
                continue
            terms.append(f"{c:.6g}" if p == 0 else f"{c:.6g}*h^{p}")
        return f"HSeries({' + '.join(terms)}; order={self.order})"

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [float(c) for c in self._c]}

    @classmethod
    def from_json(cls, obj: dict) -> HSeries:
        return cls(obj["coeffs"], order=obj.get("order", len(obj["coeffs"])))


def _as_series(x, order=None):
    if isinstance(x, HSeries):
        return x
    return HSeries.const(float(x), order)


# ---------------------------------------------------------------------------
# public operations

def series_arith(a: HSeries, b, kind: str) -> HSeries:
    """Ring operations; ``kind`` is one of ``add``, ``sub``, ``mul``, ``scale``."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * _as_series(b, a.order)
    if kind == "scale":
        return a * float(b)
    raise ValueError(f"unknown operation {kind!r}")


def series_inv(a: HSeries) -> HSeries:
    return a.inv()


def series_sqrt(a: HSeries) -> HSeries:
    return a.sqrt()


def exp_h(a: float, order: int | None = None) -> HSeries:
    """exp(hbar * a); half-integer and real ``a`` are both fine."""
    return HSeries(exp_coeffs(float(a), order))


def qnum(n: int, order: int | None = None) -> HSeries:
    return HSeries(qnum_coeffs(int(n), order))


def qfact(n: int, order: int | None = None) -> HSeries:
    return HSeries(qfact_coeffs(int(n), order))


def qbinom_qm2(n: int, k: int, order: int | None = None) -> HSeries:
    return HSeries(qbinom_qm2_coeffs(int(n), int(k), order))


def q_power(a: float, order: int | None = None) -> HSeries:
    """q**a with q = exp(hbar); alias of :func:`exp_h` that reads better in formulas."""
    return exp_h(a, order)

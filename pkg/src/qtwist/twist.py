"""Representation matrices of Drinfeld twists from U(su2) to U_h(su2).

On V^j1 x V^j2 a twist acts blockwise in the CG decomposition:

    F = C_q diag(eta(j)) C^T,      F^-1 = C diag(1/eta(j)) C_q^T,

with C_q / C the deformed / classical CG matrices.  The standard twist has
eta = 1.  Matrices are assembled as ``I + (deviation)`` so that their
hbar^0 part is exactly the identity rather than C C^T up to rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from . import _extprec as ext
from . import kernels
from .cg import block_offsets, cg_matrix_ext
from .errors import MissingBlockFactor
from .hseries import HSeries, get_order, smat_inv
from .reps import (RepMatrix, SpinLabel, as_spin, casimir_rep, coproduct_coeffs,
                   generator_coeffs, rmatrix_coeffs)


def _spins_in(two_j1, two_j2):
    return range(abs(two_j1 - two_j2), two_j1 + two_j2 + 1, 2)


def _eta_columns(two_j1, two_j2, eta, order):
    """Per-column series (order, D) holding eta(j) on the spin-j block."""
    cols = []
    for two_j in _spins_in(two_j1, two_j2):
        if two_j not in eta:
            raise MissingBlockFactor(f"no block factor for j = {SpinLabel(two_j)}")
        c = np.zeros(order, ext.LD)
        src = np.asarray(eta[two_j], dtype=ext.LD)[:order]
        c[:src.size] = src
        cols.extend([c] * (two_j + 1))
    return np.stack(cols, axis=1)


def _twist_ext(two_j1, two_j2, inverse, order, eta=None):
    cq = cg_matrix_ext(two_j1, two_j2, True, order)
    cc = cg_matrix_ext(two_j1, two_j2, False, order)
    dim = cq.shape[1]
    if eta is None:
        left, right = (cc, cq) if inverse else (cq, cc)
        dev = left - right
        base = cq if inverse else cc
    else:
        w = _eta_columns(two_j1, two_j2, eta, order)
        if inverse:
            w = np.stack([ext.inv(w[:, k]) for k in range(dim)], axis=1)
            dev, base = ext.mul(cc, w[:, None, :]) - cq, cq
        else:
            dev, base = ext.mul(cq, w[:, None, :]) - cc, cc
    out = ext.matmul(dev, base.transpose(0, 2, 1))
    out[0] += np.eye(dim, dtype=ext.LD)
    return out


@lru_cache(maxsize=None)
def standard_twist_coeffs(two_j1: int, two_j2: int, inverse: bool, order: int) -> np.ndarray:
    out = _twist_ext(two_j1, two_j2, inverse, order).astype(np.float64)
    out.flags.writeable = False
    return out


def twist_coeffs(two_j1: int, two_j2: int, inverse: bool = False, order: int | None = None,
                 eta: dict | None = None) -> np.ndarray:
    """Twist (or inverse) on V^j1 x V^j2; ``eta`` maps two_j to a coefficient array."""
    order = get_order() if order is None else order
    if eta is None:
        return standard_twist_coeffs(two_j1, two_j2, bool(inverse), order)
    return _twist_ext(two_j1, two_j2, inverse, order, eta).astype(np.float64)


def _normalise_factors(block_factors) -> dict[int, np.ndarray] | None:
    if block_factors is None:
        return None
    out = {}
    for key, val in block_factors.items():
        coeffs = val.coeffs if isinstance(val, HSeries) else np.atleast_1d(np.asarray(val, float))
        if coeffs[0] == 0:
            raise ValueError(f"block factor for j = {key} is not invertible")
        out[as_spin(key).two_j] = coeffs
    return out


@dataclass(frozen=True)
class TwistRep:
    """A twist matrix on V^j1 x V^j2 together with its block factors."""

    j1: SpinLabel
    j2: SpinLabel
    matrix: RepMatrix
    block_factors: dict = field(default_factory=dict)
    inverse: bool = False


def standard_twist_rep(j1, j2, block_factors=None, inverse: bool = False) -> TwistRep:
    """F_s (or a gauge variant with the given eta(j) per block) on V^j1 x V^j2."""
    s1, s2 = as_spin(j1), as_spin(j2)
    eta = _normalise_factors(block_factors)
    data = twist_coeffs(s1.two_j, s2.two_j, inverse, get_order(), eta)
    factors = {} if eta is None else {SpinLabel(k): HSeries(v) for k, v in eta.items()}
    return TwistRep(s1, s2, RepMatrix(data, (s1.two_j, s2.two_j)), factors, bool(inverse))


@lru_cache(maxsize=None)
def _deformed_coproduct(g, two_j1, two_j2, order):
    cq = cg_matrix_ext(two_j1, two_j2, True, order)
    cc = cg_matrix_ext(two_j1, two_j2, False, order)
    dim = cq.shape[1]
    blk = np.zeros((order, dim, dim), ext.LD)
    off = block_offsets(two_j1, two_j2)
    for two_j, o in off.items():
        blk[:, o:o + two_j + 1, o:o + two_j + 1] = generator_coeffs(two_j, g, False, order)
    conj_q = ext.matmul(ext.matmul(cq, blk), cq.transpose(0, 2, 1))
    conj_c = ext.matmul(ext.matmul(cc, blk), cc.transpose(0, 2, 1))
    # conj_c equals the primitive coproduct; only the difference is kept
    out = coproduct_coeffs(g, two_j1, two_j2, False, order) + (conj_q - conj_c).astype(np.float64)
    out.flags.writeable = False
    return out


def deformed_coproduct_rep(g: str, j1, j2) -> RepMatrix:
    """Representation of the twisted coproduct F Delta(g) F^-1 on V^j1 x V^j2."""
    if g not in ("E", "F", "H"):
        raise ValueError(f"generator must be E, F or H, got {g!r}")
    s1, s2 = as_spin(j1), as_spin(j2)
    return RepMatrix(_deformed_coproduct(g, s1.two_j, s2.two_j, get_order()),
                     (s1.two_j, s2.two_j))


# ---------------------------------------------------------------------------
# twist families and coproducts of legs

class TwistFamily:
    """A rule giving the twist matrix on every pair V^ja x V^jb.

    ``eta(two_ja, two_jb, two_j)`` returns the block factor (HSeries or
    coefficient array); ``None`` means the standard twist.
    """

    def __init__(self, eta: Callable | None = None, inverse: bool = False):
        self.eta = eta
        self.inverse = inverse

    @classmethod
    def gauge(cls, beta, inverse: bool = False) -> TwistFamily:
        """Coboundary gauge eta(j) = beta(j) / (beta(ja) beta(jb)).

        ``beta`` maps two_j to an HSeries, either as a callable or a dict.
        """
        get = beta if callable(beta) else beta.__getitem__

        def eta(two_ja, two_jb, two_j):
            return get(two_j) / (get(two_ja) * get(two_jb))
        return cls(eta, inverse)

    def inv(self) -> TwistFamily:
        return TwistFamily(self.eta, not self.inverse)

    def coeffs(self, two_ja: int, two_jb: int, order: int | None = None) -> np.ndarray:
        order = get_order() if order is None else order
        if self.eta is None:
            return standard_twist_coeffs(two_ja, two_jb, self.inverse, order)
        eta = {}
        for two_j in _spins_in(two_ja, two_jb):
            val = self.eta(two_ja, two_jb, two_j)
            eta[two_j] = val.coeffs if isinstance(val, HSeries) else np.asarray(val, float)
        return twist_coeffs(two_ja, two_jb, self.inverse, order, eta)


STANDARD = TwistFamily()


def _as_family(x) -> TwistFamily:
    if isinstance(x, TwistFamily):
        return x
    if x in ("F", "twist"):
        return STANDARD
    if x in ("Finv", "inverse"):
        return STANDARD.inv()
    raise TypeError(f"expected a TwistFamily or 'F' / 'Finv', got {x!r}")


def coproduct_leg_coeffs(x, leg: str, two_j1: int, two_j2: int, two_j3: int,
                         order: int | None = None) -> np.ndarray:
    fam = _as_family(x)
    order = get_order() if order is None else order
    d1, d2, d3 = two_j1 + 1, two_j2 + 1, two_j3 + 1
    dim = d1 * d2 * d3
    dev = np.zeros((order, dim, dim))
    if leg == "left":
        # basis of (V^j1 x V^j2) x V^j3 after reducing the first pair
        c = cg_matrix_ext(two_j1, two_j2, False, order)[0]
        big = np.kron(c, np.eye(d3, dtype=ext.LD))
        for two_j, o in block_offsets(two_j1, two_j2).items():
            idx = np.arange(o * d3, (o + two_j + 1) * d3)
            blk = fam.coeffs(two_j, two_j3, order).copy()
            blk[0] -= np.eye(len(idx))
            dev[np.ix_(range(order), idx, idx)] = blk
    elif leg == "right":
        c = cg_matrix_ext(two_j2, two_j3, False, order)[0]
        big = np.kron(np.eye(d1, dtype=ext.LD), c)
        d23 = d2 * d3
        for two_j, o in block_offsets(two_j2, two_j3).items():
            idx = np.array([m1 * d23 + o + a for m1 in range(d1) for a in range(two_j + 1)])
            blk = fam.coeffs(two_j1, two_j, order).copy()
            blk[0] -= np.eye(len(idx))
            dev[np.ix_(range(order), idx, idx)] = blk
    else:
        raise ValueError(f"leg must be 'left' or 'right', got {leg!r}")
    out = np.einsum("ab,kbc,dc->kad", big, dev.astype(ext.LD), big).astype(np.float64)
    out[0] += np.eye(dim)
    return out


def coproduct_leg_rep(x, leg: str, j1, j2, j3) -> RepMatrix:
    """(Delta x id)(X) for leg='left' or (id x Delta)(X) for leg='right'.

    ``x`` is a :class:`TwistFamily` (or 'F' / 'Finv' for the standard
    twist and its inverse).  The coproducted pair of slots is decomposed
    with the classical CG table and X acts blockwise on the result.
    """
    s = [as_spin(j) for j in (j1, j2, j3)]
    data = coproduct_leg_coeffs(x, leg, *(t.two_j for t in s))
    return RepMatrix(data, tuple(t.two_j for t in s))


def _kron_identity(a, d_left, d_right):
    order = a.shape[0]
    out = a
    if d_left > 1:
        out = np.stack([np.kron(np.eye(d_left), out[k]) for k in range(order)])
    if d_right > 1:
        out = np.stack([np.kron(out[k], np.eye(d_right)) for k in range(order)])
    return out


def coassociator_coeffs(two_j1, two_j2, two_j3, family: TwistFamily | None = None,
                        order: int | None = None) -> np.ndarray:
    fam = STANDARD if family is None else family
    if fam.inverse:
        fam = fam.inv()
    order = get_order() if order is None else order
    d1, d3 = two_j1 + 1, two_j3 + 1
    left = coproduct_leg_coeffs(fam.inv(), "left", two_j1, two_j2, two_j3, order)
    f12inv = _kron_identity(fam.inv().coeffs(two_j1, two_j2, order), 1, d3)
    f23 = _kron_identity(fam.coeffs(two_j2, two_j3, order), d1, 1)
    right = coproduct_leg_coeffs(fam, "right", two_j1, two_j2, two_j3, order)
    mm = kernels.series_matmul
    return mm(mm(left, f12inv), mm(f23, right))


def coassociator_rep(j1, j2, j3, family: TwistFamily | None = None) -> RepMatrix:
    """Phi = (Delta x id)(F^-1) (F^-1 x 1) (1 x F) (id x Delta)(F) on V^j1 x V^j2 x V^j3."""
    s = [as_spin(j) for j in (j1, j2, j3)]
    return RepMatrix(coassociator_coeffs(*(t.two_j for t in s), family=family),
                     tuple(t.two_j for t in s))


# ---------------------------------------------------------------------------
# so4 and sl2(C) composites, slots (1, 2, 3, 4) = (m1, m1', m2, m2')

def _slot_product(f13, f24, dims):
    d1, d1p, d2, d2p = dims
    n = min(f13.shape[0], f24.shape[0])
    a = f13[:n].reshape(n, d1, d2, d1, d2)
    b = f24[:n].reshape(n, d1p, d2p, d1p, d2p)
    # [k, a, c, a', c'] x [k, b, d, b', d'] -> [k, a, b, c, d, a', b', c', d']
    prod = kernels.series_mul(a[:, :, None, :, None, :, None, :, None],
                              b[:, None, :, None, :, None, :, None, :])
    dim = d1 * d1p * d2 * d2p
    return prod.reshape(n, dim, dim)


def r23_coeffs(two_js, order: int | None = None, inverse: bool = False) -> np.ndarray:
    """R-matrix acting on slots 2 and 3 of a four-slot tensor product."""
    order = get_order() if order is None else order
    d1, d1p, d2, d2p = (t + 1 for t in two_js)
    r = rmatrix_coeffs(two_js[1], two_js[2], order)
    if inverse:
        r = smat_inv(r)
    return _kron_identity(r, d1, d2p)


def twist_so4_coeffs(two_js, inverse: bool = False, order: int | None = None) -> np.ndarray:
    order = get_order() if order is None else order
    t1, t1p, t2, t2p = two_js
    f13 = standard_twist_coeffs(t1, t2, inverse, order)
    f24 = standard_twist_coeffs(t1p, t2p, inverse, order)
    return _slot_product(f13, f24, tuple(t + 1 for t in two_js))


def twist_sl2c_coeffs(two_js, inverse: bool = False, order: int | None = None) -> np.ndarray:
    order = get_order() if order is None else order
    so4 = twist_so4_coeffs(two_js, inverse, order)
    if inverse:
        return kernels.series_matmul(so4, r23_coeffs(two_js, order))
    return kernels.series_matmul(r23_coeffs(two_js, order, inverse=True), so4)


def _pair_spins(pair1, pair2):
    return tuple(as_spin(j).two_j for j in (*pair1, *pair2))


def twist_rep_so4(pair1, pair2, inverse: bool = False) -> RepMatrix:
    """F_s13 F_s24 on (V^j1 x V^j1') x (V^j2 x V^j2')."""
    two_js = _pair_spins(pair1, pair2)
    return RepMatrix(twist_so4_coeffs(two_js, inverse), two_js)


def twist_rep_sl2c(pair1, pair2, inverse: bool = False) -> RepMatrix:
    """R^-1_23 F_s13 F_s24 on (V^j1 x V^j1') x (V^j2 x V^j2')."""
    two_js = _pair_spins(pair1, pair2)
    return RepMatrix(twist_sl2c_coeffs(two_js, inverse), two_js)


# ---------------------------------------------------------------------------
# diagnostics

def flip_matrix(two_j1: int, two_j2: int) -> np.ndarray:
    """Permutation P with P (u x v) = v x u from V^j1 x V^j2 to V^j2 x V^j1."""
    d1, d2 = two_j1 + 1, two_j2 + 1
    p = np.zeros((d1 * d2, d1 * d2))
    for a in range(d1):
        for b in range(d2):
            p[b * d1 + a, a * d2 + b] = 1.0
    return p


def rmatrix_block_scalars(j1, j2) -> dict:
    """Compare R with F_21 D F^-1 for block-scalar D.

    Returns the per-block scalars of D = F_21^-1 R F, the residual of D away
    from block-scalar form, the scalars exp(hbar/2 (c(j) - c(j1) - c(j2)))
    predicted from the Killing-normalised Casimir eigenvalues c, and the
    factor ``casimir_scale`` by which the exponents actually differ from the
    prediction (fitted at first order), with the residual of that fit.
    """
    s1, s2 = as_spin(j1), as_spin(j2)
    order = get_order()
    p = flip_matrix(s2.two_j, s1.two_j)
    f21 = np.einsum("ab,kbc,dc->kad", p, standard_twist_coeffs(s2.two_j, s1.two_j, False, order), p)
    r = rmatrix_coeffs(s1.two_j, s2.two_j, order)
    mm = kernels.series_matmul
    d = mm(mm(smat_inv(f21), r), standard_twist_coeffs(s1.two_j, s2.two_j, False, order))
    cc = cg_matrix_ext(s1.two_j, s2.two_j, False, order)[0].astype(np.float64)
    block = np.einsum("ba,kbc,cd->kad", cc, d, cc)
    c1, c2 = casimir_rep(s1).constant, casimir_rep(s2).constant
    expected = np.zeros_like(block)
    scalars, exponents = {}, {}
    for two_j, o in block_offsets(s1.two_j, s2.two_j).items():
        val = block[:, o, o].copy()
        scalars[two_j] = val
        exponents[two_j] = 0.5 * (casimir_rep(SpinLabel(two_j)).constant - c1 - c2)
        sl = slice(o, o + two_j + 1)
        expected[:, sl, sl] = val[:, None, None] * np.eye(two_j + 1)

    def exp_series(x):
        return np.array([x ** k / math.factorial(k) for k in range(order)])

    fits = [scalars[k][1] / e for k, e in exponents.items() if abs(e) > 1e-12 and order > 1]
    scale = float(np.mean(fits)) if fits else 1.0
    fit_residual = max((float(np.abs(scalars[k] - exp_series(scale * e)).max())
                        for k, e in exponents.items()), default=0.0)
    return {
        "scalars": {k: HSeries(v) for k, v in scalars.items()},
        "predicted": {k: HSeries(exp_series(e)) for k, e in exponents.items()},
        "block_residual": float(np.abs(block - expected).max()),
        "casimir_scale": scale,
        "scaled_fit_residual": fit_residual,
    }

"""Quantum Euclidean 4-space M_h(2) and quantum Minkowski space.

Elements are stored in the Peter-Weyl basis det_q^k T^{(j,j)}_{mm'}: one
``(order, 2j+1, 2j+1)`` block per key ``(two_j, det_pow)``, rows indexed by
m and columns by m' (both ascending).  The generators are

    a = T_{--},  b = T_{-+},  c = T_{+-},  d = T_{++}    (j = 1/2).

The product of two basis elements is

    mu(T^{j1}_{m1 m1'} T^{j2}_{m2 m2'})
        = sum_j CG(j1 j2 j; m1 m2 m) CG(j1 j2 j; m1' m2' m') det^{j1+j2-j} T^j_{mm'}

with both CG factors deformed (mu_h) or both classical (mu).  For a pair of
blocks this is C^T Y C with Y the coefficient tensor arranged as
``Y[(m1, m2), (m1', m2')]``, so left-index twists act from the left on Y
and right-index twists from the right.

A normal-ordered PBW model of the algebra (:class:`PBWAlgebra`) provides an
independent cross-check of the product and of the T basis.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Mapping

import numpy as np

from . import kernels
from .cg import block_offsets, cg_matrix
from .errors import DimensionMismatch
from .hseries import (HSeries, classical, exp_coeffs, get_order, qbinom_qm2_coeffs,
                      qnum_coeffs, smat_inv, sqrt_coeffs, inv_coeffs)
from .reps import GENERATORS, generator_coeffs, rmatrix_coeffs
from .twist import standard_twist_coeffs

GENERATOR_LABELS = {"a": (-1, -1), "b": (-1, 1), "c": (1, -1), "d": (1, 1)}


class Mq2Poly:
    """Element of M_h(2) in the det_q-graded T^{(j,j)}_{mm'} basis."""

    __slots__ = ("blocks", "order")

    def __init__(self, blocks: Mapping[tuple[int, int], np.ndarray] | None = None,
                 order: int | None = None):
        self.order = get_order() if order is None else int(order)
        self.blocks: dict[tuple[int, int], np.ndarray] = {}
        for (two_j, k), arr in (blocks or {}).items():
            arr = np.asarray(arr, dtype=np.float64)
            d = two_j + 1
            if arr.ndim != 3 or arr.shape[1:] != (d, d) or arr.shape[0] < self.order or k < 0:
                raise DimensionMismatch(f"block {(two_j, k)} has shape {arr.shape}")
            self.blocks[(int(two_j), int(k))] = arr[:self.order]

    @classmethod
    def from_terms(cls, terms: Mapping[tuple[int, int, int, int], HSeries | float],
                   order: int | None = None) -> Mq2Poly:
        """Keys are ``(two_j, two_m, two_mp, det_pow)``."""
        order = get_order() if order is None else order
        blocks: dict[tuple[int, int], np.ndarray] = {}
        for (two_j, two_m, two_mp, k), c in terms.items():
            for t in (two_m, two_mp):
                if abs(t) > two_j or (two_j - t) % 2:
                    raise ValueError(f"invalid label {(two_j, two_m, two_mp, k)}")
            if k < 0:
                raise ValueError("det power must be non-negative")
            blk = blocks.setdefault((two_j, k), np.zeros((order, two_j + 1, two_j + 1)))
            coeffs = c.coeffs if isinstance(c, HSeries) else np.array([float(c)])
            n = min(order, coeffs.size)
            blk[:n, (two_m + two_j) // 2, (two_mp + two_j) // 2] += coeffs[:n]
        return cls(blocks, order)

    @classmethod
    def basis(cls, two_j, two_m, two_mp, det_pow=0, order=None) -> Mq2Poly:
        return cls.from_terms({(two_j, two_m, two_mp, det_pow): 1.0}, order)

    @classmethod
    def generator(cls, name: str, order=None) -> Mq2Poly:
        m, mp = GENERATOR_LABELS[name]
        return cls.basis(1, m, mp, 0, order)

    @classmethod
    def one(cls, order=None) -> Mq2Poly:
        return cls.basis(0, 0, 0, 0, order)

    @classmethod
    def det(cls, order=None) -> Mq2Poly:
        return cls.basis(0, 0, 0, 1, order)

    @property
    def terms(self) -> dict[tuple[int, int, int, int], HSeries]:
        out = {}
        for (two_j, k) in sorted(self.blocks):
            blk = self.blocks[(two_j, k)]
            for i in range(two_j + 1):
                for l in range(two_j + 1):
                    if np.any(blk[:, i, l]):
                        out[(two_j, 2 * i - two_j, 2 * l - two_j, k)] = HSeries(blk[:, i, l])
        return out

    def coeff(self, two_j, two_m, two_mp, det_pow=0) -> HSeries:
        blk = self.blocks.get((two_j, det_pow))
        if blk is None:
            return HSeries.const(0.0, self.order)
        return HSeries(blk[:, (two_m + two_j) // 2, (two_mp + two_j) // 2])

    @property
    def degree(self) -> int:
        return max((j + 2 * k for (j, k), b in self.blocks.items() if np.any(b)), default=0)

    def _combine(self, other: Mq2Poly, sign: float) -> Mq2Poly:
        n = min(self.order, other.order)
        out = {}
        for key in set(self.blocks) | set(other.blocks):
            d = key[0] + 1
            a = self.blocks.get(key)
            b = other.blocks.get(key)
            a = np.zeros((n, d, d)) if a is None else a[:n]
            b = np.zeros((n, d, d)) if b is None else b[:n]
            out[key] = a + sign * b
        return Mq2Poly(out, n)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def scale(self, c: HSeries | float) -> Mq2Poly:
        if isinstance(c, HSeries):
            n = min(self.order, c.order)
            return Mq2Poly({k: kernels.series_mul(b[:n], c.coeffs[:n, None, None])
                            for k, b in self.blocks.items()}, n)
        return Mq2Poly({k: b * float(c) for k, b in self.blocks.items()}, self.order)

    def classical(self) -> Mq2Poly:
        return Mq2Poly({k: classical(b) for k, b in self.blocks.items()}, self.order)

    def max_deviation(self, other: Mq2Poly) -> float:
        diff = self - other
        return max((float(np.abs(b).max()) for b in diff.blocks.values()), default=0.0)

    def exactly_equal(self, other: Mq2Poly) -> bool:
        return self.max_deviation(other) == 0.0

    def to_json(self) -> dict:
        return {"basis": "irreducible", "order": self.order,
                "terms": [{"two_j": j, "two_m": m, "two_mp": mp, "det_pow": k, **c.to_json()}
                          for (j, m, mp, k), c in self.terms.items()]}

    def __repr__(self):
        return f"Mq2Poly({len(self.terms)} terms, degree {self.degree}, order {self.order})"


# ---------------------------------------------------------------------------
# products

def _pair_tensor(p_blk: np.ndarray, r_blk: np.ndarray) -> np.ndarray:
    """Y[(m1, m2), (m1', m2')] = p[m1, m1'] r[m2, m2'] as a series matrix."""
    n = min(p_blk.shape[0], r_blk.shape[0])
    d1, d2 = p_blk.shape[1], r_blk.shape[1]
    prod = kernels.series_mul(p_blk[:n, :, None, :, None], r_blk[:n, None, :, None, :])
    return prod.reshape(n, d1 * d2, d1 * d2)


def _apply_r23(y: np.ndarray, two_j1: int, two_j2: int, inverse: bool = False) -> np.ndarray:
    """Act with R on (m1', m2), slots 2 and 3 of x (x) y."""
    n = y.shape[0]
    d1, d2 = two_j1 + 1, two_j2 + 1
    r = rmatrix_coeffs(two_j1, two_j2, n)
    if inverse:
        r = smat_inv(r)
    # y[k, a, c, b, d] with slots a=m1, c=m2, b=m1', d=m2'
    t = y.reshape(n, d1, d2, d1, d2)
    # bring (b, c) together: -> [k, (b, c), (a, d)]
    t = t.transpose(0, 3, 2, 1, 4).reshape(n, d1 * d2, d1 * d2)
    t = kernels.series_matmul(r, t)
    t = t.reshape(n, d1, d2, d1, d2).transpose(0, 3, 2, 1, 4)
    return np.ascontiguousarray(t).reshape(n, d1 * d2, d1 * d2)


def _reduce_pair(y: np.ndarray, two_j1: int, two_j2: int, deformed: bool):
    """Yield (two_j, det shift, block) of mu applied to a pair tensor."""
    n = y.shape[0]
    c = cg_matrix(two_j1, two_j2, deformed, n)
    z = kernels.series_matmul(kernels.series_matmul(c.transpose(0, 2, 1), y), c)
    for two_j, o in block_offsets(two_j1, two_j2).items():
        sl = slice(o, o + two_j + 1)
        yield two_j, (two_j1 + two_j2 - two_j) // 2, z[:, sl, sl]


def _product(p: Mq2Poly, r: Mq2Poly, deformed: bool, pre=None) -> Mq2Poly:
    n = min(p.order, r.order)
    out: dict[tuple[int, int], np.ndarray] = {}
    for (j1, k1), pb in sorted(p.blocks.items()):
        for (j2, k2), rb in sorted(r.blocks.items()):
            y = _pair_tensor(pb[:n], rb[:n])
            if pre is not None:
                y = pre(y, j1, j2)
            for two_j, shift, blk in _reduce_pair(y, j1, j2, deformed):
                key = (two_j, k1 + k2 + shift)
                out[key] = out[key] + blk if key in out else blk
    return Mq2Poly(out, n)


def mul_euclid(p: Mq2Poly, r: Mq2Poly, deformed: bool = True) -> Mq2Poly:
    """Product of M_h(2) (deformed) or of the commutative limit."""
    return _product(p, r, deformed)


def _so4_inverse(y, two_j1, two_j2):
    n = y.shape[0]
    finv = standard_twist_coeffs(two_j1, two_j2, True, n)
    y = kernels.series_matmul(finv, y)
    return kernels.series_matmul(y, finv.transpose(0, 2, 1))


def star_euclid(p: Mq2Poly, r: Mq2Poly) -> Mq2Poly:
    """mu(F_so4^-1 (p x r)) with F_so4 = F_s13 F_s24 and the commutative mu."""
    return _product(p, r, False, _so4_inverse)


def mul_minkowski(p: Mq2Poly, r: Mq2Poly) -> Mq2Poly:
    """mu_h(R_23 (p x r)): the R-twisted product of quantum Minkowski space."""
    return _product(p, r, True, lambda y, j1, j2: _apply_r23(y, j1, j2))


def star_minkowski(p: Mq2Poly, r: Mq2Poly) -> Mq2Poly:
    """mu(F_sl2c^-1 (p x r)) with F_sl2c = R^-1_23 F_s13 F_s24."""
    return _product(p, r, False,
                    lambda y, j1, j2: _so4_inverse(_apply_r23(y, j1, j2), j1, j2))


PRODUCTS = {
    "euclid": lambda p, r: mul_euclid(p, r, True),
    "euclid_star": star_euclid,
    "minkowski": mul_minkowski,
    "minkowski_star": star_minkowski,
    "classical": lambda p, r: mul_euclid(p, r, False),
}


def counit_mq2(p: Mq2Poly) -> HSeries:
    """epsilon(T_{mm'}) = delta_{mm'}, epsilon(det) = 1."""
    total = np.zeros(p.order)
    for blk in p.blocks.values():
        total += np.trace(blk, axis1=1, axis2=2)
    return HSeries(total)


def _word(word, two_j, deformed, order):
    out = np.zeros((order, two_j + 1, two_j + 1))
    out[0] = np.eye(two_j + 1)
    for g in word:
        if g not in GENERATORS:
            raise ValueError(f"word letters must be in {GENERATORS}, got {g!r}")
        out = kernels.series_matmul(out, generator_coeffs(two_j, g, deformed, order))
    return out


def act_mq2(left_word, right_word, p: Mq2Poly, deformed: bool = True) -> Mq2Poly:
    """(g x g') > p, g acting on the m index and g' on the m' index."""
    out = {}
    for (two_j, k), blk in p.blocks.items():
        gl = _word(left_word, two_j, deformed, p.order)
        gr = _word(right_word, two_j, deformed, p.order)
        out[(two_j, k)] = kernels.series_matmul(kernels.series_matmul(gl, blk),
                                                gr.transpose(0, 2, 1))
    return Mq2Poly(out, p.order)


# ---------------------------------------------------------------------------
# real structure

def classical_star(p: Mq2Poly) -> Mq2Poly:
    """Undeformed Minkowski star on coefficients.

    On generators X_{mm'} -> (-1)^{m-m'} X_{-m',-m}, i.e. a <-> d, b -> -b,
    c -> -c; on the T basis the same rule holds for every spin and det is
    fixed.  Coefficients are real so conjugation is trivial.
    """
    out = {}
    for (two_j, k), blk in p.blocks.items():
        d = two_j + 1
        idx = np.arange(d)
        sign = (-1.0) ** (idx[:, None] - idx[None, :])
        # new[i, l] = sign(old index) * old[d-1-l, d-1-i]
        flipped = blk[:, ::-1, ::-1].transpose(0, 2, 1)
        out[(two_j, k)] = flipped * sign[::-1, ::-1].T
    return Mq2Poly(out, p.order)


def hermitian_star(p: Mq2Poly) -> Mq2Poly:
    """Transpose of the generator matrix (b <-> c); kept for comparison only."""
    return Mq2Poly({k: b.transpose(0, 2, 1).copy() for k, b in p.blocks.items()}, p.order)


def involution_minkowski(p: Mq2Poly, base_star=classical_star) -> Mq2Poly:
    """(sigma^-1 x sigma^-1) > p^*, sigma = exp(hbar H / 2)."""
    q = base_star(p)
    out = {}
    for (two_j, k), blk in q.blocks.items():
        ms = np.arange(-two_j, two_j + 1, 2)
        fac = np.stack([np.stack([exp_coeffs(-(m + mp) / 2, q.order) for mp in ms], axis=1)
                        for m in ms], axis=1)
        out[(two_j, k)] = kernels.series_mul(blk, fac)
    return Mq2Poly(out, q.order)


# ---------------------------------------------------------------------------
# helpers

def random_mq2_poly(rng: np.random.Generator, max_degree: int = 4,
                    order: int | None = None) -> Mq2Poly:
    order = get_order() if order is None else order
    blocks = {}
    for two_j in range(max_degree + 1):
        for k in range((max_degree - two_j) // 2 + 1):
            blocks[(two_j, k)] = rng.uniform(-1.0, 1.0, size=(order, two_j + 1, two_j + 1))
    return Mq2Poly(blocks, order)


def peter_weyl_dimension(max_degree: int) -> tuple[int, int]:
    """(sum of (2j+1)^2 over det^k T^j with 2j + 2k <= D, number of monomials of degree <= D)."""
    basis = sum((two_j + 1) ** 2 for two_j in range(max_degree + 1)
                for _ in range((max_degree - two_j) // 2 + 1))
    return basis, math.comb(max_degree + 4, 4)


def ordered_word_product(word: str, product=mul_euclid, order: int | None = None) -> Mq2Poly:
    """Product of generators a, b, c, d read left to right."""
    out = Mq2Poly.one(order)
    for ch in word:
        out = product(out, Mq2Poly.generator(ch, order))
    return out


def relations_report(space: str = "minkowski", order: int | None = None) -> dict:
    """Express each reversed product of generators in the ordered products.

    For generators x_i < x_j (order a, b, c, d) the ten products x_i x_j
    (i <= j) span the degree-2 part; each x_j x_i is solved for in that
    basis order by order.
    """
    order = get_order() if order is None else order
    product = {"minkowski": star_minkowski, "euclid": star_euclid,
               "minkowski_closed": mul_minkowski, "euclid_closed": lambda p, r: mul_euclid(p, r, True)}
    if space not in product:
        raise ValueError(f"unknown space {space!r}")
    mul = product[space]
    names = "abcd"
    gens = {n: Mq2Poly.generator(n, order) for n in names}
    keys = [(2, m, mp, 0) for m in (-2, 0, 2) for mp in (-2, 0, 2)] + [(0, 0, 0, 1)]

    def vec(p):
        return np.stack([p.coeff(*k).coeffs for k in keys], axis=1)

    ordered = [(x, y) for i, x in enumerate(names) for y in names[i:]]
    basis = np.stack([vec(mul(gens[x], gens[y])) for x, y in ordered], axis=2)
    inv = smat_inv(basis)
    out = []
    for i, x in enumerate(names):
        for y in names[i + 1:]:
            target = vec(mul(gens[y], gens[x]))
            sol = kernels.series_matmul(inv, target[:, :, None])[:, :, 0]
            sol[np.abs(sol) < 1e-13] = 0.0
            terms = {f"{u}{v}": HSeries(sol[:, t]) for t, (u, v) in enumerate(ordered)
                     if np.any(sol[:, t])}
            out.append({"lhs": f"{y}{x}", "rhs": {k: s.to_json() for k, s in terms.items()}})
    return {"space": space, "order": order, "relations": out}


def mq2_from_json(obj: dict, order: int | None = None, product=None) -> Mq2Poly:
    """Parse irreducible terms or generator words.

    ``{"basis": "irreducible", "terms": [{"two_j", "two_m", "two_mp", "det_pow", "coeffs"}]}``
    or ``{"basis": "words", "terms": [{"word": "ab", "coeffs": [...]}]}``; words
    are multiplied with ``product`` (the commutative product by default).
    """
    order = obj.get("order", get_order()) if order is None else order
    basis = obj.get("basis", "irreducible")

    def coeff(t):
        if "coeffs" in t:
            return HSeries(t["coeffs"], order=order)
        return HSeries.const(float(t.get("value", 1.0)), order)

    if basis == "irreducible":
        return Mq2Poly.from_terms({(int(t["two_j"]), int(t["two_m"]), int(t["two_mp"]),
                                    int(t.get("det_pow", 0))): coeff(t) for t in obj["terms"]},
                                  order)
    if basis == "words":
        mul = product or (lambda p, r: mul_euclid(p, r, False))
        total = Mq2Poly({}, order)
        for t in obj["terms"]:
            total = total + ordered_word_product(t["word"], mul, order).scale(coeff(t))
        return total
    raise ValueError(f"unknown basis {basis!r}")


# ---------------------------------------------------------------------------
# normal-ordered model

class PBWAlgebra:
    """M_h(2) as normal-ordered polynomials in a < b < c < d.

    A polynomial is a dict ``(i, j, k, l) -> coefficient array`` for the
    monomial a^i b^j c^k d^l.  Reordering uses

        ba = q^-1 ab,  ca = q^-1 ac,  db = q^-1 bd,  dc = q^-1 cd,
        cb = bc,       da = ad - (q - q^-1) bc.
    """

    def __init__(self, order: int | None = None):
        self.order = get_order() if order is None else order
        self._q = {}
        self._times = lru_cache(maxsize=None)(self._times_uncached)

    def qpow(self, n: float) -> np.ndarray:
        if n not in self._q:
            self._q[n] = exp_coeffs(n, self.order)
        return self._q[n]

    def one(self):
        return {(0, 0, 0, 0): self.qpow(0)}

    def gen(self, name: str):
        e = [0, 0, 0, 0]
        e["abcd".index(name)] = 1
        return {tuple(e): self.qpow(0)}

    def add(self, *polys, scales=None):
        out: dict = {}
        for idx, p in enumerate(polys):
            s = None if scales is None else scales[idx]
            for m, c in p.items():
                c = c if s is None else kernels.series_mul(c, s)
                out[m] = out[m] + c if m in out else c
        return out

    def _times_uncached(self, mono: tuple, letter: str):
        """mono * letter as a normal-ordered polynomial (returned as tuple of items)."""
        i, j, k, l = mono
        if letter == "d":
            return (((i, j, k, l + 1), self.qpow(0)),)
        if letter == "c":
            return (((i, j, k + 1, l), self.qpow(-l)),)
        if letter == "b":
            return (((i, j + 1, k, l), self.qpow(-l)),)
        # letter == "a"
        if l == 0:
            return (((i + 1, j, k, 0), self.qpow(-(j + k))),)
        prev = (i, j, k, l - 1)
        qdiff = self.qpow(1) - self.qpow(-1)
        # P d a = (P a) d - (q - q^-1) (P b) c
        first = self.times_letter(dict(self._times(prev, "a")), "d")
        second = self.times_letter(dict(self._times(prev, "b")), "c")
        out = self.add(first, second, scales=[self.qpow(0), -qdiff])
        return tuple(out.items())

    def times_letter(self, poly: dict, letter: str) -> dict:
        out: dict = {}
        for m, c in poly.items():
            for m2, c2 in self._times(m, letter):
                v = kernels.series_mul(c, c2)
                out[m2] = out[m2] + v if m2 in out else v
        return out

    def mul(self, p: dict, r: dict) -> dict:
        out: dict = {}
        for m, c in r.items():
            word = "a" * m[0] + "b" * m[1] + "c" * m[2] + "d" * m[3]
            part = p
            for ch in word:
                part = self.times_letter(part, ch)
            out = self.add(out, part, scales=[self.qpow(0), c])
        return {m: c for m, c in out.items() if np.any(c)}

    def word(self, letters: str) -> dict:
        out = self.one()
        for ch in letters:
            out = self.times_letter(out, ch)
        return out

    def det(self) -> dict:
        return self.add(self.word("ad"), self.word("bc"), scales=[self.qpow(0), -self.qpow(1)])

    def act(self, poly: dict, g: str, side: str = "left") -> dict:
        """(g x 1) or (1 x g) acting on a polynomial, g in E, F.

        On generators X_{mm'} the action is the spin-1/2 matrix on the chosen
        index; on products it follows Delta'(E) = E x K + 1 x E and
        Delta'(F) = F x 1 + K^-1 x F.
        """
        if g not in ("E", "F") or side not in ("left", "right"):
            raise ValueError("act supports E, F on the left or right index")
        pos = 0 if side == "left" else 1
        labels = {"a": (-1, -1), "b": (-1, 1), "c": (1, -1), "d": (1, 1)}
        names = {v: k for k, v in labels.items()}
        rho = generator_coeffs(1, g, True, self.order)
        out: dict = {}
        for mono, coeff in poly.items():
            letters = "a" * mono[0] + "b" * mono[1] + "c" * mono[2] + "d" * mono[3]
            for i, x in enumerate(letters):
                lab = list(labels[x])
                two_m = lab[pos]
                new = -two_m
                amp = rho[:, (new + 1) // 2, (two_m + 1) // 2]
                if not np.any(amp):
                    continue
                lab[pos] = new
                # K-weights of the spectator letters
                if g == "E":
                    weight = sum(labels[y][pos] for y in letters[i + 1:])
                else:
                    weight = -sum(labels[y][pos] for y in letters[:i])
                scale = kernels.series_mul(amp, self.qpow(weight))
                term = {(0, 0, 0, 0): kernels.series_mul(coeff, scale)}
                for y in letters[:i] + names[tuple(lab)] + letters[i + 1:]:
                    term = self.times_letter(term, y)
                out = self.add(out, term)
        return {m: c for m, c in out.items() if np.any(c)}


def t_basis_element(two_j: int, two_m: int, two_mp: int, order: int | None = None,
                    deformed: bool = True) -> dict:
    """Normal-ordered a,b,c,d expansion of T^{(j,j)}_{mm'}.

    sum_k q^{k(m'-m-k)} qbinom(j-m, k) qbinom(j+m, j+m'-k)
          qbinom(2j, j+m)^{1/2} qbinom(2j, j+m')^{-1/2}
          a^{j-m-k} b^k c^{m-m'+k} d^{j+m'-k}
    with q^-2 binomials.  The second binomial counts the placements of d
    among the j+m letters in the lower row, which is what lowering d^{2j}
    produces (see :func:`t_basis_by_lowering`).
    """
    order = get_order() if order is None else order
    jm = (two_j - two_m) // 2
    jpm = (two_j + two_m) // 2
    jpmp = (two_j + two_mp) // 2
    dm = (two_m - two_mp) // 2
    pref = kernels.series_mul(sqrt_coeffs(qbinom_qm2_coeffs(two_j, jpm, order)),
                              inv_coeffs(sqrt_coeffs(qbinom_qm2_coeffs(two_j, jpmp, order))))
    out = {}
    for k in range(0, jm + 1):
        e = (jm - k, k, dm + k, jpmp - k)
        if min(e) < 0:
            continue
        coef = exp_coeffs(k * ((two_mp - two_m) / 2 - k), order)
        coef = kernels.series_mul(coef, qbinom_qm2_coeffs(jm, k, order))
        coef = kernels.series_mul(coef, qbinom_qm2_coeffs(jpm, jpmp - k, order))
        coef = kernels.series_mul(coef, pref)
        if not deformed:
            coef = classical(coef)
        if np.any(coef):
            out[e] = coef
    return out


def t_basis_by_lowering(two_j: int, two_m: int, two_mp: int,
                        alg: PBWAlgebra | None = None) -> dict:
    """T^{(j,j)}_{mm'} obtained from d^{2j} by the F ladder on both indices.

    Each lowering step divides by the matrix element q^-m sqrt([j+m][j-m+1])
    of rho^j(F), so the result carries rho^j on both indices.
    """
    alg = alg or PBWAlgebra()
    poly = alg.word("d" * two_j)
    for side, target in (("left", two_m), ("right", two_mp)):
        cur = two_j
        while cur > target:
            amp = kernels.series_mul(qnum_coeffs((two_j + cur) // 2, alg.order),
                                     qnum_coeffs((two_j - cur) // 2 + 1, alg.order))
            ladder = inv_coeffs(kernels.series_mul(exp_coeffs(-cur / 2, alg.order),
                                                   sqrt_coeffs(amp)))
            poly = {m: kernels.series_mul(c, ladder)
                    for m, c in alg.act(poly, "F", side).items()}
            cur -= 2
    return poly


def to_pbw(p: Mq2Poly, alg: PBWAlgebra | None = None, deformed: bool = True) -> dict:
    """Expand an Mq2Poly into normal-ordered monomials (deformed or classical model)."""
    alg = alg or PBWAlgebra(p.order)
    det = alg.det()
    det_powers = [alg.one()]
    out: dict = {}
    for (two_j, two_m, two_mp, k), c in p.terms.items():
        while len(det_powers) <= k:
            det_powers.append(alg.mul(det_powers[-1], det))
        t = t_basis_element(two_j, two_m, two_mp, p.order, deformed)
        term = alg.mul(t, det_powers[k]) if k else t
        out = alg.add(out, term, scales=[alg.qpow(0), c.coeffs])
    return {m: c for m, c in out.items() if np.any(c)}

"""The quantum plane xy = q yx as a graded U_h(su2)-module algebra.

Polynomials are stored in the irreducible basis T^j_m (x = T^{1/2}_{-1/2},
y = T^{1/2}_{1/2}), one coefficient block of shape ``(order, 2j+1)`` per
degree 2j.  In this basis both the deformed product and the classical one
send T^{j1}_{m1} T^{j2}_{m2} to a single CG coefficient times
T^{j1+j2}_{m1+m2}; the twist-induced star product applies F^-1 first.

The monomial view uses

    T^j_m = qbinom(2j, j+m; q^-2)^{1/2} x^{j-m} y^{j+m}

(plain binomials in the classical case).
"""
from __future__ import annotations

from typing import Callable, Mapping

import numpy as np

from . import kernels
from .cg import cg_matrix
from .errors import DegreeCapExceeded, DimensionMismatch
from .hseries import (HSeries, classical, exp_coeffs, get_order, inv_coeffs,
                      qbinom_qm2_coeffs, sqrt_coeffs)
from .reps import GENERATORS, SpinLabel, generator_coeffs, rep_tensor_coproduct
from .twist import deformed_coproduct_rep, standard_twist_coeffs, twist_coeffs

DEFAULT_DEGREE_CAP = 12


def _check_label(two_j, two_m):
    if two_j < 0 or abs(two_m) > two_j or (two_j - two_m) % 2:
        raise ValueError(f"invalid label (two_j={two_j}, two_m={two_m})")


class PlanePoly:
    """Element of the quantum plane in the T^j_m basis."""

    __slots__ = ("blocks", "order")

    def __init__(self, blocks: Mapping[int, np.ndarray] | None = None, order: int | None = None):
        self.order = get_order() if order is None else int(order)
        self.blocks: dict[int, np.ndarray] = {}
        for two_j, arr in (blocks or {}).items():
            arr = np.asarray(arr, dtype=np.float64)
            if arr.shape != (self.order, two_j + 1):
                if arr.ndim == 2 and arr.shape[1] == two_j + 1 and arr.shape[0] >= self.order:
                    arr = arr[:self.order]
                else:
                    raise DimensionMismatch(f"block {two_j} has shape {arr.shape}")
            self.blocks[int(two_j)] = arr

    @classmethod
    def from_terms(cls, terms: Mapping[tuple[int, int], HSeries | float],
                   order: int | None = None) -> PlanePoly:
        order = get_order() if order is None else order
        blocks: dict[int, np.ndarray] = {}
        for (two_j, two_m), c in terms.items():
            _check_label(two_j, two_m)
            blk = blocks.setdefault(two_j, np.zeros((order, two_j + 1)))
            coeffs = c.coeffs if isinstance(c, HSeries) else np.array([float(c)])
            n = min(order, coeffs.size)
            blk[:n, (two_m + two_j) // 2] += coeffs[:n]
        return cls(blocks, order)

    @classmethod
    def basis(cls, two_j: int, two_m: int, order: int | None = None) -> PlanePoly:
        return cls.from_terms({(two_j, two_m): 1.0}, order)

    @classmethod
    def x(cls, order=None) -> PlanePoly:
        return cls.basis(1, -1, order)

    @classmethod
    def y(cls, order=None) -> PlanePoly:
        return cls.basis(1, 1, order)

    @classmethod
    def one(cls, order=None) -> PlanePoly:
        return cls.basis(0, 0, order)

    @property
    def terms(self) -> dict[tuple[int, int], HSeries]:
        out = {}
        for two_j in sorted(self.blocks):
            blk = self.blocks[two_j]
            for i in range(two_j + 1):
                if np.any(blk[:, i]):
                    out[(two_j, 2 * i - two_j)] = HSeries(blk[:, i])
        return out

    def coeff(self, two_j: int, two_m: int) -> HSeries:
        blk = self.blocks.get(two_j)
        if blk is None or abs(two_m) > two_j:
            return HSeries.const(0.0, self.order)
        return HSeries(blk[:, (two_m + two_j) // 2])

    @property
    def degree(self) -> int:
        return max((j for j, b in self.blocks.items() if np.any(b)), default=0)

    def _combine(self, other, sign):
        n = min(self.order, other.order)
        out = {}
        for two_j in set(self.blocks) | set(other.blocks):
            a = self.blocks.get(two_j)
            b = other.blocks.get(two_j)
            a = np.zeros((n, two_j + 1)) if a is None else a[:n]
            b = np.zeros((n, two_j + 1)) if b is None else b[:n]
            out[two_j] = a + sign * b
        return PlanePoly(out, n)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def scale(self, c: HSeries | float) -> PlanePoly:
        if isinstance(c, HSeries):
            n = min(self.order, c.order)
            return PlanePoly({j: kernels.series_mul(b[:n], c.coeffs[:n, None])
                              for j, b in self.blocks.items()}, n)
        return PlanePoly({j: b * float(c) for j, b in self.blocks.items()}, self.order)

    def classical(self) -> PlanePoly:
        return PlanePoly({j: classical(b) for j, b in self.blocks.items()}, self.order)

    def max_deviation(self, other: PlanePoly) -> float:
        diff = self - other
        return max((float(np.abs(b).max()) for b in diff.blocks.values()), default=0.0)

    def allclose(self, other: PlanePoly, tol: float) -> bool:
        return self.max_deviation(other) <= tol

    def exactly_equal(self, other: PlanePoly) -> bool:
        return self.max_deviation(other) == 0.0

    def to_json(self) -> dict:
        return {"basis": "irreducible", "order": self.order,
                "terms": [{"two_j": j, "two_m": m, **c.to_json()}
                          for (j, m), c in self.terms.items()]}

    def __repr__(self):
        return f"PlanePoly({len(self.terms)} terms, degree {self.degree}, order {self.order})"


class MonomialPoly:
    """Quantum-plane element as a combination of ordered monomials x^k y^l."""

    __slots__ = ("terms", "order")

    def __init__(self, terms: Mapping[tuple[int, int], HSeries | float] | None = None,
                 order: int | None = None):
        self.order = get_order() if order is None else int(order)
        self.terms: dict[tuple[int, int], HSeries] = {}
        for (k, l), c in (terms or {}).items():
            if k < 0 or l < 0:
                raise ValueError(f"negative exponent in x^{k} y^{l}")
            s = c if isinstance(c, HSeries) else HSeries.const(float(c), self.order)
            self.terms[(int(k), int(l))] = HSeries(s.coeffs, order=self.order)

    def to_json(self) -> dict:
        return {"basis": "monomial", "order": self.order,
                "terms": [{"k": k, "l": l, **c.to_json()} for (k, l), c in sorted(self.terms.items())]}


def _binom_scale(two_j: int, two_m: int, deformed: bool, order: int) -> np.ndarray:
    """Coefficient of x^{j-m} y^{j+m} in T^j_m."""
    b = qbinom_qm2_coeffs(two_j, (two_j + two_m) // 2, order)
    s = sqrt_coeffs(b)
    return s if deformed else classical(s)


def basis_convert(p, target: str, deformed: bool = True):
    """Switch between the monomial and irreducible bases."""
    if target == "irreducible":
        if isinstance(p, PlanePoly):
            return p
        terms = {}
        for (k, l), c in p.terms.items():
            two_j, two_m = k + l, l - k
            inv = inv_coeffs(_binom_scale(two_j, two_m, deformed, p.order))
            terms[(two_j, two_m)] = HSeries(kernels.series_mul(c.coeffs, inv))
        return PlanePoly.from_terms(terms, p.order)
    if target == "monomial":
        if isinstance(p, MonomialPoly):
            return p
        terms = {}
        for (two_j, two_m), c in p.terms.items():
            s = _binom_scale(two_j, two_m, deformed, p.order)
            terms[((two_j - two_m) // 2, (two_j + two_m) // 2)] = HSeries(
                kernels.series_mul(c.coeffs, s))
        return MonomialPoly(terms, p.order)
    raise ValueError(f"target must be 'irreducible' or 'monomial', got {target!r}")


# ---------------------------------------------------------------------------
# products

def _pair_tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Series outer product (N, d1) x (N, d2) -> (N, d1*d2), first factor major."""
    n = min(a.shape[0], b.shape[0])
    return kernels.series_mul(a[:n, :, None], b[:n, None, :]).reshape(n, -1)


def _top_block(two_j1, two_j2, deformed, order):
    c = cg_matrix(two_j1, two_j2, deformed, order)
    return c[:, :, -(two_j1 + two_j2 + 1):]


def _apply(mat: np.ndarray, vec: np.ndarray) -> np.ndarray:
    return kernels.series_matmul(mat, vec[:, :, None])[:, :, 0]


def _check_cap(two_j, cap):
    if two_j > cap:
        raise DegreeCapExceeded(f"degree {two_j} exceeds the cap {cap}")


def _graded_product(p: PlanePoly, r: PlanePoly, pre: Callable | None, deformed: bool,
                    cap: int) -> PlanePoly:
    n = min(p.order, r.order)
    out: dict[int, np.ndarray] = {}
    for j1 in sorted(p.blocks):
        for j2 in sorted(r.blocks):
            top = j1 + j2
            _check_cap(top, cap)
            vec = _pair_tensor(p.blocks[j1][:n], r.blocks[j2][:n])
            if pre is not None:
                vec = _apply(pre(j1, j2, n), vec)
            cg_top = _top_block(j1, j2, deformed, n)
            res = _apply(cg_top.transpose(0, 2, 1), vec)
            if top in out:
                out[top] = out[top] + res
            else:
                out[top] = res
    return PlanePoly(out, n)


def mul_plane(p: PlanePoly, r: PlanePoly, deformed: bool = True,
              degree_cap: int = DEFAULT_DEGREE_CAP) -> PlanePoly:
    """Product with CG(j1 j2 j1+j2; m1 m2 m1+m2) as the structure constant."""
    return _graded_product(p, r, None, deformed, degree_cap)


def star_plane(p: PlanePoly, r: PlanePoly, twist_factors: Callable | None = None,
               degree_cap: int = DEFAULT_DEGREE_CAP) -> PlanePoly:
    """Twist-induced product mu(F^-1 (p x r)) with the classical mu.

    ``twist_factors(two_j1, two_j2, two_j)`` optionally gives block factors
    eta for a gauge-transformed twist; the default is the standard twist.
    """
    if twist_factors is None:
        def pre(j1, j2, n):
            return standard_twist_coeffs(j1, j2, True, n)
    else:
        def pre(j1, j2, n):
            eta = {}
            for j in range(abs(j1 - j2), j1 + j2 + 1, 2):
                val = twist_factors(j1, j2, j)
                eta[j] = val.coeffs if isinstance(val, HSeries) else np.asarray(val, float)
            return twist_coeffs(j1, j2, True, n, eta)
    return _graded_product(p, r, pre, False, degree_cap)


def _word_matrix(word, two_j, deformed, order):
    out = np.zeros((order, two_j + 1, two_j + 1))
    out[0] = np.eye(two_j + 1)
    for g in word:
        if g not in GENERATORS:
            raise ValueError(f"word letters must be in {GENERATORS}, got {g!r}")
        out = kernels.series_matmul(out, generator_coeffs(two_j, g, deformed, order))
    return out


def act_plane(word, p: PlanePoly, deformed: bool = True) -> PlanePoly:
    """g > p for a generator word g (applied as the product of its letters)."""
    return PlanePoly({j: _apply(_word_matrix(word, j, deformed, p.order), b)
                      for j, b in p.blocks.items()}, p.order)


def act_plane_pair(g: str, p: PlanePoly, r: PlanePoly, deformed: bool = False) -> PlanePoly:
    """Sum of (g_(1) > p) * (g_(2) > r), multiplied with star_plane.

    This is the right-hand side of the covariance identity, to be compared
    with ``act_plane(g, star_plane(p, r), deformed)``.  With the classical
    action the coproduct is the twisted one F Delta F^-1; with the deformed
    action it is the coproduct of U_h(su2) itself.
    """
    n = min(p.order, r.order)
    out: dict[int, np.ndarray] = {}
    for j1 in sorted(p.blocks):
        for j2 in sorted(r.blocks):
            vec = _pair_tensor(p.blocks[j1][:n], r.blocks[j2][:n])
            if deformed:
                delta = rep_tensor_coproduct(g, SpinLabel(j1), SpinLabel(j2), True).data[:n]
            else:
                delta = deformed_coproduct_rep(g, SpinLabel(j1), SpinLabel(j2)).data[:n]
            vec = _apply(delta, vec)
            vec = _apply(standard_twist_coeffs(j1, j2, True, n), vec)
            res = _apply(_top_block(j1, j2, False, n).transpose(0, 2, 1), vec)
            out[j1 + j2] = out[j1 + j2] + res if j1 + j2 in out else res
    return PlanePoly(out, n)


def star_involution(p: PlanePoly, classical_star) -> PlanePoly:
    """sigma^-1 > (p^*) for a user-supplied classical star.

    ``classical_star`` is either a callable taking and returning a
    PlanePoly, or a mapping two_j -> real (2j+1)x(2j+1) matrix acting on the
    coefficient vector of each degree (coefficients are real, so complex
    conjugation is trivial).
    """
    if callable(classical_star):
        q = classical_star(p)
    else:
        blocks = {}
        for j, b in p.blocks.items():
            mat = np.asarray(classical_star[j], dtype=np.float64)
            blocks[j] = b @ mat.T
        q = PlanePoly(blocks, p.order)
    out = {}
    for j, b in q.blocks.items():
        sig = np.stack([exp_coeffs(-m / 2, q.order) for m in range(-j, j + 1, 2)], axis=1)
        out[j] = kernels.series_mul(b, sig)
    return PlanePoly(out, q.order)


# ---------------------------------------------------------------------------
# helpers

def random_plane_poly(rng: np.random.Generator, max_two_j: int = 4,
                      order: int | None = None, density: float = 1.0) -> PlanePoly:
    """Random polynomial of degree <= max_two_j with series coefficients in [-1, 1]."""
    order = get_order() if order is None else order
    blocks = {}
    for two_j in range(max_two_j + 1):
        blk = rng.uniform(-1.0, 1.0, size=(order, two_j + 1))
        mask = rng.random(two_j + 1) < density
        blocks[two_j] = blk * mask
    return PlanePoly(blocks, order)


def plane_from_json(obj: dict, order: int | None = None, deformed: bool = True) -> PlanePoly:
    """Parse ``{"basis": "irreducible"|"monomial", "terms": [...]}``.

    Irreducible terms carry ``two_j``, ``two_m``; monomial terms carry ``k``,
    ``l``.  Each term has ``coeffs`` (list) or ``value`` (number).
    """
    order = obj.get("order", get_order()) if order is None else order
    basis = obj.get("basis", "irreducible")

    def coeff(t):
        if "coeffs" in t:
            return HSeries(t["coeffs"], order=order)
        return HSeries.const(float(t.get("value", 1.0)), order)

    if basis == "irreducible":
        return PlanePoly.from_terms({(int(t["two_j"]), int(t["two_m"])): coeff(t)
                                     for t in obj["terms"]}, order)
    if basis == "monomial":
        mono = MonomialPoly({(int(t["k"]), int(t["l"])): coeff(t) for t in obj["terms"]}, order)
        return basis_convert(mono, "irreducible", deformed)
    raise ValueError(f"unknown basis {basis!r}")


def brute_force_product(p: MonomialPoly, r: MonomialPoly) -> MonomialPoly:
    """Quantum-plane product computed directly from yx = q^-1 xy.

    (x^a y^b)(x^c y^d) = q^{-bc} x^{a+c} y^{b+d}.  Independent of the CG
    machinery; used as a cross-check.
    """
    order = min(p.order, r.order)
    acc: dict[tuple[int, int], np.ndarray] = {}
    for (a, b), c1 in p.terms.items():
        for (c, d), c2 in r.terms.items():
            coef = kernels.series_mul(kernels.series_mul(c1.coeffs[:order], c2.coeffs[:order]),
                                      exp_coeffs(-b * c, order))
            key = (a + c, b + d)
            acc[key] = acc.get(key, 0) + coef
    return MonomialPoly({k: HSeries(v) for k, v in acc.items()}, order)

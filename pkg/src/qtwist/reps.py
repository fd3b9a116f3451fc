"""Weight-basis representations of U(su2) and U_h(su2).

Spins are stored as ``two_j`` so half-integers stay exact; the weight basis
of V^j is ordered by ascending ``two_m`` and tensor products are ordered
lexicographically with the first factor major (``np.kron`` convention).

Deformed matrices follow the h-adic spin-j *-representation

    E|j,m> = q^(m+1) sqrt([j+m+1][j-m]) |j,m+1>
    F|j,m> = q^(-m)  sqrt([j+m][j-m+1]) |j,m-1>
    H|j,m> = 2m |j,m>

with q = exp(hbar).  Classical matrices are the hbar -> 0 limit of the same
arrays, so the two agree bit-for-bit at order zero.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .hseries import (HSeries, classical, exp_coeffs, get_order, get_tol,
                      inv_coeffs, max_deviation, qfact_coeffs, qnum_coeffs,
                      sidentity, skron, smat_inv, sqrt_coeffs)

GENERATORS = ("E", "F", "H")


@dataclass(frozen=True, order=True)
class SpinLabel:
    """Spin ``j = two_j / 2``."""

    two_j: int

    def __post_init__(self):
        if not isinstance(self.two_j, (int, np.integer)) or self.two_j < 0:
            raise ValueError(f"two_j must be a non-negative integer, got {self.two_j!r}")
        object.__setattr__(self, "two_j", int(self.two_j))

    @property
    def j(self) -> Fraction:
        return Fraction(self.two_j, 2)

    @property
    def dim(self) -> int:
        return self.two_j + 1

    @property
    def weights(self) -> tuple[int, ...]:
        """``two_m`` values in basis order."""
        return tuple(range(-self.two_j, self.two_j + 1, 2))

    def index(self, two_m: int) -> int:
        if abs(two_m) > self.two_j or (two_m - self.two_j) % 2:
            raise ValueError(f"two_m={two_m} is not a weight of spin {self}")
        return (two_m + self.two_j) // 2

    def __str__(self):
        return str(self.j)


def as_spin(value) -> SpinLabel:
    """Coerce ``j`` given as SpinLabel, str ('3/2'), Fraction, int or float."""
    if isinstance(value, SpinLabel):
        return value
    two_j = Fraction(value) * 2 if not isinstance(value, float) else Fraction(value).limit_denominator(2) * 2
    if two_j.denominator != 1:
        raise ValueError(f"{value!r} is not a half-integer spin")
    return SpinLabel(int(two_j))


def tensor_labels(spins) -> list[tuple[int, ...]]:
    """Ordered basis labels (tuples of ``two_m``) of a tensor product."""
    return list(itertools.product(*(SpinLabel(s).weights for s in spins)))


def _two_js(spins) -> tuple[int, ...]:
    return tuple(as_spin(s).two_j if not isinstance(s, int) else s for s in spins)


class RepMatrix:
    """Square matrix of hbar-series acting on an ordered tensor weight basis.

    ``data`` has shape ``(order, dim, dim)``; ``spins`` lists the ``two_j``
    of each tensor factor.
    """

    __slots__ = ("data", "spins")

    def __init__(self, data, spins):
        data = np.asarray(data, dtype=np.float64)
        spins = tuple(int(s) for s in spins)
        dim = int(np.prod([s + 1 for s in spins])) if spins else 1
        if data.ndim != 3 or data.shape[1:] != (dim, dim):
            raise ValueError(f"data shape {data.shape} does not fit spins {spins}")
        data = data.copy()
        data.flags.writeable = False
        self.data = data
        self.spins = spins

    @property
    def order(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    @property
    def labels(self):
        return tensor_labels(self.spins)

    def entry(self, row: int, col: int) -> HSeries:
        return HSeries(self.data[:, row, col])

    def at(self, row_label, col_label) -> HSeries:
        labels = self.labels
        return self.entry(labels.index(tuple(row_label)), labels.index(tuple(col_label)))

    def _check(self, other):
        if not isinstance(other, RepMatrix):
            return NotImplemented
        if other.spins != self.spins:
            raise ValueError(f"spin signatures differ: {self.spins} vs {other.spins}")
        return min(self.order, other.order)

    def __matmul__(self, other):
        n = self._check(other)
        if n is NotImplemented:
            return n
        return RepMatrix(kernels.series_matmul(self.data[:n], other.data[:n]), self.spins)

    def __add__(self, other):
        n = self._check(other)
        if n is NotImplemented:
            return n
        return RepMatrix(self.data[:n] + other.data[:n], self.spins)

    def __sub__(self, other):
        n = self._check(other)
        if n is NotImplemented:
            return n
        return RepMatrix(self.data[:n] - other.data[:n], self.spins)

    def __neg__(self):
        return RepMatrix(-self.data, self.spins)

    def __mul__(self, scalar):
        if isinstance(scalar, HSeries):
            n = min(self.order, scalar.order)
            return RepMatrix(kernels.series_mul(self.data[:n], scalar.coeffs[:n, None, None]),
                             self.spins)
        return RepMatrix(self.data * float(scalar), self.spins)

    __rmul__ = __mul__

    def kron(self, other: RepMatrix) -> RepMatrix:
        return RepMatrix(skron(self.data, other.data), self.spins + other.spins)

    @property
    def T(self) -> RepMatrix:
        return RepMatrix(self.data.transpose(0, 2, 1), self.spins)

    def inv(self) -> RepMatrix:
        return RepMatrix(smat_inv(self.data), self.spins)

    def classical(self) -> RepMatrix:
        return RepMatrix(classical(self.data), self.spins)

    def deviation(self, other) -> float:
        other = other.data if isinstance(other, RepMatrix) else np.asarray(other)
        if other.ndim < 3:
            return max_deviation(self.data, other)
        n = min(self.order, other.shape[0])
        return max_deviation(self.data[:n], other[:n])

    def allclose(self, other, tol: float | None = None) -> bool:
        return self.deviation(other) <= (get_tol() if tol is None else tol)

    def to_json(self) -> dict:
        labels = [list(lab) for lab in self.labels]
        return {
            "spins_twice": list(self.spins),
            "basis": labels,
            "order": self.order,
            "entries": [[HSeries(self.data[:, r, c]).to_json() for c in range(self.dim)]
                        for r in range(self.dim)],
        }

    def __repr__(self):
        return f"RepMatrix(spins_twice={self.spins}, dim={self.dim}, order={self.order})"


# ---------------------------------------------------------------------------
# generator arrays (cached, read-only)

def _frozen(a):
    a.flags.writeable = False
    return a


@lru_cache(maxsize=None)
def generator_coeffs(two_j: int, g: str, deformed: bool, order: int) -> np.ndarray:
    """``(order, d, d)`` array of rho^j(g); g in E, F, H, K, Kinv."""
    if not deformed:
        return _frozen(classical(generator_coeffs(two_j, g, True, order)))
    d = two_j + 1
    out = np.zeros((order, d, d))
    for i, two_m in enumerate(range(-two_j, two_j + 1, 2)):
        if g == "E" and two_m < two_j:
            amp = kernels.series_mul(qnum_coeffs((two_j + two_m) // 2 + 1, order),
                                     qnum_coeffs((two_j - two_m) // 2, order))
            out[:, i + 1, i] = kernels.series_mul(exp_coeffs(two_m / 2 + 1, order),
                                                  sqrt_coeffs(amp))
        elif g == "F" and two_m > -two_j:
            amp = kernels.series_mul(qnum_coeffs((two_j + two_m) // 2, order),
                                     qnum_coeffs((two_j - two_m) // 2 + 1, order))
            out[:, i - 1, i] = kernels.series_mul(exp_coeffs(-two_m / 2, order),
                                                  sqrt_coeffs(amp))
        elif g == "H":
            out[0, i, i] = two_m
        elif g == "K":
            out[:, i, i] = exp_coeffs(two_m, order)
        elif g == "Kinv":
            out[:, i, i] = exp_coeffs(-two_m, order)
    if g not in ("E", "F", "H", "K", "Kinv"):
        raise ValueError(f"unknown generator {g!r}")
    return _frozen(out)


def _gen(two_j, g, deformed, order=None):
    return generator_coeffs(two_j, g, bool(deformed), get_order() if order is None else order)


def rep_generator(j, g: str, deformed: bool = True) -> RepMatrix:
    """Matrix of a generator (E, F or H) in the spin-j representation."""
    if g not in GENERATORS:
        raise ValueError(f"generator must be one of {GENERATORS}, got {g!r}")
    s = as_spin(j)
    return RepMatrix(_gen(s.two_j, g, deformed), (s.two_j,))


@lru_cache(maxsize=None)
def coproduct_coeffs(g: str, two_j1: int, two_j2: int, deformed: bool, order: int) -> np.ndarray:
    """(rho^j1 x rho^j2)(Delta g) with Delta' when deformed, primitive otherwise."""
    i1 = sidentity(two_j1 + 1, order)
    i2 = sidentity(two_j2 + 1, order)
    g1 = generator_coeffs(two_j1, g, deformed, order)
    g2 = generator_coeffs(two_j2, g, deformed, order)
    if deformed and g == "E":
        out = skron(g1, generator_coeffs(two_j2, "K", True, order)) + skron(i1, g2)
    elif deformed and g == "F":
        out = skron(g1, i2) + skron(generator_coeffs(two_j1, "Kinv", True, order), g2)
    else:
        out = skron(g1, i2) + skron(i1, g2)
    return _frozen(out)


def rep_tensor_coproduct(g: str, j1, j2, deformed: bool = True) -> RepMatrix:
    s1, s2 = as_spin(j1), as_spin(j2)
    if g not in GENERATORS:
        raise ValueError(f"generator must be one of {GENERATORS}, got {g!r}")
    return RepMatrix(coproduct_coeffs(g, s1.two_j, s2.two_j, bool(deformed), get_order()),
                     (s1.two_j, s2.two_j))


def classical_coproduct_multi(g: str, spins) -> RepMatrix:
    """Primitive n-fold coproduct g x 1 x .. + .. + 1 x .. x g on a tensor product."""
    spins = _two_js(spins)
    order = get_order()
    total = None
    for slot in range(len(spins)):
        term = None
        for k, s in enumerate(spins):
            piece = generator_coeffs(s, g, False, order) if k == slot else sidentity(s + 1, order)
            term = piece if term is None else skron(term, piece)
        total = term if total is None else total + term
    return RepMatrix(total, spins)


def _parse_word(word):
    letters = list(word) if isinstance(word, str) else list(word)
    for w in letters:
        if w not in GENERATORS:
            raise ValueError(f"word letters must be in {GENERATORS}, got {w!r}")
    return letters


def rep_word(word, j, deformed: bool = True) -> RepMatrix:
    """rho(g1 g2 ... gn) for a word given as 'EFH' or a sequence of letters."""
    s = as_spin(j)
    out = sidentity(s.dim, get_order())
    for w in _parse_word(word):
        out = kernels.series_matmul(out, _gen(s.two_j, w, deformed))
    return RepMatrix(out, (s.two_j,))


def _antipode_letter(two_j, g, deformed, order):
    x = _gen(two_j, g, deformed, order)
    if not deformed or g == "H":
        return -x
    if g == "E":   # S'(E) = -E K^-1
        return -kernels.series_matmul(x, _gen(two_j, "Kinv", True, order))
    return -kernels.series_matmul(_gen(two_j, "K", True, order), x)  # S'(F) = -K F


def rep_antipode(word, j, deformed: bool = True) -> RepMatrix:
    """rho(S(word)); S is an anti-homomorphism so the word is reversed."""
    s = as_spin(j)
    order = get_order()
    out = sidentity(s.dim, order)
    for w in reversed(_parse_word(word)):
        out = kernels.series_matmul(out, _antipode_letter(s.two_j, w, deformed, order))
    return RepMatrix(out, (s.two_j,))


def antipode_intertwiner(j) -> np.ndarray:
    """Signed weight-reversal W with rho^j(Sg) = W rho^j(g)^T W^-1 (classical S).

    W[m, -m] = (-1)^(j-m); the relation extends from generators to all of
    End(V^j) and lets the antipode act on arbitrary matrices legwise.
    """
    s = as_spin(j)
    w = np.zeros((s.dim, s.dim))
    for i, two_m in enumerate(s.weights):
        w[i, s.index(-two_m)] = (-1) ** ((s.two_j - two_m) // 2)
    return w


def antipode_legwise(mat: RepMatrix) -> RepMatrix:
    """(S x ... x S) applied to a tensor-product matrix, classical antipode."""
    w = np.ones((1, 1))
    for s in mat.spins:
        w = np.kron(w, antipode_intertwiner(SpinLabel(s)))
    winv = np.linalg.inv(w)
    data = np.einsum("ab,kcb,cd->kad", w, mat.data, winv)
    return RepMatrix(data, mat.spins)


@lru_cache(maxsize=None)
def rmatrix_terms(two_j1: int, two_j2: int, order: int):
    """Building blocks of the universal R-matrix on V^j1 x V^j2.

    Returns ``(diag, terms)`` where ``diag`` is the diagonal of
    exp(hbar H x H / 2) and ``terms`` is a list of ``(n, coefficient)`` with
    coefficient = q^(n(n-1)/2) (q - q^-1)^n / [n]!.  The sum stops at
    n = min(2 j1, 2 j2) because E and F are nilpotent.
    """
    diag = np.array([exp_coeffs(m1 * m2 / 2, order)
                     for m1, m2 in tensor_labels((two_j1, two_j2))]).T
    qdiff = exp_coeffs(1, order) - exp_coeffs(-1, order)
    terms = []
    power = np.zeros(order)
    power[0] = 1.0
    for n in range(min(two_j1, two_j2) + 1):
        coef = kernels.series_mul(exp_coeffs(n * (n - 1) / 2, order), power)
        coef = kernels.series_mul(coef, inv_coeffs(qfact_coeffs(n, order)))
        terms.append((n, _frozen(coef)))
        power = kernels.series_mul(power, qdiff)
    return _frozen(diag), tuple(terms)


@lru_cache(maxsize=None)
def rmatrix_coeffs(two_j1: int, two_j2: int, order: int) -> np.ndarray:
    diag, terms = rmatrix_terms(two_j1, two_j2, order)
    e = generator_coeffs(two_j1, "E", True, order)
    f = generator_coeffs(two_j2, "F", True, order)
    d1, d2 = two_j1 + 1, two_j2 + 1
    acc = np.zeros((order, d1 * d2, d1 * d2))
    en, fn = sidentity(d1, order), sidentity(d2, order)
    for n, coef in terms:
        if n:
            en = kernels.series_matmul(en, e)
            fn = kernels.series_matmul(fn, f)
        acc += kernels.series_mul(skron(en, fn), coef[:, None, None])
    # left multiplication by the diagonal prefactor is a row scaling
    return _frozen(kernels.series_mul(acc, diag[:, :, None]))


def rmatrix_from_parts(e_left: np.ndarray, h_left, f_right: np.ndarray, h_right,
                       order: int) -> np.ndarray:
    """exp(hbar H x H / 2) sum_n c_n E^n x F^n from explicit matrices.

    ``e_left`` / ``f_right`` are the images of E and F in the two factors
    (e.g. a coproduct), ``h_left`` / ``h_right`` the diagonals of H.  Used
    to evaluate (Delta x id) R and (id x Delta) R.
    """
    h_left = np.asarray(h_left, float)
    h_right = np.asarray(h_right, float)
    d1, d2 = len(h_left), len(h_right)
    diag = np.array([exp_coeffs(a * b / 2, order) for a in h_left for b in h_right]).T
    qdiff = exp_coeffs(1, order) - exp_coeffs(-1, order)
    acc = np.zeros((order, d1 * d2, d1 * d2))
    en, fn = sidentity(d1, order), sidentity(d2, order)
    power = sidentity(1, order)[:, 0, 0]
    for n in range(min(d1, d2)):
        if n:
            en = kernels.series_matmul(en, e_left)
            fn = kernels.series_matmul(fn, f_right)
            power = kernels.series_mul(power, qdiff)
        coef = kernels.series_mul(exp_coeffs(n * (n - 1) / 2, order), power)
        coef = kernels.series_mul(coef, inv_coeffs(qfact_coeffs(n, order)))
        acc += kernels.series_mul(skron(en, fn), coef[:, None, None])
    return kernels.series_mul(acc, diag[:, :, None])


def rmatrix_rep(j1, j2) -> RepMatrix:
    """(rho_h^j1 x rho_h^j2)(R) for the universal R-matrix of U_h(su2)."""
    s1, s2 = as_spin(j1), as_spin(j2)
    return RepMatrix(rmatrix_coeffs(s1.two_j, s2.two_j, get_order()), (s1.two_j, s2.two_j))


def _killing_inverse():
    # structure constants in the basis (E, H, F): [H,E]=2E, [H,F]=-2F, [E,F]=H
    def bracket(a, b):
        table = {("H", "E"): {"E": 2}, ("H", "F"): {"F": -2}, ("E", "F"): {"H": 1}}
        if (a, b) in table:
            return table[(a, b)]
        if (b, a) in table:
            return {k: -v for k, v in table[(b, a)].items()}
        return {}
    basis = ("E", "H", "F")
    ad = []
    for a in basis:
        m = np.zeros((3, 3))
        for col, b in enumerate(basis):
            for k, v in bracket(a, b).items():
                m[basis.index(k), col] = v
        ad.append(m)
    killing = np.array([[np.trace(x @ y) for y in ad] for x in ad])
    return basis, np.linalg.inv(killing)


def casimir_matrix(j) -> RepMatrix:
    """Quadratic Casimir C = K^{ab} g_a g_b (Killing normalisation) on V^j."""
    s = as_spin(j)
    order = get_order()
    basis, kinv = _killing_inverse()
    mats = {g: generator_coeffs(s.two_j, g, False, order)[0] for g in basis}
    c = sum(kinv[a, b] * mats[ga] @ mats[gb]
            for a, ga in enumerate(basis) for b, gb in enumerate(basis))
    out = np.zeros((order, s.dim, s.dim))
    out[0] = c
    return RepMatrix(out, (s.two_j,))


def casimir_rep(j) -> HSeries:
    """Scalar by which the Killing-normalised Casimir acts on V^j."""
    mat = casimir_matrix(j)
    return HSeries(mat.data[:, 0, 0])


def sigma_rep(j, power: float = 1.0) -> RepMatrix:
    """sigma^power with sigma = exp(hbar H / 2): diagonal q^(power * m)."""
    s = as_spin(j)
    order = get_order()
    out = np.zeros((order, s.dim, s.dim))
    for i, two_m in enumerate(s.weights):
        out[:, i, i] = exp_coeffs(power * two_m / 2, order)
    return RepMatrix(out, (s.two_j,))


def exp_diagonal(mat: RepMatrix, scale: float) -> RepMatrix:
    """exp(hbar * scale * M) for a matrix M that is diagonal and hbar-free."""
    d = mat.data[0]
    if np.any(d != np.diag(np.diag(d))) or np.any(mat.data[1:]):
        raise ValueError("exp_diagonal needs a constant diagonal matrix")
    out = np.zeros_like(mat.data)
    for i, v in enumerate(np.diag(d)):
        out[:, i, i] = exp_coeffs(scale * v, mat.order)
    return RepMatrix(out, mat.spins)

"""Property checks shared by the ``verify`` command and the test-suite.

Every ``check_*`` function returns the largest absolute coefficient
deviation it found; exact checks are reported with tolerance 0.  Suites
run their checks on a thread pool, each inside a copy of the caller's
context so the series order and tolerance carry over, and report them in
declaration order.
"""
from __future__ import annotations

import contextvars
import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels, mq2, qplane
from .cg import block_offsets, cg_matrix
from .hseries import HSeries, exp_coeffs, get_order, get_tol, sidentity, skron
from .reps import (GENERATORS, antipode_legwise, coproduct_coeffs, generator_coeffs,
                   rmatrix_coeffs, rmatrix_from_parts, RepMatrix)
from .twist import TwistFamily, coassociator_coeffs, flip_matrix, standard_twist_coeffs

mm = kernels.series_matmul


def _dev(a, b=0.0) -> float:
    return float(np.max(np.abs(np.asarray(a) - b), initial=0.0))


def spins_upto(max_two_j: int, start: int = 1):
    return range(start, max_two_j + 1)


# ---------------------------------------------------------------------------
# representations, CG tables, twists

def check_cg_orthogonality(max_two_j: int) -> float:
    order, worst = get_order(), 0.0
    for t1, t2 in itertools.product(spins_upto(max_two_j), repeat=2):
        c = cg_matrix(t1, t2, True, order)
        eye = sidentity(c.shape[1], order)
        worst = max(worst, _dev(mm(c.transpose(0, 2, 1), c), eye), _dev(mm(c, c.transpose(0, 2, 1)), eye))
    return worst


def _block_generator(t1, t2, g, deformed, order):
    dim = (t1 + 1) * (t2 + 1)
    out = np.zeros((order, dim, dim))
    for two_j, o in block_offsets(t1, t2).items():
        out[:, o:o + two_j + 1, o:o + two_j + 1] = generator_coeffs(two_j, g, deformed, order)
    return out


def check_cg_intertwiner(max_two_j: int, deformed: bool = True) -> float:
    """Delta(g) C = C (direct sum of rho^j(g)) for g in E, F, H."""
    order, worst = get_order(), 0.0
    for t1, t2 in itertools.product(spins_upto(max_two_j), repeat=2):
        c = cg_matrix(t1, t2, deformed, order)
        for g in GENERATORS:
            lhs = mm(coproduct_coeffs(g, t1, t2, deformed, order), c)
            rhs = mm(c, _block_generator(t1, t2, g, deformed, order))
            worst = max(worst, _dev(lhs, rhs))
    return worst


def check_twist_unitarity(max_two_j: int) -> float:
    """F^T = F^-1 and F F^-1 = 1."""
    order, worst = get_order(), 0.0
    for t1, t2 in itertools.product(spins_upto(max_two_j), repeat=2):
        f = standard_twist_coeffs(t1, t2, False, order)
        finv = standard_twist_coeffs(t1, t2, True, order)
        eye = sidentity(f.shape[1], order)
        worst = max(worst, _dev(f.transpose(0, 2, 1), finv), _dev(mm(f, finv), eye))
    return worst


def check_twist_reality(max_two_j: int) -> float:
    """(S x S)(F) = F_21^-1, the antipode taken legwise."""
    order, worst = get_order(), 0.0
    for t1, t2 in itertools.product(spins_upto(max_two_j), repeat=2):
        f = RepMatrix(standard_twist_coeffs(t1, t2, False, order), (t1, t2))
        lhs = antipode_legwise(f).data
        p = flip_matrix(t2, t1)
        rhs = np.einsum("ab,kbc,dc->kad", p, standard_twist_coeffs(t2, t1, True, order), p)
        worst = max(worst, _dev(lhs, rhs))
    return worst


def check_twist_intertwining(max_two_j: int) -> float:
    """F Delta(g) F^-1 = C_q (direct sum rho^j(g)) C_q^T, the coproduct of U_h(su2)
    transported to classical generators; for H this is Delta'(H) itself."""
    order, worst = get_order(), 0.0
    for t1, t2 in itertools.product(spins_upto(max_two_j), repeat=2):
        f = standard_twist_coeffs(t1, t2, False, order)
        finv = standard_twist_coeffs(t1, t2, True, order)
        cq = cg_matrix(t1, t2, True, order)
        for g in GENERATORS:
            lhs = mm(mm(f, coproduct_coeffs(g, t1, t2, False, order)), finv)
            rhs = mm(mm(cq, _block_generator(t1, t2, g, False, order)), cq.transpose(0, 2, 1))
            worst = max(worst, _dev(lhs, rhs))
        worst = max(worst, _dev(mm(mm(f, coproduct_coeffs("H", t1, t2, False, order)), finv),
                                coproduct_coeffs("H", t1, t2, True, order)))
    return worst


def _permute_slots(mat: np.ndarray, dims, perm) -> np.ndarray:
    """Conjugate a 3-slot operator by the slot permutation (new slot k = old perm[k])."""
    n = mat.shape[0]
    t = mat.reshape(n, *dims, *dims)
    axes = [0] + [1 + p for p in perm] + [4 + p for p in perm]
    new_dims = [dims[p] for p in perm]
    size = int(np.prod(dims))
    return np.ascontiguousarray(t.transpose(axes)).reshape(n, size, size), new_dims


def _embed(r: np.ndarray, dims, slots) -> np.ndarray:
    """Two-slot operator r placed on ``slots`` of a three-slot product."""
    order = r.shape[0]
    free = ({0, 1, 2} - set(slots)).pop()
    full = skron(r, sidentity(dims[free], order))
    # current slot order is (slots[0], slots[1], free); bring it back to (0, 1, 2)
    current = [slots[0], slots[1], free]
    inv = [current.index(k) for k in range(3)]
    out, _ = _permute_slots(full, [dims[c] for c in current], inv)
    return out


def _weights(two_j):
    return np.arange(-two_j, two_j + 1, 2)


def check_rmatrix_quasitriangular(max_two_j: int) -> float:
    """(Delta' x id) R = R13 R23, (id x Delta') R = R13 R12 and R Delta' = Delta'^op R."""
    order, worst = get_order(), 0.0
    for t1, t2 in itertools.product(spins_upto(max_two_j), repeat=2):
        r = rmatrix_coeffs(t1, t2, order)
        p = flip_matrix(t2, t1)
        for g in GENERATORS:
            op = np.einsum("ab,kbc,dc->kad", p, coproduct_coeffs(g, t2, t1, True, order), p)
            worst = max(worst, _dev(mm(r, coproduct_coeffs(g, t1, t2, True, order)), mm(op, r)))
    for t1, t2, t3 in itertools.product(spins_upto(max_two_j), repeat=3):
        dims = (t1 + 1, t2 + 1, t3 + 1)
        r12, r13, r23 = (_embed(rmatrix_coeffs(a, b, order), dims, s)
                         for a, b, s in ((t1, t2, (0, 1)), (t1, t3, (0, 2)), (t2, t3, (1, 2))))
        # (Delta' x id) R
        h12 = np.add.outer(_weights(t1), _weights(t2)).ravel()
        e12 = coproduct_coeffs("E", t1, t2, True, order)
        lhs = rmatrix_from_parts(e12, h12, generator_coeffs(t3, "F", True, order), _weights(t3), order)
        worst = max(worst, _dev(lhs, mm(r13, r23)))
        # (id x Delta') R
        h23 = np.add.outer(_weights(t2), _weights(t3)).ravel()
        f23 = coproduct_coeffs("F", t2, t3, True, order)
        lhs = rmatrix_from_parts(generator_coeffs(t1, "E", True, order), _weights(t1), f23, h23, order)
        worst = max(worst, _dev(lhs, mm(r13, r12)))
    return worst


def check_coassociator_invariance(two_js=(1, 1, 1), family: TwistFamily | None = None) -> float:
    """Phi commutes with the classical triple coproduct of E, F, H."""
    order = get_order()
    phi = coassociator_coeffs(*two_js, family=family, order=order)
    worst = 0.0
    for g in GENERATORS:
        mats = [generator_coeffs(t, g, False, order) for t in two_js]
        ids = [sidentity(t + 1, order) for t in two_js]
        delta = (skron(skron(mats[0], ids[1]), ids[2]) + skron(skron(ids[0], mats[1]), ids[2])
                 + skron(skron(ids[0], ids[1]), mats[2]))
        worst = max(worst, _dev(mm(phi, delta), mm(delta, phi)))
    return worst


def check_coassociator_plane() -> float:
    """mu(mu x id)(Phi > x (x) y (x) z) = xyz for plane generators, classical mu."""
    order = get_order()
    phi = coassociator_coeffs(1, 1, 1, order=order)
    gens = [qplane.PlanePoly.basis(1, m, order) for m in (-1, 1)]

    def triple(a, b, c):
        return qplane.mul_plane(qplane.mul_plane(a, b, False), c, False)

    worst = 0.0
    for idx, (a, b, c) in enumerate(itertools.product(range(2), repeat=3)):
        vec = phi[:, :, idx]
        acc = qplane.PlanePoly({}, order)
        for k, (u, v, w) in enumerate(itertools.product(range(2), repeat=3)):
            if np.any(vec[:, k]):
                acc = acc + triple(gens[u], gens[v], gens[w]).scale(HSeries(vec[:, k]))
        worst = max(worst, acc.max_deviation(triple(gens[a], gens[b], gens[c])))
    return worst


# ---------------------------------------------------------------------------
# quantum plane

def check_plane_relation() -> float:
    x, y = qplane.PlanePoly.x(), qplane.PlanePoly.y()
    q = HSeries(exp_coeffs(1.0, get_order()))
    return (qplane.star_plane(x, y) - qplane.star_plane(y, x).scale(q)).max_deviation(qplane.PlanePoly({}))


def check_plane_twist_product(max_two_j: int) -> float:
    """star_plane = mul_plane(deformed) on every pair of basis elements."""
    order = get_order()
    return max(_pairwise_plane(t1, t2, order)
               for t1, t2 in itertools.product(range(max_two_j + 1), repeat=2))


def _pairwise_plane(t1, t2, order) -> float:
    worst = 0.0
    for m1 in range(-t1, t1 + 1, 2):
        for m2 in range(-t2, t2 + 1, 2):
            p = qplane.PlanePoly.basis(t1, m1, order)
            r = qplane.PlanePoly.basis(t2, m2, order)
            worst = max(worst, qplane.star_plane(p, r).max_deviation(qplane.mul_plane(p, r)))
    return worst


def _assoc(product, triples) -> float:
    worst = 0.0
    for p, r, s in triples:
        worst = max(worst, product(product(p, r), s).max_deviation(product(p, product(r, s))))
    return worst


def plane_generator_triples(order=None):
    gens = [qplane.PlanePoly.x(order), qplane.PlanePoly.y(order)]
    return list(itertools.product(gens, repeat=3))


def random_plane_triples(seed: int, count: int, max_two_j: int = 4, order=None):
    rng = np.random.default_rng(seed)
    return [tuple(qplane.random_plane_poly(rng, max_two_j, order) for _ in range(3))
            for _ in range(count)]


def check_plane_associativity(seed: int, count: int) -> float:
    triples = plane_generator_triples() + random_plane_triples(seed, count)
    return _assoc(qplane.star_plane, triples)


def check_plane_covariance(seed: int, count: int = 5) -> float:
    """g > (p * r) = (g_(1) > p) * (g_(2) > r), classical and deformed actions."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        p = qplane.random_plane_poly(rng, 3)
        r = qplane.random_plane_poly(rng, 3)
        prod = qplane.star_plane(p, r)
        for g in GENERATORS:
            for deformed in (False, True):
                lhs = qplane.act_plane(g, prod, deformed)
                worst = max(worst, lhs.max_deviation(qplane.act_plane_pair(g, p, r, deformed)))
    return worst


def check_plane_brute_force(seed: int, count: int = 10) -> float:
    """mul_plane against the normal-ordering rule yx = q^-1 xy."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        p = qplane.random_plane_poly(rng, 4)
        r = qplane.random_plane_poly(rng, 4)
        brute = qplane.brute_force_product(qplane.basis_convert(p, "monomial"),
                                           qplane.basis_convert(r, "monomial"))
        worst = max(worst, qplane.basis_convert(brute, "irreducible").max_deviation(qplane.mul_plane(p, r)))
    return worst


def random_gauge(seed: int, max_two_j: int, order=None) -> dict[int, HSeries]:
    """beta(j) = 1 + O(hbar) with uniform random higher coefficients, beta(0) = 1."""
    order = get_order() if order is None else order
    rng = np.random.default_rng(seed)
    out = {}
    for two_j in range(max_two_j + 1):
        c = np.zeros(order)
        c[0] = 1.0
        if two_j:
            c[1:] = rng.uniform(-1.0, 1.0, order - 1)
        out[two_j] = HSeries(c)
    return out


def _rescale(p: qplane.PlanePoly, beta: dict[int, HSeries], power: int) -> qplane.PlanePoly:
    out = {}
    for j, blk in p.blocks.items():
        b = beta[j] if power > 0 else 1 / beta[j]
        out[j] = kernels.series_mul(blk, b.coeffs[:, None])
    return qplane.PlanePoly(out, p.order)


def check_gauge(seed: int, count: int = 5, max_two_j: int = 4) -> float:
    """Star product of the gauged twist (u x u) F Delta(u^-1), u = beta(j) on V^j,
    against u > ((u^-1 > p) * (u^-1 > r))."""
    beta = random_gauge(seed, 2 * max_two_j)

    def eta(j1, j2, j):
        return beta[j1] * beta[j2] / beta[j]

    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    for _ in range(count):
        p = qplane.random_plane_poly(rng, max_two_j)
        r = qplane.random_plane_poly(rng, max_two_j)
        gauged = qplane.star_plane(p, r, twist_factors=eta)
        expected = _rescale(qplane.star_plane(_rescale(p, beta, -1), _rescale(r, beta, -1)), beta, 1)
        worst = max(worst, gauged.max_deviation(expected))
    return worst


def check_plane_classical_limit(max_two_j: int) -> float:
    """Order-0 parts of the deformed and star products equal the commutative product exactly."""
    order, worst = get_order(), 0.0
    for t1, t2 in itertools.product(range(max_two_j + 1), repeat=2):
        for m1 in range(-t1, t1 + 1, 2):
            for m2 in range(-t2, t2 + 1, 2):
                p = qplane.PlanePoly.basis(t1, m1, order)
                r = qplane.PlanePoly.basis(t2, m2, order)
                cl = qplane.mul_plane(p, r, False)
                for prod in (qplane.mul_plane(p, r), qplane.star_plane(p, r)):
                    for j, blk in prod.blocks.items():
                        worst = max(worst, _dev(blk[0], cl.blocks[j][0]))
    return worst


def check_tables_classical_limit(max_two_j: int) -> float:
    """hbar^0 parts of CG tables, twists, R and generators equal the classical objects."""
    order, worst = get_order(), 0.0
    for t1, t2 in itertools.product(spins_upto(max_two_j), repeat=2):
        dim = (t1 + 1) * (t2 + 1)
        worst = max(worst, _dev(cg_matrix(t1, t2, True, order)[0], cg_matrix(t1, t2, False, order)[0]),
                    _dev(standard_twist_coeffs(t1, t2, False, order)[0], np.eye(dim)),
                    _dev(standard_twist_coeffs(t1, t2, True, order)[0], np.eye(dim)),
                    _dev(rmatrix_coeffs(t1, t2, order)[0], np.eye(dim)))
        for g in GENERATORS:
            worst = max(worst, _dev(coproduct_coeffs(g, t1, t2, True, order)[0],
                                    coproduct_coeffs(g, t1, t2, False, order)[0]))
    return worst


# ---------------------------------------------------------------------------
# M_h(2) and Minkowski space

def _gens(order=None):
    return {n: mq2.Mq2Poly.generator(n, order) for n in "abcd"}


def check_mq_relations(product=mq2.star_euclid) -> float:
    """ab = qba, ac = qca, bd = qdb, cd = qdc, bc = cb, ad - da = (q - q^-1) bc."""
    g = _gens()
    q = HSeries(exp_coeffs(1.0, get_order()))
    m = lambda x, y: product(g[x], g[y])
    rels = [m("a", "b") - m("b", "a").scale(q), m("a", "c") - m("c", "a").scale(q),
            m("b", "d") - m("d", "b").scale(q), m("c", "d") - m("d", "c").scale(q),
            m("b", "c") - m("c", "b"), m("a", "d") - m("d", "a") - m("b", "c").scale(q - 1 / q)]
    return max(r.max_deviation(mq2.Mq2Poly({})) for r in rels)


def check_det_central(product=mq2.star_euclid) -> float:
    """det_q = ad - q bc is the det element and commutes with a, b, c, d."""
    g = _gens()
    q = HSeries(exp_coeffs(1.0, get_order()))
    det = product(g["a"], g["d"]) - product(g["b"], g["c"]).scale(q)
    worst = det.max_deviation(mq2.Mq2Poly.det())
    for x in "abcd":
        worst = max(worst, product(det, g[x]).max_deviation(product(g[x], det)))
    return worst


def _basis_pairs(max_two_j: int, order):
    for t1, t2 in itertools.product(range(max_two_j + 1), repeat=2):
        for m1, m1p in itertools.product(range(-t1, t1 + 1, 2), repeat=2):
            for m2, m2p in itertools.product(range(-t2, t2 + 1, 2), repeat=2):
                yield mq2.Mq2Poly.basis(t1, m1, m1p, 0, order), mq2.Mq2Poly.basis(t2, m2, m2p, 0, order)


def check_euclid_twist_product(max_two_j: int) -> float:
    order = get_order()
    return max((mq2.star_euclid(p, r).max_deviation(mq2.mul_euclid(p, r))
                for p, r in _basis_pairs(max_two_j, order)), default=0.0)


def check_minkowski_twist_product(max_two_j: int) -> float:
    order = get_order()
    return max((mq2.star_minkowski(p, r).max_deviation(mq2.mul_minkowski(p, r))
                for p, r in _basis_pairs(max_two_j, order)), default=0.0)


def check_mq2_associativity(product, seed: int, count: int = 3) -> float:
    g = list(_gens().values())
    triples = list(itertools.product(g, repeat=3))
    rng = np.random.default_rng(seed)
    triples += [tuple(mq2.random_mq2_poly(rng, 2) for _ in range(3)) for _ in range(count)]
    return _assoc(product, triples)


def check_counit(seed: int, count: int = 5) -> float:
    """eps(p r) = eps(p) eps(r) for the deformed and twisted Euclidean products.

    Minkowski space is not a bialgebra (R_23 mixes the two middle slots), so
    the counit is not multiplicative there and is not checked.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        p, r = mq2.random_mq2_poly(rng, 3), mq2.random_mq2_poly(rng, 3)
        for prod in (mq2.mul_euclid, mq2.star_euclid):
            lhs = mq2.counit_mq2(prod(p, r))
            rhs = mq2.counit_mq2(p) * mq2.counit_mq2(r)
            worst = max(worst, _dev(lhs.coeffs, rhs.coeffs))
    return worst


def check_euclid_pbw(seed: int, count: int = 3) -> float:
    """mul_euclid against the normal-ordered algebra with the T basis expanded."""
    rng = np.random.default_rng(seed)
    alg = mq2.PBWAlgebra()
    worst = 0.0
    for _ in range(count):
        p, r = mq2.random_mq2_poly(rng, 2), mq2.random_mq2_poly(rng, 2)
        lhs = alg.mul(mq2.to_pbw(p, alg), mq2.to_pbw(r, alg))
        rhs = mq2.to_pbw(mq2.mul_euclid(p, r), alg)
        worst = max(worst, max((_dev(lhs.get(k, 0.0), rhs.get(k, 0.0)) for k in set(lhs) | set(rhs)),
                               default=0.0))
    return worst


def check_det_invariant() -> float:
    """(g x g') > det_q = eps(g x g') det_q, computed on the normal-ordered det."""
    alg = mq2.PBWAlgebra()
    det = alg.det()
    worst = 0.0
    for g in ("E", "F"):
        for side in ("left", "right"):
            worst = max(worst, max((_dev(c) for c in alg.act(det, g, side).values()), default=0.0))
    return worst


def check_involution(seed: int, count: int = 3, max_degree: int = 4) -> tuple[float, float]:
    """(involutive deviation, antimultiplicative deviation) under star_minkowski."""
    rng = np.random.default_rng(seed)
    inv = mq2.involution_minkowski
    a = b = 0.0
    for _ in range(count):
        p = mq2.random_mq2_poly(rng, max_degree)
        r = mq2.random_mq2_poly(rng, max_degree)
        a = max(a, inv(inv(p)).max_deviation(p))
        b = max(b, inv(mq2.star_minkowski(p, r)).max_deviation(mq2.star_minkowski(inv(r), inv(p))))
    return a, b


def check_mq2_classical_limit(max_two_j: int) -> float:
    order, worst = get_order(), 0.0
    for p, r in _basis_pairs(max_two_j, order):
        cl = mq2.mul_euclid(p, r, False)
        for prod in (mq2.mul_euclid(p, r), mq2.star_euclid(p, r),
                     mq2.mul_minkowski(p, r), mq2.star_minkowski(p, r)):
            for key in set(prod.blocks) | set(cl.blocks):
                a = prod.blocks.get(key)
                b = cl.blocks.get(key)
                a0 = 0.0 if a is None else a[0]
                b0 = 0.0 if b is None else b[0]
                worst = max(worst, _dev(a0, b0))
    return worst


def check_peter_weyl(max_degree: int = 8) -> float:
    return float(max(abs(a - b) for a, b in map(mq2.peter_weyl_dimension, range(max_degree + 1))))


# ---------------------------------------------------------------------------
# suites

@dataclass
class CheckResult:
    name: str
    passed: bool
    max_dev: float
    tol: float
    seconds: float

    def row(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<34} {self.max_dev:10.3e}  tol {self.tol:.0e}  {self.seconds:7.2f}s"

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "max_dev": self.max_dev,
                "tol": self.tol, "seconds": self.seconds}


Check = tuple[str, Callable[[], float], bool]   # (name, function, exact)


def suite(space: str, max_two_j: int, seed: int = 0) -> list[Check]:
    small = min(max_two_j, 4)
    if space == "plane":
        return [
            ("cg_orthogonality", lambda: check_cg_orthogonality(max_two_j), False),
            ("cg_intertwiner", lambda: check_cg_intertwiner(max_two_j), False),
            ("cg_intertwiner_classical", lambda: check_cg_intertwiner(max_two_j, False), False),
            ("twist_unitarity", lambda: check_twist_unitarity(small), False),
            ("twist_reality", lambda: check_twist_reality(small), False),
            ("twist_intertwining", lambda: check_twist_intertwining(small), False),
            ("rmatrix_quasitriangular", lambda: check_rmatrix_quasitriangular(min(small, 3)), False),
            ("coassociator_invariance", check_coassociator_invariance, False),
            ("coassociator_plane", check_coassociator_plane, False),
            ("plane_relation", check_plane_relation, False),
            ("plane_twist_product", lambda: check_plane_twist_product(max_two_j), False),
            ("plane_associativity", lambda: check_plane_associativity(seed, 20), False),
            ("plane_covariance", lambda: check_plane_covariance(seed), False),
            ("plane_brute_force", lambda: check_plane_brute_force(seed), False),
            ("plane_gauge", lambda: check_gauge(seed), False),
            ("plane_classical_limit", lambda: check_plane_classical_limit(max_two_j), True),
            ("tables_classical_limit", lambda: check_tables_classical_limit(max_two_j), True),
        ]
    small = min(max_two_j, 3)
    if space == "mq2":
        return [
            ("mq_relations", check_mq_relations, False),
            ("det_central", check_det_central, False),
            ("det_invariant", check_det_invariant, False),
            ("euclid_twist_product", lambda: check_euclid_twist_product(small), False),
            ("euclid_associativity",
             lambda: check_mq2_associativity(mq2.star_euclid, seed), False),
            ("euclid_normal_ordering", lambda: check_euclid_pbw(seed), False),
            ("counit_multiplicative", lambda: check_counit(seed), False),
            ("peter_weyl_dimension", check_peter_weyl, True),
            ("mq2_classical_limit", lambda: check_mq2_classical_limit(min(small, 2)), True),
        ]
    if space == "minkowski":
        return [
            ("minkowski_twist_product", lambda: check_minkowski_twist_product(small), False),
            ("minkowski_associativity",
             lambda: check_mq2_associativity(mq2.star_minkowski, seed), False),
            ("involution_involutive", lambda: check_involution(seed)[0], False),
            ("involution_antimultiplicative", lambda: check_involution(seed)[1], False),
            ("mq2_classical_limit", lambda: check_mq2_classical_limit(min(small, 2)), True),
        ]
    raise ValueError(f"unknown space {space!r}")


def _timed(fn):
    t0 = time.perf_counter()
    value = fn()
    return float(value), time.perf_counter() - t0


def run_suite(space: str, max_two_j: int, seed: int = 0, tol: float | None = None,
              workers: int = 4) -> list[CheckResult]:
    tol = get_tol() if tol is None else tol
    checks = suite(space, max_two_j, seed)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [pool.submit(contextvars.copy_context().run, _timed, fn) for _, fn, _ in checks]
        outcomes = [f.result() for f in futures]
    results = []
    for (name, _, exact), (dev, secs) in zip(checks, outcomes):
        t = 0.0 if exact else tol
        results.append(CheckResult(name, bool(dev <= t), dev, t, secs))
    return results

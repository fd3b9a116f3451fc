from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import assert_series
from qtwist.hseries import exp_coeffs, session
from qtwist.kernels import series_matmul as mm
from qtwist.reps import (RepMatrix, SpinLabel, antipode_intertwiner, antipode_legwise, as_spin,
                         casimir_matrix, casimir_rep, rep_antipode, rep_generator,
                         rep_tensor_coproduct, rep_word, rmatrix_rep, sigma_rep, tensor_labels)
from qtwist.verify import check_rmatrix_quasitriangular

spins = st.integers(1, 5).map(SpinLabel)

# R on (1/2, 1/2): diagonal exp(+-hbar/2) and exp(-hbar/2)(q - 1/q) on |+-><-+|
R_DIAG_PLUS = [1.0, 0.5, 0.125, 1 / 48, 1 / 384, 1 / 3840, 2.170138888888889e-05, 1.5500992063492063e-06]
R_OFFDIAG = [0.0, 2.0, -1.0, 0.5833333333333334, -0.20833333333333334, 0.06354166666666666,
             -0.01579861111111111, 0.0033916170634920636]


def test_spin_labels():
    assert as_spin("3/2") == SpinLabel(3)
    assert as_spin(Fraction(1, 2)).dim == 2
    assert as_spin(1.5).two_j == 3
    assert SpinLabel(2).weights == (-2, 0, 2)
    with pytest.raises(ValueError):
        as_spin("1/3")
    with pytest.raises(ValueError):
        SpinLabel(-1)
    assert tensor_labels((1, 1)) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]


def test_generator_examples():
    h = rep_generator("1/2", "H").data
    assert np.array_equal(h[0], np.diag([-1.0, 1.0])) and not h[1:].any()
    e = rep_generator("1/2", "E").data
    assert_series(e[:, 1, 0], exp_coeffs(0.5), 0)
    assert np.count_nonzero(e[0]) == 1
    for g in "EFH":
        z = rep_generator(0, g).data
        assert z.shape[1:] == (1, 1) and not z.any()


def test_classical_is_order_zero_of_deformed():
    for g in "EFH":
        d, c = rep_generator(2, g).data, rep_generator(2, g, deformed=False).data
        assert np.array_equal(d[0], c[0]) and not c[1:].any()


def test_tensor_coproduct():
    h = rep_tensor_coproduct("H", "1/2", 1).data
    expected = [2 * (m1 + m2) / 2 for m1, m2 in tensor_labels((1, 2))]
    assert np.array_equal(np.diag(h[0]), expected)
    e_cl = rep_tensor_coproduct("E", "1/2", "1/2", deformed=False).data[0]
    e1 = rep_generator("1/2", "E", False).data[0]
    assert np.array_equal(e_cl, np.kron(e1, np.eye(2)) + np.kron(np.eye(2), e1))
    # deformed: E x K + 1 x E on (1/2, 1/2); |-,-> -> |+,-> carries exp(hbar/2) exp(-hbar)
    e_q = rep_tensor_coproduct("E", "1/2", "1/2").data
    assert_series(e_q[:, 2, 0], exp_coeffs(-0.5))
    assert_series(e_q[:, 1, 0], exp_coeffs(0.5))
    assert_series(e_q[:, 3, 1], exp_coeffs(1.5))


def test_star_representation():
    # rho(F K) = rho(E)^T: the deformed matrices form a *-representation
    for two_j in range(1, 5):
        fk = rep_word("F", SpinLabel(two_j)).data
        k = np.zeros_like(fk)
        for i, m in enumerate(SpinLabel(two_j).weights):
            k[:, i, i] = exp_coeffs(m)
        e = rep_generator(SpinLabel(two_j), "E").data
        assert np.abs(mm(fk, k) - e.transpose(0, 2, 1)).max() < 1e-13


def test_antipode_examples():
    j = SpinLabel(1)
    assert np.array_equal(rep_antipode("H", j).data, -rep_generator(j, "H").data)
    e = rep_generator(j, "E").data
    kinv = sigma_rep(j, -2).data
    assert np.abs(rep_antipode("E", j).data - (-mm(e, kinv))).max() < 1e-15
    # classical: rho(Sg)^m_m' = (-1)^(m-m') rho(g)^(-m')_(-m)
    for two_j in range(1, 5):
        s = SpinLabel(two_j)
        for g in "EFH":
            lhs = rep_antipode(g, s, deformed=False).data[0]
            rho = rep_generator(s, g, False).data[0]
            w = s.weights
            rhs = np.array([[(-1) ** ((a - b) // 2) * rho[s.index(-b), s.index(-a)] for b in w] for a in w])
            assert np.array_equal(lhs, rhs)


def test_antipode_legwise_matches_words():
    s = SpinLabel(3)
    for word in ("E", "EF", "FHE"):
        direct = rep_antipode(word, s, deformed=False)
        legwise = antipode_legwise(rep_word(word, s, deformed=False))
        assert direct.deviation(legwise) < 1e-13
    assert np.allclose(antipode_intertwiner(SpinLabel(1)), [[0, -1], [1, 0]])


def _deformed_antipode_legs(mat: RepMatrix) -> np.ndarray:
    """(S' x S') on a two-leg matrix: rho(S'x) = sigma W rho(x)^T W^-1 sigma^-1 per leg."""
    w = np.kron(*(antipode_intertwiner(SpinLabel(t)) for t in mat.spins))
    sig = [sigma_rep(SpinLabel(t)).data for t in mat.spins]
    sig_inv = [sigma_rep(SpinLabel(t), -1).data for t in mat.spins]
    from qtwist.hseries import skron
    s, si = skron(*sig), skron(*sig_inv)
    conj = np.einsum("ab,kcb,cd->kad", w, mat.data, np.linalg.inv(w))
    return mm(mm(s, conj), si)


def test_deformed_antipode_formula():
    for two_j in (1, 2, 3):
        s = SpinLabel(two_j)
        w = antipode_intertwiner(s)
        for g in "EFH":
            conj = np.einsum("ab,kcb,cd->kad", w, rep_generator(s, g).data, np.linalg.inv(w))
            rhs = mm(mm(sigma_rep(s).data, conj), sigma_rep(s, -1).data)
            assert np.abs(rep_antipode(g, s).data - rhs).max() < 1e-13


def test_rmatrix_examples():
    r = rmatrix_rep("1/2", "1/2").data
    for idx in (0, 3):
        assert_series(r[:, idx, idx], R_DIAG_PLUS)
    for idx in (1, 2):
        assert_series(r[:, idx, idx], exp_coeffs(-0.5))
    assert_series(r[:, 2, 1], R_OFFDIAG)
    assert r[:, 1, 2].max() == 0 and np.array_equal(r[0], np.eye(4))
    assert np.array_equal(rmatrix_rep(0, 1).data[0], np.eye(3)) and not rmatrix_rep(0, 1).data[1:].any()


def test_rmatrix_antipode_invariant():
    for t1, t2 in ((1, 1), (1, 2), (2, 3)):
        r = rmatrix_rep(SpinLabel(t1), SpinLabel(t2))
        assert np.abs(_deformed_antipode_legs(r) - r.data).max() < 1e-11


def test_rmatrix_quasitriangular_small():
    with session(order=6):
        assert check_rmatrix_quasitriangular(2) < 1e-11


def test_casimir():
    assert casimir_rep(0).constant == 0
    assert casimir_rep("1/2").constant == pytest.approx(3 / 8)
    for two_j in range(6):
        s = SpinLabel(two_j)
        m = casimir_matrix(s).data[0]
        assert np.allclose(m, m[0, 0] * np.eye(s.dim))
        j = two_j / 2
        assert m[0, 0] == pytest.approx(j * (j + 1) / 2)


def test_sigma():
    assert np.array_equal(sigma_rep(0).data[0], [[1.0]])
    s = sigma_rep("1/2").data
    assert_series(s[:, 0, 0], exp_coeffs(-0.5), 0)
    assert_series(s[:, 1, 1], exp_coeffs(0.5), 0)
    k = rep_word("", SpinLabel(3))
    sq = mm(sigma_rep(SpinLabel(3)).data, sigma_rep(SpinLabel(3)).data)
    for i, m in enumerate(SpinLabel(3).weights):
        assert_series(sq[:, i, i], exp_coeffs(m))
    assert k.dim == 4


def test_sigma_group_like():
    from qtwist.hseries import skron
    sig = skron(sigma_rep("1/2").data, sigma_rep(1).data)
    for g in "EF":
        d = rep_tensor_coproduct(g, "1/2", 1).data
        # sigma g sigma^-1 = q^(+-1) g leg by leg, so the coproduct scales uniformly
        conj = mm(mm(sig, d), skron(sigma_rep("1/2", -1).data, sigma_rep(1, -1).data))
        factor = exp_coeffs(1.0 if g == "E" else -1.0)
        from qtwist.kernels import series_mul
        assert np.abs(conj - series_mul(d, factor[:, None, None])).max() < 1e-13


def test_repmatrix_ops_and_json():
    a = rep_generator(1, "E")
    b = rep_generator(1, "F")
    comm = a @ b - b @ a
    assert comm.deviation(rep_generator(1, "H")) > 0
    assert (a @ b - b @ a).classical().deviation(rep_generator(1, "H", False)) < 1e-15
    js = a.to_json()
    assert js["spins_twice"] == [2] and len(js["entries"]) == 3
    with pytest.raises(ValueError):
        rep_word("EX", 1)


@given(spins)
def test_deformed_commutator(s):
    # [E, F] = (K - K^-1) / (q - q^-1) in the spin-j representation
    e, f = rep_generator(s, "E").data, rep_generator(s, "F").data
    lhs = mm(e, f) - mm(f, e)
    qd = exp_coeffs(1) - exp_coeffs(-1)
    for i, m in enumerate(s.weights):
        num = exp_coeffs(m) - exp_coeffs(-m)
        # compare num with lhs * (q - q^-1)
        from qtwist.kernels import series_mul
        assert np.abs(series_mul(lhs[:, i, i], qd) - num).max() < 1e-10
    off = lhs.copy()
    off[:, range(s.dim), range(s.dim)] = 0
    assert np.abs(off).max() < 1e-12

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qtwist.cg import cg_table
from qtwist.errors import MissingBlockFactor
from qtwist.hseries import HSeries, session, sidentity
from qtwist.kernels import series_matmul as mm
from qtwist.reps import SpinLabel
from qtwist.twist import (STANDARD, TwistFamily, coassociator_coeffs, coassociator_rep,
                          coproduct_leg_rep, r23_coeffs, rmatrix_block_scalars,
                          standard_twist_coeffs, standard_twist_rep, twist_sl2c_coeffs,
                          twist_so4_coeffs)
from qtwist.verify import (check_coassociator_invariance, check_coassociator_plane,
                           check_twist_intertwining, check_twist_reality, check_twist_unitarity)

spin = st.integers(1, 5)


def _series(*head, order=8):
    c = np.zeros(order)
    c[:len(head)] = head
    return HSeries(c)


@given(spin, spin)
def test_classical_part_is_identity(t1, t2):
    f = standard_twist_coeffs(t1, t2, False, 8)
    assert np.array_equal(f[0], np.eye((t1 + 1) * (t2 + 1)))


@pytest.mark.parametrize("t", [1, 2, 3])
def test_trivial_factor_gives_identity(t):
    for pair in ((0, t), (t, 0)):
        f = standard_twist_coeffs(*pair, False, 8)
        assert np.abs(f - sidentity(t + 1, 8)).max() < 1e-14


def test_half_half_matrix():
    # F = C_q C^T on the singlet/triplet m=0 sector; first order is antisymmetric
    f = standard_twist_rep("1/2", "1/2").matrix
    assert f.entry(0, 0).allclose(HSeries([1] + [0] * 7), 1e-14)
    assert f.entry(3, 3).allclose(HSeries([1] + [0] * 7), 1e-14)
    first = f.data[1]
    assert np.allclose(first, -first.T, atol=1e-14) and abs(first[1, 2]) > 0.1


def test_group_properties():
    with session(order=6):
        assert check_twist_unitarity(4) < 1e-10
        assert check_twist_reality(4) < 1e-10
        assert check_twist_intertwining(4) < 1e-10


def test_gauge_family():
    beta = {k: _series(1.0, 0.3 * k, 0.1) for k in range(0, 7)}
    fam = TwistFamily.gauge(beta)
    f = fam.coeffs(1, 2)
    finv = fam.inv().coeffs(1, 2)
    assert np.abs(mm(f, finv) - sidentity(6, 8)).max() < 1e-12
    rep = standard_twist_rep("1/2", "1/2", block_factors={0: HSeries([1.0, 0.5]),
                                                          1: HSeries([1.0])})
    assert not rep.matrix.allclose(standard_twist_rep("1/2", "1/2").matrix, 1e-6)
    with pytest.raises(MissingBlockFactor):
        standard_twist_rep("1/2", "1/2", block_factors={0: HSeries([1.0])})


def _leg_by_loops(fam, leg, t1, t2, t3, order):
    """Assemble (Delta x id)(X) or (id x Delta)(X) entry by entry from CG coefficients."""
    ms = [list(range(-t, t + 1, 2)) for t in (t1, t2, t3)]
    labels = list(itertools.product(*ms))
    pos = {lab: i for i, lab in enumerate(labels)}
    out = np.zeros((order, len(labels), len(labels)))
    if leg == "left":
        pa, pb, other = (t1, t2), (0, 1), t3
    else:
        pa, pb, other = (t2, t3), (1, 2), t1
    tab = cg_table(SpinLabel(pa[0]), SpinLabel(pa[1]), deformed=False)
    for two_j in range(abs(pa[0] - pa[1]), sum(pa) + 1, 2):
        x = fam.coeffs(two_j, other, order) if leg == "left" else fam.coeffs(other, two_j, order)
        jm = list(range(-two_j, two_j + 1, 2))
        om = list(range(-other, other + 1, 2))
        sub = list(itertools.product(jm, om)) if leg == "left" else list(itertools.product(om, jm))
        for row_lab, col_lab in itertools.product(labels, repeat=2):
            acc = np.zeros(order)
            for (r_idx, rs), (c_idx, cs) in itertools.product(enumerate(sub), repeat=2):
                rm, ro = (rs[0], rs[1]) if leg == "left" else (rs[1], rs[0])
                cmm, co = (cs[0], cs[1]) if leg == "left" else (cs[1], cs[0])
                if ro != row_lab[3 - sum(pb)] or co != col_lab[3 - sum(pb)]:
                    continue
                c_row = tab.coeff(two_j, rm, row_lab[pb[0]], row_lab[pb[1]]).constant
                c_col = tab.coeff(two_j, cmm, col_lab[pb[0]], col_lab[pb[1]]).constant
                if c_row and c_col:
                    acc += c_row * c_col * x[:, r_idx, c_idx]
            out[:, pos[row_lab], pos[col_lab]] += acc
    return out


@pytest.mark.parametrize("spins", [(1, 1, 1), (1, 2, 1), (2, 1, 1)])
@pytest.mark.parametrize("leg", ["left", "right"])
def test_coproduct_leg_against_entrywise_assembly(spins, leg):
    for fam in (STANDARD, STANDARD.inv()):
        got = coproduct_leg_rep(fam, leg, *(SpinLabel(t) for t in spins)).data
        assert np.abs(got - _leg_by_loops(fam, leg, *spins, 8)).max() < 1e-12


def test_coproduct_leg_errors():
    with pytest.raises(ValueError):
        coproduct_leg_rep("F", "middle", "1/2", "1/2", "1/2")
    with pytest.raises(TypeError):
        coproduct_leg_rep("G", "left", "1/2", "1/2", "1/2")


def test_coassociator():
    phi = coassociator_rep("1/2", "1/2", "1/2")
    assert np.abs(phi.data[0] - np.eye(8)).max() < 1e-14
    assert phi.data[1:].any()
    assert check_coassociator_invariance((1, 1, 1)) < 1e-11
    assert check_coassociator_invariance((1, 2, 1)) < 1e-11
    assert check_coassociator_plane() < 1e-12
    # Phi is unchanged by a coboundary gauge of the twist
    beta = {k: _series(1.0, 0.2 * k, -0.05 * k) for k in range(0, 6)}
    gauged = coassociator_coeffs(1, 1, 1, family=TwistFamily.gauge(beta))
    assert np.abs(gauged - coassociator_coeffs(1, 1, 1)).max() < 1e-11
    assert check_coassociator_invariance((1, 1, 2), family=TwistFamily.gauge(beta)) < 1e-11


def test_so4_and_sl2c():
    zero = (0, 0, 0, 0)
    assert np.array_equal(twist_so4_coeffs(zero)[0], np.eye(1))
    assert np.abs(twist_sl2c_coeffs(zero) - sidentity(1, 8)).max() < 1e-15
    js = (1, 1, 1, 1)
    so4, sl2c = twist_so4_coeffs(js), twist_sl2c_coeffs(js)
    assert np.abs(mm(r23_coeffs(js), sl2c) - so4).max() < 1e-12
    inv = twist_sl2c_coeffs(js, inverse=True)
    assert np.abs(mm(sl2c, inv) - sidentity(16, 8)).max() < 1e-12
    assert np.abs(sl2c - so4).max() > 0.1


def test_rmatrix_block_scalars():
    with session(order=4):
        rep = rmatrix_block_scalars("1/2", "1/2")
    assert rep["block_residual"] < 1e-12
    assert rep["casimir_scale"] == pytest.approx(4.0, abs=1e-9)
    assert rep["scaled_fit_residual"] < 1e-12

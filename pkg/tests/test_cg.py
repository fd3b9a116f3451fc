import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import S
from sympy.physics.quantum.cg import CG

from conftest import assert_series
from qtwist.cg import block_labels, cg_apply, cg_matrix, cg_table
from qtwist.errors import DimensionMismatch
from qtwist.hseries import session
from qtwist.kernels import series_matmul, series_mul
from qtwist.reps import SpinLabel
from qtwist.verify import check_cg_intertwiner, check_cg_orthogonality

# (1/2, 1/2) closed forms: singlet (|+-> - q^-1 |-+>) / sqrt(1 + q^-2),
# triplet m=0 (q^(1/2)|-+> + q^(-1/2)|+->) / sqrt(q + q^-1)
SINGLET_PM = [0.7071067811865476, 0.3535533905932738, -0.08838834764831845, -0.0736569563735987,
              0.031304206458779446, 0.022281229303013607, -0.011063888655284305, -0.0075027063449000465]
SINGLET_MP = [-0.7071067811865476, 0.3535533905932738, 0.08838834764831845, -0.0736569563735987,
              -0.031304206458779446, 0.022281229303013607, 0.011063888655284305, -0.0075027063449000465]
TRIPLET0_PM = [0.7071067811865476, -0.3535533905932738, -0.08838834764831845, 0.0736569563735987,
               0.031304206458779446, -0.022281229303013607, -0.011063888655284305, 0.0075027063449000465]

spin_pair = st.tuples(st.integers(1, 5), st.integers(1, 5))


def test_trivial_factor():
    t = cg_table(1, 0)
    assert set(t.entries) == {(2, m, m, 0) for m in (-2, 0, 2)}
    for m in (-2, 0, 2):
        c = t.coeff(2, m, m, 0)
        assert c.constant == 1.0 and not np.any(c.coeffs[1:])


def test_half_half_tables():
    cl = cg_table("1/2", "1/2", deformed=False)
    assert cl.coeff(2, 2, 1, 1).constant == 1.0
    q = cg_table("1/2", "1/2")
    assert_series(q.coeff(0, 0, 1, -1), SINGLET_PM)
    assert_series(q.coeff(0, 0, -1, 1), SINGLET_MP)
    assert_series(q.coeff(2, 0, 1, -1), TRIPLET0_PM)
    assert_series(q.coeff(2, 0, -1, 1), SINGLET_PM)
    # c(-,+) / c(+,-) = -q^-1
    ratio = q.coeff(0, 0, -1, 1) / q.coeff(0, 0, 1, -1)
    assert_series(ratio, -np.array([1, -1, 1 / 2, -1 / 6, 1 / 24, -1 / 120, 1 / 720, -1 / 5040]))


@pytest.mark.parametrize("two_j1,two_j2", list(itertools.product(range(1, 4), repeat=2)))
def test_classical_matches_condon_shortley(two_j1, two_j2):
    t = cg_table(SpinLabel(two_j1), SpinLabel(two_j2), deformed=False)
    for two_j, two_m in block_labels(two_j1, two_j2):
        for m1, m2 in itertools.product(range(-two_j1, two_j1 + 1, 2), range(-two_j2, two_j2 + 1, 2)):
            ref = float(CG(S(two_j1) / 2, S(m1) / 2, S(two_j2) / 2, S(m2) / 2,
                           S(two_j) / 2, S(two_m) / 2).doit())
            assert t.coeff(two_j, two_m, m1, m2).constant == pytest.approx(ref, abs=1e-14)


def test_classical_is_order_zero_of_deformed():
    for t1, t2 in itertools.product(range(1, 7), repeat=2):
        d, c = cg_matrix(t1, t2, True, 8), cg_matrix(t1, t2, False, 8)
        assert np.array_equal(d[0], c[0]) and not c[1:].any()


def test_symmetry_under_exchange():
    # CG(j1 j2 j; m1 m2 m) = CG(j2 j1 j; -m2 -m1 -m)
    for t1, t2 in ((1, 2), (2, 3), (1, 4)):
        a, b = cg_table(SpinLabel(t1), SpinLabel(t2)), cg_table(SpinLabel(t2), SpinLabel(t1))
        for (j, m, m1, m2), c in a.entries.items():
            assert c.allclose(b.coeff(j, -m, -m2, -m1), 1e-11)


@given(spin_pair)
def test_selection_rule_and_phase(pair):
    t = cg_table(SpinLabel(pair[0]), SpinLabel(pair[1]))
    for (j, m, m1, m2) in t.entries:
        assert m == m1 + m2
    for two_j in range(abs(pair[0] - pair[1]), sum(pair) + 1, 2):
        assert t.coeff(two_j, two_j, pair[0], two_j - pair[0]).constant > 0


@given(spin_pair)
def test_orthogonality_property(pair):
    c = cg_matrix(*pair, True, 8)
    prod = series_matmul(c.transpose(0, 2, 1), c)
    prod[0] -= np.eye(c.shape[1])
    assert np.abs(prod).max() < 1e-9


def test_integrity_small():
    with session(order=6):
        assert check_cg_orthogonality(3) < 1e-10
        assert check_cg_intertwiner(3) < 1e-10


def test_apply():
    t = cg_table("1/2", "1/2")
    top = cg_apply(t, "reduce", np.array([0, 0, 0, 1.0]))
    assert np.allclose(top[0], [0, 0, 0, 1]) and np.abs(top[1:]).max() < 1e-15
    mixed = cg_apply(t, "reduce", np.array([0, 1.0, 0, 0]))
    # columns (0,0), (1,-1), (1,0), (1,1)
    assert not np.any(mixed[:, [1, 3]])
    norm = series_mul(mixed[:, 0], mixed[:, 0]) + series_mul(mixed[:, 2], mixed[:, 2])
    assert_series(norm, [1, 0, 0, 0, 0, 0, 0, 0])
    rng = np.random.default_rng(3)
    v = rng.standard_normal((8, 6))
    t2 = cg_table(1, "1/2")
    assert np.abs(cg_apply(t2, "reduce", cg_apply(t2, "embed", v)) - v).max() < 1e-12
    with pytest.raises(DimensionMismatch):
        cg_apply(t2, "reduce", np.zeros(5))
    with pytest.raises(ValueError):
        cg_apply(t2, "sideways", v)


def test_exports():
    t = cg_table("1/2", "1/2")
    csv_text = t.to_csv().splitlines()
    assert csv_text[0].startswith("two_j,two_m,two_m1,two_m2,c0")
    assert len(csv_text) == 1 + len(t.entries)
    js = t.to_json()
    assert js["two_j1"] == 1 and len(js["entries"]) == len(t.entries)
    with pytest.raises(KeyError):
        t.block(4)

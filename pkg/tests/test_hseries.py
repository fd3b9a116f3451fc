import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import assert_series
from qtwist.errors import NegativeFactorial, NoRealSqrt, NotInvertible
from qtwist.hseries import (HSeries, exp_h, get_order, get_tol, qbinom_qm2, qfact, qnum,
                            series_arith, series_inv, series_sqrt, session, smat_inv)

coeff = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def series(order=8, unit=False):
    head = st.floats(0.5, 3) if unit else coeff
    return st.tuples(head, st.lists(coeff, min_size=order - 1, max_size=order - 1)).map(
        lambda t: HSeries([t[0], *t[1]], order=order))


def test_defaults_and_session():
    assert get_order() == 8 and get_tol() == 1e-9
    with session(order=3, tol=1e-6):
        assert get_order() == 3 and get_tol() == 1e-6
        assert exp_h(1).order == 3
    assert get_order() == 8


def test_session_rejects_bad_values():
    with pytest.raises(ValueError):
        with session(order=0):
            pass
    with pytest.raises(ValueError):
        with session(tol=-1.0):
            pass


def test_arith_examples():
    one = HSeries.const(1.0)
    s = HSeries([1, 2, 3])
    assert series_arith(one, s, "mul").allclose(s)
    h = HSeries.hbar()
    top = HSeries([0] * 7 + [1.0])
    assert series_arith(top, h, "mul") == HSeries.const(0.0)
    assert_series(series_arith(1 + h, 1 - h, "mul"), [1, 0, -1, 0, 0, 0, 0, 0], 0)
    assert_series(series_arith(s, 2.0, "scale"), [2, 4, 6], 0)
    with pytest.raises(ValueError):
        series_arith(s, s, "pow")


def test_mixed_orders_truncate():
    a, b = HSeries([1, 1, 1, 1]), HSeries([1, 1])
    assert (a + b).order == 2 and (a * b).order == 2


def test_inverse_examples():
    assert series_inv(HSeries.const(1.0)) == HSeries.const(1.0)
    assert_series(series_inv(1 + HSeries.hbar()), [1, -1, 1, -1, 1, -1, 1, -1], 0)
    assert series_inv(HSeries.const(2.0)).allclose(0.5)
    with pytest.raises(NotInvertible):
        series_inv(HSeries.hbar())


def test_sqrt_examples():
    assert series_sqrt(HSeries.const(1.0)) == HSeries.const(1.0)
    assert_series(series_sqrt(1 + HSeries.hbar()), [1, 0.5, -0.125, 0.0625])
    assert series_sqrt(HSeries.const(4.0)).allclose(2.0)
    with pytest.raises(NoRealSqrt):
        series_sqrt(HSeries([-1.0, 1.0]))


def test_exp_examples():
    assert exp_h(0) == HSeries.const(1.0)
    assert_series(exp_h(0.5), [1, 0.5, 0.125, 1 / 48])
    assert (exp_h(1) * exp_h(-1)).allclose(1.0, tol=1e-15)


# q-number coefficients from the closed forms, expanded symbolically
Q3 = [3.0, 0.0, 4.0, 0.0, 4 / 3, 0.0, 0.17777777777777778, 0.0]
QFACT3 = [6.0, 0.0, 11.0, 0.0, 6.916666666666667, 0.0, 2.0305555555555554, 0.0]


def test_qnumbers():
    assert qnum(1) == HSeries.const(1.0)
    assert_series(qnum(2), [2, 0, 1, 0, 1 / 12, 0, 1 / 360, 0])
    assert_series(qnum(3), Q3)
    assert_series(qfact(3), QFACT3)
    assert qfact(3).constant == 6
    assert qnum(0) == HSeries.const(0.0)
    with pytest.raises(NegativeFactorial):
        qfact(-1)


def test_qbinomials():
    for n in range(5):
        assert qbinom_qm2(n, 0) == HSeries.const(1.0)
    # 1 + exp(-2 hbar)
    assert_series(qbinom_qm2(2, 1), [2, -2, 2, -4 / 3, 2 / 3])
    assert qbinom_qm2(2, 3) == HSeries.const(0.0)
    assert qbinom_qm2(2, -1) == HSeries.const(0.0)


def test_smat_inv():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((6, 3, 3))
    a[0] += 3 * np.eye(3)
    inv = smat_inv(a)
    from qtwist.kernels import series_matmul
    prod = series_matmul(a, inv)
    assert np.abs(prod[0] - np.eye(3)).max() < 1e-12 and np.abs(prod[1:]).max() < 1e-12


def test_json_round_trip():
    s = HSeries([1.0, -0.5, 0.25])
    assert HSeries.from_json(s.to_json()) == s


@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert ((a * b) * c).allclose(a * (b * c), 1e-9)
    assert (a * (b + c)).allclose(a * b + a * c, 1e-9)
    assert (a * b).allclose(b * a, 1e-12)


@given(series(unit=True))
def test_inverse_and_sqrt(a):
    assert (a * a.inv()).allclose(1.0, 1e-6)
    r = a.sqrt()
    assert (r * r).allclose(a, 1e-6)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_exp_group_law(x, y):
    assert (exp_h(x) * exp_h(y)).allclose(exp_h(x + y), 1e-10)


@given(st.integers(1, 6))
def test_qnumber_symmetry(n):
    # [n] = (q^n - q^-n) / (q - q^-1)
    lhs = qnum(n) * (exp_h(1) - exp_h(-1))
    assert lhs.allclose(exp_h(n) - exp_h(-n), 1e-9)

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import qscalars
from qdeform.fieldcalc import (FieldElem, NotInImageError, X, calculus_residuals, definite_integral,
                               evaluate_on_lattice, grad_inverse, grad_inverse_series, homomorphism_residual,
                               jackson_product, l_shift, nabla, operator_algebra_residuals, parse_field,
                               random_pairs, render_field)
from qdeform.qarith import LAM, Q, eval_at, q_pow, qnum


def test_nabla_on_monomials():
    assert nabla(X(5)) == X(4) * qnum(5)
    assert nabla(FieldElem.constant(7)).is_zero()
    assert nabla(X(-2)) == X(-3) * (-(Q + q_pow(-1)))


def test_scaling_map():
    assert l_shift(X(2), 1) == X(2) * q_pow(-2)
    f = X(3) + X(-1) * 2
    assert l_shift(f, 0) == f
    assert l_shift(X(-1), -1) == X(-1) * q_pow(-1)


def test_grad_inverse():
    assert grad_inverse(X(3)) == X(4) * qnum(4).inverse()
    assert grad_inverse(FieldElem()).is_zero()
    with pytest.raises(NotInImageError):
        grad_inverse(X(-1))


def test_grad_inverse_matches_geometric_series():
    f = X(2) * 3 + X(-3)
    num = grad_inverse_series(f, terms=400, q0=1.5)
    exact = grad_inverse(f)
    for k, v in num.items():
        assert v == pytest.approx(eval_at(exact[k], 1.5), rel=1e-12)


@pytest.mark.parametrize("n", [0, 1, 3, -3])
def test_definite_integral_of_power(n):
    N, M = -2, 3
    got = definite_integral(X(n), 2 * N, 2 * M)
    assert got == (q_pow(2 * M * (n + 1)) - q_pow(2 * N * (n + 1))) / qnum(n + 1)


def test_definite_integral_of_inverse_x():
    assert definite_integral(X(-1), -4, 6, allow_inverse_x=True) == LAM * 5
    assert definite_integral(FieldElem(), 0, 4).is_zero()
    with pytest.raises(ValueError):
        definite_integral(X(1), 0, 3)


def test_definite_integral_numeric_agrees():
    f = X(2) - X(-2) * 3
    assert definite_integral(f, -3, 5, q0=1.3) == pytest.approx(eval_at(definite_integral(f, -3, 5), 1.3))


def test_jackson_product():
    q0 = 1.1
    lam = q0 - 1 / q0
    expect = lam * 2 * sum(q0 ** (3 * n) for n in range(-10, 11))
    assert jackson_product(X(1), X(1), q0).real == pytest.approx(expect, rel=1e-13)
    f, g = X(2) + X(-1) * Q, X(1) * 2 - X(0)
    assert jackson_product(f, g, q0) == pytest.approx(jackson_product(g, f, q0).conjugate())
    assert jackson_product(f, f, q0).real > 0


def test_render_parse_round_trip():
    f = X(3) * qnum(2) - X(-2) * Fraction(1, 3) + FieldElem.constant(LAM)
    assert parse_field(render_field(f)) == f


def test_calculus_identities_on_random_pairs():
    for f, g in random_pairs(25, seed=7):
        res = calculus_residuals(f, g)
        assert all(v.is_zero() for v in res.values()), [k for k, v in res.items() if not v.is_zero()]


@given(st.integers(-10, 10))
def test_homomorphism_and_operator_algebra(m):
    assert homomorphism_residual(m).is_zero()
    assert all(v.is_zero() for v in operator_algebra_residuals(m).values())


@given(st.dictionaries(st.integers(-8, 8), qscalars(), max_size=3),
       st.dictionaries(st.integers(-8, 8), qscalars(), max_size=3))
def test_leibniz_property(fc, gc):
    f, g = FieldElem(fc), FieldElem(gc)
    lhs = nabla(f * g)
    assert lhs == nabla(f) * l_shift(g, -1) + l_shift(f, 1) * nabla(g)
    assert lhs == nabla(f) * l_shift(g, 1) + l_shift(f, -1) * nabla(g)


@given(st.integers(-6, 6), st.integers(-6, 6))
def test_lattice_evaluation(k, label):
    assert evaluate_on_lattice(X(k), label) == q_pow(k * label)

import csv

import mpmath
import pytest
from hypothesis import given, strategies as st

from qdeform.qarith import LAM, ONE, Q, ZERO, q_pow, qfact
from qdeform.qspecial import (fig12_property, fig12_rows, laplacian_eigenvalue, pythagoras_coeff,
                              pythagoras_coeff_binomial, pythagoras_coeff_direct, recurrence_residuals,
                              trig_coeff, trig_eigen_residual, trig_eval, trig_lattice, trig_series,
                              write_fig12_csv)


def _series_oracle(kind, x, q, terms=80, k=None):
    """Direct high-precision partial sum with q-numbers built from scratch.

    With k given the point is q^k formed at working precision.
    """
    with mpmath.workdps(300):
        q = mpmath.mpf(q)
        x = q ** k if k is not None else mpmath.mpf(x)
        lam = q - 1 / q
        qn = lambda m: (q ** m - q ** -m) / lam
        total, fact = mpmath.mpf(0), mpmath.mpf(1)
        for k in range(terms):
            if kind == "cos":
                if k:
                    fact *= qn(2 * k - 1) * qn(2 * k)
                total += (-1) ** k * q ** -k * x ** (2 * k) / (fact * lam ** (2 * k))
            else:
                fact *= qn(2 * k + 1) * (qn(2 * k) if k else 1)
                total += (-1) ** k * q ** (k + 1) * x ** (2 * k + 1) / (fact * lam ** (2 * k + 1))
        return float(total)


def test_first_coefficients():
    assert trig_coeff("cos", 0) == ONE
    assert trig_coeff("sin", 0) == Q / LAM
    assert trig_coeff("cos", 2) == q_pow(-2) / (qfact(4) * LAM ** 4)


def test_numeric_values_at_the_origin():
    assert trig_eval("cos", 0.0, 1.1) == 1.0
    assert trig_eval("sin", 0.0, 1.1) == 0.0


@pytest.mark.parametrize("kind,x", [("cos", 1.0), ("sin", 1.0), ("cos", 0.37), ("sin", 2.5)])
def test_series_matches_independent_sum(kind, x):
    assert trig_eval(kind, x, 1.1) == pytest.approx(_series_oracle(kind, x, 1.1), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("k", [-6, 0, 9, 30])
def test_lattice_values_match_independent_sum(k):
    for kind in ("cos", "sin"):
        v = trig_lattice(kind, k, 1.1)
        assert v == pytest.approx(_series_oracle(kind, None, 1.1, terms=300, k=k), rel=1e-9, abs=1e-12)


def test_cos_at_one_frozen():
    # frozen from the independent sum above
    assert trig_eval("cos", 1.0, 1.1) == pytest.approx(_series_oracle("cos", 1.0, 1.1), rel=1e-14)


def test_pythagoras_identity():
    assert pythagoras_coeff(0) == ONE
    for n in range(1, 21):
        assert pythagoras_coeff(n) == ZERO


@pytest.mark.parametrize("n", [1, 2, 5])
def test_pythagoras_three_ways_agree(n):
    assert pythagoras_coeff_direct(n) == pythagoras_coeff_binomial(n) == pythagoras_coeff(n)


def test_recurrences_hold_exactly():
    assert recurrence_residuals(30) == {"sin_to_cos": [], "cos_to_sin": [], "factor": []}


@pytest.mark.parametrize("kind", ["cos", "sin"])
@pytest.mark.parametrize("k", [0, 1, 2, -1])
def test_laplacian_eigenfunctions(kind, k):
    assert trig_eigen_residual(kind, q_pow(k), degree_cap=20).is_zero()


def test_laplacian_eigenvalues():
    assert laplacian_eigenvalue("cos", ONE) == -ONE / (Q * LAM ** 2)
    assert laplacian_eigenvalue("sin", ONE) == -Q / LAM ** 2


def test_series_truncation_respects_cap():
    s = trig_series("sin", 9)
    assert max(s.coeffs) == 9 and min(s.coeffs) == 1


def test_fig12_property_and_csv(tmp_path):
    prop = fig12_property(1.1)
    assert prop["ok"]
    assert prop["max_tail_beyond_cutoff"] < 1e-12
    assert prop["first_divergent_odd_n"] <= 40
    p = tmp_path / "f.csv"
    write_fig12_csv(p, 1.1, -20, 20)
    rows = list(csv.reader(open(p)))
    assert rows[0] == ["n", "x", "cos_q", "sin_q"] and len(rows) == 42
    assert len(fig12_rows(1.1, -20, 20)) == 41


@given(st.floats(0.0, 4.0))
def test_parity(x):
    assert trig_eval("cos", -x, 1.1) == trig_eval("cos", x, 1.1)
    assert trig_eval("sin", -x, 1.1) == -trig_eval("sin", x, 1.1)

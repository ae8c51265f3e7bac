from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qdeform import latrep as lr
from qdeform.qarith import CQScalar, LAM, QScalar, q_pow

Q0 = 1.1
W60 = lr.Window(-60, 60)


def test_window_validation():
    with pytest.raises(ValueError):
        lr.Window(3, 3)
    with pytest.raises(ValueError):
        lr.Window(-3, 3, sigma_set=(2,))
    with pytest.raises(ValueError):
        lr.Window(-3, 3, s=Fraction(1, 2))
    with pytest.raises(ValueError):
        lr.build_ops(lr.Window(-3, 3, s=Fraction(3, 2)), Q0)


def test_exact_matrix_elements():
    w = lr.Window(-4, 4)
    x, L, p = lr.build_ops(w, mode="exact")
    for n in range(-4, 4):
        for sg in (1, -1):
            assert x.entries[(n, sg), (n, sg)] == CQScalar(QScalar(sg) * q_pow(n))
            assert L.entries[(n + 1, sg), (n, sg)] == CQScalar(1)
            want = CQScalar(0, -1) * CQScalar(QScalar(sg) * q_pow(-n) * q_pow(Fraction(-1, 2)) / LAM)
            assert p.entries[(n, sg), (n + 1, sg)] == want


@pytest.mark.parametrize("s", [Fraction(1), Fraction(3, 2), Fraction(5, 4)])
def test_exact_algebra(s):
    x, L, p = lr.build_ops(lr.Window(-6, 6, s=s), mode="exact")
    assert all(v.is_zero() for v in lr.algebra_residual(x, L, p).values())


def test_numeric_algebra_interior_and_boundary():
    w = lr.Window(-20, 20)
    x, L, p = lr.build_ops(w, Q0)
    res = lr.algebra_residual_numeric(x, L, p, Q0)
    assert max(res.values()) < 1e-12 * max(1.0, Q0 ** 20)
    # nearest-neighbour operators: the edge rows close as well
    assert lr.boundary_residual_numeric(x, L, p, Q0) < 1e-12 * Q0 ** 20


@pytest.mark.parametrize("family", ["I", "II"])
@pytest.mark.parametrize("tau", [1, -1])
def test_momentum_eigenstates(family, tau):
    _, _, p = lr.build_ops(W60, Q0)
    P = p.to_sparse()
    for nu in (-2, 0, 2):
        for red in (False, True):
            st_ = lr.momentum_state(tau, nu, family, red, W60, Q0, tail_tol=None)
            ev = lr.p_eigenvalue(family, tau, nu, Q0)
            assert lr.eigen_residual(P, st_, ev) < 1e-6


def test_wrong_eigenvalue_is_detected():
    _, _, p = lr.build_ops(W60, Q0)
    st_ = lr.momentum_state(1, 0, "I", True, W60, Q0, tail_tol=None)
    wrong = lr.p_eigenvalue("I", 1, 1, Q0)
    assert lr.eigen_residual(p, st_, wrong, q0=Q0) > 0.1


def test_x_basis_vector_residual_is_zero():
    w = lr.Window(-5, 5)
    x, _, _ = lr.build_ops(w, Q0)
    idx = w.index()
    v = np.zeros(len(idx), dtype=complex)
    v[idx[2, -1]] = 1
    assert lr.eigen_residual(x.to_sparse(), v, -Q0 ** 2) == 0


def test_eigenvalue_formulas():
    lam = Q0 - 1 / Q0
    assert lr.p_eigenvalue("I", -1, 2, Q0, s=Fraction(1)) == pytest.approx(-Q0 ** 4 / (lam * Q0 ** 0.5))
    assert lr.p_eigenvalue("II", 1, 2, Q0) == pytest.approx(Q0 ** 3 / (lam * Q0 ** 0.5))
    assert lr.h_eigenvalue("I", 1, Q0) == pytest.approx(lr.p_eigenvalue("I", 1, 1, Q0) ** 2 / 2)


def test_lambda_maps_families():
    for nu in (-1, 0, 1):
        for tau in (1, -1):
            assert max(lr.lambda_map_residuals(nu, tau, W60, Q0).values()) < 1e-6


def test_small_window_rejected():
    with pytest.raises(lr.WindowTooSmallError):
        lr.momentum_state(1, 0, "I", True, lr.Window(-10, 10), Q0)


def test_reducible_basis_is_orthonormal():
    assert lr.reducible_gram_deviation(lr.Window(-300, 100), Q0) < 1e-6


def test_hamiltonian_and_ratio():
    rows = lr.hamiltonian_check(W60, Q0, nus=(-1, 0, 1))
    assert max(r["residual"] for r in rows) < 1e-6
    ev = {(r["family"], r["nu"], r["tau"]): r["eigenvalue"] for r in rows}
    assert ev["I", 0, 1] == ev["I", 0, -1]
    assert ev["I", 1, 1] / ev["I", 0, 1] == pytest.approx(Q0 ** 4, rel=1e-14)


@given(st.sampled_from([1, -1]), st.integers(-3, 3))
def test_expectation_of_x_is_positive_in_one_sector(sigma, nu):
    st_ = lr.momentum_state(1, nu, "I", False, W60, Q0, sigma=sigma, tail_tol=None)
    assert lr.sector_moment(st_, sigma, Q0) > 0


def test_spectrum_json(tmp_path):
    rows = lr.spectrum_report(W60, Q0, nus=(0,))
    lr.write_spectrum_json(tmp_path / "s.json", rows)
    assert len(rows) == 4 and all(r["residual"] < 1e-6 for r in rows)

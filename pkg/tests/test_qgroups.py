from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qdeform import qgroups as qg
from qdeform.ncalg import load_fixture, normal_order, pbw_overlap_check
from qdeform.qarith import LAM, ONE, Q, q_pow
from qdeform.rmatrix import SMat, ybe_residual

H = Fraction(1, 2)
JS = (H, Fraction(1), Fraction(3, 2), Fraction(2), Fraction(4))


def test_spin_half_matrices():
    r = qg.suq2_rep(H, 1.1)
    assert float(r.Tplus[1, 0]) == pytest.approx(1 / 1.1, rel=1e-15)
    assert float(r.Tminus[0, 1]) == pytest.approx(1.1, rel=1e-15)


def test_spin_one_t3():
    r = qg.suq2_rep(1, 1.5)
    assert float(r.T3[0, 0]) == pytest.approx(-1.5 * (1 + 1.5 ** 2), rel=1e-15)
    assert qg.t3_exact(Fraction(-1)) == -Q * (ONE + Q * Q)


def test_trivial_representation():
    r = qg.suq2_rep(0, 1.3)
    assert not r.T3.any() and not r.Tplus.any() and not r.Tminus.any()
    assert float(r.tau[0, 0]) == 1


def test_matrix_shapes():
    r = qg.suq2_rep(Fraction(3, 2), 1.2)
    assert np.allclose(np.triu(r.Tplus), 0) and np.allclose(np.tril(r.Tminus), 0)
    with pytest.raises(ValueError):
        qg.suq2_rep(Fraction(1, 3), 1.1)


@pytest.mark.parametrize("q0", [1.1, 1.5])
@pytest.mark.parametrize("j", JS)
def test_algebra_tau_casimir(j, q0):
    res = qg.suq2_residuals(qg.suq2_rep(j, q0))
    assert max(res.values()) < 1e-10, res


def test_spin_half_tight():
    assert max(qg.suq2_residuals(qg.suq2_rep(H, 1.1)).values()) < 1e-12


def test_casimir_value():
    r = qg.suq2_rep(2, 1.5)
    q = 1.5
    qn = lambda n: (q ** n - q ** -n) / (q - 1 / q)
    assert np.allclose(qg.casimir_diagonal(r).astype(float), q * qn(2) * qn(3), rtol=1e-12)


def test_classical_limit():
    for j in JS:
        assert qg.classical_residual(j) < 1e-12


def test_exact_radical_free_identities():
    for j in JS:
        assert all(all(x.is_zero() for x in v) for v in qg.suq2_exact_residuals(j).values())


@pytest.mark.parametrize("pair,q0", [((H, H), 1.1), ((H, 1), 1.5), ((2, 4), 1.5)])
def test_coproduct(pair, q0):
    tol = 1e-12 if max(pair) < 2 else 1e-10
    assert qg.coproduct_residual(*pair, q0) < tol


def test_coproduct_with_trivial_factor():
    single = max(qg.algebra_residuals(*[getattr(qg.suq2_rep(1, 1.3), k) for k in ("T3", "Tplus", "Tminus")],
                                      1.3).values())
    assert qg.coproduct_residual(0, 1, 1.3) == pytest.approx(single, abs=1e-15)


@given(st.sampled_from(JS), st.sampled_from(JS), st.floats(1.05, 1.6))
def test_coproduct_property(j1, j2, q0):
    assert qg.coproduct_residual(j1, j2, q0) < 1e-9


def test_explicit_tables():
    assert qg.compare_explicit_table(H) == []
    assert qg.compare_explicit_table(1) == []


def test_plane_covariance():
    assert set(qg.suq2_plane_covariance().values()) == {"0"}


def test_plane_invariant_not_trivial():
    S = load_fixture("suq2_plane")
    A = S.alphabet
    z = A.mono("x1", "x2") - A.mono("x2", "x1", c=Q)
    assert not normal_order(A.gen("Tp") * A.gen("x1") - A.gen("x1") * A.gen("Tp"), S).is_zero()
    assert not z.is_zero()


# SO_q(3)

ST = qg.so3_build()


def test_metric_and_epsilon_tables():
    eta = qg.metric_lower()
    m, z, p = 0, 1, 2
    assert eta.get(z, z) == ONE and eta.get(p, m) == -q_pow(-1) and eta.get(m, p) == -Q
    eps = qg.epsilon_mixed()
    M, Z, P = 1, 2, 3
    assert eps[P, M, Z] == Q and eps[M, P, Z] == -Q and eps[Z, Z, Z] == ONE - Q * Q
    assert eps[P, Z, P] == ONE and eps[Z, P, P] == -Q * Q
    assert eps[M, Z, M] == -Q * Q and eps[Z, M, M] == ONE
    assert len(eps) == 7


def test_metric_contraction():
    assert qg.metric_upper().transpose() @ qg.metric_lower() == SMat.identity(3)


def test_so3_structure():
    checks = qg.so3_checks(ST)
    assert checks["multiplicities"] == (5, 3, 1)
    for k in ("characteristic", "idempotent", "orthogonal", "complete", "decomposition",
              "p1_metric", "p3_epsilon", "ybe", "factored_p5"):
        assert checks[k], k


def test_so3_yang_baxter():
    assert ybe_residual(ST.Rhat) == 0


def test_q_weighted_bispinor_does_not_close():
    with pytest.raises(qg.ClosureError):
        qg.build_so3_rmatrix(Q)


def test_euclidean_space():
    res = qg.euclid3_system(ST)
    assert qg.failures(res) == []
    assert res["pbw_x_d"] == [] and res["x_fixture"]


def test_x_relations_explicit():
    xs, base, _ = qg.euclid_systems(ST.Rhat)
    A = xs.alphabet
    rel = A.mono("Xm", "Xp") - A.mono("Xp", "Xm") - A.mono("X0", "X0", c=LAM)
    assert normal_order(rel, xs).is_zero()
    assert pbw_overlap_check(xs) == []


def test_report_rows(tmp_path):
    rows = qg.suq2_report(js=(H,), q0s=(1.1,))
    assert {r["check_name"] for r in rows} >= {"pm", "casimir", "tau_p"}
    qg.write_report(tmp_path / "r.json", rows)

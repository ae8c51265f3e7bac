"""su_q(2) representations and the three-dimensional q-Euclidean space SO_q(3).

Representation matrices carry square roots of q-numbers and are handled in
floating point; the radical-free data (T3, tau, T-T+, T+T-, the Casimir) are
also checked exactly.  The SO_q(3) R-matrix is built exactly from bispinors.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Tuple

import numpy as np

from .ncalg import (Alphabet, NCPoly, RewriteSystem, commutant_residual, format_poly, load_fixture,
                    normal_order, pbw_overlap_check)
from .qarith import LAM, ONE, Q, QScalar, ZERO, eval_at, q_pow, qnum
from .rmatrix import (RMatrix, SMat, certify_zero, multiplicity, r_gl, system_from_span,
                      ybe_residual)

# --------------------------------------------------------------------------
# su_q(2)


def _check_j(j) -> Fraction:
    j = Fraction(j)
    if j < 0 or (2 * j).denominator != 1:
        raise ValueError("j must be a non-negative half-integer")
    return j


def m_values(j) -> List[Fraction]:
    j = _check_j(j)
    return [-j + k for k in range(int(2 * j) + 1)]


@dataclass
class SuqRep:
    """Spin-j matrices in the ascending-m basis |j, -j>, ..., |j, j>."""

    j: Fraction
    q0: float
    T3: np.ndarray
    Tplus: np.ndarray
    Tminus: np.ndarray
    tau: np.ndarray
    exact_diag: Dict[str, List[QScalar]] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.T3.shape[0]


def raising_element(j, m) -> Tuple[QScalar, QScalar]:
    """T+ |j,m> = c sqrt(r) |j,m+1>, returned as (c, r)."""
    return q_pow(-m - Fraction(3, 2)), qnum(j + m + 1) * qnum(j - m)


def lowering_element(j, m) -> Tuple[QScalar, QScalar]:
    """T- |j,m> = c sqrt(r) |j,m-1>"""
    return q_pow(-m + Fraction(3, 2)), qnum(j + m) * qnum(j - m + 1)


def t3_exact(m) -> QScalar:
    return q_pow(-2 * Fraction(m)) * qnum(2 * Fraction(m))


def tau_exact(m) -> QScalar:
    return q_pow(-4 * Fraction(m))


# extended precision keeps absolute residuals small for large j, where
# matrix entries grow like q^(4j)
REAL = np.longdouble


def _qn(n, q):
    """[n] at a numeric q (n may be a half-integer)."""
    n = REAL(float(n))
    if q == 1:
        return n
    return (q ** n - q ** -n) / (q - 1 / q)


def suq2_rep(j, q0: float) -> SuqRep:
    j = _check_j(j)
    if not q0 > 0:
        raise ValueError("q0 must be positive")
    q = REAL(q0)
    ms = m_values(j)
    d = len(ms)
    T3 = np.zeros((d, d), dtype=REAL)
    tau = np.zeros((d, d), dtype=REAL)
    Tp = np.zeros((d, d), dtype=REAL)
    Tm = np.zeros((d, d), dtype=REAL)
    for a, m in enumerate(ms):
        mf = REAL(float(m))
        T3[a, a] = q ** (-2 * mf) * _qn(2 * m, q)
        tau[a, a] = q ** (-4 * mf)
        if a + 1 < d:
            Tp[a + 1, a] = q ** (-mf - REAL(1.5)) * np.sqrt(_qn(j + m + 1, q) * _qn(j - m, q))
        if a > 0:
            Tm[a - 1, a] = q ** (-mf + REAL(1.5)) * np.sqrt(_qn(j + m, q) * _qn(j - m + 1, q))
    exact = {"T3": [t3_exact(m) for m in ms], "tau": [tau_exact(m) for m in ms]}
    return SuqRep(j, float(q0), T3, Tp, Tm, tau, exact)


def _maxabs(M) -> float:
    return float(np.max(np.abs(M))) if M.size else 0.0


def _num(q0):
    return REAL(q0)


def algebra_residuals(T3, Tp, Tm, q0: float) -> Dict[str, float]:
    """The three defining relations of sl_q(2), as max-abs matrix residuals."""
    q0 = _num(q0)
    s = q0 + 1 / q0
    return {
        "pm": _maxabs(Tp @ Tm / q0 - q0 * Tm @ Tp - T3),
        "3p": _maxabs(q0 ** 2 * T3 @ Tp - Tp @ T3 / q0 ** 2 - s * Tp),
        "3m": _maxabs(T3 @ Tm / q0 ** 2 - q0 ** 2 * Tm @ T3 + s * Tm),
    }


def casimir_matrix(rep: SuqRep) -> np.ndarray:
    q0 = _num(rep.q0)
    lam = q0 - 1 / q0
    d = np.diag(rep.tau)
    tau_mhalf = np.diag(d ** -0.5)
    tau_half = np.diag(d ** 0.5)
    I = np.eye(rep.dim, dtype=REAL)
    return (q0 ** 2 * (rep.Tminus @ rep.Tplus + I / lam ** 2) @ tau_mhalf
            + (tau_half - I - q0 ** 2 * I) / lam ** 2)


def suq2_residuals(rep: SuqRep) -> Dict[str, float]:
    """Max residuals of algebra, tau, Casimir and conjugation relations.

    The Casimir and tau-definition checks need q0 != 1; at q0 = 1 only the
    algebra and scaling checks are returned.
    """
    q0 = _num(rep.q0)
    out = algebra_residuals(rep.T3, rep.Tplus, rep.Tminus, rep.q0)
    out["tau_p"] = _maxabs(rep.tau @ rep.Tplus - rep.Tplus @ rep.tau / q0 ** 4)
    out["tau_m"] = _maxabs(rep.tau @ rep.Tminus - q0 ** 4 * rep.Tminus @ rep.tau)
    out["conj_3"] = _maxabs(rep.T3.conj().T - rep.T3)
    out["conj_p"] = _maxabs(rep.Tplus.conj().T - rep.Tminus / q0 ** 2)
    if q0 != 1:
        lam = q0 - 1 / q0
        out["tau_def"] = _maxabs(rep.tau - (np.eye(rep.dim, dtype=REAL) - lam * rep.T3))
        cas = q0 * _qn(rep.j, q0) * _qn(rep.j + 1, q0)
        out["casimir"] = _maxabs(casimir_matrix(rep) - cas * np.eye(rep.dim, dtype=REAL))
    return out


def casimir_diagonal(rep: SuqRep) -> np.ndarray:
    return np.diag(casimir_matrix(rep)).copy()


def classical_residual(j) -> float:
    """At q0 = 1: T3 -> 2 j3, T+- -> j+-, so [j+, j-] - 2 j3 = [T+, T-] - T3."""
    rep = suq2_rep(j, 1.0)
    return _maxabs(rep.Tplus @ rep.Tminus - rep.Tminus @ rep.Tplus - rep.T3)


def suq2_exact_residuals(j) -> Dict[str, List[QScalar]]:
    """Radical-free identities per basis state, exact over Q(q^1/2)."""
    j = _check_j(j)
    cas = Q * qnum(j) * qnum(j + 1)
    lam2inv = (LAM * LAM).inverse()
    out: Dict[str, List[QScalar]] = {"pm": [], "casimir": [], "tau_def": []}
    for m in m_values(j):
        # T- T+ |m> and T+ T- |m> diagonal entries
        mpm = ZERO
        if m < j:
            c1, r1 = raising_element(j, m)
            c2, r2 = lowering_element(j, m + 1)
            mpm = c1 * c2 * r1  # r1 == r2
            assert r1 == r2
        ppm = ZERO
        if m > -j:
            c1, r1 = lowering_element(j, m)
            c2, r2 = raising_element(j, m - 1)
            ppm = c1 * c2 * r1
        out["pm"].append(ppm * q_pow(-1) - Q * mpm - t3_exact(m))
        out["tau_def"].append(tau_exact(m) - (ONE - LAM * t3_exact(m)))
        c = Q * Q * (mpm + lam2inv) * q_pow(2 * m) + lam2inv * (q_pow(-2 * m) - ONE - Q * Q)
        out["casimir"].append(c - cas)
    return out


def coproduct_ops(r1: SuqRep, r2: SuqRep):
    """Delta(T3) = T3 x 1 + tau x T3, Delta(T+-) = T+- x 1 + tau^1/2 x T+-."""
    if r1.q0 != r2.q0:
        raise ValueError("both representations need the same q0")
    I2 = np.eye(r2.dim, dtype=REAL)
    th = np.diag(np.diag(r1.tau) ** 0.5)
    D3 = np.kron(r1.T3, I2) + np.kron(r1.tau, r2.T3)
    Dp = np.kron(r1.Tplus, I2) + np.kron(th, r2.Tplus)
    Dm = np.kron(r1.Tminus, I2) + np.kron(th, r2.Tminus)
    return D3, Dp, Dm


def coproduct_residual(j1, j2, q0: float) -> float:
    r1, r2 = suq2_rep(j1, q0), suq2_rep(j2, q0)
    D3, Dp, Dm = coproduct_ops(r1, r2)
    return max(algebra_residuals(D3, Dp, Dm, q0).values())


# explicit spin-1/2 and spin-1 tables: entries c * sqrt(r) keyed by (op, m_from)
_H = Fraction(1, 2)
_S = ONE + Q * Q
EXPLICIT_TABLES = {
    Fraction(1, 2): {
        ("+", -_H): (q_pow(-1), ONE), ("-", _H): (Q, ONE),
        ("3", -_H): (-Q, ONE), ("3", _H): (q_pow(-1), ONE),
    },
    Fraction(1): {
        ("+", Fraction(-1)): (q_pow(-1), _S), ("+", Fraction(0)): (q_pow(-2), _S),
        ("-", Fraction(0)): (Q, _S), ("-", Fraction(1)): (ONE, _S),
        ("3", Fraction(-1)): (-Q * _S, ONE), ("3", Fraction(0)): (ZERO, ONE),
        ("3", Fraction(1)): (q_pow(-1) * (ONE + q_pow(-2)), ONE),
    },
}


def exact_elements(j) -> Dict[Tuple[str, Fraction], Tuple[QScalar, QScalar]]:
    j = _check_j(j)
    out = {}
    for m in m_values(j):
        if m < j:
            out["+", m] = raising_element(j, m)
        if m > -j:
            out["-", m] = lowering_element(j, m)
        out["3", m] = (t3_exact(m), ONE)
    return out


def compare_explicit_table(j) -> List[str]:
    """Entries where c^2 r (and the sign of c) disagree with the explicit table."""
    j = Fraction(j)
    table = EXPLICIT_TABLES[j]
    mine = exact_elements(j)
    bad = []
    for key in sorted(set(table) | set(mine), key=lambda k: (k[0], k[1])):
        c1, r1 = mine.get(key, (ZERO, ONE))
        c2, r2 = table.get(key, (ZERO, ONE))
        if c1 * c1 * r1 != c2 * c2 * r2 or eval_at(c1, 1.5) * eval_at(c2, 1.5) < 0:
            bad.append(f"{key[0]} m={key[1]}")
    return bad


def suq2_plane_covariance() -> Dict[str, List[str]]:
    """Commutators of the plane invariants with T3, T+, T- under the T-x rules."""
    out = {}
    for name, z_words, tag in (("suq2_plane", (("x1", "x2"), ("x2", "x1")), "plane"),
                               ("suq2_conj_plane", (("xb2", "xb1"), ("xb1", "xb2")), "conj_plane")):
        S = load_fixture(name)
        A = S.alphabet
        z = A.mono(*z_words[0]) - A.mono(*z_words[1], c=Q)
        res = commutant_residual(z, S, [A.gen(g) for g in ("T3", "Tp", "Tm")])
        for g, r in zip(("T3", "Tp", "Tm"), res):
            out[f"{tag}:{g}"] = format_poly(r, A)
    return out


# --------------------------------------------------------------------------
# SO_q(3)

VEC = ("-", "0", "+")   # index order; RMatrix indices 1, 2, 3


def _four_plane_system() -> RewriteSystem:
    """Planes u, v, x, y with w^i z^j = (1/q) R^{ij}_{kl} z^k w^l for w in {x, y}, z in {u, v}."""
    R = r_gl(2)
    names = ("u1", "u2", "v1", "v2", "x1", "x2", "y1", "y2")
    A = Alphabet(names)
    qi = q_pow(-1)
    rels = []
    for w, z in (("x", "u"), ("x", "v"), ("y", "u"), ("y", "v")):
        for i, j in product((1, 2), repeat=2):
            p = A.mono(f"{w}{i}", f"{z}{j}")
            for k, l in product((1, 2), repeat=2):
                v = R(i, j, k, l)
                if not v.is_zero():
                    p = p - A.mono(f"{z}{k}", f"{w}{l}", c=qi * v)
            rels.append(p)
    return system_from_span(A, rels)


def _bispinor(A: Alphabet, a: str, b: str, c0: QScalar) -> List[NCPoly]:
    """Unnormalized components (X-, X0', X+) of the product of planes a, b; X0' = a1 b2 + c0 a2 b1."""
    return [A.mono(f"{a}1", f"{b}1"),
            A.mono(f"{a}1", f"{b}2") + A.mono(f"{a}2", f"{b}1", c=c0),
            A.mono(f"{a}2", f"{b}2")]


class ClosureError(RuntimeError):
    pass


_PAIR = {1: ("1", "1"), 2: ("1", "2"), 3: ("2", "2")}


def _decompose_uvxy(p: NCPoly, A: Alphabet, cu: QScalar, cx: QScalar) -> Dict[Tuple[int, int], QScalar]:
    """Write p as sum c_CD Xt'^C X'^D (unnormalized bispinors).

    The span is cut out by coef(u2 v1 ..) = q coef(u1 v2 ..) and the same for
    the x, y indices; anything else would mean the product leaves the vector
    representation.
    """
    coef: Dict[Tuple[str, str, str, str], QScalar] = {}
    for w, c in p.terms.items():
        names = [A.names[k] for k in w]
        if [n[0] for n in names] != ["u", "v", "x", "y"]:
            raise ClosureError(f"unexpected word {' '.join(names)}")
        coef[tuple(n[1] for n in names)] = c
    get = lambda *k: coef.get(k, ZERO)
    for i, j in product("12", repeat=2):
        if get("2", "1", i, j) != cu * get("1", "2", i, j) or get(i, j, "2", "1") != cx * get(i, j, "1", "2"):
            raise ClosureError("product has a singlet component")
    out = {}
    for C, D in product((1, 2, 3), repeat=2):
        v = get(*_PAIR[C], *_PAIR[D])
        if not v.is_zero():
            out[C, D] = v
    return out


def build_so3_rmatrix(c0: Optional[QScalar] = None) -> RMatrix:
    """X^A Xt^B = R^{AB}_{CD} Xt^C X^D from the four-plane relations.

    X- = x1 y1, X0 = (x1 y2 + c0 x2 y1) / sqrt(1 + c0^2), X+ = x2 y2, and the
    same for Xt from u, v.  The default c0 = 1/q is the combination T+
    generates from x1 y1; other values leave the vector span (ClosureError).
    """
    c0 = q_pow(-1) if c0 is None else c0
    S = _four_plane_system()
    A = S.alphabet
    X = _bispinor(A, "x", "y", c0)
    Xt = _bispinor(A, "u", "v", c0)
    s = ONE + c0 * c0
    zeros = lambda a, b: (a == 2) + (b == 2)
    ents = {}
    for a, b in product((1, 2, 3), repeat=2):
        nf = normal_order(X[a - 1] * Xt[b - 1], S)
        for (c, d), v in _decompose_uvxy(nf, A, c0, c0).items():
            # undo the normalization: R = R' n_C n_D / (n_A n_B) with n_0^2 = s
            e = zeros(c, d) - zeros(a, b)
            if e % 2:
                raise ClosureError("odd number of normalization factors")
            ents[a, b, c, d] = v * (s ** (e // 2) if e >= 0 else s.inverse() ** (-e // 2))
    return RMatrix.from_function(3, lambda i, j, k, l: ents.get((i, j, k, l), ZERO))


def metric_lower() -> SMat:
    """eta_{AB}, index order (-, 0, +)."""
    return SMat(3, {0: {2: -Q}, 1: {1: ONE}, 2: {0: -q_pow(-1)}})


def metric_upper() -> SMat:
    """eta^{AB} with eta^{BA} eta_{BC} = delta^A_C"""
    return SMat(3, {0: {2: -q_pow(-1)}, 1: {1: ONE}, 2: {0: -Q}})


def epsilon_mixed() -> Dict[Tuple[int, int, int], QScalar]:
    """eps_{AB}^C as {(A, B, C): value}, indices 1..3 for (-, 0, +)."""
    m, z, p = 1, 2, 3
    return {(p, m, z): Q, (m, p, z): -Q, (z, z, z): ONE - Q * Q,
            (p, z, p): ONE, (z, p, p): -Q * Q,
            (m, z, m): -Q * Q, (z, m, m): ONE}


def epsilon_lower() -> Dict[Tuple[int, int, int], QScalar]:
    """eps_{ABC} = eps_{AB}^D eta_{DC}"""
    eta = metric_lower()
    out: Dict = {}
    for (a, b, d), v in epsilon_mixed().items():
        for c in (1, 2, 3):
            e = eta.get(d - 1, c - 1)
            if not e.is_zero():
                out[a, b, c] = out.get((a, b, c), ZERO) + v * e
    return {k: v for k, v in out.items() if not v.is_zero()}


def epsilon_upper() -> Dict[Tuple[int, int, int], QScalar]:
    """eps^{FAB} = eta^{FF'} eta^{AA'} eta^{BB'} eps_{F'A'B'}"""
    up = metric_upper()
    out: Dict = {}
    for (f1, a1, b1), v in epsilon_lower().items():
        for f, a, b in product((1, 2, 3), repeat=3):
            c = up.get(f - 1, f1 - 1) * up.get(a - 1, a1 - 1) * up.get(b - 1, b1 - 1)
            if not c.is_zero():
                out[f, a, b] = out.get((f, a, b), ZERO) + v * c
    return {k: v for k, v in out.items() if not v.is_zero()}


EIGENVALUES = {5: ONE, 3: -q_pow(-4), 1: q_pow(-6)}


def lagrange_projectors(R: RMatrix) -> Dict[int, SMat]:
    """P for each eigenvalue: prod_{mu != ev} (R - mu) / (ev - mu)."""
    out = {}
    for key, ev in EIGENVALUES.items():
        M = SMat.identity(9)
        for k2, mu in EIGENVALUES.items():
            if k2 != key:
                M = M @ R.mat.shift_diag(-mu).scale((ev - mu).inverse())
        out[key] = M
    return out


def factored_projectors(R: RMatrix) -> Dict[int, SMat]:
    """Two-factor projector formulas with fixed prefactors.

    P5 agrees with the interpolation projectors; P1 and P3 repeat an eigenvalue
    in their second factor and do not.  Kept for comparison.
    """
    q2, q4, q6 = Q ** 2, Q ** 4, Q ** 6
    M = R.mat
    P1 = (M.shift_diag(-ONE) @ M.shift_diag(q_pow(-6))).scale(Q ** 12 / ((ONE + q2) * (ONE - q6)))
    P3 = (M.shift_diag(-ONE) @ M.shift_diag(-q_pow(-4))).scale(Q ** 10 / ((ONE + q2) * (ONE + q4)))
    P5 = (M.shift_diag(q_pow(-4)) @ M.shift_diag(-q_pow(-6))).scale(Q ** 10 / ((q4 + ONE) * (q6 - ONE)))
    return {1: P1, 3: P3, 5: P5}


def p1_from_metric() -> SMat:
    """(P1)^{AB}_{CD} = q^2/(1+q^2+q^4) eta^{AB} eta_{DC}"""
    up, lo = metric_upper(), metric_lower()
    c = Q * Q / (ONE + Q ** 2 + Q ** 4)
    rows: Dict = {}
    for a, b, cc, d in product(range(3), repeat=4):
        v = up.get(a, b) * lo.get(d, cc)
        if not v.is_zero():
            rows.setdefault(3 * a + b, {})[3 * cc + d] = v * c
    return SMat(9, rows)


def p3_from_epsilon() -> SMat:
    """(P3)^{AB}_{CD} = 1/(1+q^4) eps^{FAB} eps_{FDC}"""
    up, lo = epsilon_upper(), epsilon_lower()
    c = (ONE + Q ** 4).inverse()
    rows: Dict = {}
    for (f, a, b), v in up.items():
        for (f2, d, cc), w in lo.items():
            if f2 == f:
                r, col = 3 * (a - 1) + b - 1, 3 * (cc - 1) + d - 1
                row = rows.setdefault(r, {})
                row[col] = row.get(col, ZERO) + v * w * c
    return SMat(9, rows)


@dataclass
class So3Structure:
    Rhat: RMatrix
    eta: SMat
    eta_up: SMat
    epsilon: Dict[Tuple[int, int, int], QScalar]
    projectors: Dict[int, SMat]


def so3_build(q_exact: bool = True) -> So3Structure:
    """Exact SO_q(3) data.  Only exact mode exists; the flag is kept for interface symmetry."""
    if not q_exact:
        raise ValueError("SO_q(3) construction is exact only")
    R = build_so3_rmatrix()
    return So3Structure(R, metric_lower(), metric_upper(), epsilon_mixed(), lagrange_projectors(R))


def so3_checks(st: So3Structure) -> Dict[str, object]:
    R = st.Rhat.mat
    I = SMat.identity(9)
    P = st.projectors
    char = R.shift_diag(-ONE) @ R.shift_diag(q_pow(-4)) @ R.shift_diag(-q_pow(-6))
    factored = factored_projectors(st.Rhat)
    out: Dict[str, object] = {
        "characteristic": char.is_zero(),
        "multiplicities": tuple(multiplicity(P[k]) for k in (5, 3, 1)),
        "idempotent": all(P[k] @ P[k] == P[k] for k in P),
        "orthogonal": all((P[a] @ P[b]).is_zero() for a in P for b in P if a != b),
        "complete": P[1] + P[3] + P[5] == I,
        "decomposition": P[5] - P[3].scale(q_pow(-4)) + P[1].scale(q_pow(-6)) == R,
        "p1_metric": P[1] == p1_from_metric(),
        "p3_epsilon": P[3] == p3_from_epsilon(),
        "metric_inverse": (st.eta_up.transpose() @ st.eta) == I.__class__.identity(3),
        "metric_inverse2": (st.eta_up @ st.eta.transpose()) == SMat.identity(3),
        "ybe": ybe_residual(st.Rhat) == 0,
        "factored_p5": factored[5] == P[5],
        "factored_p1": factored[1] == P[1],
        "factored_p3": factored[3] == P[3],
    }
    return out


# --------------------------------------------------------------------------
# Euclidean space with derivatives

_XN = ("Xm", "X0", "Xp")
_DN = ("dm", "d0", "dp")


def _euclid_alphabet() -> Alphabet:
    return Alphabet(("Li",) + _XN + _DN)


def x_relations(A: Alphabet) -> List[NCPoly]:
    """eps_{FDC} X^C X^D = 0 for F = -, 0, +."""
    eps = epsilon_lower()
    out = []
    for f in (1, 2, 3):
        p = NCPoly()
        for (f2, d, c), v in eps.items():
            if f2 == f:
                p = p + A.mono(_XN[c - 1], _XN[d - 1], c=v)
        out.append(p)
    return out


def dx_relations(A: Alphabet, R: RMatrix) -> List[NCPoly]:
    """d_B X^A - delta - q^4 R^{AC}_{BD} X^D d_C"""
    q4 = Q ** 4
    out = []
    for a, b in product((1, 2, 3), repeat=2):
        p = A.mono(_DN[b - 1], _XN[a - 1])
        if a == b:
            p = p - NCPoly.one()
        for c, d in product((1, 2, 3), repeat=2):
            v = R(a, c, b, d)
            if not v.is_zero():
                p = p - A.mono(_XN[d - 1], _DN[c - 1], c=q4 * v)
        out.append(p)
    return out


def dd_relations(A: Alphabet) -> List[NCPoly]:
    """eps^{FBA} d_A d_B = 0"""
    eps = epsilon_upper()
    out = []
    for f in (1, 2, 3):
        p = NCPoly()
        for (f2, b, a), v in eps.items():
            if f2 == f:
                p = p + A.mono(_DN[a - 1], _DN[b - 1], c=v)
        out.append(p)
    return out


def euclid_systems(R: RMatrix):
    """(X-only system, X-d system, X-d system with Li = Lambda^-1 adjoined)."""
    A = _euclid_alphabet()
    xs = system_from_span(A, x_relations(A))
    base = system_from_span(A, x_relations(A) + dx_relations(A, R) + dd_relations(A))
    extra = {}
    for g in _XN:
        extra[(A.idx(g), 0)] = A.mono("Li", g, c=Q ** 4)
    for g in _DN:
        extra[(A.idx(g), 0)] = A.mono("Li", g, c=q_pow(-4))
    withli = base.extend(extra)
    return xs, base, withli


def _lower(vec: List[NCPoly], eta: SMat) -> List[NCPoly]:
    """V_B = V^A eta_{AB}"""
    return [sum((vec[a] * eta.get(a, b) for a in range(3) if not eta.get(a, b).is_zero()), NCPoly())
            for b in range(3)]


def _raise(vec: List[NCPoly], up: SMat) -> List[NCPoly]:
    """V^B = eta^{BC} V_C"""
    return [sum((vec[c] * up.get(b, c) for c in range(3) if not up.get(b, c).is_zero()), NCPoly())
            for b in range(3)]


def euclid_lambda(A: Alphabet) -> NCPoly:
    """q^6 {1 + (q^4 - 1) X.d + q^2 (q^2 - 1)^2 (X.X)(d.d)}"""
    eta, up = metric_lower(), metric_upper()
    X = [A.gen(g) for g in _XN]
    d_low = [A.gen(g) for g in _DN]
    d_up = _raise(d_low, up)
    xd = NCPoly()
    xx = NCPoly()
    dd = NCPoly()
    for a, b in product(range(3), repeat=2):
        e = eta.get(b, a)
        if not e.is_zero():
            xd = xd + X[a] * d_up[b] * e
            xx = xx + X[a] * X[b] * e
            dd = dd + d_up[a] * d_up[b] * e
    q2 = Q * Q
    body = NCPoly.one() + xd * (Q ** 4 - ONE) + xx * dd * (q2 * (q2 - ONE) * (q2 - ONE))
    return body * Q ** 6


def euclid3_system(st: Optional[So3Structure] = None) -> Dict[str, object]:
    """Named identity checks for the X, d algebra.  Values: list (PBW failures) or NCPoly residual."""
    st = st or so3_build()
    R = st.Rhat
    xs, base, withli = euclid_systems(R)
    A = base.alphabet
    eta, up = metric_lower(), metric_upper()
    lam = normal_order(euclid_lambda(A), base)
    X = [A.gen(g) for g in _XN]
    d_low = [A.gen(g) for g in _DN]
    d_up = _raise(d_low, up)
    li = A.gen("Li")
    res: Dict[str, object] = {}
    res["pbw_x"] = pbw_overlap_check(xs)
    res["pbw_x_d"] = pbw_overlap_check(base)
    res["x_fixture"] = same_x_fixture(xs)
    res["x_mp"] = normal_order(A.mono("Xm", "Xp") - A.mono("Xp", "Xm") - A.mono("X0", "X0", c=LAM), xs)
    for k in range(3):
        res[f"lambda_X{VEC[k]}"] = normal_order(lam * X[k] - X[k] * lam * Q ** 4, base)
        res[f"lambda_d{VEC[k]}"] = normal_order(lam * d_low[k] - d_low[k] * lam * q_pow(-4), base)
    # dbar^A = -Li (d^A + q^2 (q^2-1) X^A (d.d))
    dd = NCPoly()
    for a, b in product(range(3), repeat=2):
        e = eta.get(b, a)
        if not e.is_zero():
            dd = dd + d_up[a] * d_up[b] * e
    c = Q * Q * (Q * Q - ONE)
    dbar_up = [li * (d_up[a] + X[a] * dd * c) * (-ONE) for a in range(3)]
    dbar_low = _lower(dbar_up, eta)
    X_low = _lower(X, eta)
    for cc, d in product(range(3), repeat=2):
        lhs = dbar_low[cc] * X_low[d]
        rhs = NCPoly()
        e = eta.get(cc, d)
        if not e.is_zero():
            rhs = rhs + NCPoly.one() * (-q_pow(-6) * e)
        for b, a in product(range(3), repeat=2):
            v = R(b + 1, a + 1, d + 1, cc + 1)
            if not v.is_zero():
                rhs = rhs + X_low[a] * dbar_low[b] * v
        res[f"dbar{VEC[cc]}_X{VEC[d]}"] = certify_zero(lhs - rhs, withli, base, lam)
    eps = epsilon_lower()
    for f in range(3):
        p = NCPoly()
        for (f2, a, b), v in eps.items():
            if f2 == f + 1:
                p = p + dbar_up[b - 1] * dbar_up[a - 1] * v
        res[f"eps_dbar_dbar{VEC[f]}"] = certify_zero(p, withli, base, lam)
    res["reality"] = reality_residuals(xs)
    return res


def same_x_fixture(xs: RewriteSystem) -> bool:
    fx = load_fixture("euclid_x")
    names = fx.alphabet.names
    A = xs.alphabet
    for w, rhs in fx.rules.items():
        w2 = tuple(A.idx(names[k]) for k in w)
        mine = xs.rules.get(w2)
        if mine is None:
            return False
        conv = NCPoly({tuple(A.idx(names[k]) for k in ww): c for ww, c in rhs.terms.items()})
        if conv != mine:
            return False
    return len(fx.rules) == len(xs.rules)


def conjugate(p: NCPoly, A: Alphabet) -> NCPoly:
    """Antilinear anti-multiplicative map with conj(X0) = X0, conj(X+) = -q X-, conj(X-) = -q^-1 X+."""
    image = {"X0": A.gen("X0"), "Xp": A.gen("Xm", c=-Q), "Xm": A.gen("Xp", c=-q_pow(-1))}
    out = NCPoly()
    for w, c in p.terms.items():
        term = NCPoly.one()
        for k in reversed(w):
            term = term * image[A.names[k]]
        out = out + term * c  # q real: coefficients are fixed
    return out


def reality_residuals(xs: RewriteSystem) -> List[NCPoly]:
    A = xs.alphabet
    return [normal_order(conjugate(r, A), xs) for r in x_relations(A)]


def failures(res: Dict[str, object]) -> List[str]:
    bad = []
    for k, v in res.items():
        if isinstance(v, bool):
            if not v:
                bad.append(k)
        elif isinstance(v, list):
            if any((not x.is_zero()) if isinstance(x, NCPoly) else True for x in v):
                bad.append(k)
        elif isinstance(v, NCPoly) and not v.is_zero():
            bad.append(k)
    return bad


# --------------------------------------------------------------------------
# JSON reports


def _entry(name, subject, q0, residual) -> dict:
    if isinstance(residual, float):
        r = residual
    elif isinstance(residual, NCPoly):
        r = "0 (exact)" if residual.is_zero() else "nonzero"
    else:
        r = residual
    return {"check_name": name, "subject": subject, "q0": q0, "residual": r}


def suq2_report(js=(Fraction(1, 2), 1, Fraction(3, 2), 2, 4), q0s=(1.1, 1.5)) -> List[dict]:
    rows = []
    for q0 in q0s:
        for j in js:
            rep = suq2_rep(j, q0)
            for k, v in sorted(suq2_residuals(rep).items()):
                rows.append(_entry(k, f"j={Fraction(j)}", q0, v))
    return rows


def write_report(path, rows: List[dict]) -> None:
    with open(path, "w") as fh:
        json.dump(rows, fh, indent=1, sort_keys=True)
        fh.write("\n")

"""q-deformed cosine and sine.

cos_q(x) = sum_k (-1)^k x^(2k) q^-k / ([2k]! lam^(2k))
sin_q(x) = sum_k (-1)^k x^(2k+1) q^(k+1) / ([2k+1]! lam^(2k+1))

Exact coefficients are QScalars.  Numeric evaluation uses mpmath with a
working precision picked from the size of the largest term, because the
alternating series cancel violently for large arguments.
"""
from __future__ import annotations

import csv
import math
from functools import lru_cache

import mpmath

from .fieldcalc import FieldElem, nabla
from .qarith import LAM, QScalar, q_pow, qfact, qnum

KINDS = ("cos", "sin")


def _check_kind(kind):
    if kind not in KINDS:
        raise ValueError(f"kind must be 'cos' or 'sin', got {kind!r}")


@lru_cache(maxsize=None)
def trig_coeff(kind: str, k: int) -> QScalar:
    """Exact coefficient of x^(2k) (cos) or x^(2k+1) (sin)."""
    _check_kind(kind)
    if k < 0:
        raise ValueError("k must be non-negative")
    sign = -1 if k % 2 else 1
    if kind == "cos":
        return sign * q_pow(-k) / (qfact(2 * k) * LAM ** (2 * k))
    return sign * q_pow(k + 1) / (qfact(2 * k + 1) * LAM ** (2 * k + 1))


def trig_series(kind: str, degree_cap: int, scale: QScalar | int = 1) -> FieldElem:
    """Truncated series of cos_q(scale*x) or sin_q(scale*x), all terms of degree <= degree_cap."""
    _check_kind(kind)
    scale = QScalar(scale)
    out = {}
    k = 0
    while True:
        deg = 2 * k + (kind == "sin")
        if deg > degree_cap:
            break
        out[deg] = trig_coeff(kind, k) * scale ** deg
        k += 1
    return FieldElem(out)


def truncate(f: FieldElem, below: int) -> FieldElem:
    return FieldElem({k: v for k, v in f.coeffs.items() if k < below})


# --------------------------------------------------------------------------
# exact identities


def recurrence_residuals(order: int = 40) -> dict:
    """Coefficient-level residuals of the two difference equations up to the given order.

    (1/x)(sin(x) - sin(q^-2 x)) = cos(x)
    (1/x)(cos(x) - cos(q^-2 x)) = -q^-2 sin(q^-2 x)
    Also checks 1 - q^(-2(2k+1)) = (lam/q) q^(-2k) [2k+1].
    """
    bad = {"sin_to_cos": [], "cos_to_sin": [], "factor": []}
    for k in range(order + 1):
        s, c = trig_coeff("sin", k), trig_coeff("cos", k)
        if s * (1 - q_pow(-2 * (2 * k + 1))) != c:
            bad["sin_to_cos"].append(k)
        c1 = trig_coeff("cos", k + 1)
        if c1 * (1 - q_pow(-4 * (k + 1))) != -q_pow(-2) * s * q_pow(-2 * (2 * k + 1)):
            bad["cos_to_sin"].append(k)
        if 1 - q_pow(-2 * (2 * k + 1)) != LAM / q_pow(1) * q_pow(-2 * k) * qnum(2 * k + 1):
            bad["factor"].append(k)
    return bad


@lru_cache(maxsize=None)
def qbinom(m: int, j: int) -> QScalar:
    """Symmetric q-binomial [m]!/([j]![m-j]!) as a Laurent polynomial (q-Pascal rule)."""
    if j < 0 or j > m:
        return QScalar(0)
    if j == 0 or j == m:
        return QScalar(1)
    return q_pow(-j) * qbinom(m - 1, j) + q_pow(m - j) * qbinom(m - 1, j - 1)


@lru_cache(maxsize=None)
def pythagoras_coeff(n: int) -> QScalar:
    """Coefficient of x^(2n) in cos_q(x)cos_q(qx) + q^-1 sin_q(x) sin_q(q^-1 x).

    Each product of series coefficients is multiplied by the common
    denominator lam^(2n) [2n]!, which turns it into a signed q-binomial.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    scaled = QScalar(0)
    sign = -1 if n % 2 else 1
    for k in range(n + 1):
        l = n - k
        # cos_k cos_l q^(2l) = (-1)^n q^(-k-l) q^(2l) / ([2k]! [2l]! lam^2n)
        scaled += sign * q_pow(l - k) * qbinom(2 * n, 2 * k)
    for k in range(n):
        l = n - 1 - k
        # q^-1 sin_k sin_l q^-(2l+1) = (-1)^(n-1) q^(k+l+2) q^-1 q^-(2l+1) / ([2k+1]! [2l+1]! lam^2n)
        scaled += -sign * q_pow(k - l) * qbinom(2 * n, 2 * k + 1)
    if n == 0:
        return scaled
    return scaled / (LAM ** (2 * n) * qfact(2 * n))


def pythagoras_coeff_direct(n: int) -> QScalar:
    """Same coefficient straight from the series coefficients (slow, for cross-checks)."""
    total = QScalar(0)
    for k in range(n + 1):
        total += trig_coeff("cos", k) * trig_coeff("cos", n - k) * q_pow(2 * (n - k))
    for k in range(n):
        l = n - 1 - k
        total += q_pow(-1) * trig_coeff("sin", k) * trig_coeff("sin", l) * q_pow(-(2 * l + 1))
    return total


def pythagoras_coeff_binomial(n: int) -> QScalar:
    """Same coefficient from the single alternating sum over k = 0..2n."""
    s = QScalar(0)
    for k in range(2 * n + 1):
        s += (-1) ** k * q_pow(n - k) * qbinom(2 * n, k)
    if n == 0:
        return s
    return (-1) ** n / (LAM ** (2 * n) * qfact(2 * n)) * s


def trig_nabla_residual(kind: str, k_scale=1, degree_cap: int = 20) -> FieldElem:
    """nabla of the truncated series minus the closed-form right side, below degree_cap.

    nabla cos_q(kx) = -k/(q lam) sin_q(q^-1 k x)
    nabla sin_q(kx) = k q/lam cos_q(q k x)
    """
    _check_kind(kind)
    if degree_cap < 1:
        raise ValueError("degree_cap must be >= 1")
    k = QScalar(k_scale)
    f = trig_series(kind, degree_cap, k)
    if kind == "cos":
        rhs = trig_series("sin", degree_cap, k * q_pow(-1)) * (-k / (q_pow(1) * LAM))
    else:
        rhs = trig_series("cos", degree_cap, k * q_pow(1)) * (k * q_pow(1) / LAM)
    return truncate(nabla(f) - rhs, degree_cap)


def trig_eigen_residual(kind: str, k_scale=1, degree_cap: int = 24) -> FieldElem:
    """nabla^2 f - ev f for f = cos_q(kx) or sin_q(kx), below degree_cap - 1."""
    k = QScalar(k_scale)
    f = trig_series(kind, degree_cap, k)
    if kind == "cos":
        ev = -k * k / (q_pow(1) * LAM ** 2)
    else:
        ev = -k * k * q_pow(1) / LAM ** 2
    return truncate(nabla(nabla(f)) - f * ev, degree_cap - 1)


def laplacian_eigenvalue(kind: str, k_scale) -> QScalar:
    k = QScalar(k_scale)
    return -k * k / (q_pow(1) * LAM ** 2) if kind == "cos" else -k * k * q_pow(1) / LAM ** 2


# --------------------------------------------------------------------------
# numerics


class NonConvergenceError(RuntimeError):
    pass


def _log_max_term(kind: str, x: float, q: float, max_terms: int) -> float:
    """log10 of the largest term magnitude, computed in logs (no overflow)."""
    if x == 0:
        return 0.0
    lam = q - 1 / q
    lx, lq, ll = math.log(abs(x)), math.log(q), math.log(lam)

    def log_qnum(n):
        # log [n] = n log q + log(1 - q^-2n) - log lam
        return n * lq + math.log1p(-q ** (-2 * n)) - ll

    best = -math.inf
    acc = 0.0  # log of [j]! so far
    for k in range(max_terms):
        deg = 2 * k + (kind == "sin")
        if deg > 0:
            acc += log_qnum(deg)
            if kind == "cos" and deg >= 2:
                acc += log_qnum(deg - 1)
            elif kind == "sin" and deg >= 3:
                acc += log_qnum(deg - 1)
        qexp = -k if kind == "cos" else k + 1
        lt = deg * lx + qexp * lq - deg * ll - acc
        best = max(best, lt)
        if lt < best - 200:
            break
    return best / math.log(10)


def _sum_series(kind, x, q, stop, max_terms):
    lam = q - 1 / q
    qnum_mp = lambda n: (q ** n - q ** (-n)) / lam
    if kind == "cos":
        t = mpmath.mpf(1)
    else:
        t = x * q / lam
    s = mpmath.mpf(0)
    for k in range(max_terms):
        s += t
        if k > 0 and stop(t, s):
            return s
        if kind == "cos":
            a, b, f = 2 * k + 1, 2 * k + 2, 1 / q
        else:
            a, b, f = 2 * k + 2, 2 * k + 3, q
        t = -t * x * x * f / (qnum_mp(a) * qnum_mp(b) * lam * lam)
        if x == 0:
            return s
    raise NonConvergenceError(f"{kind}_q series did not converge within {max_terms} terms")


def _dps_for(kind, x_float, q_float, max_terms):
    lm = _log_max_term(kind, x_float, q_float, max_terms)
    return int(2 * max(lm, 0.0)) + 40


def trig_eval(kind: str, x0: float, q0: float, tol: float = 1e-17, max_terms: int = 500) -> float:
    """Partial sums until |next term| < tol * (1 + |partial sum|)."""
    _check_kind(kind)
    if not q0 > 1:
        raise ValueError("numeric evaluation needs q0 > 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    dps = _dps_for(kind, float(x0), float(q0), max_terms)
    with mpmath.workdps(dps):
        x, q = mpmath.mpf(x0), mpmath.mpf(q0)
        stop = lambda t, s: abs(t) < tol * (1 + abs(s))
        return float(_sum_series(kind, x, q, stop, max_terms))


@lru_cache(maxsize=200000)
def trig_lattice(kind: str, k: int, q0: float, max_terms: int = 500) -> float:
    """cos_q or sin_q at the lattice point x = q0^k, accurate to double precision.

    The point q0^k is formed at working precision from the exact binary
    value of q0, so the huge cancellation in the series does not amplify a
    rounding error of the argument.
    """
    _check_kind(kind)
    if not q0 > 1:
        raise ValueError("numeric evaluation needs q0 > 1")
    dps = _dps_for(kind, float(q0) ** k if k < 7000 else math.inf, float(q0), max_terms)
    with mpmath.workdps(dps):
        q = mpmath.mpf(q0)
        x = q ** k
        eps = mpmath.mpf(10) ** (-(dps - 10))
        stop = lambda t, s: abs(t) <= eps * abs(s) or abs(t) < mpmath.mpf(10) ** (-dps)
        return float(_sum_series(kind, x, q, stop, max_terms))


def fig12_rows(q0: float = 1.1, nmin: int = -20, nmax: int = 40):
    """Rows (n, q0^n, cos_q(q0^n), sin_q(q0^n))."""
    return [(n, float(q0) ** n, trig_lattice("cos", n, q0), trig_lattice("sin", n, q0))
            for n in range(nmin, nmax + 1)]


def fig12_property(q0: float = 1.1, nmax: int = 40, tail_tol: float = 1e-12, big: float = 1e3) -> dict:
    """Decay on even points and divergence on odd points.

    Returns the first nu0 such that q^(2nu) cos_q(q^(2nu))^2 < tail_tol for
    all nu0 <= nu <= nmax, plus the first n <= nmax where both |cos_q| and
    |sin_q| at q^(2n+1) exceed `big`.
    """
    weighted = {nu: q0 ** (2 * nu) * trig_lattice("cos", 2 * nu, q0) ** 2 for nu in range(0, nmax + 1)}
    nu0 = None
    for nu in range(nmax, -1, -1):
        if weighted[nu] < tail_tol:
            nu0 = nu
        else:
            break
    first_big = None
    for n in range(0, nmax + 1):
        c = abs(trig_lattice("cos", 2 * n + 1, q0))
        s = abs(trig_lattice("sin", 2 * n + 1, q0))
        if c > big and s > big:
            first_big = n
            break
    return {"tail_cutoff_nu": nu0, "first_divergent_odd_n": first_big,
            "max_tail_beyond_cutoff": max((weighted[nu] for nu in range(nu0, nmax + 1)), default=None)
            if nu0 is not None else None,
            "ok": nu0 is not None and nu0 < nmax and first_big is not None}


def write_fig12_csv(path, q0: float = 1.1, nmin: int = -20, nmax: int = 40):
    from .numfmt import fmt
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "x", "cos_q", "sin_q"])
        for n, x, c, s in fig12_rows(q0, nmin, nmax):
            w.writerow([n, fmt(x), fmt(c), fmt(s)])

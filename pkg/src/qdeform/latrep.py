"""Truncated lattice representations of the x, Lambda, p algebra.

Basis |n, sigma> with x|n,s> = sigma s q^n |n,s>, Lambda |n> = |n+1> and

    p|n,sigma> = i lam^-1 (sigma/s) q^-n (q^-1/2 |n+1> - q^1/2 |n-1>).

Operators live on a finite window nmin..nmax (both sigma sectors by default),
so rows and columns near the edges are corrupted by truncation and masked
from residuals.  Two modes: "exact" (CQScalar entries, t = q^1/2 symbolic)
and "numeric" (complex floats at a sample q0).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from .qarith import CQScalar, LAM, QScalar, q_pow
from .qfourier import normalization_nq
from .qspecial import trig_lattice

Label = Tuple[int, int]  # (n, sigma)


@dataclass(frozen=True)
class Window:
    nmin: int
    nmax: int
    sigma_set: Tuple[int, ...] = (1, -1)
    s: Fraction = Fraction(1)

    def __post_init__(self):
        if not self.nmin < self.nmax:
            raise ValueError("need nmin < nmax")
        if not self.sigma_set or any(x not in (1, -1) for x in self.sigma_set):
            raise ValueError("sigma_set must be a non-empty subset of {+1, -1}")
        if len(set(self.sigma_set)) != len(self.sigma_set):
            raise ValueError("repeated sigma")
        object.__setattr__(self, "s", Fraction(self.s))
        if self.s < 1:
            raise ValueError("s must satisfy 1 <= s < q")

    def check_q(self, q0: float) -> None:
        if not float(self.s) < q0:
            raise ValueError(f"s = {self.s} must be below q0 = {q0}")

    def labels(self) -> List[Label]:
        return [(n, sg) for sg in self.sigma_set for n in range(self.nmin, self.nmax + 1)]

    def contains(self, lab: Label) -> bool:
        return self.nmin <= lab[0] <= self.nmax and lab[1] in self.sigma_set

    def interior(self, lab: Label, margin: int = 2) -> bool:
        return self.nmin + margin <= lab[0] <= self.nmax - margin

    def index(self) -> Dict[Label, int]:
        return {lab: i for i, lab in enumerate(self.labels())}


@dataclass
class LatticeOp:
    """Sparse operator; entries[(row, col)] is <row|op|col>."""

    entries: Dict[Tuple[Label, Label], object]
    window: Window
    mode: str = "numeric"

    def __post_init__(self):
        if self.mode not in ("exact", "numeric"):
            raise ValueError("mode must be 'exact' or 'numeric'")
        for (r, c), v in self.entries.items():
            if not (self.window.contains(r) and self.window.contains(c)):
                raise ValueError(f"label outside window: {(r, c)}")
            if self.mode == "exact" and not isinstance(v, CQScalar):
                raise TypeError("exact mode stores CQScalar entries only")

    def _zero(self):
        return CQScalar(0) if self.mode == "exact" else 0j

    def __matmul__(self, other: "LatticeOp") -> "LatticeOp":
        by_row: Dict[Label, list] = {}
        for (k, c), v in other.entries.items():
            by_row.setdefault(k, []).append((c, v))
        out: Dict[Tuple[Label, Label], object] = {}
        for (r, k), a in self.entries.items():
            for c, b in by_row.get(k, ()):
                key = (r, c)
                out[key] = out[key] + a * b if key in out else a * b
        return LatticeOp(_prune(out, self.mode), self.window, self.mode)

    def __add__(self, other: "LatticeOp") -> "LatticeOp":
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out[k] + v if k in out else v
        return LatticeOp(_prune(out, self.mode), self.window, self.mode)

    def scale(self, c) -> "LatticeOp":
        return LatticeOp(_prune({k: c * v for k, v in self.entries.items()}, self.mode),
                         self.window, self.mode)

    def __sub__(self, other: "LatticeOp") -> "LatticeOp":
        return self + other.scale(CQScalar(-1) if self.mode == "exact" else -1)

    def adjoint(self) -> "LatticeOp":
        conj = (lambda v: v.conj()) if self.mode == "exact" else (lambda v: complex(v).conjugate())
        return LatticeOp({(c, r): conj(v) for (r, c), v in self.entries.items()}, self.window, self.mode)

    def to_sparse(self, q0: Optional[float] = None) -> sp.csr_matrix:
        idx = self.window.index()
        rows, cols, vals = [], [], []
        for (r, c), v in self.entries.items():
            rows.append(idx[r])
            cols.append(idx[c])
            vals.append(complex(v.eval_t(math.sqrt(q0))) if self.mode == "exact" else v)
        n = len(idx)
        return sp.csr_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=(n, n))

    def interior_max(self, margin: int = 2, q0: Optional[float] = None) -> object:
        """Exact mode: 0 or the first nonzero interior entry; numeric: max |entry|."""
        inner = [v for (r, c), v in self.entries.items()
                 if self.window.interior(r, margin) and self.window.interior(c, margin)]
        if self.mode == "exact":
            return next((v for v in inner if not v.is_zero()), CQScalar(0))
        return max((abs(v) for v in inner), default=0.0)


def _prune(d, mode):
    if mode == "exact":
        return {k: v for k, v in d.items() if not v.is_zero()}
    return {k: v for k, v in d.items() if v != 0}


def build_ops(window: Window, q0: Optional[float] = None, mode: str = "numeric"):
    """x, Lambda, p on the window.  Exact mode ignores q0."""
    if mode == "numeric":
        if q0 is None:
            raise ValueError("numeric mode needs q0")
        q0 = float(q0)
        window.check_q(q0)
    s = window.s
    xs, ls, ps = {}, {}, {}
    if mode == "exact":
        ilam = CQScalar(0, 1) * CQScalar(1 / LAM)
        for n, sg in window.labels():
            xs[(n, sg), (n, sg)] = CQScalar(q_pow(n) * QScalar(sg * s))
            up, down = (n + 1, sg), (n - 1, sg)
            if window.contains(up):
                ls[up, (n, sg)] = CQScalar(1)
                ps[up, (n, sg)] = ilam * CQScalar(QScalar(Fraction(sg) / s) * q_pow(-n) * q_pow(Fraction(-1, 2)))
            if window.contains(down):
                ps[down, (n, sg)] = ilam * CQScalar(QScalar(Fraction(-sg) / s) * q_pow(-n) * q_pow(Fraction(1, 2)))
    elif mode == "numeric":
        lam = q0 - 1 / q0
        sf = float(s)
        for n, sg in window.labels():
            xs[(n, sg), (n, sg)] = complex(sg * sf * q0 ** n)
            up, down = (n + 1, sg), (n - 1, sg)
            if window.contains(up):
                ls[up, (n, sg)] = 1 + 0j
                ps[up, (n, sg)] = 1j / lam * sg / sf * q0 ** (-n - 0.5)
            if window.contains(down):
                ps[down, (n, sg)] = -1j / lam * sg / sf * q0 ** (-n + 0.5)
    else:
        raise ValueError("mode must be 'exact' or 'numeric'")
    return (LatticeOp(xs, window, mode), LatticeOp(ls, window, mode), LatticeOp(ps, window, mode))


def algebra_residual(x: LatticeOp, lam_op: LatticeOp, p: LatticeOp, margin: int = 2):
    """Interior residuals of q^1/2 xp - q^-1/2 px - i Lambda, Lambda p - q p Lambda, Lambda x - q^-1 x Lambda.

    Exact mode returns a dict of CQScalars (each must be zero); numeric mode
    needs the q0 used in build_ops and returns floats.
    """
    if x.mode != "exact":
        raise ValueError("use algebra_residual_numeric for numeric operators")
    sq, isq = CQScalar(q_pow(Fraction(1, 2))), CQScalar(q_pow(Fraction(-1, 2)))
    heis = (x @ p).scale(sq) - (p @ x).scale(isq) - lam_op.scale(CQScalar(0, 1))
    lp = lam_op @ p - (p @ lam_op).scale(CQScalar(q_pow(1)))
    lx = lam_op @ x - (x @ lam_op).scale(CQScalar(q_pow(-1)))
    return {"heisenberg": heis.interior_max(margin), "lambda_p": lp.interior_max(margin),
            "lambda_x": lx.interior_max(margin)}


def algebra_residual_numeric(x: LatticeOp, lam_op: LatticeOp, p: LatticeOp, q0: float,
                             margin: int = 2) -> Dict[str, float]:
    sq = math.sqrt(q0)
    heis = (x @ p).scale(sq) - (p @ x).scale(1 / sq) - lam_op.scale(1j)
    lp = lam_op @ p - (p @ lam_op).scale(q0)
    lx = lam_op @ x - (x @ lam_op).scale(1 / q0)
    return {"heisenberg": heis.interior_max(margin), "lambda_p": lp.interior_max(margin),
            "lambda_x": lx.interior_max(margin)}


def boundary_residual_numeric(x, lam_op, p, q0) -> float:
    """The same Heisenberg residual including edge rows.

    x is diagonal and p, Lambda only couple neighbours, so the relation has
    no truncation artifact and this is as small as the interior residual.
    """
    sq = math.sqrt(q0)
    heis = (x @ p).scale(sq) - (p @ x).scale(1 / sq) - lam_op.scale(1j)
    return max((abs(v) for v in heis.entries.values()), default=0.0)


# --------------------------------------------------------------------------
# momentum eigenstates


class WindowTooSmallError(ValueError):
    pass


@dataclass
class MomentumState:
    coeffs: np.ndarray
    window: Window
    tau: int
    nu: int
    family: str
    reducible: bool
    sigma: Optional[int] = None
    tail_mass: float = 0.0

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


def _family_amplitudes(family: str, tau: int, nu: int, m: int, q0: float) -> complex:
    """Coefficient of |m> in the single-sector state without the N_q/sqrt2 factor."""
    if family == "I":
        if m % 2 == 0:
            n = m // 2
            return q0 ** (n + nu) * trig_lattice("cos", 2 * (n + nu), q0)
        n = (m - 1) // 2
        return 1j * tau * q0 ** (n + nu) * trig_lattice("sin", 2 * (n + nu), q0)
    if family == "II":
        if m % 2 == 1:
            n = (m - 1) // 2
            return q0 ** (n + nu) * trig_lattice("cos", 2 * (n + nu), q0)
        n = m // 2
        return 1j * tau * q0 ** (n + nu - 1) * trig_lattice("sin", 2 * (n + nu - 1), q0)
    raise ValueError("family must be 'I' or 'II'")


def _tail_mass(family, tau, nu, window: Window, q0: float, extra: int = 40) -> float:
    """Squared norm of one sector's coefficients outside the window (normalized)."""
    nq2 = normalization_nq(q0) ** 2 / 2
    # below: terms ~ q^(2(n+nu)) with |cos| <= 1, sin small; bound geometrically
    m_lo = window.nmin
    k_lo = (m_lo - 1) // 2 + nu  # n + nu at the first excluded even point, roughly
    below = nq2 * q0 ** (2 * k_lo) / (1 - q0 ** -2) * 1.5
    above = 0.0
    for m in range(window.nmax + 1, window.nmax + 1 + extra):
        above += abs(_family_amplitudes(family, tau, nu, m, q0)) ** 2
    return below + nq2 * above


def momentum_state(tau: int, nu: int, family: str, reducible: bool, window: Window, q0: float,
                   sigma: int = 1, tail_tol: Optional[float] = 1e-12) -> MomentumState:
    """Analytic p eigenvector on the window.

    Irreducible: one sector sigma.  Reducible: (|tau, +> + |-tau, ->)/sqrt2.
    With tail_tol set, a window whose dropped tail exceeds it is rejected.
    """
    if tau not in (1, -1):
        raise ValueError("tau must be +1 or -1")
    window.check_q(q0)
    nq = normalization_nq(q0)
    idx = window.index()
    v = np.zeros(len(idx), dtype=complex)
    if reducible:
        if set(window.sigma_set) != {1, -1}:
            raise ValueError("reducible states need both sigma sectors")
        parts = [(1, tau), (-1, -tau)]
        pre = nq / 2
    else:
        if sigma not in window.sigma_set:
            raise ValueError("sigma not in window")
        parts = [(sigma, tau)]
        pre = nq / math.sqrt(2)
    for sg, tt in parts:
        for m in range(window.nmin, window.nmax + 1):
            v[idx[m, sg]] += pre * _family_amplitudes(family, tt, nu, m, q0)
    tail = max(_tail_mass(family, tt, nu, window, q0) for _, tt in parts)
    if tail_tol is not None and tail > tail_tol:
        raise WindowTooSmallError(
            f"window [{window.nmin}, {window.nmax}] drops tail mass {tail:.3e} > {tail_tol:.1e}")
    return MomentumState(v, window, tau, nu, family, reducible, None if reducible else sigma, tail)


def p_eigenvalue(family: str, tau: int, nu: int, q0: float, s=1, sigma: int = 1) -> float:
    """sigma tau q^(2nu) / (s lam q^1/2) for family I, q^(2nu-1) in place of q^(2nu) for II.

    For reducible states pass sigma = 1 (the sign is carried by tau alone).
    """
    lam = q0 - 1 / q0
    e = 2 * nu if family == "I" else 2 * nu - 1
    return sigma * tau * q0 ** e / (float(s) * lam * math.sqrt(q0))


def _mask(window: Window, margin: int) -> np.ndarray:
    return np.array([window.interior(lab, margin) for lab in window.labels()])


def eigen_residual(op, state: MomentumState, eigenvalue: complex, q0: Optional[float] = None,
                   margin: int = 2) -> float:
    """||op v - mu v|| / ||v|| with rows near the edges masked."""
    A = op if sp.issparse(op) else op.to_sparse(q0)
    v = state.coeffs if isinstance(state, MomentumState) else np.asarray(state)
    w = state.window if isinstance(state, MomentumState) else None
    r = A @ v - eigenvalue * v
    if w is not None:
        r = r[_mask(w, margin)]
    nv = np.linalg.norm(v)
    return float(np.linalg.norm(r) / nv) if nv else 0.0


def lambda_map_residuals(nu: int, tau: int, window: Window, q0: float, margin: int = 2) -> Dict[str, float]:
    """Lambda I_nu -> II_nu and Lambda II_nu -> I_(nu-1) for the reducible states."""
    _, L, _ = build_ops(window, q0)
    Ls = L.to_sparse()
    mask = _mask(window, margin)
    s1 = momentum_state(tau, nu, "I", True, window, q0, tail_tol=None)
    s2 = momentum_state(tau, nu, "II", True, window, q0, tail_tol=None)
    s0 = momentum_state(tau, nu - 1, "I", True, window, q0, tail_tol=None)
    return {"I_to_II": float(np.linalg.norm((Ls @ s1.coeffs - s2.coeffs)[mask])),
            "II_to_I": float(np.linalg.norm((Ls @ s2.coeffs - s0.coeffs)[mask]))}


def reducible_gram(window: Window, q0: float, nus: Iterable[int] = range(-3, 4)) -> np.ndarray:
    states = [momentum_state(t, nu, fam, True, window, q0)
              for fam in ("I", "II") for nu in nus for t in (1, -1)]
    M = np.array([s.coeffs for s in states])
    return M.conj() @ M.T


def reducible_gram_deviation(window: Window, q0: float, nus: Iterable[int] = range(-3, 4)) -> float:
    G = reducible_gram(window, q0, nus)
    return float(np.max(np.abs(G - np.eye(G.shape[0]))))


def h_eigenvalue(family: str, nu: int, q0: float, s=1) -> float:
    """q^(4nu)/(2 s^2 lam^2 q) for family I and q^(4nu-2)/(2 s^2 lam^2 q) for II."""
    lam = q0 - 1 / q0
    e = 4 * nu if family == "I" else 4 * nu - 2
    return q0 ** e / (2 * float(s) ** 2 * lam ** 2 * q0)


def hamiltonian_check(window: Window, q0: float, nus: Iterable[int] = range(-3, 4),
                      margin: int = 3) -> List[dict]:
    """Residual of H = p^2/2 on every reducible momentum state.

    Keep nmin moderate (about -60 at q0 = 1.1): p^2 has entries of size
    q^(-2 nmin) and the cancellation in p(p v) loses that many digits.
    """
    _, _, p = build_ops(window, q0)
    P = p.to_sparse()
    H = 0.5 * (P @ P)
    out = []
    for fam in ("I", "II"):
        for nu in nus:
            for tau in (1, -1):
                st = momentum_state(tau, nu, fam, True, window, q0, tail_tol=None)
                ev = h_eigenvalue(fam, nu, q0, window.s)
                out.append({"family": fam, "tau": tau, "nu": nu, "eigenvalue": ev,
                            "residual": eigen_residual(H, st, ev, margin=margin)})
    return out


def sector_moment(state: MomentumState, sigma: int, q0: float) -> float:
    """sum_n q^n |c_n|^2 over one sigma sector; positive, so <v|x|v> cannot vanish there."""
    total = 0.0
    for (n, sg), i in state.window.index().items():
        if sg == sigma:
            total += q0 ** n * abs(state.coeffs[i]) ** 2
    return total


def spectrum_report(window: Window, q0: float, nus: Iterable[int] = range(-3, 4)) -> List[dict]:
    """p eigenvalue residuals of the reducible states, as JSON-ready rows."""
    _, _, p = build_ops(window, q0)
    P = p.to_sparse()
    rows = []
    for fam in ("I", "II"):
        for tau in (1, -1):
            for nu in nus:
                st = momentum_state(tau, nu, fam, True, window, q0, tail_tol=None)
                ev = p_eigenvalue(fam, tau, nu, q0, window.s)
                rows.append({"q0": q0, "window": [window.nmin, window.nmax], "family": fam,
                             "tau": tau, "nu": nu, "eigenvalue": ev,
                             "residual": eigen_residual(P, st, ev)})
    return rows


def write_spectrum_json(path, rows: List[dict]) -> None:
    from .numfmt import fmt
    clean = [{k: (fmt(v) if isinstance(v, float) else v) for k, v in r.items()} for r in rows]
    with open(path, "w") as fh:
        json.dump(clean, fh, indent=1, sort_keys=True)
        fh.write("\n")

"""Exact R-matrices: construction, Yang-Baxter, projectors, RTT and plane relations.

Index convention: entry[(i, j), (k, l)] = R^{ij}_{kl}, row pair = upper
indices, pairs in lexicographic order, indices 1..n.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .ncalg import (Alphabet, NCPoly, RewriteSystem, normal_order, order_key,
                    is_normal, pbw_overlap_check, system_from_pairs)
from .qarith import CQScalar, LAM, ONE, Q, QScalar, ZERO, q_pow, render

Pair = Tuple[int, int]


# --------------------------------------------------------------------------
# sparse exact matrices


class SMat:
    """Sparse square matrix with QScalar entries, rows/cols 0..N-1."""

    __slots__ = ("N", "rows")

    def __init__(self, N: int, rows: Optional[Dict[int, Dict[int, QScalar]]] = None):
        self.N = N
        self.rows = {}
        for r, row in (rows or {}).items():
            clean = {c: v for c, v in row.items() if not v.is_zero()}
            if clean:
                self.rows[r] = clean

    @classmethod
    def identity(cls, N: int) -> "SMat":
        return cls(N, {i: {i: ONE} for i in range(N)})

    def get(self, r: int, c: int) -> QScalar:
        return self.rows.get(r, {}).get(c, ZERO)

    def __add__(self, other: "SMat") -> "SMat":
        out = {r: dict(row) for r, row in self.rows.items()}
        for r, row in other.rows.items():
            tgt = out.setdefault(r, {})
            for c, v in row.items():
                tgt[c] = tgt[c] + v if c in tgt else v
        return SMat(self.N, out)

    def scale(self, s) -> "SMat":
        s = s if isinstance(s, QScalar) else QScalar(s)
        return SMat(self.N, {r: {c: v * s for c, v in row.items()} for r, row in self.rows.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other: "SMat") -> "SMat":
        out = {}
        for r, row in self.rows.items():
            acc: Dict[int, QScalar] = {}
            for k, a in row.items():
                for c, b in other.rows.get(k, {}).items():
                    acc[c] = acc[c] + a * b if c in acc else a * b
            out[r] = acc
        return SMat(self.N, out)

    def shift_diag(self, s) -> "SMat":
        """self + s * identity"""
        return self + SMat.identity(self.N).scale(s)

    def nonzero_count(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def is_zero(self) -> bool:
        return not self.rows

    def __eq__(self, other):
        return isinstance(other, SMat) and self.N == other.N and (self - other).is_zero()

    def trace(self) -> QScalar:
        t = ZERO
        for i in range(self.N):
            t = t + self.get(i, i)
        return t

    def transpose(self) -> "SMat":
        out: Dict[int, Dict[int, QScalar]] = {}
        for r, row in self.rows.items():
            for c, v in row.items():
                out.setdefault(c, {})[r] = v
        return SMat(self.N, out)


# --------------------------------------------------------------------------
# R-matrices


@dataclass
class RMatrix:
    n: int
    mat: SMat

    def pairs(self) -> List[Pair]:
        return [(i, j) for i in range(1, self.n + 1) for j in range(1, self.n + 1)]

    def _pos(self, i: int, j: int) -> int:
        return (i - 1) * self.n + (j - 1)

    def __call__(self, i, j, k, l) -> QScalar:
        """R^{ij}_{kl}"""
        return self.mat.get(self._pos(i, j), self._pos(k, l))

    @classmethod
    def from_function(cls, n: int, f) -> "RMatrix":
        rows = {}
        N = n * n
        for i, j, k, l in product(range(1, n + 1), repeat=4):
            v = f(i, j, k, l)
            if v is not None and not (v if isinstance(v, QScalar) else QScalar(v)).is_zero():
                rows.setdefault((i - 1) * n + j - 1, {})[(k - 1) * n + l - 1] = v if isinstance(v, QScalar) else QScalar(v)
        return cls(n, SMat(N, rows))

    def inverse_gl(self) -> "RMatrix":
        """R^-1 = R - lam for matrices with (R - q)(R + 1/q) = 0."""
        if not characteristic_ok(self):
            raise ValueError("inverse_gl needs (R - q)(R + 1/q) = 0")
        return RMatrix(self.n, self.mat.shift_diag(-LAM))

    def entries(self) -> Dict[Tuple[int, int, int, int], QScalar]:
        out = {}
        for r, row in self.mat.rows.items():
            for c, v in row.items():
                i, j = divmod(r, self.n)
                k, l = divmod(c, self.n)
                out[i + 1, j + 1, k + 1, l + 1] = v
        return out

    def __eq__(self, other):
        return isinstance(other, RMatrix) and self.n == other.n and self.mat == other.mat


def r_gl(n: int) -> RMatrix:
    """GL_q(n): R^{ji}_{kl} = d^i_k d^j_l [1 + (q-1) d^ij] + lam theta(i-j) d^j_k d^i_l."""
    if n < 2:
        raise ValueError("n must be at least 2")

    def f(j, i, k, l):
        v = ZERO
        if i == k and j == l:
            v = v + (Q if i == j else ONE)
        if i > j and j == k and i == l:
            v = v + LAM
        return v
    return RMatrix.from_function(n, f)


def flip(n: int) -> RMatrix:
    """R^{ij}_{kl} = d^i_l d^j_k"""
    return RMatrix.from_function(n, lambda i, j, k, l: ONE if (i == l and j == k) else ZERO)


def identity_r(n: int) -> RMatrix:
    return RMatrix(n, SMat.identity(n * n))


def characteristic_ok(R: RMatrix) -> bool:
    """(R - q)(R + 1/q) = 0"""
    return (R.mat.shift_diag(-Q) @ R.mat.shift_diag(q_pow(-1))).is_zero()


def lift12(R: RMatrix) -> SMat:
    n = R.n
    rows = {}
    for r, row in R.mat.rows.items():
        for c, v in row.items():
            for m in range(n):
                rows.setdefault(r * n + m, {})[c * n + m] = v
    return SMat(n ** 3, rows)


def lift23(R: RMatrix) -> SMat:
    n = R.n
    n2 = n * n
    rows = {}
    for a in range(n):
        for r, row in R.mat.rows.items():
            for c, v in row.items():
                rows.setdefault(a * n2 + r, {})[a * n2 + c] = v
    return SMat(n ** 3, rows)


def ybe_residual(R: RMatrix) -> int:
    """Number of nonzero entries of R12 R23 R12 - R23 R12 R23."""
    A, B = lift12(R), lift23(R)
    return ((A @ B @ A) - (B @ A @ B)).nonzero_count()


def perturbed(R: RMatrix, i, j, k, l, delta=1) -> RMatrix:
    n = R.n
    rows = {r: dict(row) for r, row in R.mat.rows.items()}
    r, c = (i - 1) * n + j - 1, (k - 1) * n + l - 1
    rows.setdefault(r, {})[c] = R(i, j, k, l) + QScalar(delta)
    return RMatrix(n, SMat(n * n, rows))


def is_symmetric(R: RMatrix) -> bool:
    """R^{ab}_{cd} = R^{cd}_{ab}"""
    return R.mat == R.mat.transpose()


@dataclass
class Projector:
    matrix: SMat
    eigenvalue: QScalar
    multiplicity: int


def multiplicity(P: SMat) -> int:
    t = P.trace()
    r = t.as_rational()
    if r is None or Fraction(r).denominator != 1:
        raise ValueError(f"projector trace {render(t)} is not an integer")
    return int(r)


def projectors_gl(R: RMatrix) -> Tuple[Projector, Projector]:
    """A = -q/(1+q^2) (R - q), S = q/(1+q^2) (R + 1/q)."""
    if not characteristic_ok(R):
        raise ValueError("characteristic equation (R - q)(R + 1/q) = 0 fails")
    c = Q / (ONE + Q * Q)
    A = R.mat.shift_diag(-Q).scale(-c)
    S = R.mat.shift_diag(q_pow(-1)).scale(c)
    return (Projector(A, -q_pow(-1), multiplicity(A)), Projector(S, Q, multiplicity(S)))


def projector_identities(R: RMatrix) -> Dict[str, bool]:
    A, S = (p.matrix for p in projectors_gl(R))
    I = SMat.identity(R.mat.N)
    return {"A2=A": A @ A == A, "S2=S": S @ S == S, "AS=0": (A @ S).is_zero(),
            "SA=0": (S @ A).is_zero(), "A+S=1": A + S == I,
            "R=qS-A/q": S.scale(Q) - A.scale(q_pow(-1)) == R.mat}


# --------------------------------------------------------------------------
# RTT relations


def t_alphabet(n: int) -> Alphabet:
    if n == 2:
        return Alphabet(("a", "b", "c", "d"))
    return Alphabet(tuple(f"T{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1)))


def _T(n, i, j) -> Tuple[int]:
    return ((i - 1) * n + (j - 1),)


def rtt_relations(R: RMatrix) -> Dict[Tuple[int, int, int, int], NCPoly]:
    """R^{ij}_{kl} T^k_r T^l_s - T^i_k T^j_l R^{kl}_{rs} for all (i, j, r, s)."""
    n = R.n
    ents = R.entries()
    by_row: Dict[Pair, List] = {}
    by_col: Dict[Pair, List] = {}
    for (i, j, k, l), v in ents.items():
        by_row.setdefault((i, j), []).append((k, l, v))
        by_col.setdefault((k, l), []).append((i, j, v))
    out = {}
    for i, j, r, s in product(range(1, n + 1), repeat=4):
        terms: Dict = {}
        for k, l, v in by_row.get((i, j), []):
            w = _T(n, k, r) + _T(n, l, s)
            terms[w] = terms[w] + v if w in terms else v
        for k, l, v in by_col.get((r, s), []):
            w = _T(n, i, k) + _T(n, j, l)
            terms[w] = terms[w] - v if w in terms else -v
        out[i, j, r, s] = NCPoly(terms)
    return out


def rtt_system(R: RMatrix) -> RewriteSystem:
    """Independent RTT relations compiled into rules."""
    return system_from_span(t_alphabet(R.n), list(rtt_relations(R).values()))


def rtt_on_t_matrices(R: RMatrix) -> int:
    """Evaluate the RTT relations on (t^a_g)_{bc} = R^{b a}_{g c} as n x n matrices.

    Returns the number of nonzero matrix entries over all relations (0 = holds).
    """
    n = R.n

    def t(a, g):
        return {(b, c): R(b, a, g, c) for b in range(1, n + 1) for c in range(1, n + 1)}

    def mm(X, Y):
        return {(b, c): sum((X[b, k] * Y[k, c] for k in range(1, n + 1)), ZERO)
                for b in range(1, n + 1) for c in range(1, n + 1)}
    T = {(a, g): t(a, g) for a in range(1, n + 1) for g in range(1, n + 1)}
    prods = {(a, g, c, d): mm(T[a, g], T[c, d]) for a, g, c, d in product(range(1, n + 1), repeat=4)}
    bad = 0
    for i, j, r, s in product(range(1, n + 1), repeat=4):
        acc = {(b, c): ZERO for b in range(1, n + 1) for c in range(1, n + 1)}
        for k, l in product(range(1, n + 1), repeat=2):
            lhs = R(i, j, k, l)
            rhs = R(k, l, r, s)
            for key in acc:
                if not lhs.is_zero():
                    acc[key] = acc[key] + lhs * prods[k, r, l, s][key]
                if not rhs.is_zero():
                    acc[key] = acc[key] - prods[i, k, j, l][key] * rhs
        bad += sum(1 for v in acc.values() if not v.is_zero())
    return bad


# --------------------------------------------------------------------------
# building rewrite systems from linear relation spans


def reduce_span(polys: Sequence[NCPoly]) -> List[NCPoly]:
    """Reduced row echelon basis of the span, pivots on the largest non-normal words."""
    def key(w):
        return (not is_normal(w), order_key(w))
    basis: Dict[Tuple, Dict] = {}
    for p in polys:
        row = dict(p.terms)
        while row:
            piv = max(row, key=key)
            if piv in basis:
                b = basis[piv]
                f = row[piv] / b[piv]
                for w, c in b.items():
                    nv = row[w] - f * c if w in row else -(f * c)
                    if nv.is_zero():
                        row.pop(w, None)
                    else:
                        row[w] = nv
                continue
            inv = row[piv].inverse()
            row = {w: c * inv for w, c in row.items()}
            # back-substitute into existing rows
            for bp, b in basis.items():
                if piv in b:
                    f = b[piv]
                    for w, c in row.items():
                        nv = b[w] - f * c if w in b else -(f * c)
                        if nv.is_zero():
                            b.pop(w, None)
                        else:
                            b[w] = nv
            basis[piv] = row
            break
    return [NCPoly(b) for _, b in sorted(basis.items(), key=lambda kv: order_key(kv[0]))]


def system_from_span(alphabet: Alphabet, polys: Sequence[NCPoly], allow_nonterminating=False) -> RewriteSystem:
    rows = reduce_span(polys)
    return system_from_pairs(alphabet, [(p, NCPoly()) for p in rows], allow_nonterminating)


# --------------------------------------------------------------------------
# quantum-plane relation generators


def _names(prefix: str, n: int) -> List[str]:
    return [f"{prefix}{i}" for i in range(1, n + 1)]


def _rel_xx(R: RMatrix, A: Alphabet, pre: str) -> List[NCPoly]:
    """x^i x^j - (1/q) R^{ij}_{kl} x^k x^l"""
    n = R.n
    qi = q_pow(-1)
    out = []
    for i, j in product(range(1, n + 1), repeat=2):
        p = A.mono(f"{pre}{i}", f"{pre}{j}")
        for k, l in product(range(1, n + 1), repeat=2):
            v = R(i, j, k, l)
            if not v.is_zero():
                p = p - A.mono(f"{pre}{k}", f"{pre}{l}", c=qi * v)
        out.append(p)
    return out


def _rel_bar(R: RMatrix, A: Alphabet, pre: str) -> List[NCPoly]:
    """xb_j xb_i - (1/q) R^{kl}_{ij} xb_l xb_k"""
    n = R.n
    qi = q_pow(-1)
    out = []
    for i, j in product(range(1, n + 1), repeat=2):
        p = A.mono(f"{pre}{j}", f"{pre}{i}")
        for k, l in product(range(1, n + 1), repeat=2):
            v = R(k, l, i, j)
            if not v.is_zero():
                p = p - A.mono(f"{pre}{l}", f"{pre}{k}", c=qi * v)
        out.append(p)
    return out


def _rel_dx(R: RMatrix, A: Alphabet, x: str, d: str, coeff: QScalar, use_inverse=False) -> List[NCPoly]:
    """d_i x^j - delta - coeff * M^{jk}_{il} x^l d_k, M = R or R^-1."""
    n = R.n
    M = R.inverse_gl() if use_inverse else R
    out = []
    for i, j in product(range(1, n + 1), repeat=2):
        p = A.mono(f"{d}{i}", f"{x}{j}")
        if i == j:
            p = p - NCPoly.one()
        for k, l in product(range(1, n + 1), repeat=2):
            v = M(j, k, i, l)
            if not v.is_zero():
                p = p - A.mono(f"{x}{l}", f"{d}{k}", c=coeff * v)
        out.append(p)
    return out


def _rel_dd(R: RMatrix, A: Alphabet, d: str) -> List[NCPoly]:
    """d_a d_b - (1/q) d_c d_d R^{dc}_{ba}"""
    n = R.n
    qi = q_pow(-1)
    out = []
    for a, b in product(range(1, n + 1), repeat=2):
        p = A.mono(f"{d}{a}", f"{d}{b}")
        for c, e in product(range(1, n + 1), repeat=2):
            v = R(e, c, b, a)
            if not v.is_zero():
                p = p - A.mono(f"{d}{c}", f"{d}{e}", c=qi * v)
        out.append(p)
    return out


def _rel_dhd(R: RMatrix, A: Alphabet) -> List[NCPoly]:
    """dh_a d_b - q R^{cd}_{ba} d_d dh_c"""
    n = R.n
    out = []
    for a, b in product(range(1, n + 1), repeat=2):
        p = A.mono(f"dh{a}", f"d{b}")
        for c, e in product(range(1, n + 1), repeat=2):
            v = R(c, e, b, a)
            if not v.is_zero():
                p = p - A.mono(f"d{e}", f"dh{c}", c=Q * v)
        out.append(p)
    return out


def _rel_xxbar(R: RMatrix, A: Alphabet, x: str, xb: str, kappa) -> List[NCPoly]:
    """x^i xb_j - kappa q Rinv^{li}_{kj} xb_l x^k"""
    n = R.n
    Ri = R.inverse_gl()
    out = []
    for i, j in product(range(1, n + 1), repeat=2):
        p = A.mono(f"{x}{i}", f"{xb}{j}")
        for k, l in product(range(1, n + 1), repeat=2):
            v = Ri(l, i, k, j)
            if not v.is_zero():
                p = p - A.mono(f"{xb}{l}", f"{x}{k}", c=kappa * Q * v)
        out.append(p)
    return out


def _rel_xdx_formula(R: RMatrix, A: Alphabet) -> List[NCPoly]:
    """x^c dx^d - q R^{cd}_{ab} dx^a x^b"""
    n = R.n
    out = []
    for c, d in product(range(1, n + 1), repeat=2):
        p = A.mono(f"x{c}", f"dx{d}")
        for a, b in product(range(1, n + 1), repeat=2):
            v = R(c, d, a, b)
            if not v.is_zero():
                p = p - A.mono(f"dx{a}", f"x{b}", c=Q * v)
        out.append(p)
    return out


def _rel_xdx_list(R: RMatrix, A: Alphabet) -> List[NCPoly]:
    """dx^c x^d - q R^{cd}_{ab} x^a dx^b: the explicit n = 2 table's convention."""
    n = R.n
    out = []
    for c, d in product(range(1, n + 1), repeat=2):
        p = A.mono(f"dx{c}", f"x{d}")
        for a, b in product(range(1, n + 1), repeat=2):
            v = R(c, d, a, b)
            if not v.is_zero():
                p = p - A.mono(f"x{a}", f"dx{b}", c=Q * v)
        out.append(p)
    return out


def _rel_dxdx(R: RMatrix, A: Alphabet) -> List[NCPoly]:
    """dx^c dx^d + q R^{cd}_{ab} dx^a dx^b"""
    n = R.n
    out = []
    for c, d in product(range(1, n + 1), repeat=2):
        p = A.mono(f"dx{c}", f"dx{d}")
        for a, b in product(range(1, n + 1), repeat=2):
            v = R(c, d, a, b)
            if not v.is_zero():
                p = p + A.mono(f"dx{a}", f"dx{b}", c=Q * v)
        out.append(p)
    return out


def _rel_xy(R: RMatrix, A: Alphabet, kappa) -> List[NCPoly]:
    """x^i y^j - (kappa/q) R^{ij}_{kl} y^k x^l"""
    n = R.n
    f = QScalar(kappa) * q_pow(-1)
    out = []
    for i, j in product(range(1, n + 1), repeat=2):
        p = A.mono(f"x{i}", f"y{j}")
        for k, l in product(range(1, n + 1), repeat=2):
            v = R(i, j, k, l)
            if not v.is_zero():
                p = p - A.mono(f"y{k}", f"x{l}", c=f * v)
        out.append(p)
    return out


PLANE_KINDS = ("xx", "xd", "xdh", "full", "xxbar", "xdx", "xy")


def plane_system(R: RMatrix, kind: str, kappa=1, dx_convention: str = "list") -> RewriteSystem:
    """Rewrite system for a quantum-plane relation family.

    xx     x^i x^j = (1/q) R x x
    xd     xx plus d_i x^j = delta + q R^{jk}_{il} x^l d_k
    xdh    xx plus dh_i x^j = delta + (1/q) Rinv^{jk}_{il} x^l dh_k
    full   xx, xd, dd, xdh, dh dh and dh d relations together
    xxbar  xx, the conjugate xb xb relations and x xb = q Rinv xb x
    xdx    xx, dx dx = -q R dx dx, and the x dx relations; dx_convention
           "list" gives dx^c x^d = q R^{cd}_{ab} x^a dx^b (the explicit
           two-dimensional table), "formula" gives x^c dx^d = q R^{cd}_{ab} dx^a x^b
    xy     xx, yy and x^i y^j = (kappa/q) R y x
    """
    n = R.n
    qv = Q
    if kind == "xx":
        A = Alphabet(tuple(_names("x", n)))
        rels = _rel_xx(R, A, "x")
    elif kind == "xd":
        A = Alphabet(tuple(_names("x", n) + _names("d", n)))
        rels = _rel_xx(R, A, "x") + _rel_dx(R, A, "x", "d", qv)
    elif kind == "xdh":
        A = Alphabet(tuple(_names("x", n) + _names("dh", n)))
        rels = _rel_xx(R, A, "x") + _rel_dx(R, A, "x", "dh", q_pow(-1), use_inverse=True)
    elif kind == "full":
        A = Alphabet(tuple(_names("x", n) + _names("d", n) + _names("dh", n)))
        rels = (_rel_xx(R, A, "x") + _rel_dx(R, A, "x", "d", qv) + _rel_dd(R, A, "d")
                + _rel_dx(R, A, "x", "dh", q_pow(-1), use_inverse=True) + _rel_dd(R, A, "dh")
                + _rel_dhd(R, A))
    elif kind == "xxbar":
        A = Alphabet(tuple(_names("xb", n) + _names("x", n)))
        rels = _rel_xx(R, A, "x") + _rel_bar(R, A, "xb") + _rel_xxbar(R, A, "x", "xb", QScalar(kappa))
    elif kind == "xdx":
        A = Alphabet(tuple(_names("x", n) + _names("dx", n)))
        if dx_convention == "list":
            mixed = _rel_xdx_list(R, A)
        elif dx_convention == "formula":
            mixed = _rel_xdx_formula(R, A)
        else:
            raise ValueError("dx_convention must be 'list' or 'formula'")
        rels = _rel_xx(R, A, "x") + _rel_dxdx(R, A) + mixed
    elif kind == "xy":
        A = Alphabet(tuple(_names("y", n) + _names("x", n)))
        rels = _rel_xx(R, A, "x") + _rel_xx(R, A, "y") + _rel_xy(R, A, kappa)
    else:
        raise ValueError(f"unknown plane kind {kind!r}; expected one of {PLANE_KINDS}")
    return system_from_span(A, rels)


def d_dx_system(R: RMatrix) -> RewriteSystem:
    """x, d, dx algebra: xx, dd, d x = C-rule, dx dx, x dx (formula convention), d_j dx^i = Cinv dx d."""
    n = R.n
    A = Alphabet(tuple(_names("x", n) + _names("dx", n) + _names("d", n)))
    Ci = R.inverse_gl()
    qi = q_pow(-1)
    rels = _rel_xx(R, A, "x") + _rel_dx(R, A, "x", "d", Q) + _rel_dd(R, A, "d") + _rel_dxdx(R, A)
    rels += _rel_xdx_formula(R, A)
    for j, i in product(range(1, n + 1), repeat=2):
        p = A.mono(f"d{j}", f"dx{i}")
        for k, l in product(range(1, n + 1), repeat=2):
            v = Ci(i, k, j, l)
            if not v.is_zero():
                p = p - A.mono(f"dx{l}", f"d{k}", c=qi * v)
        rels.append(p)
    return system_from_span(A, rels)


def d_scaling_residuals(R: RMatrix) -> List[NCPoly]:
    """d_i (dx^l d_l) - q^-2 (dx^l d_l) d_i, normal ordered."""
    S = d_dx_system(R)
    A = S.alphabet
    n = R.n
    dop = NCPoly()
    for l in range(1, n + 1):
        dop = dop + A.mono(f"dx{l}", f"d{l}")
    out = []
    for i in range(1, n + 1):
        di = A.gen(f"d{i}")
        out.append(normal_order(di * dop - dop * di * q_pow(-2), S))
    return out


def xbar_centrality(R: RMatrix) -> List[NCPoly]:
    """commutators of xb_l x^l with every x^k and xb_k under the xxbar system."""
    S = plane_system(R, "xxbar")
    A = S.alphabet
    z = NCPoly()
    for l in range(1, R.n + 1):
        z = z + A.mono(f"xb{l}", f"x{l}")
    return [normal_order(z * A.gen(g) - A.gen(g) * z, S) for g in A.names]


# --------------------------------------------------------------------------
# one-dimensional Heisenberg algebra from x, d


def _heis_alphabet() -> Alphabet:
    return Alphabet(("Li", "x", "d"))


def heisenberg_systems() -> Tuple[RewriteSystem, RewriteSystem, RewriteSystem]:
    """(base x,d system; base with Li adjoined; abstract L, Li system with annihilation).

    Li stands for Lambda^-1 and is ordered leftmost.  Scaling: x Li = q Li x,
    d Li = q^-1 Li d.
    """
    A = _heis_alphabet()
    base = system_from_pairs(A, [(A.mono("d", "x"), NCPoly.one() + A.mono("x", "d", c=Q))])
    withli = system_from_pairs(A, [
        (A.mono("d", "x"), NCPoly.one() + A.mono("x", "d", c=Q)),
        (A.mono("x", "Li"), A.mono("Li", "x", c=Q)),
        (A.mono("d", "Li"), A.mono("Li", "d", c=q_pow(-1))),
    ])
    B = Alphabet(("Li", "L", "x", "d"))
    rules = {
        (3, 2): NCPoly.one() + B.mono("x", "d", c=Q),
        (2, 0): B.mono("Li", "x", c=Q),
        (3, 0): B.mono("Li", "d", c=q_pow(-1)),
        (2, 1): B.mono("L", "x", c=q_pow(-1)),
        (3, 1): B.mono("L", "d", c=Q),
        (1, 0): NCPoly.one(),
        (0, 1): NCPoly.one(),
    }
    abstract = RewriteSystem(B, rules)
    return base, withli, abstract


def lambda_explicit(A: Alphabet) -> NCPoly:
    """q^1/2 (1 + (q - 1) x d)"""
    return (NCPoly.one() + A.mono("x", "d", c=Q - ONE)) * q_pow(Fraction(1, 2))


def split_li(p: NCPoly, li_index: int = 0) -> Dict[int, NCPoly]:
    """Group a normal-ordered polynomial by the leading power of Li."""
    out: Dict[int, Dict] = {}
    for w, c in p.terms.items():
        k = 0
        while k < len(w) and w[k] == li_index:
            k += 1
        if li_index in w[k:]:
            raise ValueError("Li not leftmost; polynomial is not normal ordered")
        out.setdefault(k, {})[w[k:]] = c
    return {k: NCPoly(v) for k, v in out.items()}


def certify_zero(p: NCPoly, with_li: RewriteSystem, base: RewriteSystem, lam: NCPoly,
                 li_index: int = 0) -> NCPoly:
    """Decide p = 0 where p may contain Li = Lambda^-1.

    Normal orders p to sum_k Li^k P_k, multiplies by Lambda^K on the left and
    normal orders sum_k Lambda^(K-k) P_k in the base algebra with Lambda
    written out.  Lambda is invertible, so p = 0 iff the result is 0.
    """
    nf = normal_order(p, with_li)
    parts = split_li(nf, li_index)
    if not parts:
        return NCPoly()
    K = max(parts)
    total = NCPoly()
    powers = {0: NCPoly.one()}
    for k in range(1, K + 1):
        powers[k] = normal_order(powers[k - 1] * lam, base)
    for k, P in parts.items():
        total = total + powers[K - k] * P
    return normal_order(total, base)


def heisenberg_1d_check() -> Dict[str, object]:
    """Residuals of the one-dimensional x, d, Lambda identities (0 = holds).

    d~ = -q^-1/2 Lambda^-1 d, p = -(i/2)(d - d~).  The Heisenberg relation is
    also tested with the rescaled p' = -i/(1 + q^-1) (d - d~), which is the
    normalization that makes q^1/2 x p' - q^-1/2 p' x = i Lambda^-1 hold.
    """
    base, withli, abstract = heisenberg_systems()
    A = withli.alphabet
    lam = lambda_explicit(A)
    li, x, d = A.gen("Li"), A.gen("x"), A.gen("d")
    sq, isq = q_pow(Fraction(1, 2)), q_pow(Fraction(-1, 2))
    dt = li * d * (-isq)
    res: Dict[str, object] = {}
    res["pbw_abstract_lambda"] = pbw_overlap_check(abstract)
    res["pbw_with_li"] = pbw_overlap_check(withli)
    res["lambda_x_scaling"] = normal_order(lam * x - x * lam * Q, base)
    res["lambda_d_scaling"] = normal_order(lam * d - d * lam * q_pow(-1), base)
    res["dt_x"] = certify_zero(dt * x - (NCPoly.one() * (-q_pow(-1)) + x * dt * q_pow(-1)), withli, base, lam)
    res["dt_d"] = certify_zero(dt * d - d * dt * Q, withli, base, lam)

    def heis(p):
        ip = CQScalar(0, 1)
        return (x * p) * sq - (p * x) * isq - li * ip

    half = CQScalar(0, Fraction(-1, 2))
    p = (d - dt) * half
    res["heisenberg_p"] = certify_zero(heis(p), withli, base, lam)
    pp = (d - dt) * (CQScalar(0, -1) * CQScalar(ONE / (ONE + q_pow(-1))))
    res["heisenberg_p_rescaled"] = certify_zero(heis(pp), withli, base, lam)
    # Lambda p = q^-1 p Lambda  <=>  p Li = q^-1 Li p  (conjugate by Li)
    res["lambda_p"] = certify_zero(p * li - li * p * q_pow(-1), withli, base, lam)
    return res


def heisenberg_failures(res: Dict[str, object]) -> List[str]:
    bad = []
    for k, v in res.items():
        if isinstance(v, list):
            if v:
                bad.append(k)
        elif not v.is_zero():
            bad.append(k)
    return bad


# --------------------------------------------------------------------------
# text formats


def format_rmatrix(R: RMatrix, labels: Optional[Sequence[str]] = None) -> str:
    """Aligned table with row/column labels (pairs like 12 by default)."""
    n = R.n
    labs = list(labels) if labels else [f"{i}{j}" for i, j in R.pairs()]
    N = n * n
    cells = [[render(R.mat.get(r, c)) for c in range(N)] for r in range(N)]
    width = max(max(len(s) for row in cells for s in row), max(len(l) for l in labs))
    head = " " * (len(max(labs, key=len)) + 2) + " ".join(l.rjust(width) for l in labs)
    lines = [head]
    for r in range(N):
        lines.append(labs[r].rjust(len(max(labs, key=len))) + "  " + " ".join(s.rjust(width) for s in cells[r]))
    return "\n".join(lines) + "\n"


def dump_rmatrix(R: RMatrix) -> str:
    lines = [f"dim {R.n}"]
    for (i, j, k, l), v in sorted(R.entries().items()):
        lines.append(f"({i},{j},{k},{l}) {render(v)}")
    return "\n".join(lines) + "\n"


def load_rmatrix(text: str) -> RMatrix:
    from .qarith import parse
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not lines or not lines[0].startswith("dim "):
        raise ValueError("R-matrix fixture must start with 'dim <n>'")
    n = int(lines[0].split()[1])
    ents = {}
    for ln in lines[1:]:
        idx, val = ln.split(")", 1)
        i, j, k, l = (int(s) for s in idx.strip("( ").split(","))
        if not all(1 <= v <= n for v in (i, j, k, l)):
            raise ValueError(f"index out of range in {ln!r}")
        ents[i, j, k, l] = parse(val.strip())
    return RMatrix.from_function(n, lambda i, j, k, l: ents.get((i, j, k, l), ZERO))

"""Lattice q-Fourier transform on the even points x = q^(2n).

    g~(q^(2 nu)) = N_q sum_n q^(2n) K(q^(2(nu+n))) g(q^(2n)),   K = cos_q or sin_q

The transform is its own inverse and preserves sum_n q^(2n) |g|^2.  All sums
are truncated to explicit integer windows (inclusive pairs (lo, hi)).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

from . import qspecial
from .numfmt import fmt

Window = Tuple[int, int]


@dataclass
class LatticeFunction:
    """Finitely supported g with samples[n] = g(q0^(2n))."""

    samples: Dict[int, complex] = field(default_factory=dict)
    q0: float = 1.1

    def __post_init__(self):
        if not self.q0 > 1:
            raise ValueError("q0 must exceed 1")
        self.samples = {int(n): complex(v) for n, v in self.samples.items() if v != 0}

    @classmethod
    def delta(cls, n: int, q0: float, value: complex = 1.0) -> "LatticeFunction":
        return cls({n: value}, q0)

    def norm2(self) -> float:
        """sum_n q^(2n) |g(q^(2n))|^2"""
        return math.fsum(self.q0 ** (2 * n) * abs(v) ** 2 for n, v in sorted(self.samples.items()))

    def combine(self, a: complex, other: "LatticeFunction", b: complex) -> "LatticeFunction":
        keys = set(self.samples) | set(other.samples)
        return LatticeFunction({k: a * self.samples.get(k, 0) + b * other.samples.get(k, 0)
                                for k in keys}, self.q0)


def normalization_nq(q0: float, tol: float = 1e-16, max_factors: int = 100000) -> float:
    """N_q = prod_{nu>=0} (1 - q^-2(2nu+1)) / (1 - q^-4(nu+1)).

    Factors are multiplied in until one differs from 1 by less than tol.
    """
    if not q0 > 1:
        raise ValueError("the product converges only for q0 > 1")
    prod = 1.0
    for nu in range(max_factors):
        f = (1 - q0 ** (-2 * (2 * nu + 1))) / (1 - q0 ** (-4 * (nu + 1)))
        prod *= f
        if abs(f - 1) < tol:
            return prod
    raise RuntimeError("normalization product did not settle")


def kernel(kind: str, m: int, q0: float) -> float:
    """K(q0^(2m)).  Only even lattice points are ever requested."""
    return qspecial.trig_lattice(kind, 2 * m, q0)


def transform(kind: str, g: LatticeFunction, out_window: Window) -> LatticeFunction:
    q0 = g.q0
    nq = normalization_nq(q0)
    lo, hi = out_window
    out = {}
    items = sorted(g.samples.items())
    for nu in range(lo, hi + 1):
        acc = 0j
        for n, v in items:
            acc += q0 ** (2 * n) * kernel(kind, nu + n, q0) * v
        out[nu] = nq * acc
    res = LatticeFunction({}, q0)
    res.samples = out  # keep explicit zeros so the window is visible
    return res


def double_transform_residual(kind: str, g: LatticeFunction, out_window: Window) -> float:
    """max_n |T(T g)(n) - g(n)| / max|g| over the support of g."""
    if not g.samples:
        return 0.0
    gt = transform(kind, g, out_window)
    support = (min(g.samples), max(g.samples))
    back = transform(kind, gt, support)
    scale = max(abs(v) for v in g.samples.values())
    return max(abs(back.samples[n] - g.samples.get(n, 0)) for n in range(support[0], support[1] + 1)) / scale


def plancherel_residual(kind: str, g: LatticeFunction, out_window: Window) -> float:
    n_in = g.norm2()
    if n_in == 0:
        raise ValueError("relative Plancherel residual undefined for the zero function")
    n_out = transform(kind, g, out_window).norm2()
    return abs(n_in - n_out) / n_in


def gram_matrix(kind: str, index_window: Window, sum_window: Window, q0: float) -> Dict[Tuple[int, int], float]:
    """G[n, m] = N_q^2 sum_nu q^(2nu) K(q^(2(n+nu))) K(q^(2(m+nu))), nu ascending."""
    nq2 = normalization_nq(q0) ** 2
    lo, hi = index_window
    slo, shi = sum_window
    idx = range(lo, hi + 1)
    out = {}
    for n in idx:
        for m in idx:
            terms = [q0 ** (2 * nu) * kernel(kind, n + nu, q0) * kernel(kind, m + nu, q0)
                     for nu in range(slo, shi + 1)]
            out[n, m] = nq2 * math.fsum(terms)
    return out


def gram_residual(kind: str, index_window: Window, sum_window: Window, q0: float) -> float:
    """max |G[n,m] - q^(-2n) delta_nm| * q^(2n) over the index window."""
    if index_window[0] > index_window[1]:
        return 0.0
    G = gram_matrix(kind, index_window, sum_window, q0)
    return max(abs(v - (q0 ** (-2 * n) if n == m else 0.0)) * q0 ** (2 * n)
               for (n, m), v in G.items())


def gram_asymmetry(kind: str, index_window: Window, sum_window: Window, q0: float) -> float:
    G = gram_matrix(kind, index_window, sum_window, q0)
    return max((abs(G[n, m] - G[m, n]) for n, m in G), default=0.0)


def suggest_window(kind: str, q0: float, tail: float = 1e-14, index_window: Window = (0, 0),
                   limit: int = 5000) -> Window:
    """Sum window whose dropped tail is below `tail` times the diagonal Gram entry.

    Below the window the terms behave like q^(2nu) K(0)^2, a geometric tail;
    above it the kernels decay faster than any power and a direct scan is used.
    """
    lo_i, hi_i = index_window
    # geometric tail: sum_{nu < L} q^(2nu) * c = c q^(2L) / (1 - q^-2)
    k0 = 1.0 if kind == "cos" else 0.0
    if k0:
        # relative to the diagonal scale q^(-2n), the tail is q^(2(L+n)) / (1 - q^-2)
        L = math.floor((math.log(tail * (1 - q0 ** -2))) / (2 * math.log(q0))) - lo_i - 1
    else:
        # sin_q(x) ~ x q / lam near 0: the tail goes like q^(6 nu)
        lam = q0 - 1 / q0
        c = (q0 / lam) ** 2
        L = math.floor(math.log(tail * (1 - q0 ** -6) / c) / (6 * math.log(q0))) - lo_i - 1
    # upper end: scan until weighted squared kernels stay tiny
    U = -hi_i
    quiet = 0
    while U < limit:
        w = max(q0 ** (2 * (U + n)) * kernel(kind, U + n, q0) ** 2 for n in range(lo_i, hi_i + 1))
        quiet = quiet + 1 if w < tail * 1e-3 else 0
        if quiet >= 3:
            break
        U += 1
    return (max(L, -limit), U)


def write_transform_csv(path, g_hat: LatticeFunction) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["nu", "x", "re", "im"])
        for nu in sorted(g_hat.samples):
            v = g_hat.samples[nu]
            w.writerow([nu, fmt(g_hat.q0 ** (2 * nu)), fmt(v.real), fmt(v.imag)])

"""Calculus on the commutative field algebra A_x (finite Laurent polynomials in x).

The maps are the q-derivative nabla (x^m -> [m] x^(m-1)), the scaling map
L (x^m -> q^-m x^m), the indefinite integral and the lattice integrals.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable

from .qarith import (CQScalar, LAM, QScalar, HalfLaurent, eval_at, parse,
                     q_pow, qnum, render)


class FieldElem:
    """f(x) = sum_k c_k x^k with exact coefficients (QScalar or CQScalar)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        c = {}
        for k, v in (coeffs or {}).items():
            if not isinstance(v, (QScalar, CQScalar)):
                v = QScalar(v)
            if not v.is_zero():
                c[int(k)] = v
        self.coeffs = c

    @classmethod
    def monomial(cls, k: int, c=1) -> "FieldElem":
        return cls({k: c})

    @classmethod
    def constant(cls, c) -> "FieldElem":
        return cls({0: c})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k):
        return self.coeffs.get(k, QScalar(0))

    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return FieldElem(out)

    __radd__ = __add__

    def __neg__(self):
        return FieldElem({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (QScalar, CQScalar, int, Fraction)):
            return FieldElem({k: v * other for k, v in self.coeffs.items()})
        out = {}
        for a, x in self.coeffs.items():
            for b, y in other.coeffs.items():
                p = x * y
                out[a + b] = out[a + b] + p if a + b in out else p
        return FieldElem(out)

    def __rmul__(self, other):
        return self * other

    def __eq__(self, other):
        other = _coerce(other)
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def degrees(self):
        return sorted(self.coeffs)

    def shift(self, k: int) -> "FieldElem":
        """Multiply by x^k."""
        return FieldElem({a + k: v for a, v in self.coeffs.items()})

    def conj(self) -> "FieldElem":
        return FieldElem({k: (v.conj() if isinstance(v, CQScalar) else v)
                          for k, v in self.coeffs.items()})

    def evaluate(self, x0, q0):
        """Numeric value at x = x0 with q = q0."""
        total = 0.0
        for k, v in self.coeffs.items():
            total += eval_at(v, q0) * x0 ** k
        return total

    def __repr__(self):
        return f"FieldElem({render_field(self)!r})"

    __str__ = lambda self: render_field(self)


def _coerce(x) -> FieldElem:
    if isinstance(x, FieldElem):
        return x
    return FieldElem.constant(x)


def X(k: int = 1) -> FieldElem:
    return FieldElem.monomial(k)


def render_field(f: FieldElem) -> str:
    if f.is_zero():
        return "0"
    return " + ".join(f"({render(f.coeffs[k])})*x^({k})" for k in sorted(f.coeffs, reverse=True))


def parse_field(text: str) -> FieldElem:
    """Inverse of render_field."""
    text = text.strip()
    if text == "0":
        return FieldElem()
    out = {}
    i = 0
    while i < len(text):
        if text[i] != "(":
            raise ValueError(f"expected '(' at {text[i:]!r}")
        depth, j = 0, i
        while True:
            if text[j] == "(":
                depth += 1
            elif text[j] == ")":
                depth -= 1
                if depth == 0:
                    break
            j += 1
        coeff = parse(text[i + 1:j])
        rest = text[j + 1:]
        if not rest.startswith("*x^("):
            raise ValueError(f"expected '*x^(' at {rest!r}")
        close = rest.index(")")
        k = int(rest[4:close])
        out[k] = out[k] + coeff if k in out else coeff
        i = j + 1 + close + 1
        if text.startswith(" + ", i):
            i += 3
    return FieldElem(out)


# --------------------------------------------------------------------------
# the maps


def nabla(f: FieldElem) -> FieldElem:
    return FieldElem({m - 1: qnum(m) * c for m, c in f.coeffs.items() if m != 0})


def l_shift(f: FieldElem, power: int = 1) -> FieldElem:
    """L^power, with L x^m = q^-m x^m."""
    if power == 0:
        return f
    return FieldElem({m: q_pow(-m * power) * c for m, c in f.coeffs.items()})


class NotInImageError(ValueError):
    pass


def grad_inverse(f: FieldElem) -> FieldElem:
    """Indefinite integral with vanishing constant term."""
    if -1 in f.coeffs:
        raise NotInImageError("not in image of nabla: x^-1 term present")
    return FieldElem({n + 1: c / qnum(n + 1) for n, c in f.coeffs.items()})


def grad_inverse_series(f: FieldElem, terms: int = 200, q0: float = 1.5) -> dict:
    """Numeric coefficients of the two geometric expansions of nabla^-1.

    Uses lambda*sum L^(2nu) L x f for non-negative powers and the other
    expansion for powers below -1, as a cross-check of grad_inverse.
    """
    lam = eval_at(LAM, q0)
    out = {}
    for n, c in f.coeffs.items():
        c0 = eval_at(c, q0)
        if n >= 0:
            s = sum(q0 ** (-(2 * v + 1) * (n + 1)) for v in range(terms))
            out[n + 1] = lam * s * c0
        elif n < -1:
            s = sum(q0 ** ((2 * v + 1) * (n + 1)) for v in range(terms))
            out[n + 1] = -lam * s * c0
        else:
            raise NotInImageError("not in image of nabla: x^-1 term present")
    return out


def definite_integral(f: FieldElem, a: int, b: int, q0=None, allow_inverse_x: bool = False):
    """Lattice integral lambda * sum <L x f>(x_mu) between lattice labels a <= b.

    Both labels even: x_mu = q^(2 mu) for mu = a/2+1 .. b/2.  Both odd:
    x_mu = q^(2 mu + 1) for mu = (a-1)/2+1 .. (b-1)/2.  Exact QScalar when q0
    is None, float otherwise.
    """
    if (a - b) % 2:
        raise ValueError("lattice endpoints must have the same parity")
    if a > b:
        raise ValueError("need a <= b")
    if -1 in f.coeffs and not allow_inverse_x:
        raise ValueError("x^-1 term present; pass allow_inverse_x=True")
    odd = a % 2
    N, M = (a - odd) // 2, (b - odd) // 2
    g = l_shift(f.shift(1), 1)
    if q0 is None:
        total = QScalar(0)
        for mu in range(N + 1, M + 1):
            e = 2 * mu + odd
            for k, c in g.coeffs.items():
                total = total + c * q_pow(e * k)
        return total * LAM
    q0 = float(q0)
    total = 0.0
    for mu in range(N + 1, M + 1):
        total += g.evaluate(q0 ** (2 * mu + odd), q0)
    return eval_at(LAM, q0) * total


def evaluate_on_lattice(f: FieldElem, label: int) -> QScalar:
    """Exact value of f at x = q^label."""
    total = QScalar(0)
    for k, c in f.coeffs.items():
        total = total + c * q_pow(k * label)
    return total


def jackson_product(f: FieldElem, g: FieldElem, q0: float, window=(-10, 10)) -> complex:
    """lambda * sum_{n, sigma} q0^n conj(f)(sigma q0^n) g(sigma q0^n), n in window."""
    q0 = float(q0)
    fc = {k: complex(eval_at(v, q0)).conjugate() for k, v in f.coeffs.items()}
    gc = {k: complex(eval_at(v, q0)) for k, v in g.coeffs.items()}
    total = 0j
    for n in range(window[0], window[1] + 1):
        for sigma in (1, -1):
            x0 = sigma * q0 ** n
            fv = sum(c * x0 ** k for k, c in fc.items())
            gv = sum(c * x0 ** k for k, c in gc.items())
            total += q0 ** n * fv * gv
    return eval_at(LAM, q0) * total


def exterior_d(f: FieldElem) -> FieldElem:
    """Coefficient of dx in df (with dx x = x dx, df = dx nabla f)."""
    return nabla(f)


# --------------------------------------------------------------------------
# identity residuals


def calculus_residuals(f: FieldElem, g: FieldElem) -> dict:
    """Residuals of the field-calculus identities on the pair (f, g); all must vanish."""
    Li = lambda h: l_shift(h, -1)
    L = lambda h: l_shift(h, 1)
    fg = f * g
    res = {
        "leibniz_Linv": nabla(fg) - (nabla(f) * Li(g) + L(f) * nabla(g)),
        "leibniz_L": nabla(fg) - (nabla(f) * L(g) + Li(f) * nabla(g)),
        "grouplike_L": L(fg) - L(f) * L(g),
        "grouplike_Linv": Li(fg) - Li(f) * Li(g),
        "green": (nabla(nabla(f)) * g - f * nabla(nabla(g)))
        - nabla(nabla(f) * Li(g) - Li(f) * nabla(g)),
        "exterior_360": exterior_d(fg) - (exterior_d(f) * Li(g) + L(f) * exterior_d(g)),
        "exterior_362": exterior_d(fg) - (exterior_d(f) * L(g) + Li(f) * exterior_d(g)),
    }
    # partial integration: both pieces combined, then integrated
    combined = nabla(f) * Li(g) + L(f) * nabla(g)
    res["partial_integration"] = (grad_inverse(combined)
                                  - (fg - FieldElem.constant(fg[0])))
    # definite version over a lattice window; handles x^-1 pieces separately
    lo, hi = -4, 6
    lhs = (definite_integral(nabla(f) * Li(g), lo, hi, allow_inverse_x=True)
           + definite_integral(L(f) * nabla(g), lo, hi, allow_inverse_x=True))
    rhs = evaluate_on_lattice(fg, hi) - evaluate_on_lattice(fg, lo)
    res["partial_integration_lattice"] = FieldElem.constant(lhs - rhs)
    return res


def homomorphism_residual(m: int) -> FieldElem:
    """(q^1/2 x nabla - q^-1/2 nabla x + q^-1/2 L) applied to x^m."""
    f = X(m)
    sq, isq = q_pow(Fraction(1, 2)), q_pow(Fraction(-1, 2))
    return nabla(f).shift(1) * sq - nabla(f.shift(1)) * isq + l_shift(f, 1) * isq


def operator_algebra_residuals(m: int) -> dict:
    """L x = q^-1 x L and L nabla = q nabla L applied to x^m."""
    f = X(m)
    return {
        "Lx": l_shift(f.shift(1), 1) - l_shift(f, 1).shift(1) * q_pow(-1),
        "Lnabla": l_shift(nabla(f), 1) - nabla(l_shift(f, 1)) * q_pow(1),
    }


def random_scalar(rng: random.Random, max_exp: int = 4) -> QScalar:
    """Small random Laurent polynomial in q^(1/2), occasionally divided by a q-number."""
    h = HalfLaurent({rng.randint(-max_exp, max_exp): Fraction(rng.randint(-5, 5), rng.randint(1, 3))
                     for _ in range(rng.randint(1, 3))})
    s = QScalar(h)
    if s.is_zero():
        s = QScalar(1)
    if rng.random() < 0.25:
        s = s / qnum(rng.randint(1, 3))
    return s


def random_field(rng: random.Random, lo: int = -8, hi: int = 8, terms: int = 4) -> FieldElem:
    return FieldElem({rng.randint(lo, hi): random_scalar(rng) for _ in range(terms)})


def random_pairs(count: int, seed: int = 0, lo: int = -8, hi: int = 8) -> Iterable:
    rng = random.Random(seed)
    for _ in range(count):
        yield random_field(rng, lo, hi), random_field(rng, lo, hi)

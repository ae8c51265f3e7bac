"""Exact scalars in the deformation parameter q.

Everything is stored in the variable t = q^(1/2), so half-integer powers of q
are ordinary Laurent monomials.  A QScalar is a reduced fraction of two
Laurent polynomials in t with rational coefficients.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import flint

_P = flint.fmpq_poly
_ZERO_P = _P([])
_ONE_P = _P([1])


class PoleError(ZeroDivisionError):
    """Raised when a QScalar is evaluated at a zero of its denominator."""


def _frac(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


def _fmpq(v: Fraction):
    return flint.fmpq(v.numerator, v.denominator)


def _as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


class HalfLaurent:
    """Laurent polynomial in t = q^(1/2): {exponent of t: Fraction}."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        c = {}
        for k, v in (coeffs or {}).items():
            v = _as_rational(v)
            if v:
                c[int(k)] = v
        self.coeffs = c

    @classmethod
    def monomial(cls, k: int, c=1) -> "HalfLaurent":
        return cls({k: c})

    def is_zero(self) -> bool:
        return not self.coeffs

    def min_exp(self) -> int:
        return min(self.coeffs)

    def max_exp(self) -> int:
        return max(self.coeffs)

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return HalfLaurent(out)

    def __neg__(self):
        return HalfLaurent({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for a, x in self.coeffs.items():
            for b, y in other.coeffs.items():
                out[a + b] = out.get(a + b, 0) + x * y
        return HalfLaurent(out)

    def __eq__(self, other):
        return isinstance(other, HalfLaurent) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def __repr__(self):
        return f"HalfLaurent({render_laurent(self)})"


def _poly_from_laurent(h: HalfLaurent):
    """Split h into (t-shift, polynomial with nonzero constant term)."""
    if h.is_zero():
        return 0, _ZERO_P
    lo = h.min_exp()
    coeffs = [0] * (h.max_exp() - lo + 1)
    for k, v in h.coeffs.items():
        coeffs[k - lo] = _fmpq(v)
    return lo, _P(coeffs)


def _strip_t(p):
    """Return (k, p / t^k) with t not dividing the result."""
    if p[0] != 0:
        return 0, p
    cs = p.coeffs()
    k = 0
    while cs[k] == 0:
        k += 1
    return k, _P(cs[k:])


def _shift_up(p, k: int):
    return _P([0] * k + p.coeffs()) if k else p


def _is_one(p) -> bool:
    return p.degree() == 0 and p[0] == 1


def _poly_key(p):
    return tuple((int(c.p), int(c.q)) for c in p.coeffs())


class QScalar:
    """Exact element of Q(t), t = q^(1/2), kept in reduced canonical form.

    Representation: t^sh * num / den where num and den are polynomials in t,
    neither divisible by t, coprime, and den has constant term 1.
    """

    __slots__ = ("_num", "_den", "_sh", "_hash")

    def __init__(self, value=0):
        if isinstance(value, QScalar):
            self._num, self._den, self._sh = value._num, value._den, value._sh
        elif isinstance(value, HalfLaurent):
            sh, p = _poly_from_laurent(value)
            self._num, self._den, self._sh = p, _ONE_P, sh
        else:
            v = _as_rational(value)
            self._num = _P([_fmpq(v)]) if v else _ZERO_P
            self._den, self._sh = _ONE_P, 0
        self._hash = None

    @classmethod
    def _raw(cls, num, den, sh):
        obj = cls.__new__(cls)
        obj._num, obj._den, obj._sh, obj._hash = num, den, sh, None
        return obj

    @classmethod
    def _make(cls, num, den, sh, reduce=True):
        if den.is_zero():
            raise ZeroDivisionError("QScalar with zero denominator")
        if num.is_zero():
            return cls._raw(_ZERO_P, _ONE_P, 0)
        k1, num = _strip_t(num)
        k2, den = _strip_t(den)
        sh += k1 - k2
        if reduce and den.degree() > 0:
            g = num.gcd(den)
            if g.degree() > 0:
                num, den = num // g, den // g
        c = den[0]
        if c != 1:
            num, den = num / c, den / c
        return cls._raw(num, den, sh)

    @classmethod
    def from_fraction(cls, num: HalfLaurent, den: HalfLaurent) -> "QScalar":
        s1, p1 = _poly_from_laurent(num)
        s2, p2 = _poly_from_laurent(den)
        if not p2:
            raise ZeroDivisionError("zero denominator")
        return cls._make(p1, p2, s1 - s2)

    # views ---------------------------------------------------------------
    @property
    def num(self) -> HalfLaurent:
        return HalfLaurent({k + self._sh: _frac(c) for k, c in enumerate(self._num.coeffs()) if c != 0})

    @property
    def den(self) -> HalfLaurent:
        return HalfLaurent({k: _frac(c) for k, c in enumerate(self._den.coeffs()) if c != 0})

    def is_zero(self) -> bool:
        return self._num.is_zero()

    def is_laurent(self) -> bool:
        return self._den.degree() == 0

    def is_monomial(self) -> bool:
        return self._den.degree() == 0 and self._num.degree() <= 0

    def laurent(self) -> HalfLaurent:
        if not self.is_laurent():
            raise ValueError(f"{self} is not a Laurent polynomial")
        return self.num

    def as_rational(self):
        """The value as a Fraction if it does not depend on q, else None."""
        if self.is_zero():
            return Fraction(0)
        if self.is_laurent() and self._sh == 0 and self._num.degree() == 0:
            return _frac(self._num[0])
        return None

    # arithmetic ----------------------------------------------------------
    @staticmethod
    def _coerce(x):
        if isinstance(x, QScalar):
            return x
        if isinstance(x, (int, Fraction, HalfLaurent)) or isinstance(x, Rational):
            return QScalar(x)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other._num.is_zero():
            return self
        if self._num.is_zero():
            return other
        s = min(self._sh, other._sh)
        a = _shift_up(self._num, self._sh - s)
        b = _shift_up(other._num, other._sh - s)
        if self._den.degree() == 0 and other._den.degree() == 0:
            return QScalar._make(a + b, _ONE_P, s, reduce=False)
        if self._den == other._den:
            return QScalar._make(a + b, self._den, s)
        return QScalar._make(a * other._den + b * self._den, self._den * other._den, s)

    __radd__ = __add__

    def __neg__(self):
        return QScalar._raw(-self._num, self._den, self._sh)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self._num.is_zero() or other._num.is_zero():
            return QScalar._raw(_ZERO_P, _ONE_P, 0)
        sh = self._sh + other._sh
        n1, d1, n2, d2 = self._num, self._den, other._num, other._den
        if d1.degree() == 0 and d2.degree() == 0:
            return QScalar._raw(n1 * n2, _ONE_P, sh)
        if d2.degree() > 0:
            g = n1.gcd(d2)
            if g.degree() > 0:
                n1, d2 = n1 // g, d2 // g
        if d1.degree() > 0:
            g = n2.gcd(d1)
            if g.degree() > 0:
                n2, d1 = n2 // g, d1 // g
        return QScalar._make(n1 * n2, d1 * d2, sh, reduce=False)

    __rmul__ = __mul__

    def inverse(self) -> "QScalar":
        if self._num.is_zero():
            raise ZeroDivisionError("inverse of zero QScalar")
        return QScalar._make(self._den, self._num, -self._sh, reduce=False)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("QScalar powers must be integers")
        if n < 0:
            return self.inverse() ** (-n)
        if self.is_monomial() and not self._num.is_zero():
            return QScalar._raw(self._num ** n, _ONE_P, self._sh * n)
        out, base = ONE, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # comparison ----------------------------------------------------------
    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self._sh == other._sh and self._num == other._num
                and self._den == other._den)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._sh, _poly_key(self._num), _poly_key(self._den)))
        return self._hash

    def __bool__(self):
        return not self._num.is_zero()

    # evaluation ----------------------------------------------------------
    def eval_t(self, t0):
        """Evaluate at t = t0 (float, complex, or mpmath number)."""
        if isinstance(t0, (float, int)) and abs(t0) > 1:
            return self._eval_reversed(float(t0))
        return self._eval(t0)

    def _eval_reversed(self, t0: float) -> float:
        # Horner in u = 1/t avoids overflow for high-degree coefficients
        u = 1.0 / t0
        dn, dd = self._num.degree(), self._den.degree()
        n = _horner_rev(self._num, u)
        d = _horner_rev(self._den, u)
        if d == 0 or abs(d) <= 4e-15 * sum(abs(x) * u ** k for k, x in enumerate(reversed(_float_coeffs(self._den)))):
            raise PoleError(f"denominator of {self} vanishes at t = {t0}")
        e = self._sh + dn - dd
        if n == 0:
            return 0.0
        try:
            return n / d * t0 ** e
        except OverflowError:
            return math.copysign(math.inf, n / d)

    def _eval(self, t0):
        d = _horner(self._den, t0)
        if d == 0 or _pole_like(self._den, t0, d):
            raise PoleError(f"denominator of {self} vanishes at t = {t0}")
        return _horner(self._num, t0) / d * t0 ** self._sh

    def __repr__(self):
        return f"QScalar({render(self)!r})"

    def __str__(self):
        return render(self)


def _float_coeffs(p):
    return [int(c.p) / int(c.q) for c in p.coeffs()]


def _horner(p, t0):
    if isinstance(t0, (float, complex, int)):
        conv = lambda c: int(c.p) / int(c.q)
    else:  # mpmath and friends: keep the rational coefficients exact
        conv = lambda c: type(t0)(int(c.p)) / int(c.q)
    acc = 0 * t0
    for c in reversed(p.coeffs()):
        acc = acc * t0 + conv(c)
    return acc


def _horner_rev(p, u):
    acc = 0.0
    for c in p.coeffs():
        acc = acc * u + int(c.p) / int(c.q)
    return acc


def _pole_like(p, t0, value) -> bool:
    # relative cancellation test against the size of the individual terms
    if not isinstance(t0, (float, int)):
        return False
    scale = sum(abs(c) * abs(t0) ** k for k, c in enumerate(_float_coeffs(p)))
    return abs(value) <= 4e-15 * scale


class CQScalar:
    """Complex combination re + i*im of two QScalars (q itself is real)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, QScalar) else QScalar(re)
        self.im = im if isinstance(im, QScalar) else QScalar(im)

    @staticmethod
    def _coerce(x):
        if isinstance(x, CQScalar):
            return x
        if isinstance(x, (QScalar, int, Fraction, HalfLaurent)):
            return CQScalar(x)
        if isinstance(x, complex):
            return CQScalar(Fraction(x.real), Fraction(x.imag))
        return NotImplemented

    def __add__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return CQScalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return CQScalar(-self.re, -self.im)

    def __sub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return CQScalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        if o.im.is_zero():
            return CQScalar(self.re * o.re, self.im * o.re)
        return CQScalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = CQScalar(1)
        for _ in range(n):
            out = out * self
        return out

    def conj(self) -> "CQScalar":
        return CQScalar(self.re, -self.im)

    def abs2(self) -> QScalar:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "CQScalar":
        n = self.abs2()
        if n.is_zero():
            raise ZeroDivisionError("inverse of zero CQScalar")
        return CQScalar(self.re / n, -self.im / n)

    def __truediv__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def eval_t(self, t0):
        return complex(self.re.eval_t(t0), self.im.eval_t(t0))

    def __repr__(self):
        return f"CQScalar({render(self)!r})"

    __str__ = lambda self: render(self)


ZERO = QScalar(0)
ONE = QScalar(1)
I = CQScalar(0, 1)


def t_pow(k: int) -> QScalar:
    """t^k = q^(k/2)."""
    return QScalar._raw(_ONE_P, _ONE_P, int(k))


def q_pow(e) -> QScalar:
    """q^e for integer or half-integer e."""
    e2 = Fraction(e) * 2
    if e2.denominator != 1:
        raise ValueError(f"q^{e} is not a half-integer power")
    return t_pow(int(e2))


Q = q_pow(1)
SQRT_Q = t_pow(1)
LAM = Q - q_pow(-1)


@lru_cache(maxsize=4096)
def qnum(m) -> QScalar:
    """q-number [m] = (q^m - q^-m)/(q - q^-1); m integer or half-integer."""
    m2 = Fraction(m) * 2
    if m2.denominator != 1:
        raise ValueError("qnum needs an integer or half-integer argument")
    if m2 < 0:
        return -qnum(-Fraction(m))
    if m2 % 2 == 0:
        n = int(m2) // 2
        return QScalar(HalfLaurent({2 * (n - 1 - 2 * k): 1 for k in range(n)}))
    return (q_pow(Fraction(m)) - q_pow(-Fraction(m))) / LAM


@lru_cache(maxsize=1024)
def qfact(n: int) -> QScalar:
    """q-factorial [n]! with [0]! = 1."""
    if n < 0:
        raise ValueError("qfact needs a non-negative argument")
    if n == 0:
        return ONE
    return qfact(n - 1) * qnum(n)


def _t0_of(q0):
    if isinstance(q0, (Fraction, int)) and not isinstance(q0, bool):
        q0 = Fraction(q0)
        if q0 < 0:
            raise ValueError("q0 must be non-negative")
        return math.sqrt(q0.numerator / q0.denominator)
    q0 = float(q0)
    if q0 < 0:
        raise ValueError("q0 must be non-negative")
    return math.sqrt(q0)


def eval_at(s, q0):
    """Numeric value of a QScalar/CQScalar at q = q0 (t = sqrt(q0) computed once)."""
    t0 = _t0_of(q0)
    if isinstance(s, (int, Fraction)):
        return float(s)
    return s.eval_t(t0)


# --------------------------------------------------------------------------
# text form


def _fmt_rat(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_qpow(k: int) -> str:
    if k == 0:
        return ""
    if k % 2:
        return f"q^({k}/2)"
    e = k // 2
    if e == 1:
        return "q"
    return f"q^{e}" if e > 0 else f"q^({e})"


def render_laurent(h: HalfLaurent) -> str:
    if h.is_zero():
        return "0"
    parts = []
    for k in sorted(h.coeffs, reverse=True):
        c = h.coeffs[k]
        mono = _fmt_qpow(k)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not mono:
            body = _fmt_rat(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_rat(a)}*{mono}"
        parts.append((sign, body))
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


def render(x) -> str:
    """Canonical text of a QScalar or CQScalar; parse(render(x)) == x."""
    if isinstance(x, CQScalar):
        if x.im.is_zero():
            return render(x.re)
        im = f"i*({render(x.im)})"
        return im if x.re.is_zero() else f"({render(x.re)}) + {im}"
    if not isinstance(x, QScalar):
        x = QScalar(x)
    num = render_laurent(x.num)
    if x.is_laurent():
        return num
    return f"({num})/({render_laurent(x.den)})"


_TOKEN = re.compile(r"\s*(?:(\d+)|(q|i|lambda|lam)|(\*\*|[-+*/^()]))")


def parse(text: str):
    """Parse a rational expression in q (and optionally i) into a QScalar or CQScalar."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse {text[pos:]!r}")
        tokens.append(m.group(1) or m.group(2) or ("^" if m.group(3) == "**" else m.group(3)))
        pos = m.end()
    p = _Parser(tokens)
    val = p.expr()
    if p.i != len(tokens):
        raise ValueError(f"trailing input in {text!r}")
    if isinstance(val, CQScalar) and val.im.is_zero():
        return val.re
    return val


class _Parser:
    def __init__(self, tokens):
        self.toks, self.i = tokens, 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expect=None):
        tok = self.peek()
        if tok is None or (expect is not None and tok != expect):
            raise ValueError(f"expected {expect!r}, got {tok!r}")
        self.i += 1
        return tok

    def expr(self):
        val = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            val = val * rhs if op == "*" else val / rhs
        return val

    def unary(self):
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.power()

    def exponent(self) -> Fraction:
        if self.peek() == "(":
            self.take("(")
            sign = 1
            if self.peek() in ("-", "+"):
                sign = -1 if self.take() == "-" else 1
            e = Fraction(int(self.take()))
            if self.peek() == "/":
                self.take()
                e /= int(self.take())
            self.take(")")
            return sign * e
        sign = 1
        if self.peek() == "-":
            self.take()
            sign = -1
        return sign * Fraction(int(self.take()))

    def power(self):
        tok = self.peek()
        if tok == "q":
            self.take()
            if self.peek() == "^":
                self.take()
                return q_pow(self.exponent())
            return Q
        base = self.atom()
        if self.peek() == "^":
            self.take()
            e = self.exponent()
            if e.denominator != 1:
                raise ValueError("only q admits half-integer exponents")
            return base ** int(e)
        return base

    def atom(self):
        tok = self.take()
        if tok == "(":
            val = self.expr()
            self.take(")")
            return val
        if tok.isdigit():
            return QScalar(int(tok))
        if tok == "i":
            return CQScalar(0, 1)
        if tok in ("lambda", "lam"):
            return LAM
        raise ValueError(f"unexpected token {tok!r}")

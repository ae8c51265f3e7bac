"""Noncommutative polynomials and normal ordering by rewriting.

Words are tuples of generator indices; a word is normally ordered when its
indices never decrease.  Rules rewrite a word (usually a disordered pair) to
a polynomial of words that are smaller in degree-lexicographic order, so
rewriting terminates.  Coefficients are QScalar or CQScalar.
"""
from __future__ import annotations

import heapq
import re
from dataclasses import dataclass, field
from importlib import resources
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .qarith import CQScalar, QScalar, parse, render

Word = Tuple[int, ...]


def _is_zero(c) -> bool:
    return c.is_zero()


def _coef(c):
    if isinstance(c, (QScalar, CQScalar)):
        return c
    return QScalar(c)


class NCPoly:
    """Finite sum of coefficient * word over a fixed alphabet."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Word, object]] = None):
        t = {}
        for w, c in (terms or {}).items():
            c = _coef(c)
            if not _is_zero(c):
                t[tuple(w)] = c
        self.terms = t

    @classmethod
    def word(cls, w: Sequence[int], c=1) -> "NCPoly":
        return cls({tuple(w): c})

    @classmethod
    def one(cls) -> "NCPoly":
        return cls({(): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "NCPoly") -> "NCPoly":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out[w] + c if w in out else c
        return NCPoly(out)

    def __neg__(self):
        return NCPoly({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, NCPoly):
            out: Dict[Word, object] = {}
            for a, x in self.terms.items():
                for b, y in other.terms.items():
                    w = a + b
                    p = x * y
                    out[w] = out[w] + p if w in out else p
            return NCPoly(out)
        other = _coef(other)
        return NCPoly({w: c * other for w, c in self.terms.items()})

    def __rmul__(self, other):
        other = _coef(other)
        return NCPoly({w: other * c for w, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, NCPoly) and (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def leading_word(self) -> Optional[Word]:
        return max(self.terms, key=order_key, default=None)

    def __repr__(self):
        return f"NCPoly({self.terms!r})"


def order_key(w: Word):
    """Degree first, then lexicographic on indices."""
    return (len(w), w)


def is_normal(w: Word) -> bool:
    return all(w[i] <= w[i + 1] for i in range(len(w) - 1))


# --------------------------------------------------------------------------
# alphabets and systems


@dataclass(frozen=True)
class Alphabet:
    names: Tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("generator names must be unique")
        for n in self.names:
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", n) or n in _RESERVED:
                raise ValueError(f"bad generator name {n!r}")

    def __len__(self):
        return len(self.names)

    def idx(self, name: str) -> int:
        return self.names.index(name)

    def gen(self, name: str, c=1) -> NCPoly:
        return NCPoly.word((self.idx(name),), c)

    def mono(self, *names: str, c=1) -> NCPoly:
        return NCPoly.word(tuple(self.idx(n) for n in names), c)


_RESERVED = {"q", "i", "lambda", "lam"}


class NonTerminationError(RuntimeError):
    pass


class OrientationError(ValueError):
    pass


@dataclass
class RewriteSystem:
    alphabet: Alphabet
    rules: Dict[Word, NCPoly]
    terminating: bool = True
    relations: List[NCPoly] = field(default_factory=list)

    def __post_init__(self):
        self._lens = sorted({len(w) for w in self.rules})
        if not self.relations:
            self.relations = [NCPoly.word(w) - r for w, r in self.rules.items()]
        if self.terminating:
            for w, rhs in self.rules.items():
                for v in rhs.terms:
                    if order_key(v) >= order_key(w):
                        raise OrientationError(
                            f"rule {format_word(w, self.alphabet)} -> ... has non-decreasing term "
                            f"{format_word(v, self.alphabet)}")

    def find_redex(self, w: Word) -> Optional[Tuple[int, Word]]:
        """Leftmost position where a rule applies."""
        for i in range(len(w)):
            for L in self._lens:
                if i + L <= len(w) and w[i:i + L] in self.rules:
                    return i, w[i:i + L]
        return None

    def is_reduced(self, w: Word) -> bool:
        return self.find_redex(w) is None

    def extend(self, extra: Dict[Word, NCPoly], alphabet: Optional[Alphabet] = None) -> "RewriteSystem":
        rules = dict(self.rules)
        for w, r in extra.items():
            if w in rules:
                raise ValueError(f"duplicate rule for {format_word(w, alphabet or self.alphabet)}")
            rules[w] = r
        return RewriteSystem(alphabet or self.alphabet, rules, self.terminating)


def normal_order(p: NCPoly, sys: RewriteSystem, fuel: int = 10 ** 6) -> NCPoly:
    """Rewrite until no rule applies.

    Largest words are rewritten first, so equal words produced by different
    branches merge before being rewritten again.
    """
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    pending: Dict[Word, object] = dict(p.terms)
    heap = [(-len(w), tuple(-i for i in w), w) for w in pending]
    heapq.heapify(heap)
    done: Dict[Word, object] = {}
    steps = 0
    while heap:
        _, _, w = heapq.heappop(heap)
        c = pending.pop(w, None)
        if c is None or _is_zero(c):
            continue
        red = sys.find_redex(w)
        if red is None:
            done[w] = done[w] + c if w in done else c
            continue
        steps += 1
        if steps > fuel:
            raise NonTerminationError(f"fuel exhausted while rewriting {w!r}")
        i, lhs = red
        pre, post = w[:i], w[i + len(lhs):]
        for v, d in sys.rules[lhs].terms.items():
            nw = pre + v + post
            if nw in pending:
                pending[nw] = pending[nw] + c * d
            else:
                pending[nw] = c * d
                heapq.heappush(heap, (-len(nw), tuple(-k for k in nw), nw))
    return NCPoly(done)


def _overlaps(sys: RewriteSystem):
    """Critical words: overlaps u = a b c with a b and b c both rule words, plus inclusions."""
    lhs = list(sys.rules)
    seen = set()
    for l1 in lhs:
        for l2 in lhs:
            for k in range(1, min(len(l1), len(l2))):
                if l1[-k:] == l2[:k]:
                    w = l1 + l2[k:]
                    key = (w, l1, 0, l2, len(l1) - k)
                    if key not in seen:
                        seen.add(key)
                        yield key
            if l1 != l2 and len(l2) < len(l1):
                for s in range(len(l1) - len(l2) + 1):
                    if l1[s:s + len(l2)] == l2:
                        key = (l1, l1, 0, l2, s)
                        if key not in seen:
                            seen.add(key)
                            yield key


def _apply_at(w: Word, lhs: Word, pos: int, sys: RewriteSystem) -> NCPoly:
    pre, post = w[:pos], w[pos + len(lhs):]
    return NCPoly({pre + v + post: c for v, c in sys.rules[lhs].terms.items()})


@dataclass
class OverlapFailure:
    word: Word
    witness: NCPoly
    text: str = ""


def pbw_overlap_check(sys: RewriteSystem, fuel: int = 10 ** 6) -> List[OverlapFailure]:
    """Resolve every critical word two ways; report differing normal forms.

    Systems that are not terminating are checked by degree-3 linear algebra
    instead (see degree3_dependencies).
    """
    if not sys.terminating:
        return [OverlapFailure((), w, format_poly(w, sys.alphabet)) for w in degree3_dependencies(sys)]
    fails = []
    for w, l1, p1, l2, p2 in _overlaps(sys):
        a = normal_order(_apply_at(w, l1, p1, sys), sys, fuel)
        b = normal_order(_apply_at(w, l2, p2, sys), sys, fuel)
        d = a - b
        if not d.is_zero():
            fails.append(OverlapFailure(w, d, format_poly(d, sys.alphabet)))
    return fails


def _words_up_to(n_gens: int, deg: int):
    for d in range(deg + 1):
        yield from product(range(n_gens), repeat=d)


def degree3_dependencies(sys: RewriteSystem, max_degree: int = 3) -> List[NCPoly]:
    """Linear relations among normally ordered words forced by the ideal up to max_degree.

    Spans u * r * v for every defining relation r and words u, v with
    deg(u r v) <= max_degree, eliminates non-normal words first, and returns
    the rows left over: each is a nontrivial linear combination of ordered
    words that lies in the ideal, i.e. a PBW failure.  Empty list = PBW holds
    through max_degree.
    """
    n = len(sys.alphabet)
    rows: List[Dict[Word, object]] = []
    for r in sys.relations:
        dr = r.degree()
        for du in range(max_degree - dr + 1):
            for dv in range(max_degree - dr - du + 1):
                for u in product(range(n), repeat=du):
                    for v in product(range(n), repeat=dv):
                        t = NCPoly.word(u) * r * NCPoly.word(v)
                        if not t.is_zero():
                            rows.append(dict(t.terms))
    # column order: non-normal words first, then normal words, large to small
    def col_key(w):
        return (is_normal(w), -len(w), tuple(-x for x in w))
    basis: Dict[Word, Dict[Word, object]] = {}
    leftovers = []
    for row in rows:
        row = dict(row)
        while row:
            piv = min(row, key=col_key)
            if piv in basis:
                b = basis[piv]
                f = row[piv] / b[piv]
                for w, c in b.items():
                    nv = row[w] - f * c if w in row else -(f * c)
                    if _is_zero(nv):
                        row.pop(w, None)
                    else:
                        row[w] = nv
                continue
            basis[piv] = row
            break
    for piv, row in basis.items():
        if is_normal(piv):
            leftovers.append(row)
    # fully reduce the leftovers against each other for a canonical witness
    out = []
    for row in leftovers:
        p = NCPoly(row)
        lead = p.leading_word()
        out.append(p * p.terms[lead].inverse())
    return out


def commutant_residual(z: NCPoly, sys: RewriteSystem, gens: Iterable[NCPoly]) -> List[NCPoly]:
    return [normal_order(z * g - g * z, sys) for g in gens]


def system_from_pairs(alphabet: Alphabet, relations: Iterable[Tuple[NCPoly, NCPoly]],
                      allow_nonterminating: bool = False) -> RewriteSystem:
    """Compile equalities lhs = rhs into rules.

    Each relation is solved for its largest non-normal word.  A remaining term
    that is not smaller makes the relation non-orientable; it is rejected
    unless allow_nonterminating is set (the system is then only usable for
    the linear-algebra PBW check).
    """
    rules: Dict[Word, NCPoly] = {}
    rels = []
    terminating = True
    for lhs, rhs in relations:
        d = lhs - rhs
        if d.is_zero():
            continue
        rels.append(d)
        bad = [w for w in d.terms if not is_normal(w)]
        if not bad:
            # a truncation such as dx dx = 0: rewrite the largest word away
            top = max(d.terms, key=order_key)
            if top in rules or len(top) < 2:
                raise OrientationError(f"relation {format_poly(d, alphabet)} = 0 has no disordered word")
            bad = [top]
        lead = max(bad, key=order_key)
        c = d.terms[lead]
        rest = NCPoly({w: v for w, v in d.terms.items() if w != lead})
        for w in rest.terms:
            if order_key(w) > order_key(lead):
                if not allow_nonterminating:
                    raise OrientationError(
                        f"non-orientable relation: term {format_word(w, alphabet)} exceeds "
                        f"{format_word(lead, alphabet)}")
                terminating = False
        if lead in rules:
            raise ValueError(f"duplicate relation for {format_word(lead, alphabet)}")
        rules[lead] = rest * (-c.inverse())
    return RewriteSystem(alphabet, rules, terminating, rels)


# --------------------------------------------------------------------------
# text form


def format_word(w: Word, alphabet: Alphabet) -> str:
    return " ".join(alphabet.names[i] for i in w) if w else "1"


def format_poly(p: NCPoly, alphabet: Alphabet) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for w in sorted(p.terms, key=order_key, reverse=True):
        c = render(p.terms[w])
        body = " ".join(alphabet.names[i] for i in w)
        if c == "1":
            parts.append(body or "1")
        else:
            parts.append(f"({c})" + (" " + body if body else ""))
    return " + ".join(parts)


def parse_poly(text: str, alphabet: Alphabet) -> NCPoly:
    """Parse terms like `(q^-1) a b + c d - 1` (coefficients in parentheses)."""
    text = text.strip()
    out = NCPoly()
    i, sign = 0, 1
    n = len(text)
    while i < n:
        while i < n and text[i].isspace():
            i += 1
        if i < n and text[i] in "+-":
            sign = 1 if text[i] == "+" else -1
            i += 1
            continue
        coeff = QScalar(1)
        if i < n and text[i] == "(":
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
            i = j + 1
        j = i
        while j < n and text[j] not in "+-(":
            j += 1
        names = text[i:j].split()
        i = j
        if names == ["1"]:
            names = []
        elif names and re.fullmatch(r"\d+", names[0]):
            coeff = coeff * QScalar(int(names[0]))
            names = names[1:]
        w = tuple(alphabet.idx(nm) for nm in names)
        out = out + NCPoly.word(w, coeff if sign > 0 else -coeff)
        sign = 1
    return out


def parse_relations(text: str) -> Tuple[Alphabet, List[Tuple[NCPoly, NCPoly]], dict]:
    """Relation file: `# generators: a b c d`, optional `# option: value`, then `LHS = RHS` lines."""
    names = None
    opts = {}
    rels_text = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = re.match(r"#\s*(\w+)\s*:\s*(.*)", line)
            if m:
                key, val = m.group(1), m.group(2).strip()
                if key == "generators":
                    names = tuple(val.split())
                else:
                    opts[key] = val
            continue
        if "=" not in line:
            raise ValueError(f"relation line without '=': {line!r}")
        rels_text.append(line)
    if names is None:
        raise ValueError("missing '# generators:' header")
    alpha = Alphabet(names)
    rels = []
    for line in rels_text:
        lhs, rhs = line.split("=", 1)
        rels.append((parse_poly(lhs, alpha), parse_poly(rhs, alpha)))
    return alpha, rels, opts


def load_system_text(text: str) -> RewriteSystem:
    alpha, rels, opts = parse_relations(text)
    allow = opts.get("terminating", "yes").lower() == "no"
    return system_from_pairs(alpha, rels, allow_nonterminating=allow)


def load_fixture(name: str) -> RewriteSystem:
    """One of the bundled relation sets in qdeform/data (name without .txt)."""
    text = resources.files("qdeform").joinpath("data", f"{name}.txt").read_text()
    return load_system_text(text)


def fixture_names() -> List[str]:
    d = resources.files("qdeform").joinpath("data")
    return sorted(p.name[:-4] for p in d.iterdir() if p.name.endswith(".txt"))


def dump_system(sys: RewriteSystem) -> str:
    lines = ["# generators: " + " ".join(sys.alphabet.names)]
    if not sys.terminating:
        lines.append("# terminating: no")
    for w in sorted(sys.rules, key=order_key):
        lines.append(f"{format_word(w, sys.alphabet)} = {format_poly(sys.rules[w], sys.alphabet)}")
    return "\n".join(lines) + "\n"


def same_rules(a: RewriteSystem, b: RewriteSystem) -> bool:
    """Rule-by-rule equality, comparing generator names."""
    if a.alphabet.names != b.alphabet.names:
        return False
    return set(a.rules) == set(b.rules) and all(a.rules[w] == b.rules[w] for w in a.rules)

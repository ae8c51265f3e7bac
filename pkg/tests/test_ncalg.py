import pytest
from hypothesis import given, strategies as st

from qdeform.ncalg import (Alphabet, NCPoly, OrientationError, commutant_residual,
                           degree3_dependencies, dump_system, fixture_names, format_poly, is_normal,
                           load_fixture, load_system_text, normal_order, order_key, parse_poly,
                           pbw_overlap_check, same_rules, system_from_pairs)
from qdeform.qarith import LAM, ONE, Q, q_pow

SL2 = load_fixture("sl2")
A = SL2.alphabet


@st.composite
def polys(draw, alphabet=A, max_len=3):
    n = len(alphabet)
    words = draw(st.lists(st.lists(st.integers(0, n - 1), max_size=max_len), min_size=1, max_size=4))
    coeffs = [draw(st.sampled_from([ONE, -ONE, Q, q_pow(-1), LAM, Q + 2])) for _ in words]
    p = NCPoly()
    for w, c in zip(words, coeffs):
        p = p + NCPoly.word(tuple(w), c)
    return p


def test_single_swaps():
    assert normal_order(A.mono("b", "a"), SL2) == A.mono("a", "b", c=q_pow(-1))
    assert normal_order(A.mono("a", "b", "c"), SL2) == A.mono("a", "b", "c")


def test_one_dimensional_derivative():
    S = load_system_text("# generators: x d\nd x = 1 + (q) x d\n")
    assert normal_order(S.alphabet.mono("d", "x"), S) == NCPoly.one() + S.alphabet.mono("x", "d", c=Q)
    assert not pbw_overlap_check(S)


def test_rule_orientation():
    for w, rhs in SL2.rules.items():
        assert not is_normal(w)
        assert all(order_key(v) < order_key(w) for v in rhs.terms)
    assert len(SL2.rules) == 6


def test_pbw_holds_for_quantum_matrices():
    assert pbw_overlap_check(SL2) == []
    assert degree3_dependencies(SL2) == []


def test_commutative_system_is_pbw():
    S = load_system_text("# generators: a b\nb a = a b\n")
    assert pbw_overlap_check(S) == []


def test_counterexample_fails_with_cubic_witness():
    S = load_fixture("pbw_counterexample")
    assert not S.terminating
    fails = pbw_overlap_check(S)
    assert len(fails) == 1
    B = S.alphabet
    want = B.mono("x", "x", "x") + B.mono("y", "y", "y") + B.mono("x", "x", "y") + B.mono("x", "y", "y")
    w = fails[0].witness
    assert w == want or w == want * (-ONE)


def test_counterexample_is_rejected_without_flag():
    with pytest.raises(OrientationError):
        load_system_text("# generators: x y\ny x = x y + x x + y y\n")


def test_quantum_determinant_is_central():
    det = A.mono("a", "d") - A.mono("b", "c", c=Q)
    assert all(r.is_zero() for r in commutant_residual(det, SL2, [A.gen(g) for g in "abcd"]))
    assert all(r.is_zero() for r in commutant_residual(NCPoly.one(), SL2, [A.gen("a")]))


def test_generator_is_not_central():
    res = commutant_residual(A.gen("a"), SL2, [A.gen("b")])
    assert not res[0].is_zero()


def test_duplicate_relation_rejected():
    B = Alphabet(("x", "y"))
    rel = (B.mono("y", "x"), B.mono("x", "y", c=Q))
    with pytest.raises(ValueError):
        system_from_pairs(B, [rel, (B.mono("y", "x"), B.mono("x", "y"))])


def test_truncation_relation():
    B = Alphabet(("x", "y"))
    S = system_from_pairs(B, [(B.mono("y", "x"), B.mono("x", "y", c=Q)), (B.mono("x", "x"), NCPoly())])
    assert normal_order(B.mono("x", "y", "x"), S).is_zero()


def test_text_round_trip():
    for name in fixture_names():
        S = load_fixture(name)
        assert same_rules(load_system_text(dump_system(S)), S), name


def test_parse_and_format():
    p = parse_poly("(q^-1) a b + c d - 1", A)
    assert p == A.mono("a", "b", c=q_pow(-1)) + A.mono("c", "d") - NCPoly.one()
    assert parse_poly(format_poly(p, A), A) == p


@given(polys())
def test_normal_form_is_idempotent_and_reduced(p):
    nf = normal_order(p, SL2)
    assert normal_order(nf, SL2) == nf
    assert all(SL2.is_reduced(w) for w in nf.terms)


@given(polys(), polys())
def test_normal_form_is_linear(p, r):
    assert normal_order(p + r, SL2) == normal_order(p, SL2) + normal_order(r, SL2)


@given(polys(max_len=2), polys(max_len=2))
def test_normal_form_respects_products(p, r):
    lhs = normal_order(p * r, SL2)
    assert lhs == normal_order(normal_order(p, SL2) * normal_order(r, SL2), SL2)


@given(polys(max_len=2), st.integers(0, 5))
def test_relations_lie_in_the_ideal(p, k):
    rel = SL2.relations[k]
    assert normal_order(p * rel, SL2).is_zero()
    assert normal_order(rel * p, SL2).is_zero()

from fractions import Fraction

from hypothesis import settings, strategies as st

from qdeform.qarith import HalfLaurent, QScalar

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

small_frac = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def laurent(draw, max_terms=3, span=6):
    terms = draw(st.dictionaries(st.integers(-span, span), small_frac, min_size=1, max_size=max_terms))
    return HalfLaurent(terms)


@st.composite
def qscalars(draw, nonzero=False):
    num = draw(laurent())
    den = draw(laurent())
    if den.is_zero():
        den = HalfLaurent({0: 1})
    s = QScalar.from_fraction(num, den)
    if nonzero and s.is_zero():
        s = QScalar(Fraction(draw(st.integers(1, 5))))
    return s

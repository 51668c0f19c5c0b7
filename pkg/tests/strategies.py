from hypothesis import strategies as st

from kmunproj.poly import Field, GradedRing, Polynomial

R3 = GradedRing(("x", "y", "z"), (1, 1, 1), Field(101))
RW = GradedRing(("a", "b", "c"), (1, 2, 3), Field(101))

exponents = st.tuples(*[st.integers(0, 3)] * 3)
coefficients = st.integers(1, 100)


@st.composite
def polynomials(draw, ring=R3, max_terms=5):
    terms = draw(st.dictionaries(exponents, coefficients, max_size=max_terms))
    return Polynomial(ring, terms)


@st.composite
def forms(draw, ring=R3, degree=None, max_terms=4):
    d = draw(st.integers(1, 3)) if degree is None else degree
    basis = ring.monomials_of_degree(d)
    picks = draw(st.lists(st.sampled_from(basis), min_size=1, max_size=max_terms, unique=True))
    return Polynomial(ring, {m: draw(coefficients) for m in picks})

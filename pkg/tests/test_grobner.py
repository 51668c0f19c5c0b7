import itertools

import pytest
from hypothesis import given, strategies as st

from kmunproj.grobner import (BudgetExceeded, Ideal, MonomialOrder, eliminate, groebner_basis, hilbert_numerator,
                              intersect, is_irrelevant, projective_dimension_and_degree, saturate,
                              saturate_by_element)
from kmunproj.poly import Field, GradedRing, Polynomial, random_form
from kmunproj.reproduce import membership_cases, membership_oracle
from kmunproj.singularity import count_projective_points
from kmunproj.unprojection import codim3_instance, segre_cone_ideal
from strategies import R3, forms


def hilbert_function(I, d):
    """Number of standard monomials of degree d."""
    leads = I.leading_monomials()
    return sum(1 for m in I.ring.monomials_of_degree(d)
               if not any(all(a <= b for a, b in zip(l, m)) for l in leads))


def series_coefficients(numerator, weights, top):
    """Coefficients up to t^top of N(t) / prod(1 - t^w)."""
    c = [0] * (top + 1)
    for k, v in numerator.items():
        if k <= top:
            c[k] += v
    for w in weights:
        for i in range(w, top + 1):
            c[i] += c[i - w]
    return c


def test_twisted_cubic():
    R = GradedRing(("x", "y", "z", "w"), (1, 1, 1, 1), Field(101))
    I = Ideal.from_strings(R, ["x*z - y^2", "y*w - z^2", "x*w - y*z"])
    assert len(I.groebner_basis()) == 3
    assert projective_dimension_and_degree(I) == (1, 3)


def test_reduced_basis_is_monic_and_interreduced():
    I = Ideal.from_strings(R3, ["x^2 - y*z", "x*y - z^2"])
    G = I.groebner_basis()
    leads = [g.leading_monomial() for g in G]
    for g in G:
        assert g.leading_coefficient() == 1
        for m in g.terms:
            assert not any(all(a <= b for a, b in zip(l, m)) for l in leads if l != g.leading_monomial())


def test_coprime_leads_regression():
    # leading exponents 2 and 4 in the same variable once passed for coprime and dropped an S-pair
    R = GradedRing.standard((1,) * 5 + (2,))
    res = codim3_instance(R, (2, 2, 2), (3, 4), 1)
    I = Ideal(R, res.x_generators)
    assert [g.degree() for g in I.groebner_basis()].count(6) >= 1
    want = series_coefficients({0: 1, 3: -1, 4: -1, 7: 1}, R.weights, 9)
    assert [hilbert_function(I, d) for d in range(10)] == want


@pytest.mark.parametrize("degrees,weights", [((2, 3), (1,) * 5), ((3, 4), (1,) * 5 + (2,)),
                                             ((4, 6), (1, 1, 1, 2, 2, 3)), ((2, 2, 2), (1,) * 6)])
def test_complete_intersection_hilbert_function(degrees, weights):
    R = GradedRing.standard(weights)
    I = Ideal(R, [random_form(R, d, 3, "ci", k) for k, d in enumerate(degrees)])
    num = {0: 1}
    for d in degrees:
        num = {k: num.get(k, 0) - num.get(k - d, 0) for k in range(max(num) + d + 1)}
    want = series_coefficients(num, weights, 12)
    assert [hilbert_function(I, d) for d in range(13)] == want
    assert hilbert_numerator(I.leading_monomials(), weights) == {k: v for k, v in num.items() if v}


def test_membership_and_normal_form():
    I = Ideal.from_strings(R3, ["x^2 - y*z", "x*y - z^2"])
    assert R3.parse("x^3 - x*y*z") in I
    assert R3.parse("x") not in I
    f = R3.parse("x^3 + y")
    assert I.normal_form(f) == I.normal_form(I.normal_form(f))


def test_ideal_equality_is_order_independent():
    a = Ideal.from_strings(R3, ["x - y", "y - z"])
    b = Ideal.from_strings(R3, ["y - z", "x - z"])
    assert a == b
    assert a != Ideal.from_strings(R3, ["x - y"])


def test_elimination_twisted_cubic():
    R = GradedRing(("s", "t", "x", "y", "z", "w"), (1, 1, 3, 3, 3, 3), Field(101))
    I = Ideal.from_strings(R, ["x - s^3", "y - s^2*t", "z - s*t^2", "w - t^3"])
    E = eliminate(I, ["s", "t"])
    assert E.ring.variables == ("x", "y", "z", "w")
    twisted = Ideal.from_strings(E.ring, ["x*z - y^2", "y*w - z^2", "x*w - y*z"])
    assert E == twisted


def test_elimination_orders():
    o = MonomialOrder.eliminating([0, 2])
    assert o.blocks(4)[0] == (0, 2)


def test_saturation_removes_embedded_component():
    # (x^2, x*y) = (x) cap (x^2, y); saturating by y recovers (x)
    I = Ideal.from_strings(R3, ["x^2", "x*y"])
    assert saturate_by_element(I, R3.var("y")) == Ideal.from_strings(R3, ["x"])
    # the component (x^2, y) sits away from V(y, z), so saturating by (y, z) keeps it
    assert saturate(I, [R3.var("y"), R3.var("z")]) == I
    J = Ideal.from_strings(R3, ["x^2", "x*y", "x*z"])
    assert saturate(J, R3.gens()) == Ideal.from_strings(R3, ["x"])


def test_intersection():
    a = Ideal.from_strings(R3, ["x"])
    b = Ideal.from_strings(R3, ["y"])
    assert intersect(a, b) == Ideal.from_strings(R3, ["x*y"])


def test_budget():
    R = GradedRing.standard((1,) * 5)
    I = Ideal(R, [random_form(R, 3, 1, k) for k in range(3)], budget=5)
    with pytest.raises(BudgetExceeded):
        I.groebner_basis()


def test_irrelevant():
    assert is_irrelevant(Ideal.from_strings(R3, ["x", "y", "z^2"]))
    assert not is_irrelevant(Ideal.from_strings(R3, ["x", "y"]))


def test_segre_cubed_dimension_degree():
    I = segre_cone_ideal("P1xP1xP1")
    # the cone over P1 x P1 x P1 in P^8: dimension 4, degree 6
    assert projective_dimension_and_degree(I) == (4, 6)


def test_p1_cubed_point_count_brute_force():
    # F_5-points of P1 x P1 x P1 in P^7 number (5 + 1)^3
    F5 = Field(5)
    R = GradedRing.standard((1,) * 8, field=F5)
    z = lambda i, j, k: R.var(4 * i + 2 * j + k)
    quads = []
    for (a, b) in itertools.combinations(list(itertools.product(range(2), repeat=3)), 2):
        # z_a z_b - z_a' z_b' for every exchange of one coordinate
        for axis in range(3):
            a2, b2 = list(a), list(b)
            a2[axis], b2[axis] = b[axis], a[axis]
            f = z(*a) * z(*b) - z(*a2) * z(*b2)
            if not f.is_zero():
                quads.append(f)
    assert count_projective_points(quads) == 6 ** 3


@given(st.integers(0, 10 ** 6))
def test_membership_matches_linear_algebra(seed):
    R, gens, tests = membership_cases(seed, Field(101))
    I = Ideal(R, gens)
    for f in tests:
        if not f.is_zero():
            assert (f in I) == membership_oracle(gens, f)


def test_membership_oracle_sees_both_outcomes():
    outcomes = set()
    for seed in range(50):
        R, gens, tests = membership_cases(seed, Field(101))
        for f in tests:
            if not f.is_zero():
                outcomes.add(membership_oracle(gens, f))
    assert outcomes == {True, False}


@given(st.lists(forms(), min_size=1, max_size=3))
def test_generators_reduce_to_zero(gens):
    I = Ideal(R3, gens)
    for g in gens:
        assert I.normal_form(g).is_zero()


@given(st.lists(forms(), min_size=1, max_size=3))
def test_basis_generates_same_ideal(gens):
    I = Ideal(R3, gens)
    J = Ideal(R3, I.groebner_basis())
    assert J.contains(gens) and I.contains(J)


def test_sympy_cross_check():
    sympy = pytest.importorskip("sympy")
    R = GradedRing.standard((1,) * 4)
    gens = [random_form(R, 2, 7, k) for k in range(3)]
    xs = sympy.symbols("x0:4")

    def to_sym(f):
        return sum(int(c) * sympy.Mul(*[x ** k for x, k in zip(xs, e)]) for e, c in f.items())

    G = sympy.groebner([to_sym(g) for g in gens], *xs, modulus=101, order="grevlex")
    ours = Ideal(R, gens).groebner_basis()
    assert len(ours) == len(G.exprs)
    theirs = sorted(sympy.Poly(g, *xs).monoms(order="grevlex")[0] for g in G.exprs)
    assert sorted(g.leading_monomial() for g in ours) == theirs

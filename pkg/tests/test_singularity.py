from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kmunproj.geometry import AmbientSpace, VarietySpec
from kmunproj.grobner import Ideal
from kmunproj.poly import Field, GradedRing, Polynomial
from kmunproj.reproduce import X34_PFAFFIAN_Y, always_singular_spec
from kmunproj.singularity import (NonIntegralBezoutError, SingularityReport, check_singularity,
                                  count_projective_points, jacobian, node_count, node_count_bezout, quasi_smooth)

P2 = GradedRing(("x", "y", "z"), (1, 1, 1), Field(101))
P3 = GradedRing(("x", "y", "z", "w"), (1, 1, 1, 1), Field(101))


def verdict(ring, texts, codim=1):
    return check_singularity(Ideal.from_strings(ring, texts), codim, stratum=False)


def test_smooth_conic():
    rep = verdict(P2, ["x^2 + y^2 + z^2"])
    assert rep.is_smooth and not rep.is_singular and rep.count is None


def test_nodal_cubic_has_one_node():
    rep = verdict(P2, ["y^2*z - x^3 - x^2*z"])
    assert rep.verdict == "isolated" and rep.count == 1


def test_cayley_cubic_has_four_nodes():
    I = Ideal.from_strings(P3, ["x*y*z + x*y*w + x*z*w + y*z*w"])
    assert node_count(I, 1) == 4


def test_double_line_is_positive_dimensional():
    rep = verdict(P2, ["x^2"])
    assert rep.verdict == "positive-dimensional" and rep.dimension == 1
    with pytest.raises(ValueError):
        node_count(Ideal.from_strings(P2, ["x^2"]), 1)


def test_smooth_quartic_curve_in_p3():
    rep = verdict(P3, ["x^2 + y^2 + z^2 + w^2", "x^2 + 2*y^2 + 3*z^2 + 4*w^2"], codim=2)
    assert rep.is_smooth


def test_jacobian_shape():
    f = P2.parse("x^2*y + z^3")
    J = jacobian([f])
    assert len(J) == 1 and len(J[0]) == 3
    assert J[0][2] == P2.parse("3*z^2")


def test_report_validation():
    with pytest.raises(ValueError):
        SingularityReport("weird")
    with pytest.raises(ValueError):
        SingularityReport("smooth", 0)
    with pytest.raises(ValueError):
        SingularityReport("isolated", 1)
    rep = SingularityReport("isolated", 0, Fraction(7), seed=3)
    assert rep.to_json()["degree"] == 7 and rep.count == 7


def test_bezout():
    assert node_count_bezout((2, 2, 2, 2)) == 16
    assert node_count_bezout((3, 3, 3), (1, 1, 1, 3)) == 9
    assert node_count_bezout((0, 2, 2)) == 0
    with pytest.raises(NonIntegralBezoutError):
        node_count_bezout((2, 2, 2), (1, 1, 1, 3))
    with pytest.raises(ValueError):
        node_count_bezout((2, 2), (1,) * 4)


def test_point_count_small():
    F7 = GradedRing(("x", "y", "z"), (1, 1, 1), Field(7))
    # a smooth conic over F_7 has 8 points
    assert count_projective_points([F7.parse("x^2 + y^2 - z^2")]) == 8
    assert count_projective_points([F7.parse("x"), F7.parse("y")]) == 1


F31 = GradedRing(("x", "y", "z"), (1, 1, 1), Field(31))
linear = st.tuples(*[st.integers(0, 30)] * 3).filter(any)


@settings(max_examples=25)
@given(st.lists(linear, min_size=2, max_size=4))
def test_line_arrangement_nodes_match_point_count(lines):
    """Singular points of a union of lines, by Groebner degree and by brute force over F_31."""
    forms = [Polynomial(F31, {(1, 0, 0): a, (0, 1, 0): b, (0, 0, 1): c}) for a, b, c in lines]
    f = forms[0]
    for g in forms[1:]:
        f = f * g
    rep = check_singularity(Ideal(F31, [f]), 1, stratum=False)
    if rep.verdict != "isolated":
        # repeated line: the singular locus is the line itself
        assert rep.verdict == "positive-dimensional"
        return
    sing = [f] + jacobian([f])[0]
    points = count_projective_points(sing)
    # a node has multiplicity 1 in the Jacobian scheme; a triple point is not reduced so count <= degree
    assert points <= rep.count
    n = len(forms)
    if rep.count == n * (n - 1) // 2:
        assert points == rep.count


def test_pfaffian_y_is_smooth():
    assert quasi_smooth(X34_PFAFFIAN_Y, 1).is_smooth


@pytest.mark.slow
def test_stratum_certificate():
    rep = quasi_smooth(always_singular_spec(), 1)
    assert rep.verdict == "singular" and rep.method == "stratum"

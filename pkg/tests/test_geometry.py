from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kmunproj.geometry import (AmbientSpace, MatrixFormat, SpecError, UnprojectionHypothesisError, VarietySpec,
                               ambient_from_notation, degree, delpezzo_degree, dualizing_degree, format_wps,
                               hilbert_degree, instantiate, parse_format, parse_notation, parse_wps, spec_in,
                               unprojection_weight)
from kmunproj.grobner import projective_dimension_and_degree


def test_wps_roundtrip():
    assert parse_wps("P^4") == (1,) * 5
    assert parse_wps("P(1^2,2^2,3^2)") == (1, 1, 2, 2, 3, 3)
    assert format_wps((1, 1, 2, 2, 3, 3)) == "P(1^2,2^2,3^2)"
    with pytest.raises(SpecError):
        parse_wps("Q^3")


@given(st.lists(st.integers(1, 6), min_size=2, max_size=9))
def test_wps_roundtrip_property(ws):
    assert parse_wps(format_wps(ws)) == tuple(sorted(ws))


def test_parse_notation():
    n = parse_notation("Y_{2,2} ∩ Tom ⊂ P^9")
    assert n.letter == "Y" and n.degrees == (2, 2) and n.formats[0].kind == "tom" and n.weights == (1,) * 10
    g = parse_notation("X_{1,2,2} ⊂ G(2,5)")
    assert g.weights == (1,) * 10 and g.ambient_formats[0].label == "Pf"


def test_format_labels():
    assert parse_format("Pf").label == "Pf"
    assert parse_format("Pf7").label == "Pf7"
    assert parse_format("WPf(2,1)").label == "WPf(1,2)"
    assert MatrixFormat("pfaffian", ((1, 1, 1, 1), (2, 2, 2), (2, 2), (2,))).label == "WPf(1,2)"
    with pytest.raises(SpecError):
        parse_format("Spin")
    with pytest.raises(SpecError):
        MatrixFormat("pfaffian", size=4)


def test_spec_in_splits_constraints():
    T = ambient_from_notation("T_6 ⊂ P(1^2,2^2,3^2)")
    D = spec_in(T, "D_{2,3,6} ⊂ P(1^2,2^2,3^2)")
    assert D.ci == (2, 3) and D.all_degrees() == (6, 2, 3)
    with pytest.raises(SpecError):
        spec_in(T, "D_{2,3} ⊂ P(1^2,2^2,3^2)")
    with pytest.raises(SpecError):
        spec_in(T, "D_{2,3,6} ⊂ P^5")


def test_dualizing_degrees():
    A = AmbientSpace((1,) * 5)
    assert dualizing_degree(VarietySpec(A, (5,))) == 0
    plane = VarietySpec(A, (1, 1))
    assert dualizing_degree(plane) == -3
    assert dualizing_degree(VarietySpec(AmbientSpace((1,) * 7), (), (MatrixFormat(size=7),))) == 0
    assert dualizing_degree(VarietySpec(AmbientSpace((1,) * 8), (), (MatrixFormat(),))) == -3
    tom = VarietySpec(AmbientSpace((1,) * 10), (2, 2), (MatrixFormat("tom"),))
    assert dualizing_degree(tom) == 0


def test_unprojection_weight():
    A = AmbientSpace((1,) * 5)
    X = VarietySpec(A, (5,))
    D = VarietySpec(A, (3, 1))
    assert dualizing_degree(D) == -1
    assert unprojection_weight(X, D) == 1
    assert delpezzo_degree(D) == 3
    with pytest.raises(UnprojectionHypothesisError):
        unprojection_weight(D, X)
    with pytest.raises(SpecError):
        delpezzo_degree(VarietySpec(A, (1, 1)))


def test_degrees_of_named_varieties():
    assert degree(VarietySpec(AmbientSpace((1,) * 6 + (2,)), (), (MatrixFormat("pfaffian", ((1, 1, 1, 1), (2, 2, 2), (2, 2), (2,))),))) == 10
    assert degree(VarietySpec(AmbientSpace((1,) * 7), (), (MatrixFormat(size=7),))) == 14
    assert degree(VarietySpec(AmbientSpace((1,) * 10), (), (MatrixFormat("tom"),))) == 6
    assert degree(VarietySpec(AmbientSpace((1, 1, 1, 1, 2)), (6,))) == 3


def test_hilbert_degree_of_point():
    assert hilbert_degree({0: 1, 1: -2, 2: 1}, (1, 1, 1)) == (0, 1)


@pytest.mark.parametrize("spec", [
    VarietySpec(AmbientSpace((1,) * 5), (2, 3)),
    VarietySpec(AmbientSpace((1,) * 5 + (2,)), (3, 4)),
    VarietySpec(AmbientSpace((1,) * 7), (), (MatrixFormat(),)),
    VarietySpec(AmbientSpace((1,) * 6 + (2,)), (), (MatrixFormat("pfaffian", ((1, 1, 1, 1), (2, 2, 2), (2, 2), (2,))),)),
    VarietySpec(AmbientSpace((1,) * 7), (), (MatrixFormat(size=7),)),
    VarietySpec(AmbientSpace((1,) * 9), (2,), (MatrixFormat("tom"),)),
    VarietySpec(AmbientSpace((1,) * 9), (2,), (MatrixFormat("jerry"),)),
])
def test_numerator_matches_instance(spec):
    # the Hilbert numerator of the presentation against a Groebner computation on a generic member
    I = instantiate(spec, 2)
    assert projective_dimension_and_degree(I) == hilbert_degree(spec.numerator(), spec.ambient.weights)


def test_spec_json_roundtrip():
    V = spec_in(ambient_from_notation("Pf ⊂ P^7"), "X_3 ∩ Pf ⊂ P^7", "X")
    assert VarietySpec.from_json(V.to_json()) == V
    assert V.notation() == "X_3 ∩ Pf ⊂ P^7"


def test_notation_without_name():
    V = VarietySpec(AmbientSpace((1,) * 5), (5,))
    assert V.notation() == "V_5 ⊂ P^4"


def test_check_degrees():
    with pytest.raises(SpecError):
        VarietySpec(AmbientSpace((2, 2, 4)), (3,)).check_degrees()

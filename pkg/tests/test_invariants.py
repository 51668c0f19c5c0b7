from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kmunproj.geometry import AmbientSpace, MatrixFormat, VarietySpec, spec_in
from kmunproj.invariants import (InvariantError, InvariantSet, cascade, chern_series, ci_invariants,
                                 riemann_roch_c2H, same_transition_data, spec_invariants, transition_invariants)


def test_quintic():
    inv = ci_invariants((1,) * 5, (5,))
    assert (inv.H3, inv.c2H, inv.h0, inv.chi) == (5, 50, 5, -200)


@pytest.mark.parametrize("weights, degrees, expected", [
    ((1,) * 6, (3, 3), (9, 54, 6, -144)),
    ((1,) * 6, (2, 4), (8, 56, 6, -176)),
    ((1,) * 7, (2, 2, 3), (12, 60, 7, -144)),
    ((1,) * 8, (2, 2, 2, 2), (16, 64, 8, -128)),
    ((1, 1, 1, 1, 2), (6,), (3, 42, 4, -204)),
    ((1, 1, 1, 1, 4), (8,), (2, 44, 4, -296)),
])
def test_ci_table(weights, degrees, expected):
    inv = ci_invariants(weights, degrees)
    assert (inv.H3, inv.c2H, inv.h0, inv.chi) == expected


def test_ci_rejects_non_threefold_and_flags_non_cy():
    with pytest.raises(InvariantError):
        ci_invariants((1,) * 5, (2, 2))
    inv = ci_invariants((1,) * 5, (4,))
    assert inv.c2H is None and "not Calabi-Yau" in inv.notes


def test_chern_series_of_quintic():
    assert chern_series((1,) * 5, (5,)) == [1, 0, 10, -40]


def test_riemann_roch_matches_ci():
    for w, d in [((1,) * 5, (5,)), ((1,) * 6, (3, 3)), ((1, 1, 1, 1, 2), (6,))]:
        inv = ci_invariants(w, d)
        assert riemann_roch_c2H(inv.H3, inv.h0) == inv.c2H


def test_spec_invariants_agree_with_ci():
    V = spec_in(AmbientSpace((1,) * 7), "X_{2,2,3} ⊂ P^6")
    inv = spec_invariants(V)
    assert inv.key() == ci_invariants((1,) * 7, (2, 2, 3)).key() and inv.chi == -144


def test_spec_invariants_of_pfaffian():
    V = VarietySpec(AmbientSpace((1,) * 7), (), (MatrixFormat(size=7),))
    inv = spec_invariants(V)
    assert inv.key() == (14, 56, 7) and inv.chi is None


@given(st.fractions(min_value=1, max_value=200, max_denominator=12), st.integers(0, 12), st.integers(1, 9),
       st.sampled_from(["unproject", "project"]))
def test_transition_inverse(H3, h0, d, direction):
    start = InvariantSet(H3, riemann_roch_c2H(H3, h0), h0)
    other = "project" if direction == "unproject" else "unproject"
    back = transition_invariants(transition_invariants(start, d, direction), d, other)
    assert back.key() == start.key()


@given(st.fractions(min_value=1, max_value=200, max_denominator=12), st.integers(0, 12), st.integers(1, 9))
def test_transition_preserves_riemann_roch(H3, h0, d):
    start = InvariantSet(H3, riemann_roch_c2H(H3, h0), h0)
    out = transition_invariants(start, d)
    assert out.c2H == riemann_roch_c2H(out.H3, out.h0)
    assert out.H3 - start.H3 == d and out.c2H - start.c2H == 12 - 2 * d and out.h0 == start.h0 + 1


def test_transition_rejects_bad_input():
    inv = ci_invariants((1,) * 5, (5,))
    with pytest.raises(InvariantError):
        transition_invariants(inv, 10)
    with pytest.raises(InvariantError):
        transition_invariants(inv, 3, "sideways")
    with pytest.raises(InvariantError):
        cascade(inv, 3, -1)


def test_cubic_surface_step_from_quintic():
    chain = cascade(ci_invariants((1,) * 5, (5,)), 3, 2)
    assert same_transition_data(chain[1], ci_invariants((1,) * 6, (2, 4)))
    assert chain[2].key() == (11, 62, 7)


def test_json_roundtrip():
    inv = InvariantSet(Fraction(5, 2), Fraction(45), 3, None, 2, 40, ("x",))
    assert inv.chi == -76
    assert InvariantSet.from_json(inv.to_json()) == inv

import importlib.util
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from kmunproj.betti import (DELPEZZO6_KINDS, DOUBLE_LINK_ROWS, BettiError, BettiTable, delpezzo6_betti, double_link,
                            koszul_betti, link_betti, link_steps, double_link_table)

ORACLE = Path(__file__).resolve().parents[1] / "oracles" / "betti_koszul_homology.py"
TWISTED_CUBIC = BettiTable.from_rows([[1, 0, 0], [0, 3, 2]], codim=2)


def load_oracle():
    pytest.importorskip("sympy")
    spec = importlib.util.spec_from_file_location("betti_oracle", ORACLE)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def test_koszul():
    B = koszul_betti((2, 2))
    assert B.rows() == [[1, 0, 0], [0, 2, 0], [0, 0, 1]]
    assert koszul_betti((1, 1)).rows() == [[1, 2, 1]]
    assert koszul_betti((2, 3, 4)).shifts(2) == [5, 6, 7]
    with pytest.raises(BettiError):
        koszul_betti((0, 2))


@given(st.lists(st.integers(1, 5), min_size=1, max_size=5))
def test_koszul_is_symmetric_and_exact(degrees):
    B = koszul_betti(degrees)
    assert B.is_gorenstein_symmetric()
    assert B.alternating_rank_sum() == 0
    assert B.shifts(len(degrees)) == [sum(degrees)]


def test_twisted_cubic_links_to_line():
    assert link_betti(TWISTED_CUBIC, (2, 2)) == koszul_betti((1, 1))


def test_line_links_back_to_twisted_cubic():
    assert link_betti(koszul_betti((1, 1)), (2, 2)) == TWISTED_CUBIC


def test_linkage_preserves_hilbert_numerator_relation():
    # degrees add up to the CI degree under linkage
    steps = link_steps(TWISTED_CUBIC, (2, 2))
    assert steps.sigma == 4 and not steps.ambiguous
    assert steps.cone.alternating_rank_sum() == 0
    assert steps.cone.ranks() == [1, 4, 3]
    assert steps.after_units == steps.minimal


def test_linkage_errors():
    with pytest.raises(BettiError):
        link_betti(TWISTED_CUBIC, (2, 2, 2))
    with pytest.raises(BettiError):
        link_betti(TWISTED_CUBIC, (2, 2), codim=3)
    with pytest.raises(BettiError):
        link_betti(BettiTable.from_rows([[2, 0, 0]]), (2, 2))
    with pytest.raises(BettiError):
        BettiTable({(0, 0): -1})


def test_delpezzo6_input():
    for kind in DELPEZZO6_KINDS:
        B = delpezzo6_betti(kind)
        assert B.rows() == [[1, 0, 0, 0, 0], [0, 9, 16, 9, 0], [0, 0, 0, 0, 1]]
        assert B.is_gorenstein_symmetric()
    with pytest.raises(BettiError):
        delpezzo6_betti("P3")


@pytest.mark.parametrize("kind", DELPEZZO6_KINDS)
def test_double_link_of_delpezzo6(kind):
    steps = double_link(delpezzo6_betti(kind))
    assert not any(s.ambiguous for s in steps)
    first = steps[0].minimal
    assert first.rows() == [[1, 0, 0, 0, 0], [0, 3, 0, 0, 0], [0, 2, 3, 0, 0], [0, 0, 12, 17, 6]]
    assert not first.is_gorenstein_symmetric()
    final = double_link_table(kind)
    assert final.rows() == [list(r) for r in DOUBLE_LINK_ROWS]
    assert final.is_gorenstein_symmetric()


def test_linkage_is_an_involution_on_double_link_tables():
    final = double_link_table()
    back = link_betti(final, (2, 2, 3, 3))
    assert back == double_link(delpezzo6_betti())[0].minimal


def test_json_and_display():
    B = double_link_table()
    assert BettiTable.from_json(B.to_json()) == B
    assert BettiTable.from_json(B.rows()) == B
    text = B.show()
    assert text.splitlines()[0].split() == ["0", "1", "2", "3", "4"]
    assert "18" in text
    assert B.hilbert_numerator()[0] == 1


def test_oracle_matches_frozen_tables():
    oracle = load_oracle()
    live = oracle.compute()
    for kind in DELPEZZO6_KINDS:
        assert live[kind]["rows"] == delpezzo6_betti(kind).rows()
        assert live[kind]["generators"] == 9


def test_oracle_on_complete_intersection():
    oracle = load_oracle()
    import sympy
    x, y, z = sympy.symbols("x y z")
    betti = oracle.betti_numbers([x**2, y**2, z**3], [x, y, z])
    assert BettiTable(betti) == koszul_betti((2, 2, 3))

import pytest
from hypothesis import given, strategies as st

from kmunproj.grobner import Ideal, projective_dimension_and_degree
from kmunproj.poly import GradedRing, random_form, rng_for
from kmunproj.unprojection import (AntisymmetricMatrix, DegreeMismatchError, UnprojectionError,
                                   check_codim2_identity, check_containment, check_pfaffian_identity,
                                   codim2_instance, codim3_instance, elimination_roundtrip, extension_instance,
                                   jerry_matrix, km_expected_pfaffians, km_matrix_codim3, segre_cone_ideal,
                                   tom_matrix, unproject_codim2)

R5 = GradedRing.standard((1,) * 5)
R6w = GradedRing.standard((1,) * 5 + (2,))


def test_codim2_weight_and_identity():
    res = codim2_instance(R5, (1, 1), 5, 1)
    assert res.weight == 3
    assert check_codim2_identity(res)
    assert all(g.is_homogeneous() for g in res.generators)
    assert res.point == (0, 0, 0, 0, 0, 1)


def test_codim2_degree_mismatch():
    x = R5.gens()
    with pytest.raises(DegreeMismatchError):
        unproject_codim2(x[0], x[1], x[2] ** 2, x[3])
    with pytest.raises(DegreeMismatchError):
        unproject_codim2(x[0] ** 2, x[1], x[2], x[3] ** 2)


def test_codim3_pfaffians_by_formula():
    res = codim3_instance(R6w, (2, 2, 2), (3, 4), 1)
    assert res.weight == 1
    assert check_pfaffian_identity(res)
    assert check_containment(res)
    # the row weights make every entry homogeneous
    assert res.matrix.row_weights()


@pytest.mark.parametrize("seed", range(1, 6))
def test_expected_pfaffians_up_to_sign(seed):
    R = GradedRing.standard((1,) * 6)
    rng = rng_for(seed, "km")
    q = [random_form(R, 1, rng) for _ in range(3)]
    a = [random_form(R, 1, rng) for _ in range(3)]
    b = [random_form(R, 1, rng) for _ in range(3)]
    M, S = km_matrix_codim3(q, a, b)
    assert S.weights[-1] == 1
    lift = lambda fs: [f.embed(S) for f in fs]
    expected = km_expected_pfaffians(lift(q), lift(a), lift(b), S.var(S.nvars - 1))
    for p, e in zip(M.maximal_pfaffians(), expected):
        assert p == e or p == -e


@pytest.mark.parametrize("n", [3, 5, 7])
def test_extension_identity(n):
    R = GradedRing.standard((1,) * 7)
    res = extension_instance(R, n, (n // 2 + 1, n // 2 + 1), 2)
    assert check_pfaffian_identity(res)
    assert check_containment(res)


def test_roundtrip_small():
    assert elimination_roundtrip(codim2_instance(R5, (1, 1), 5, 2))


def test_tom_and_jerry_contain_d():
    R = GradedRing.standard((1,) * 10)
    l = [R.var(i) for i in range(4)]
    h = [random_form(R, 1, 1, "h", i) for i in range(4)]
    D = Ideal(R, l)
    assert D.contains(tom_matrix(l, h).maximal_pfaffians())
    assert D.contains(jerry_matrix(l, h[:3]).maximal_pfaffians())
    with pytest.raises(UnprojectionError):
        tom_matrix(l[:3], h)


def test_segre_cones():
    assert projective_dimension_and_degree(segre_cone_ideal("P2xP2")) == (5, 6)
    with pytest.raises(UnprojectionError):
        segre_cone_ideal("P3")


def test_matrix_validation():
    x = R5.gens()
    with pytest.raises(UnprojectionError):
        AntisymmetricMatrix(R5, [[R5.zero(), x[0]], [x[0], R5.zero()]])
    M = AntisymmetricMatrix.from_upper(R5, [[x[0], x[1]], [x[2]]])
    with pytest.raises(UnprojectionError):
        M.pfaffian()


@given(st.integers(0, 10 ** 6))
def test_pfaffian_squared_is_determinant(seed):
    R = GradedRing.standard((1,) * 4)
    rng = rng_for(seed, "pf")
    upper = [[random_form(R, 1, rng) for _ in range(3 - i)] for i in range(3)]
    M = AntisymmetricMatrix.from_upper(R, upper)
    assert M.pfaffian() ** 2 == M.determinant()


def test_six_by_six_pfaffian():
    R = GradedRing.standard((1,) * 3)
    rng = rng_for(0, "pf6")
    upper = [[random_form(R, 1, rng) for _ in range(5 - i)] for i in range(5)]
    M = AntisymmetricMatrix.from_upper(R, upper)
    assert M.pfaffian() ** 2 == M.determinant()

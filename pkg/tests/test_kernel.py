import os
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from kmunproj import kernel
from kmunproj.grobner import MonomialOrder, WDEGREVLEX, groebner_basis
from kmunproj.poly import Field, GradedRing, random_form
from strategies import R3, RW, forms

needs_compiled = pytest.mark.skipif(not kernel.compiled_available(), reason="compiled kernel not built")


@needs_compiled
@given(st.lists(forms(), min_size=1, max_size=4))
def test_backends_agree(gens):
    assert groebner_basis(gens, backend="cython") == groebner_basis(gens, backend="python")


@needs_compiled
@given(st.lists(forms(RW), min_size=1, max_size=3), st.sampled_from([WDEGREVLEX, MonomialOrder.eliminating([0])]))
def test_backends_agree_weighted(gens, order):
    assert groebner_basis(gens, order, backend="cython") == groebner_basis(gens, order, backend="python")


@needs_compiled
@pytest.mark.parametrize("seed", range(3))
def test_backends_agree_on_dense_forms(seed):
    R = GradedRing.standard((1,) * 5 + (2,))
    gens = [random_form(R, 3, seed, "a"), random_form(R, 4, seed, "b")]
    assert groebner_basis(gens, backend="cython") == groebner_basis(gens, backend="python")


def test_rationals_use_python_kernel():
    R = GradedRing(("x", "y"), (1, 1), Field(None))
    ctx = kernel.make_context(R.weights, WDEGREVLEX.blocks(2), None, "cython")
    assert type(ctx).__module__.endswith("_pykernel")
    G = groebner_basis([R.parse("x^2 - y^2"), R.parse("x*y")])
    assert len(G) == 3


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernel.make_context((1,), [(0,)], 101, "fortran")


def test_environment_forces_python():
    env = dict(os.environ, KMUNPROJ_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", "from kmunproj import kernel; print(kernel.default_backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"

"""Backend selection for the reduction kernel.

The compiled kernel is used when it is importable and the field is F_p with
p < 2**31; otherwise the pure-Python kernel is used.  Setting the environment
variable ``KMUNPROJ_BACKEND=python`` forces the fallback.
"""

import os

from . import _pykernel

try:
    from . import _ckernel
except ImportError:  # pragma: no cover - depends on the build
    _ckernel = None

FORCE_PYTHON = os.environ.get("KMUNPROJ_BACKEND", "").lower() == "python"


def compiled_available():
    return _ckernel is not None


def default_backend():
    return "python" if FORCE_PYTHON or _ckernel is None else "cython"


def make_context(weights, blocks, p, backend=None):
    backend = backend or default_backend()
    if backend == "cython" and _ckernel is not None and p is not None and p < 2**31:
        return _ckernel.Context(weights, blocks, p)
    if backend not in ("python", "cython"):
        raise ValueError(f"unknown backend {backend!r}")
    return _pykernel.Context(weights, blocks, p)

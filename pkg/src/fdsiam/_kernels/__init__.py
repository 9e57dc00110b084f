"""Hot numeric kernels with a compiled core and a pure-Python fallback.

The Cython extension ``fdsiam._kernels._core`` is built at install time when
a compiler is available; otherwise (or when ``FDSIAM_PURE_PYTHON=1`` is set)
the numpy reference implementations in ``_pyref`` are used.  Both lanes
implement the same algorithms step for step.

``BACKEND`` names the active lane ("cython" or "python").
"""

import os

from . import _pyref

if os.environ.get("FDSIAM_PURE_PYTHON") == "1":
    _impl = _pyref
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pyref
        BACKEND = "python"

cholesky_lower = _impl.cholesky_lower
jacobi_eigh = _impl.jacobi_eigh
xoshiro_fill_uniform = _impl.xoshiro_fill_uniform
nearest_ref_indices = _impl.nearest_ref_indices

__all__ = [
    "BACKEND",
    "cholesky_lower",
    "jacobi_eigh",
    "xoshiro_fill_uniform",
    "nearest_ref_indices",
]

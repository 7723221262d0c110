"""Backend selection for the hot numerical loops.

The default backend compiles the pairwise loops with numba.  Set the
environment variable ``LOWDISC_BACKEND=numpy`` before import to force the
pure-numpy fallback (useful for debugging and for the benchmark in
``benchmarks/bench_backends.py``), or ``LOWDISC_BACKEND=numba`` to fail hard
if numba cannot be imported.
"""

import os
import warnings

_requested = os.environ.get("LOWDISC_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"unrecognised LOWDISC_BACKEND={_requested!r}; expected 'numba' or 'numpy'"
    )

if _requested == "numpy":
    from . import _numpy_kernels as _impl

    _name = "numpy"
else:
    try:
        from . import _numba_kernels as _impl

        _name = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        warnings.warn("numba unavailable, falling back to the numpy backend", RuntimeWarning)
        from . import _numpy_kernels as _impl

        _name = "numpy"

pairwise_kernel_sum = _impl.pairwise_kernel_sum
pairwise_kernel_matrix = _impl.pairwise_kernel_matrix
coord_interaction_sums = _impl.coord_interaction_sums


def backend_name() -> str:
    """Name of the active backend: 'numba' or 'numpy'."""
    return _name

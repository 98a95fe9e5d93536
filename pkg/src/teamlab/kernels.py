"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the NumPy versions.
Setting ``TEAMLAB_PURE_PYTHON=1`` forces the NumPy path.
"""

import os

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if os.environ.get("TEAMLAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels


def payoff_matrix(mu, cost, rows, cols, backend=None):
    impl = _pick(backend)
    return impl.payoff_matrix(
        np.ascontiguousarray(mu, dtype=np.float64),
        np.ascontiguousarray(cost, dtype=np.float64),
        np.ascontiguousarray(rows, dtype=np.int64),
        np.ascontiguousarray(cols, dtype=np.int64),
    )


def pushforward(mu, maps, n_out, backend=None):
    impl = _pick(backend)
    return impl.pushforward(
        np.ascontiguousarray(mu, dtype=np.float64),
        np.ascontiguousarray(maps, dtype=np.int64),
        int(n_out),
    )


def _pick(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _pykernels
    if backend == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {backend!r}")

"""Hot-kernel backend selection.

The compiled extension is preferred when it imported cleanly; otherwise the
numpy fallback is used.  ``BACKEND`` names the active implementation and
``available_backends`` exposes every importable one (used by the parity tests
and the benchmark).
"""

from . import _pykernels

try:  # compiled core is optional
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

cocycle_residual_left = _impl.cocycle_residual_left
cocycle_residual_right = _impl.cocycle_residual_right
twisted_convolve = _impl.twisted_convolve
quasifree_gram = _impl.quasifree_gram


def available_backends() -> dict:
    out = {"python": _pykernels}
    if BACKEND == "cython":
        out["cython"] = _impl
    return out

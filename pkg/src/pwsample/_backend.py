"""Select the kernel implementation at import time.

The compiled extension is preferred; the NumPy fallback is used when it is
missing or when ``PWSAMPLE_PURE_PYTHON`` is set to a non-empty value other
than ``0``.
"""

import os

from . import _pykernels

_force_python = os.environ.get("PWSAMPLE_PURE_PYTHON", "") not in ("", "0")

if _force_python:
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

sinc_pi = _impl.sinc_pi
gram_matrix = _impl.gram_matrix
sinc_synthesis = _impl.sinc_synthesis
cosine_sum = _impl.cosine_sum
log_abs_product = _impl.log_abs_product


def available_backends():
    """Return a dict mapping backend name to kernel module for every importable backend."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out

"""Selects the compiled kernels when built, else the numpy fallback.

Set ``EEPN_LAB_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

if os.environ.get("EEPN_LAB_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _fallback
        BACKEND = "python"
    else:
        BACKEND = "cython"

moving_moments = _impl.moving_moments
gather_sq_dev = _impl.gather_sq_dev

__all__ = ["BACKEND", "moving_moments", "gather_sq_dev"]

"""Select the compiled kernels when available, the NumPy ones otherwise.

Set ``HSBALL_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

if os.environ.get("HSBALL_PURE_PYTHON", "") not in ("", "0"):
    _impl = None
else:
    try:
        from . import _core as _impl
    except ImportError:  # extension not built
        _impl = None

if _impl is None:
    BACKEND = "python"
    mul_truncated = _fallback.mul_truncated
    eval_many = _fallback.eval_many
else:
    BACKEND = "cython"
    mul_truncated = _impl.mul_truncated
    eval_many = _impl.eval_many

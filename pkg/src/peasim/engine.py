"""Simulation backend selection.

The hot loop exists twice: a compiled Cython extension
(``peasim._speedup``) and a pure-Python fallback (``peasim._kernel``)
with identical, bit-for-bit arithmetic.  The compiled one is preferred
when importable; set the environment variable ``PEASIM_PURE_PYTHON`` to
any non-empty value to force the fallback (useful for debugging and for
the backend-parity tests).
"""

from __future__ import annotations

import os

from . import _kernel as _python_kernel

if os.environ.get("PEASIM_PURE_PYTHON"):
    _impl = _python_kernel
    _backend = "python"
else:
    try:
        from . import _speedup as _impl  # type: ignore[no-redef]

        _backend = "compiled"
    except ImportError:
        _impl = _python_kernel
        _backend = "python"

simulate_segment = _impl.simulate_segment


def backend_name() -> str:
    """Which kernel this process is using: ``"compiled"`` or ``"python"``."""
    return _backend

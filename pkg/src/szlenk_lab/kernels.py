"""Backend selection for the hot kernels.

The compiled ``_kernels`` extension is used when it imports; otherwise the
pure-Python versions in ``_kernels_py`` are used.  Setting
``SZLENK_LAB_PURE_PYTHON=1`` forces the fallback.  Exact (rational)
computations always go through the Python kernels.
"""

import os

from . import _kernels_py

compiled = None
if not os.environ.get("SZLENK_LAB_PURE_PYTHON"):
    try:
        from . import _kernels as compiled
    except ImportError:
        compiled = None

BACKEND = "cython" if compiled is not None else "python"
fast = compiled if compiled is not None else _kernels_py
python = _kernels_py


def for_values(exact: bool):
    """Kernel module for float (``exact=False``) or rational arithmetic."""
    return python if exact else fast

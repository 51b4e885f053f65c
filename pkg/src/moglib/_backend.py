"""Select the likelihood kernel at import time.

``MOGLIB_BACKEND=python`` forces the NumPy fallback, ``compiled`` requires
the extension; the default uses the extension when it is importable.
"""

import os

from . import _kernels_py

_choice = os.environ.get("MOGLIB_BACKEND", "auto").lower()
if _choice not in ("auto", "python", "compiled"):
    raise ImportError(f"MOGLIB_BACKEND must be auto, python or compiled, not {_choice!r}")

kernels = _kernels_py
NAME = "python"
if _choice != "python":
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]

        NAME = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        kernels = _kernels_py


def get(name: str):
    """Kernel module by name, for benchmarks and cross-backend tests."""
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels

        return _kernels
    raise ValueError(name)

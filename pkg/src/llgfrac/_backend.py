"""Kernel backend selection.

The compiled ``_core`` extension is used when it is importable; otherwise the
numpy/scipy kernels in ``_fallback`` are used.  Setting ``LLGFRAC_BACKEND=python``
forces the fallback.
"""

import os

from . import _fallback

fallback = _fallback
compiled = None
if os.environ.get("LLGFRAC_BACKEND", "").lower() != "python":
    try:
        from . import _core as compiled
    except ImportError:  # extension not built
        compiled = None

kernels = compiled if compiled is not None else fallback
NAME = kernels.NAME


def use(name: str):
    """Switch the active kernel set at runtime (``"compiled"`` or ``"python"``)."""
    global kernels, NAME
    if name == "python":
        kernels = fallback
    elif name == "compiled":
        if compiled is None:
            raise RuntimeError("compiled kernels are not available")
        kernels = compiled
    else:
        raise ValueError(f"unknown backend {name!r}")
    NAME = kernels.NAME

"""Backend selection: compiled Cython kernels when available, numpy otherwise.

Set HEJHAL_LAB_BACKEND=py (or =cy) to force a choice; the default prefers the
compiled extension.
"""

import os

from . import _kernels_py

_forced = os.environ.get("HEJHAL_LAB_BACKEND", "").strip().lower()

if _forced == "py":
    kernels = _kernels_py
elif _forced == "cy":
    from . import _kernels_cy as kernels  # raises if the extension is missing
else:
    try:
        from . import _kernels_cy as kernels
    except ImportError:
        kernels = _kernels_py


def backend_name():
    return "cython" if kernels.__name__.endswith("_kernels_cy") else "numpy"

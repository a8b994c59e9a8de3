"""Backend selection for the matrix-element kernels.

The compiled extension is preferred.  Set ``ANISOEXCITON_PURE_PYTHON=1`` to
force the pure-Python fallback.
"""

import os

from . import _kernels_py

pure = _kernels_py

if os.environ.get("ANISOEXCITON_PURE_PYTHON", "").strip() not in ("", "0"):
    compiled = None
else:
    try:
        from . import _kernels as compiled
    except ImportError:  # extension not built
        compiled = None

active = compiled if compiled is not None else pure
BACKEND = "compiled" if compiled is not None else "python"

fill_perturbation = active.fill_perturbation

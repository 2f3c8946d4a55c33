"""Kernel backend selection.

The compiled extension (genproj._core) is preferred; the pure-numpy twin
(genproj._purepy) is used when the extension is unavailable or when
GENPROJ_BACKEND=python is set.  Both expose the same kernel API:
proj_set, minimize_dual_quadratic, minimize_metric.
"""

import os

if os.environ.get("GENPROJ_BACKEND", "").lower() == "python":
    from . import _purepy as kernels
else:
    try:
        from . import _core as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _purepy as kernels

BACKEND = kernels.NAME

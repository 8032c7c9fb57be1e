"""Hot-path primitives with a compiled backend and a pure-Python fallback.

The compiled module is preferred when it imported cleanly; set
SOCIOGIT_PURE_PYTHON=1 to force the fallback. Both expose the same functions
with identical results.
"""

import os

from sociogit.kernels import _fallback

if os.environ.get("SOCIOGIT_PURE_PYTHON"):
    _impl = _fallback
else:
    try:
        from sociogit.kernels import _speedups as _impl
    except ImportError:
        _impl = _fallback

BACKEND = "c" if _impl is not _fallback else "python"
DIFF_CAP = _impl.DIFF_CAP

diff_regions = _impl.diff_regions
similarity_percent = _impl.similarity_percent
apply_delta = _impl.apply_delta

__all__ = [
    "BACKEND",
    "DIFF_CAP",
    "apply_delta",
    "diff_regions",
    "similarity_percent",
]

"""Backend selection for the hot kernels.

Set ``PERMUBUF_NO_NUMBA=1`` to force the pure-numpy path. The numba path is
used otherwise, provided numba imports.
"""

import os

_flag = os.environ.get("PERMUBUF_NO_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _disabled
BACKEND = "numba" if USE_NUMBA else "numpy"

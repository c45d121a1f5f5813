"""Backend selection for the hot kernels.

Set ``RHCEXCITE_BACKEND=numpy`` to run without numba. The default is
``numba`` when it is importable, else ``numpy``.
"""

import os

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba ships with the dev environment
    numba = None
    HAS_NUMBA = False

_requested = os.environ.get("RHCEXCITE_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(
        f"RHCEXCITE_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

BACKEND = "numba" if (_requested == "numba" and HAS_NUMBA) else "numpy"


def njit(fn):
    """Compile ``fn`` with numba if available; identity otherwise."""
    if not HAS_NUMBA:
        return fn
    return numba.njit(cache=True)(fn)

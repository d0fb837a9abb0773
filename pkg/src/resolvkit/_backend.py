"""Kernel backend selection.

Hot numeric loops ship in two functionally identical implementations: a
numba-compiled one and a pure-numpy fallback.  The active backend is chosen
once at import time from the RESOLV_BACKEND environment variable:

  auto   (default) numba when importable, else numpy
  numba  require numba, fail loudly if missing
  numpy  force the pure-numpy fallback

Both paths are exercised by the test suite and compared by
``benchmarks/bench_kernels.py``.
"""

from __future__ import annotations

import os

VALID = ("auto", "numba", "numpy")


def _select() -> str:
    choice = os.environ.get("RESOLV_BACKEND", "auto").strip().lower()
    if choice not in VALID:
        raise ValueError(f"RESOLV_BACKEND must be one of {VALID}, got {choice!r}")
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise
        return "numpy"
    return "numba"


BACKEND = _select()


def thread_cap() -> int:
    """Internal-parallelism cap from RESOLV_THREADS (default 1)."""
    raw = os.environ.get("RESOLV_THREADS", "").strip()
    if not raw:
        return 1
    count = int(raw)
    if count < 1:
        raise ValueError(f"RESOLV_THREADS must be a positive integer, got {raw!r}")
    return count

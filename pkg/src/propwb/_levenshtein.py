"""Edit-distance kernel.

The numba-jitted path is used when numba imports and PROPWB_NO_NUMBA is
unset; otherwise a pure-numpy rolling-row DP runs. Both operate on int32
codepoint arrays and must return identical values.
"""

from __future__ import annotations

import os

import numpy as np

_USE_NUMBA = not os.environ.get("PROPWB_NO_NUMBA")

if _USE_NUMBA:
    try:
        from numba import njit
    except ImportError:
        _USE_NUMBA = False

if _USE_NUMBA:

    @njit(cache=True)
    def _levenshtein_jit(a, b):  # pragma: no cover - exercised via dispatch
        n, m = a.shape[0], b.shape[0]
        prev = np.arange(m + 1, dtype=np.int32)
        curr = np.empty(m + 1, dtype=np.int32)
        for i in range(1, n + 1):
            curr[0] = i
            for j in range(1, m + 1):
                cost = 0 if a[i - 1] == b[j - 1] else 1
                curr[j] = min(prev[j] + 1, curr[j - 1] + 1, prev[j - 1] + cost)
            prev, curr = curr, prev
        return int(prev[m])


def _levenshtein_numpy(a: np.ndarray, b: np.ndarray) -> int:
    m = b.shape[0]
    prev = np.arange(m + 1, dtype=np.int32)
    for i in range(1, a.shape[0] + 1):
        subst = prev[:-1] + (a[i - 1] != b).astype(np.int32)
        curr = np.empty(m + 1, dtype=np.int32)
        curr[0] = i
        deletion = prev[1:] + 1
        np.minimum(subst, deletion, out=curr[1:])
        # insertions need a left-to-right scan
        for j in range(1, m + 1):
            if curr[j - 1] + 1 < curr[j]:
                curr[j] = curr[j - 1] + 1
        prev = curr
    return int(prev[m])


def levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    arr_a = np.frombuffer(a.encode("utf-32-le"), dtype=np.int32)
    arr_b = np.frombuffer(b.encode("utf-32-le"), dtype=np.int32)
    if _USE_NUMBA:
        return _levenshtein_jit(arr_a, arr_b)
    return _levenshtein_numpy(arr_a, arr_b)


def backend() -> str:
    return "numba" if _USE_NUMBA else "numpy"

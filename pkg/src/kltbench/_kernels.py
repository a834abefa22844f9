"""Integer box kernels for the brute-force search oracle.

``box_solve`` scans every point of an integer box ``lo <= x <= hi`` and keeps
those with ``coef . x == target`` and ``A x <= b``.  Everything is int64;
callers scale rational equations to integers first.

A numba kernel is used when numba imports and ``KLTBENCH_DISABLE_NUMBA`` is
unset; otherwise a chunked numpy version runs.  Both return identical arrays.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("KLTBENCH_DISABLE_NUMBA", "").strip() not in ("", "0")

try:
    if _DISABLED:
        raise ImportError("disabled by KLTBENCH_DISABLE_NUMBA")
    from numba import njit
except ImportError:
    njit = None

BACKEND = "numba" if njit is not None else "numpy"


def _box_solve_py(coef, target, A, b, lo, hi, out):
    """Odometer over the box; fills ``out`` and returns (found, scanned)."""
    n = coef.shape[0]
    m = A.shape[0]
    x = lo.copy()
    found = 0
    scanned = 0
    while True:
        scanned += 1
        s = 0
        for i in range(n):
            s += coef[i] * x[i]
        if s == target:
            ok = True
            for r in range(m):
                t = 0
                for i in range(n):
                    t += A[r, i] * x[i]
                if t > b[r]:
                    ok = False
                    break
            if ok:
                if found < out.shape[0]:
                    for i in range(n):
                        out[found, i] = x[i]
                found += 1
        # advance the last coordinate fastest, so output is lexicographic
        i = n - 1
        while i >= 0:
            if x[i] < hi[i]:
                x[i] += 1
                break
            x[i] = lo[i]
            i -= 1
        if i < 0:
            return found, scanned


_box_solve_jit = njit(cache=False)(_box_solve_py) if njit is not None else None


def _box_solve_numpy(coef, target, A, b, lo, hi):
    n = coef.shape[0]
    sizes = hi - lo + 1
    total = int(np.prod(sizes))
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64), 1
    # split on the leading axis, keeping each chunk's grid modest
    inner = int(np.prod(sizes[1:]))
    step = max(1, 2_000_000 // max(inner, 1))
    parts = []
    for start in range(int(lo[0]), int(hi[0]) + 1, step):
        stop = min(start + step, int(hi[0]) + 1)
        axes = [np.arange(start, stop, dtype=np.int64)] + [
            np.arange(lo[i], hi[i] + 1, dtype=np.int64) for i in range(1, n)
        ]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
        mask = grid @ coef == target
        if A.shape[0]:
            mask &= np.all(grid @ A.T <= b, axis=1)
        parts.append(grid[mask])
    return np.concatenate(parts, axis=0), total


def box_solve(coef, target, A, b, lo, hi, backend: str | None = None):
    """Return ``(solutions, scanned)``; rows in lexicographic order."""
    coef = np.ascontiguousarray(coef, dtype=np.int64)
    lo = np.ascontiguousarray(lo, dtype=np.int64)
    hi = np.ascontiguousarray(hi, dtype=np.int64)
    n = coef.shape[0]
    A = np.ascontiguousarray(A, dtype=np.int64).reshape(-1, n)
    b = np.ascontiguousarray(b, dtype=np.int64)
    if np.any(lo > hi):
        return np.zeros((0, n), dtype=np.int64), 0
    bound = int(np.sum(np.abs(coef) * np.maximum(np.abs(lo), np.abs(hi))))
    bound = max(bound, int(np.max(np.abs(A).sum(axis=1) * np.max(np.maximum(np.abs(lo), np.abs(hi))), initial=0)))
    if bound >= 2**62 or abs(int(target)) >= 2**62:
        raise OverflowError("scaled equation does not fit in int64")
    backend = backend or BACKEND
    if backend == "numpy" or n == 0:
        return _box_solve_numpy(coef, np.int64(target), A, b, lo, hi)
    if backend != "numba" or _box_solve_jit is None:
        raise ValueError(f"backend {backend!r} unavailable")
    cap = 256
    while True:
        out = np.zeros((cap, n), dtype=np.int64)
        found, scanned = _box_solve_jit(coef, np.int64(target), A, b, lo, hi, out)
        if found <= cap:
            return out[:found].copy(), int(scanned)
        cap = found

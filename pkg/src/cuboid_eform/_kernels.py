"""Inner loops of the integer searches.

Each kernel scans one block of the outermost loop variable and returns an
``(n, 4)`` int64 array of hits in the canonical output order.  Three
implementations share that contract:

* ``numba``  -- ``@njit(nogil=True)`` loops (default when numba imports and
  the bound is at least :data:`NUMBA_MIN_BOUND`);
* ``numpy``  -- vectorised over the two inner loop variables;
* ``python`` -- exact big-integer loops, used beyond :data:`INT64_SAFE_BOUND`.

Set ``CUBOID_EFORM_NO_NUMBA=1`` to force the numpy path.
"""
from __future__ import annotations

import os
from math import isqrt

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap


# 8*B^4 (largest intermediate) stays below 2^63 for B <= 30000
INT64_SAFE_BOUND = 30_000

_NUMPY_CHUNK = 1 << 20

# below this bound a cold JIT compile costs more than the whole numpy scan
NUMBA_MIN_BOUND = 64


def default_backend() -> str:
    flag = os.environ.get("CUBOID_EFORM_NO_NUMBA", "").strip().lower()
    if flag in ("1", "true", "yes", "on") or not HAVE_NUMBA:
        return "numpy"
    return "numba"


def resolve_backend(backend: str | None, bound: int) -> str:
    """Backend actually used; an explicit choice is honoured unless ints could overflow."""
    if backend is None:
        backend = default_backend()
        if backend == "numba" and bound < NUMBA_MIN_BOUND:
            backend = "numpy"
    if backend not in ("numba", "numpy", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        backend = "numpy"
    if bound > INT64_SAFE_BOUND:
        return "python"
    return backend


# -- biquadratic: (2*e11)^2 + t^2 == 8*e01^2*l^2, t = e01^2 + l^2 - e10^2 ---------


@njit(cache=True, nogil=True)
def _biquad_numba(l_lo, l_hi, bound):
    cap = 64
    out = np.empty((cap, 4), dtype=np.int64)
    n = 0
    for l in range(l_lo, l_hi):
        for e01 in range(bound + 1):
            T = 8 * e01 * e01 * l * l
            base = e01 * e01 + l * l
            for e10 in range(bound + 1):
                t = base - e10 * e10
                s = T - t * t
                if s < 0 or s & 3:
                    continue
                q = s >> 2
                r = np.int64(np.sqrt(np.float64(q)))
                while r * r > q:
                    r -= 1
                while (r + 1) * (r + 1) <= q:
                    r += 1
                if r * r != q:
                    continue
                if n == cap:
                    cap *= 2
                    grown = np.empty((cap, 4), dtype=np.int64)
                    grown[:n] = out[:n]
                    out = grown
                out[n, 0] = e10
                out[n, 1] = e01
                out[n, 2] = r
                out[n, 3] = l
                n += 1
    return out[:n].copy()


def _isqrt_exact_np(q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r = np.sqrt(q.astype(np.float64)).astype(np.int64)
    for _ in range(2):
        r = np.where(r * r > q, r - 1, r)
        r = np.where((r + 1) * (r + 1) <= q, r + 1, r)
    return r, r * r == q


def _biquad_numpy(l_lo, l_hi, bound):
    e10 = np.arange(bound + 1, dtype=np.int64)
    rows = max(1, _NUMPY_CHUNK // (bound + 1))
    found = []
    for l in range(l_lo, l_hi):
        for start in range(0, bound + 1, rows):
            e01 = np.arange(start, min(bound + 1, start + rows), dtype=np.int64)[:, None]
            T = 8 * e01 * e01 * l * l
            t = e01 * e01 + l * l - e10[None, :] * e10[None, :]
            s = T - t * t
            ok = (s >= 0) & ((s & 3) == 0)
            i, j = np.nonzero(ok)
            if not len(i):
                continue
            q = s[i, j] >> 2
            r, square = _isqrt_exact_np(q)
            i, j, r = i[square], j[square], r[square]
            # np.nonzero is row-major: already ordered by (e01, e10)
            block = np.empty((len(i), 4), dtype=np.int64)
            block[:, 0] = j
            block[:, 1] = e01[i, 0]
            block[:, 2] = r
            block[:, 3] = l
            found.append(block)
    if not found:
        return np.empty((0, 4), dtype=np.int64)
    return np.concatenate(found)


def _biquad_python(l_lo, l_hi, bound):
    hits = []
    for l in range(l_lo, l_hi):
        for e01 in range(bound + 1):
            T = 8 * e01 * e01 * l * l
            base = e01 * e01 + l * l
            for e10 in range(bound + 1):
                t = base - e10 * e10
                s = T - t * t
                if s < 0 or s % 4:
                    continue
                q = s // 4
                r = isqrt(q)
                if r * r == q:
                    hits.append((e10, e01, r, l))
    return hits


def biquadratic_block(l_lo: int, l_hi: int, bound: int, backend: str):
    """Hits ``(e10, e01, e11, l)`` with ``l_lo <= l < l_hi``, ordered by ``(l, e01, e10)``."""
    if backend == "numba":
        return _biquad_numba(l_lo, l_hi, bound)
    if backend == "numpy":
        return _biquad_numpy(l_lo, l_hi, bound)
    return _biquad_python(l_lo, l_hi, bound)


# -- Heron: 16*s^2 == 4*a^2*b^2 - (a^2 + b^2 - c^2)^2, a <= b <= c ------------------


@njit(cache=True, nogil=True)
def _heron_numba(a_lo, a_hi, bound):
    cap = 64
    out = np.empty((cap, 4), dtype=np.int64)
    n = 0
    for a in range(max(a_lo, 1), a_hi):
        for b in range(a, bound + 1):
            top = min(bound, a + b - 1)
            for c in range(b, top + 1):
                u = a * a + b * b - c * c
                v = 4 * a * a * b * b - u * u
                if v <= 0 or v & 15:
                    continue
                q = v >> 4
                r = np.int64(np.sqrt(np.float64(q)))
                while r * r > q:
                    r -= 1
                while (r + 1) * (r + 1) <= q:
                    r += 1
                if r * r != q:
                    continue
                if n == cap:
                    cap *= 2
                    grown = np.empty((cap, 4), dtype=np.int64)
                    grown[:n] = out[:n]
                    out = grown
                out[n, 0] = a
                out[n, 1] = b
                out[n, 2] = c
                out[n, 3] = r
                n += 1
    return out[:n].copy()


def _heron_numpy(a_lo, a_hi, bound):
    found = []
    c_all = np.arange(bound + 1, dtype=np.int64)
    for a in range(max(a_lo, 1), a_hi):
        b = np.arange(a, bound + 1, dtype=np.int64)[:, None]
        c = c_all[None, :]
        valid = (c >= b) & (c < a + b)
        u = a * a + b * b - c * c
        v = 4 * a * a * b * b - u * u
        ok = valid & (v > 0) & ((v & 15) == 0)
        i, j = np.nonzero(ok)
        if not len(i):
            continue
        r, square = _isqrt_exact_np(v[i, j] >> 4)
        i, j, r = i[square], j[square], r[square]
        block = np.empty((len(i), 4), dtype=np.int64)
        block[:, 0] = a
        block[:, 1] = b[i, 0]
        block[:, 2] = j
        block[:, 3] = r
        found.append(block)
    if not found:
        return np.empty((0, 4), dtype=np.int64)
    return np.concatenate(found)


def _heron_python(a_lo, a_hi, bound):
    hits = []
    for a in range(max(a_lo, 1), a_hi):
        for b in range(a, bound + 1):
            for c in range(b, min(bound, a + b - 1) + 1):
                u = a * a + b * b - c * c
                v = 4 * a * a * b * b - u * u
                if v <= 0 or v % 16:
                    continue
                r = isqrt(v // 16)
                if r * r == v // 16:
                    hits.append((a, b, c, r))
    return hits


def heron_block(a_lo: int, a_hi: int, bound: int, backend: str):
    """Hits ``(a, b, c, s)`` with ``a_lo <= a < a_hi``, ordered by ``(a, b, c)``."""
    if backend == "numba":
        return _heron_numba(a_lo, a_hi, bound)
    if backend == "numpy":
        return _heron_numpy(a_lo, a_hi, bound)
    return _heron_python(a_lo, a_hi, bound)

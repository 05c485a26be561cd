# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan backend: per-point Gaussian elimination on L(z) over F_p.

Same scan_chart contract as the numpy fallback. The determinant test is the
elimination itself, with early exit once five nonzero pivots complete; rank
comes from the pivot count, so one pass classifies each point.
"""
from libc.stdlib cimport free, realloc

import numpy as np

NAME = "c"

cdef long long[5] YVEC
YVEC[0] = 2
YVEC[1] = -1
YVEC[2] = 0
YVEC[3] = 0
YVEC[4] = -1


cdef inline int eliminate_rank(long long a[5][5], long long p) noexcept nogil:
    # fraction-free row reduction: rank only, no modular inverses
    cdef int r = 0
    cdef int col, i, j, pr
    cdef long long f, piv, t
    for col in range(5):
        pr = -1
        for i in range(r, 5):
            if a[i][col] != 0:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            for j in range(col, 5):
                t = a[r][j]
                a[r][j] = a[pr][j]
                a[pr][j] = t
        piv = a[r][col]
        for i in range(r + 1, 5):
            f = a[i][col]
            if f != 0:
                for j in range(col, 5):
                    t = (a[i][j] * piv - f * a[r][j]) % p
                    if t < 0:
                        t += p
                    a[i][j] = t
        r += 1
        if r == 5:
            break
    return r


def scan_chart(long long p, int k, long long lo, long long hi, int collect=0):
    """Scan rows [lo, hi) of chart k (coords 0..k-1 free, coord k = 1).

    collect 0: counts only; 1: return rank <= 3 points; 2: return all
    det L = 0 points. Returns (n_det0, n_rank3, n_rankle2, points-or-None).
    """
    cdef long long yc[5][5]
    cdef int zi[5][5]
    cdef int i, j, rank
    cdef long long c
    for i in range(5):
        for j in range(5):
            c = YVEC[(i - j + 5) % 5] % p
            if c < 0:
                c += p
            yc[i][j] = c
            zi[i][j] = (2 * j - i + 10) % 5

    cdef long long n_det0 = 0, n_rank3 = 0, n_rankle2 = 0
    cdef long long idx, tmp
    cdef long long z[5]
    cdef long long a[5][5]
    cdef long long *buf = NULL
    cdef long long *grown = NULL
    cdef size_t cap = 0, used = 0, pos
    cdef int want, v
    cdef int failed = 0
    cdef long long[::1] view

    with nogil:
        for idx in range(lo, hi):
            tmp = idx
            for v in range(5):
                z[v] = 0
            for v in range(k):
                z[v] = tmp % p
                tmp = tmp // p
            z[k] = 1
            for i in range(5):
                for j in range(5):
                    c = yc[i][j]
                    a[i][j] = (c * z[zi[i][j]]) % p if c else 0
            rank = eliminate_rank(a, p)
            if rank == 5:
                continue
            n_det0 += 1
            if rank == 3:
                n_rank3 += 1
            elif rank <= 2:
                n_rankle2 += 1
            want = 0
            if collect == 2:
                want = 1
            elif collect == 1 and rank <= 3:
                want = 1
            if want:
                if used + 5 > cap:
                    cap = 1024 if cap == 0 else cap * 2
                    grown = <long long *> realloc(buf, cap * sizeof(long long))
                    if grown == NULL:
                        failed = 1
                        break
                    buf = grown
                for v in range(5):
                    buf[used] = z[v]
                    used += 1

    if failed:
        free(buf)
        raise MemoryError("scan collection buffer")
    pts = None
    if collect:
        arr = np.empty(used, dtype=np.int64)
        if used > 0:
            view = arr
            for pos in range(used):
                view[pos] = buf[pos]
        pts = arr.reshape(-1, 5)
    free(buf)
    return int(n_det0), int(n_rank3), int(n_rankle2), pts

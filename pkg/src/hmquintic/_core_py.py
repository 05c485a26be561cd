"""Pure numpy scan backend.

Enumerates P^4(F_p) in affine charts and classifies points of the z-space
determinantal quintic by rank of L(z). The determinant filter uses the exact
symbolic expansion of det L (11 monomials over Z, computed once at import);
ranks are then taken only on the determinant-zero subset with a vectorized
batched Gaussian elimination. The compiled backend does per-point elimination
instead; agreement between the two is pinned by tests.
"""
from __future__ import annotations

from itertools import permutations
from typing import Optional, Tuple

import numpy as np

NAME = "py"

Y = (2, -1, 0, 0, -1)

_CHUNK = 1 << 20


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, clen = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


def _sym_det(entry_form) -> list:
    """Exact determinant over Z as sorted [(exponent-5-tuple, coeff)]."""
    out = {}
    for perm in permutations(range(5)):
        coeff = _perm_sign(perm)
        expo = [0] * 5
        ok = True
        for i in range(5):
            f = entry_form(i, perm[i])
            if f is None:
                ok = False
                break
            v, c = f
            coeff *= c
            expo[v] += 1
        if ok and coeff:
            k = tuple(expo)
            out[k] = out.get(k, 0) + coeff
    return sorted((k, c) for k, c in out.items() if c)


def _l_entry(i: int, j: int):
    c = Y[(i - j) % 5]
    return ((2 * j - i) % 5, c) if c else None


def _m_entry(i: int, j: int):
    c = Y[(3 * (i - j)) % 5]
    return ((3 * (i + j)) % 5, c) if c else None


DETL_MONOS = _sym_det(_l_entry)
DETM_MONOS = _sym_det(_m_entry)


def modinv_batch(a: np.ndarray, p: int) -> np.ndarray:
    base = a % p
    result = np.ones_like(base)
    e = p - 2
    while e:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


def eval_monomials(monos, Z: np.ndarray, p: int) -> np.ndarray:
    """Evaluate a sum of 5-variable monomials on a batch Z of shape (n, 5)."""
    pw = [None] * 5
    acc = np.zeros(Z.shape[0], dtype=np.int64)
    for expo, c in monos:
        t = np.full(Z.shape[0], c % p, dtype=np.int64)
        for v in range(5):
            e = expo[v]
            if not e:
                continue
            if pw[v] is None:
                z = Z[:, v] % p
                pw[v] = [z]
                for _ in range(4):
                    pw[v].append(pw[v][-1] * z % p)
            t = (t * pw[v][e - 1]) % p
        acc = (acc + t) % p
    return acc


def rank_batch(A: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a batch (n, r, c) of matrices over F_p by batched elimination."""
    A = A.copy() % p
    n, r, c = A.shape
    piv = np.zeros(n, dtype=np.int64)
    rows = np.arange(r)
    for col in range(c):
        column = A[:, :, col]
        cand = (column != 0) & (rows[None, :] >= piv[:, None])
        has = cand.any(axis=1)
        idx = np.nonzero(has)[0]
        if idx.size == 0:
            continue
        pr = cand[idx].argmax(axis=1)
        rr = piv[idx]
        tmp = A[idx, pr, :].copy()
        A[idx, pr, :] = A[idx, rr, :]
        A[idx, rr, :] = tmp
        inv = modinv_batch(A[idx, rr, col], p)
        A[idx, rr, :] = (A[idx, rr, :] * inv[:, None]) % p
        factor = A[idx, :, col].copy()
        factor[np.arange(idx.size), rr] = 0
        A[idx] = (A[idx] - factor[:, :, None] * A[idx, rr][:, None, :]) % p
        piv[idx] += 1
    return piv


def build_L_batch(Z: np.ndarray, p: int) -> np.ndarray:
    n = Z.shape[0]
    L = np.zeros((n, 5, 5), dtype=np.int64)
    for i in range(5):
        for j in range(5):
            c = Y[(i - j) % 5]
            if c:
                L[:, i, j] = (c * Z[:, (2 * j - i) % 5]) % p
    return L


def build_M_batch(X: np.ndarray, p: int) -> np.ndarray:
    return build_M_generic(Y, X, p)


def build_M_generic(yv, X: np.ndarray, p: int) -> np.ndarray:
    n = X.shape[0]
    M = np.zeros((n, 5, 5), dtype=np.int64)
    for i in range(5):
        for j in range(5):
            c = int(yv[(3 * (i - j)) % 5]) % p
            if c:
                M[:, i, j] = (c * X[:, (3 * (i + j)) % 5]) % p
    return M


def chart_points(p: int, k: int, lo: int, hi: int) -> np.ndarray:
    """Rows [lo, hi) of chart k: coordinates 0..k-1 free (mixed radix, least
    significant digit first), coordinate k equal to 1, the rest zero."""
    n = np.arange(lo, hi, dtype=np.int64)
    Z = np.zeros((n.size, 5), dtype=np.int64)
    for v in range(k):
        Z[:, v] = n % p
        n = n // p
    Z[:, k] = 1
    return Z


def chart_size(p: int, k: int) -> int:
    return p ** k


def scan_chart(p: int, k: int, lo: int, hi: int,
               collect: int = 0) -> Tuple[int, int, int, Optional[np.ndarray]]:
    """Scan rows [lo, hi) of chart k.

    collect 0: counts only; 1: also return the rank <= 3 points;
    2: also return every det L = 0 point. Returns
    (n_det0, n_rank3, n_rankle2, points-or-None).
    """
    n_det0 = 0
    n_rank3 = 0
    n_rankle2 = 0
    parts = []
    for start in range(lo, hi, _CHUNK):
        Z = chart_points(p, k, start, min(start + _CHUNK, hi))
        det = eval_monomials(DETL_MONOS, Z, p)
        Z0 = Z[det == 0]
        n_det0 += Z0.shape[0]
        if Z0.shape[0] == 0:
            continue
        ranks = rank_batch(build_L_batch(Z0, p), p)
        n_rank3 += int((ranks == 3).sum())
        n_rankle2 += int((ranks <= 2).sum())
        if collect == 1:
            parts.append(Z0[ranks <= 3])
        elif collect == 2:
            parts.append(Z0)
    pts = None
    if collect:
        pts = (np.concatenate(parts, axis=0) if parts
               else np.zeros((0, 5), dtype=np.int64))
    return n_det0, n_rank3, n_rankle2, pts


def det0_points_generic(yv, p: int) -> np.ndarray:
    """All points of {det M_y(x) = 0} in P^4(F_p) for an arbitrary parameter y,
    via batched rank (det = 0 iff rank < 5). Used by the twist check."""
    chunk = 1 << 16
    parts = []
    for k in range(5):
        total = chart_size(p, k)
        for start in range(0, total, chunk):
            X = chart_points(p, k, start, min(start + chunk, total))
            ranks = rank_batch(build_M_generic(yv, X, p), p)
            parts.append(X[ranks < 5])
    return np.concatenate(parts, axis=0)

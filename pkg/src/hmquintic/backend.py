"""Scan backend selection and the partitioned P^4 enumeration driver.

The compiled Cython kernel (hmquintic._core) is preferred when it imported
cleanly; the numpy fallback (hmquintic._core_py) implements the same
scan_chart contract. Set HMQUINTIC_BACKEND=c or =py to force one. Counts are
integer sums over disjoint chart ranges, so results are identical for any
thread count or partitioning; collected point arrays are lexsorted before
being returned for the same reason.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from . import _core_py

_FORCED = os.environ.get("HMQUINTIC_BACKEND", "").strip().lower()
_impl = None
if _FORCED not in ("", "c", "py"):
    raise ImportError(f"HMQUINTIC_BACKEND must be 'c' or 'py', got {_FORCED!r}")
if _FORCED in ("", "c"):
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = None
    if _impl is None and _FORCED == "c":
        raise ImportError("HMQUINTIC_BACKEND=c but the compiled core is unavailable")
if _impl is None:
    _impl = _core_py

NAME: str = _impl.NAME

_COLLECT = {"none": 0, "rank3": 1, "det0": 2}


@dataclass
class ScanResult:
    p: int
    n_det0: int
    n_rank3: int
    n_rankle2: int
    points: Optional[np.ndarray]


def tasks_for(p: int, partitions: int) -> List[Tuple[int, int, int]]:
    """Disjoint (chart, lo, hi) ranges covering P^4(F_p) exactly once.

    The dominant chart (4 free coordinates) is cut into `partitions` slices;
    the small charts are one task each.
    """
    tasks = []
    big = _core_py.chart_size(p, 4)
    partitions = max(1, min(partitions, big))
    step, extra = divmod(big, partitions)
    lo = 0
    for i in range(partitions):
        hi = lo + step + (1 if i < extra else 0)
        tasks.append((4, lo, hi))
        lo = hi
    for k in range(4):
        tasks.append((k, 0, _core_py.chart_size(p, k)))
    return tasks


def scan(p: int, collect: str = "none", threads: Optional[int] = None,
         partitions: Optional[int] = None) -> ScanResult:
    """Full scan of P^4(F_p) classifying points by rank of L(z)."""
    code = _COLLECT[collect]
    threads = max(1, threads or (os.cpu_count() or 1))
    partitions = partitions or threads
    tasks = tasks_for(p, partitions)
    if threads == 1 or len(tasks) == 1:
        results = [_impl.scan_chart(p, k, lo, hi, code) for k, lo, hi in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_impl.scan_chart, p, k, lo, hi, code)
                       for k, lo, hi in tasks]
            results = [f.result() for f in futures]
    n_det0 = sum(r[0] for r in results)
    n_rank3 = sum(r[1] for r in results)
    n_rankle2 = sum(r[2] for r in results)
    points = None
    if code:
        parts = [r[3] for r in results if r[3] is not None and r[3].shape[0]]
        points = (np.concatenate(parts, axis=0) if parts
                  else np.zeros((0, 5), dtype=np.int64))
        order = np.lexsort(points.T[::-1])
        points = points[order]
    return ScanResult(p, n_det0, n_rank3, n_rankle2, points)


def det0_points_generic(yv, p: int) -> np.ndarray:
    """Points of {det M_y(x) = 0} for arbitrary y (numpy route on any backend)."""
    return _core_py.det0_points_generic(yv, p)

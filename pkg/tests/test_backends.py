import os
import subprocess
import sys

import numpy as np
import pytest

from hmquintic import _core_py, backend

try:
    from hmquintic import _core
    HAS_C = True
except ImportError:
    HAS_C = False

needs_c = pytest.mark.skipif(not HAS_C, reason="compiled core not built")


def test_backend_name():
    assert backend.NAME in ("c", "py")
    assert _core_py.NAME == "py"


def test_tasks_cover_projective_space():
    for p in (3, 13):
        tasks = backend.tasks_for(p, 4)
        total = sum(hi - lo for _, lo, hi in tasks)
        assert total == sum(p ** k for k in range(5))
    # partition request larger than the big chart is clamped, not an error
    tasks = backend.tasks_for(3, 10 ** 6)
    assert sum(hi - lo for _, lo, hi in tasks) == 121


def test_scan_points_are_sorted():
    res = backend.scan(13, collect="det0")
    pts = res.points
    assert pts.shape == (res.n_det0, 5)
    order = np.lexsort(pts.T[::-1])
    assert (order == np.arange(pts.shape[0])).all()


@needs_c
def test_chart_counts_agree_p13_p31():
    for p in (13, 31):
        for k in range(5):
            size = _core_py.chart_size(p, k)
            c = _core.scan_chart(p, k, 0, size, 0)
            py = _core_py.scan_chart(p, k, 0, size, 0)
            assert c[:3] == py[:3], (p, k)


def _sorted_points(parts):
    pts = np.concatenate([r[3] for r in parts if r[3] is not None
                          and r[3].shape[0]])
    return pts[np.lexsort(pts.T[::-1])]


@needs_c
def test_collected_det0_points_agree_p13():
    parts_c, parts_py = [], []
    for k in range(5):
        size = _core_py.chart_size(13, k)
        parts_c.append(_core.scan_chart(13, k, 0, size, 2))
        parts_py.append(_core_py.scan_chart(13, k, 0, size, 2))
    assert np.array_equal(_sorted_points(parts_c), _sorted_points(parts_py))


@needs_c
def test_collected_rank3_points_agree_p31():
    parts_c, parts_py = [], []
    for k in range(5):
        size = _core_py.chart_size(31, k)
        parts_c.append(_core.scan_chart(31, k, 0, size, 1))
        parts_py.append(_core_py.scan_chart(31, k, 0, size, 1))
    assert np.array_equal(_sorted_points(parts_c), _sorted_points(parts_py))


def test_env_forces_fallback():
    env = dict(os.environ, HMQUINTIC_BACKEND="py")
    out = subprocess.run(
        [sys.executable, "-c",
         "from hmquintic import backend; print(backend.NAME)"],
        env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "py"


def test_env_rejects_unknown_backend():
    env = dict(os.environ, HMQUINTIC_BACKEND="fortran")
    out = subprocess.run(
        [sys.executable, "-c", "import hmquintic.backend"],
        env=env, capture_output=True, text=True)
    assert out.returncode != 0
    assert "HMQUINTIC_BACKEND" in out.stderr

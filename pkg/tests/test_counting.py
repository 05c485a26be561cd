import json
from itertools import product

import numpy as np
import pytest

from hmquintic import backend, counting, hmq
from hmquintic.counting import (
    CensusMismatch,
    ComponentMismatch,
    CountCache,
    CountResult,
    count_rank3,
    count_xprime,
    node_contribution,
    normalize_policy,
)

from frozen import (
    CENSUS_21,
    CENSUS_65,
    COUNT_41,
    N_DET0,
    N_RANK3,
    NAIVE_CONTRIB,
    PAPER_CONTRIB,
    RANK3_SPLIT,
    SMALL_COUNTS,
    TABLE_COUNTS,
)


def test_count_xprime_p3_brute_force():
    """Scan result against a direct evaluation of the z-quintic at p = 3."""
    n = 0
    for k in range(5):
        head = (0,) * k + (1,)
        for tail in product(range(3), repeat=4 - k):
            if hmq.quintic_eval("Xprime", head + tail, 3) == 0:
                n += 1
    assert n == 61
    assert count_xprime(3) == 61


def test_scan_invariants_small():
    for p in (3, 7, 13, 17):
        res = backend.scan(p, collect="none")
        assert res.n_det0 == N_DET0[p]
        assert res.n_rank3 == N_RANK3[p]
        assert res.n_rankle2 == 0


def test_count_rank3_split():
    assert count_rank3(13) == RANK3_SPLIT[13]
    assert count_rank3(31) == RANK3_SPLIT[31]


def test_normalize_policy():
    assert normalize_policy("naive") == "naive_quadric"
    assert normalize_policy("naive_quadric") == "naive_quadric"
    assert normalize_policy("paper") == "paper"
    with pytest.raises(ValueError):
        normalize_policy("strict")


def test_count_result_consistency_check():
    with pytest.raises(ValueError):
        CountResult(p=13, n_xprime=10, n_rank3=11, pentagon_component=0,
                    e2_component=0, overlap=0, n_nodes_defined={},
                    n_rulings_split={})


def test_node_contribution_policies(census):
    for p, want in PAPER_CONTRIB.items():
        assert node_contribution(p, "paper", census=census(p)) == want
    for p, want in NAIVE_CONTRIB.items():
        assert node_contribution(p, "naive", census=census(p)) == want


def test_census_mismatch_raised(monkeypatch, census):
    c13 = census(13)
    original = hmq.expected_node_profile

    def skewed(p):
        prof = original(p)
        prof["tau"] = (2, 0)
        return prof

    monkeypatch.setattr(hmq, "expected_node_profile", skewed)
    with pytest.raises(CensusMismatch):
        node_contribution(13, census=c13)


def test_component_mismatch_on_bad_e2(monkeypatch):
    monkeypatch.setattr(hmq, "e2_point_count", lambda p: 0)
    with pytest.raises(ComponentMismatch):
        count_rank3(13)


def test_split_points_rejects_stray():
    stray = np.array([[1, 2, 3, 4, 5]], dtype=np.int64)
    with pytest.raises(ComponentMismatch):
        counting._split_points(stray, 13)


def test_resolved_p31_full_breakdown(resolved):
    res = resolved(31)
    assert res.resolved_count == TABLE_COUNTS[31]
    assert res.n_xprime == N_DET0[31]
    assert res.n_rank3 == N_RANK3[31]
    assert (res.pentagon_component, res.e2_component, res.overlap) == \
        RANK3_SPLIT[31]
    assert res.n_nodes_defined == CENSUS_65
    assert res.n_rulings_split == CENSUS_65
    assert res.policy == "naive_quadric"


def test_resolved_p29(resolved):
    assert resolved(29).resolved_count == TABLE_COUNTS[29]
    assert resolved(29).n_nodes_defined == CENSUS_21


def test_resolved_p41(resolved):
    res = resolved(41)
    assert res.resolved_count == COUNT_41
    assert res.n_xprime == N_DET0[41]
    assert (res.pentagon_component, res.e2_component, res.overlap) == \
        RANK3_SPLIT[41]


def test_resolved_small_primes(resolved):
    for p in (3, 13):
        assert resolved(p).resolved_count == SMALL_COUNTS[p]


def test_resolved_paper_policy(resolved):
    # the prose recipe undershoots by p per split node: 53120 - 21*29
    assert resolved(29, "paper").resolved_count == 52511


def test_partition_independence_p13(resolved):
    base = resolved(13)
    alt = counting.resolved_count(13, partitions=5)
    assert alt == base
    assert alt.n_nodes_defined == base.n_nodes_defined
    assert alt.n_rulings_split == base.n_rulings_split


def test_cache_schema(tmp_path):
    cache = CountCache(tmp_path)
    cache.append("resolved", 29, "naive_quadric", 53120)
    line = (tmp_path / "counts.jsonl").read_text().strip()
    rec = json.loads(line)
    assert list(rec) == ["variety", "p", "policy", "count", "timestamp",
                         "version"]
    assert rec["count"] == 53120
    assert rec["version"] == counting.__version__


def test_cache_lookup_rules(tmp_path):
    cache = CountCache(tmp_path)
    assert cache.lookup("resolved", 29, "naive_quadric") is None
    cache.append("resolved", 29, "naive_quadric", 1)
    cache.append("resolved", 29, "naive_quadric", 2)  # latest wins
    cache.append("resolved", 29, "paper", 3)
    cache.append("xprime", 29, "naive_quadric", 4)
    assert cache.lookup("resolved", 29, "naive_quadric") == 2
    assert cache.lookup("resolved", 29, "paper") == 3
    assert cache.lookup("xprime", 29, "naive_quadric") == 4
    # stale-version records are invisible
    stale = dict(variety="resolved", p=31, policy="naive_quadric",
                 count=99, timestamp="2000-01-01T00:00:00+00:00",
                 version="0.0.0")
    with open(tmp_path / "counts.jsonl", "a") as fh:
        fh.write(json.dumps(stale) + "\n")
    assert cache.lookup("resolved", 31, "naive_quadric") is None


def test_resolved_writes_cache(tmp_path):
    res = counting.resolved_count(3, cache_dir=tmp_path)
    cache = CountCache(tmp_path)
    assert cache.lookup("resolved", 3, "naive_quadric") == res.resolved_count

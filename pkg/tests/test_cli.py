import json

import pytest

from hmquintic import cli
from hmquintic.counting import CountCache

from frozen import SMALL_COUNTS, TABLE_COUNTS, TABLE_PRIMES


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def seed_table_counts(cache_dir, policy="naive_quadric", counts=TABLE_COUNTS):
    cache = CountCache(cache_dir)
    for p, n in counts.items():
        cache.append("resolved", p, policy, n)


def test_count_e2(tmp_path, capsys):
    code, out, _ = run(capsys, "count", "--prime", "31", "--variety", "e2",
                       "--cache", str(tmp_path))
    assert code == 0
    assert "a_p: 7" in out
    assert CountCache(tmp_path).lookup("e2", 31, "naive_quadric") == 7


def test_count_xprime(tmp_path, capsys):
    code, out, _ = run(capsys, "count", "--prime", "3", "--variety", "xprime",
                       "--cache", str(tmp_path))
    assert code == 0
    assert "n_xprime: 61" in out


def test_count_resolved(tmp_path, capsys):
    code, out, _ = run(capsys, "count", "--prime", "13",
                       "--cache", str(tmp_path))
    assert code == 0
    assert f"resolved_count: {SMALL_COUNTS[13]}" in out
    assert CountCache(tmp_path).lookup("resolved", 13,
                                       "naive_quadric") == SMALL_COUNTS[13]
    rec = json.loads((tmp_path / "counts.jsonl").read_text().splitlines()[0])
    assert list(rec) == ["variety", "p", "policy", "count", "timestamp",
                         "version"]


def test_bad_prime_exit(tmp_path, capsys):
    for bad in ("12", "11"):
        code, _, err = run(capsys, "count", "--prime", bad,
                           "--cache", str(tmp_path))
        assert code == 2
        assert "bad prime" in err


def test_trace_table_from_cache(tmp_path, capsys):
    seed_table_counts(tmp_path)
    code, out, _ = run(capsys, "trace-table", "--prime", "29",
                       "--cache", str(tmp_path))
    assert code == 0
    assert "-165" in out and "true" in out


def test_trace_table_small_primes_with_override(tmp_path, capsys):
    code, out, _ = run(capsys, "trace-table", "--primes", "3,7",
                       "--h-override", "33", "--cache", str(tmp_path))
    assert code == 0
    assert "430" in out and "2180" in out


def test_trace_table_ambiguous_without_override(tmp_path, capsys):
    code, _, err = run(capsys, "trace-table", "--prime", "3",
                       "--cache", str(tmp_path))
    assert code == 5
    assert "solver" in err


def test_trace_table_needs_some_prime(tmp_path, capsys):
    code, _, err = run(capsys, "trace-table", "--cache", str(tmp_path))
    assert code == 1


def test_census_text(tmp_path, capsys):
    code, out, _ = run(capsys, "census", "--prime", "13",
                       "--cache", str(tmp_path))
    assert code == 0
    assert "nodes: 21" in out
    assert out.count("disc=") == 21


def test_census_csv(tmp_path, capsys):
    code, out, _ = run(capsys, "census", "--prime", "13",
                       "--cache", str(tmp_path), "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "class,x,z,cone_rank,disc_class"
    assert len(lines) == 22


def test_census_structured(tmp_path, capsys):
    code, out, _ = run(capsys, "census", "--prime", "13",
                       "--cache", str(tmp_path), "--format", "structured")
    assert code == 0
    payload = json.loads(out)
    assert payload["outputs"]["size"] == 21
    assert payload["outputs"]["per_class"]["tau"] == 1
    assert payload["provenance"]["epsilon"] is None
    assert payload["provenance"]["backend"] in ("c", "py")


def test_cone(tmp_path, capsys):
    code, out, _ = run(capsys, "cone", "--prime", "13",
                       "--cache", str(tmp_path), "--format", "structured")
    assert code == 0
    payload = json.loads(out)
    assert payload["outputs"]["legendre_5"] == -1
    classes = payload["outputs"]["classes"]
    assert classes["tau"] == {"cone_rank": 4, "disc_class": "nonsquare"}
    assert classes["sigma1"]["disc_class"] == "square"


def test_group_check(tmp_path, capsys):
    code, out, _ = run(capsys, "group-check", "--cache", str(tmp_path))
    assert code == 0
    assert "size: 48" in out


def test_euler_factor(tmp_path, capsys):
    code, out, _ = run(capsys, "euler-factor", "--prime", "31",
                       "--cache", str(tmp_path))
    assert code == 0
    assert "1 + 83*T + 29791*T^2" in out
    assert "1 - 217*T + 29791*T^2" in out


def test_euler_factor_missing_coefficient(tmp_path, capsys):
    code, _, err = run(capsys, "euler-factor", "--prime", "13",
                       "--cache", str(tmp_path))
    assert code == 6
    assert "missing data" in err


def test_verify_from_cache(tmp_path, capsys):
    seed_table_counts(tmp_path)
    cert_path = tmp_path / "certificate.json"
    code, out, _ = run(capsys, "verify", "--cache", str(tmp_path),
                       "--no-compute", "--out", str(cert_path))
    assert code == 0
    assert "verdict: isomorphic" in out
    payload = json.loads(cert_path.read_text())
    assert payload["verdict"] == "isomorphic"
    assert payload["residual_field"] == "cubic-2x-8"


def test_verify_empty_cache(tmp_path, capsys):
    code, _, err = run(capsys, "verify", "--cache", str(tmp_path),
                       "--no-compute")
    assert code == 6
    assert "missing data" in err


def test_verify_paper_policy_is_unsolvable(tmp_path, capsys):
    # the prose-recipe counts put two h values inside the Weil window
    seed_table_counts(tmp_path, policy="paper", counts={29: 52511})
    code, _, err = run(capsys, "verify", "--cache", str(tmp_path),
                       "--no-compute", "--policy", "paper")
    assert code == 5
    assert "solver" in err


def test_out_file_matches_stdout(tmp_path, capsys):
    out_file = tmp_path / "report.txt"
    code, out, _ = run(capsys, "count", "--prime", "3", "--variety", "xprime",
                       "--cache", str(tmp_path), "--out", str(out_file))
    assert code == 0
    assert out_file.read_text() == out

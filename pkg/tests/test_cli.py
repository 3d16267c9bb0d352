import json
from pathlib import Path

import pytest

from sticker_collector.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


@pytest.mark.parametrize(
    "argv,golden",
    [
        (["table", "--format", "csv"], "table_paper.csv"),
        (["expect", "--format", "json"], "expect.json"),
        (["quantile", "--format", "csv"], "quantile.csv"),
        (["simulate", "--reps", "2000", "--seed", "7", "--format", "json"], "simulate_2000_seed7.json"),
    ],
)
def test_golden(capsys, argv, golden):
    rc, out, _ = run(capsys, *argv)
    assert rc == 0
    assert out == (GOLDEN / golden).read_text(encoding="utf-8")


def test_expect_defaults(capsys):
    rc, out, _ = run(capsys, "expect", "--format", "json")
    rec = json.loads(out)
    assert rec["expected_packets"] == "946.98"
    assert rec["expected_cost"] == "3787.92"
    assert rec["cost_rounded_up"] == "3788.00"
    assert rec["expected_stickers_ceil"] == 4748


def test_expect_two_coupons(capsys):
    rc, out, _ = run(capsys, "expect", "--album-size", "2", "--packet-size", "1", "--format", "json")
    assert rc == 0 and json.loads(out)["expected_packets"] == "3.00"


def test_expect_iid_dp(capsys):
    rc, out, _ = run(capsys, "expect", "--model", "iid", "--method", "dp", "--format", "json")
    assert rc == 0
    assert 949.4 <= float(json.loads(out)["expected_packets"]) <= 950.4


def test_expect_iid_exact_is_usage_error(capsys):
    rc, _, err = run(capsys, "expect", "--model", "iid", "--method", "exact")
    assert rc == 2 and "dp" in err


def test_table_with_range_syntax(capsys):
    rc, out, _ = run(capsys, "table", "--ks", "900:1000:50", "--format", "csv", "--method", "dp")
    assert rc == 0
    assert out.splitlines() == ["k,probability,cost", "900,0.45170,3600.00", "950,0.57939,3800.00", "1000,0.68734,4000.00"]


def test_table_table_format(capsys):
    rc, out, _ = run(capsys, "table", "--ks", "918", "--format", "table")
    assert rc == 0
    assert out.split() == ["k", "probability", "cost", "918", "0.49950", "3672.00"]


def test_survival(capsys):
    rc, out, _ = run(capsys, "survival", "--k", "918", "--format", "json")
    rec = json.loads(out)
    assert rec["completion_probability"].startswith("0.49950")
    rc, out, _ = run(capsys, "survival", "--k", "918", "--model", "iid", "--method", "exact", "--format", "json")
    iid = float(json.loads(out)["survival"])
    rc, out, _ = run(capsys, "survival", "--k", "918", "--model", "iid", "--method", "dp", "--format", "json")
    assert abs(float(json.loads(out)["survival"]) - iid) < 1e-9


def test_quantile_note(capsys):
    rc, out, err = run(capsys, "quantile", "--p", "0.5")
    assert rc == 0
    assert "919" in out
    assert "P(T <= 918) = 0.49950" in err


def test_curve(capsys):
    rc, out, _ = run(capsys, "curve", "--k-min", "133", "--k-max", "140", "--format", "csv", "--method", "dp")
    lines = out.splitlines()
    assert lines[0] == "k,cdf" and len(lines) == 9


def test_simulate_files(tmp_path, capsys):
    hist, raw, trace = tmp_path / "h.csv", tmp_path / "r.csv", tmp_path / "t.json"
    rc, out, err = run(
        capsys, "simulate", "--reps", "50", "--seed", "3", "--format", "json",
        "--histogram", str(hist), "--raw", str(raw), "--trace-at", "30", "--trace-out", str(trace),
    )
    assert rc == 0
    assert "seed=3" in err
    summary = json.loads(out)
    assert summary["replications"] == 50
    assert hist.read_text().startswith("lo,hi,count\n")
    lines = raw.read_text().splitlines()
    assert lines[0] == "rep,packets,duplicates" and len(lines) == 51
    t = json.loads(trace.read_text())
    assert t["packets"] == int(lines[1].split(",")[1])
    assert len(t["snapshots"]["30"]) == t["owned_after_packet"][29]


def test_simulate_rejects_zero_reps(capsys):
    rc, _, _ = run(capsys, "simulate", "--reps", "0")
    assert rc == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["expect", "--packet-size", "700"],
        ["expect", "--price", "abc"],
        ["table", "--precision-bits", "100"],
        ["quantile", "--p", "1.5"],
        ["nonsense"],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_check_passes(capsys):
    rc, out, _ = run(capsys, "check")
    assert rc == 0
    assert "FAIL" not in out and "6/6" in out


def test_check_small_album(capsys):
    rc, out, _ = run(capsys, "check", "--album-size", "30", "--packet-size", "3")
    assert rc == 0


def test_check_failure_exit_code(capsys, monkeypatch):
    from sticker_collector import cli

    monkeypatch.setattr(cli, "run_checks", lambda spec, cfg: [("forced", False, "x")])
    rc, out, _ = run(capsys, "check")
    assert rc == 4 and "FAIL" in out


def test_precision_failure_exit_code(capsys, monkeypatch):
    from sticker_collector import exact

    def boom(*a, **k):
        raise exact.PrecisionError("forced")

    monkeypatch.setattr(exact, "survival_exact", boom)
    rc, _, err = run(capsys, "survival", "--k", "900")
    assert rc == 3 and "numeric failure" in err


def test_env_sets_default_format(capsys, monkeypatch):
    monkeypatch.setenv("STICKER_COLLECTOR_FORMAT", "csv")
    rc, out, _ = run(capsys, "table", "--ks", "918")
    assert out.startswith("k,probability,cost\n")


def test_output_file(tmp_path, capsys):
    target = tmp_path / "t.csv"
    rc, out, _ = run(capsys, "table", "--ks", "918", "--format", "csv", "-o", str(target))
    assert rc == 0 and out == ""
    assert target.read_bytes() == b"k,probability,cost\n918,0.49950,3672.00\n"

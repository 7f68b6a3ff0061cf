from __future__ import annotations

import json
import shutil
import subprocess
import sys

import pytest

from fqm import cli
from fqm.selftest import default_fixture_dir


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_correctness_report(tmp_path, capsys):
    out = tmp_path / "c"
    assert run("correctness", "--n", 8, "--trials", 20, "--seed", 1, "--out", out) == 0
    report = json.loads((tmp_path / "c.json").read_text())
    assert report["summary"]["wins"] == 20
    assert report["config"]["n"] == 8 and "out" not in report["config"]
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0].split(",")[:4] == ["trial", "seed", "scheme", "backend"]
    assert len(lines) == 22 and lines[-1].startswith("summary,")
    # wall_ms stays empty without --timing
    assert all(line.endswith(",") for line in lines[1:])


def test_timing_column(tmp_path):
    run("correctness", "--n", 8, "--trials", 3, "--timing", "--out", tmp_path / "t", "--format", "csv")
    rows = (tmp_path / "t.csv").read_text().splitlines()[1:-1]
    assert all(float(r.rsplit(",", 1)[1]) >= 0 for r in rows)
    assert not (tmp_path / "t.json").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ("correctness", "--n", 16, "--scheme", "full", "--provider", "fast", "--trials", 12),
        ("attack", "counterfeit", "--n", 16, "--adversary", "self-forgery", "--trials", 40),
        ("attack", "sabotage", "--n", 8, "--backend", "dense", "--adversary", "random-dense",
         "--verifier", "full", "--trials", 20),
        ("attack", "distinguish", "--n", 64, "--adversary", "scan", "--trials", 30),
    ],
)
def test_same_seed_byte_identical(tmp_path, argv):
    for k in (1, 2):
        assert run(*argv, "--seed", 77, "--out", tmp_path / f"r{k}") == 0
    for ext in ("json", "csv"):
        assert (tmp_path / f"r1.{ext}").read_bytes() == (tmp_path / f"r2.{ext}").read_bytes()


def test_thread_count_does_not_change_rows(tmp_path):
    base = ("attack", "counterfeit", "--n", 16, "--adversary", "self-forgery", "--trials", 30, "--seed", 5)
    run(*base, "--threads", 1, "--out", tmp_path / "a")
    run(*base, "--threads", 4, "--out", tmp_path / "b")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 12, "trials": 5, "seed": 3}))
    run("correctness", "--config", cfg, "--trials", 7, "--out", tmp_path / "o")
    report = json.loads((tmp_path / "o.json").read_text())
    assert report["config"]["n"] == 12
    assert report["config"]["trials"] == 7
    assert report["summary"]["trials"] == 7


@pytest.mark.parametrize(
    "argv,field",
    [
        (("correctness", "--n", 18), "n"),
        (("correctness", "--trials", -1), "trials"),
        (("correctness", "--n", 20, "--backend", "dense"), "n=20"),
        (("attack", "counterfeit", "--adversary", "entangled", "--n", 16), "dense"),
        (("attack", "sabotage", "--scheme", "full", "--verifier", "full", "--adversary", "honest"), "verifier"),
        (("attack", "distinguish", "--scheme", "full"), "scheme"),
    ],
)
def test_invalid_configuration_exit_2(argv, field, capsys):
    assert run(*argv) == 2
    err = capsys.readouterr().err
    assert err.startswith("fqm: error:") and field in err


def test_bad_config_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("correctness", "--config", bad) == 2
    assert "config" in capsys.readouterr().err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        run("correctness", "--scheme", "nope")
    assert exc.value.code == 2


@pytest.mark.parametrize("scheme", ["simple", "full"])
def test_mint_verify_roundtrip(tmp_path, capsys, scheme):
    note = tmp_path / "note.bin"
    common = ("--scheme", scheme, "--n", 16, "--seed", 9, "--provider", "fast")
    assert run("mint", *common, "--index", 2, "--out", note) == 0
    assert note.read_bytes()[:4] == b"FQM1"
    capsys.readouterr()
    assert run("verify", *common, "--id", 3, "--note", note) == 0
    summary = json.loads(capsys.readouterr().out)["summary"]
    assert summary["accepted"] and summary["probability"] == 1.0
    # another bank (different seed) does not accept it
    other = ("--scheme", scheme, "--n", 16, "--seed", 10, "--provider", "fast")
    assert run("verify", *other, "--id", 3, "--note", note) == 0
    summary = json.loads(capsys.readouterr().out)["summary"]
    assert summary["probability"] < 1


def test_mint_is_deterministic(capsys):
    run("mint", "--n", 12, "--seed", 4, "--index", 1)
    a = capsys.readouterr().out
    run("mint", "--n", 12, "--seed", 4, "--index", 1)
    assert capsys.readouterr().out == a
    run("mint", "--n", 12, "--seed", 4, "--index", 2)
    assert capsys.readouterr().out != a


def test_verify_rejects_bad_inputs(tmp_path, capsys):
    junk = tmp_path / "junk.bin"
    junk.write_bytes(b"nope")
    assert run("verify", "--note", junk) == 2
    assert run("verify", "--note", tmp_path / "missing.bin") == 2
    note = tmp_path / "n.bin"
    run("mint", "--n", 8, "--out", note)
    assert run("verify", "--n", 12, "--note", note) == 2
    assert run("verify", "--n", 8, "--scheme", "full", "--note", note) == 2
    assert run("verify", "--n", 8, "--id", 99, "--note", note) == 2


def test_franchise_output(capsys):
    assert run("franchise", "--n", 16, "--id", 2, "--seed", 1) == 0
    key = json.loads(capsys.readouterr().out)["key"]
    assert key["id"] == 2 and len(key["i_set"]) == 4 and len(key["v"]) == 4


def test_selftest_passes(tmp_path, capsys):
    assert run("selftest", "--out", tmp_path / "s.json") == 0
    assert "selftest passed" in capsys.readouterr().out
    assert json.loads((tmp_path / "s.json").read_text())["passed"]


def test_selftest_detects_corrupted_fixture(tmp_path, capsys):
    fx = tmp_path / "fixtures"
    shutil.copytree(default_fixture_dir(), fx)
    cases = json.loads((fx / "acceptance.json").read_text())
    cases[0]["p"] = "1/3"
    (fx / "acceptance.json").write_text(json.dumps(cases))
    assert run("selftest", "--fixtures", fx) == 1
    out = capsys.readouterr().out
    assert "FAIL fixture:acceptance.json" in out
    assert "FAILED: fixture:acceptance.json" in out


def test_bench_and_regression_gate(tmp_path, capsys):
    base = tmp_path / "base.json"
    assert run("bench", "--repeat", 2, "--out", base) == 0
    report = json.loads(base.read_text())
    assert set(report["benchmarks"]) >= {"verify_symbolic_n64_us", "gf2_complement_n64_us"}
    # a baseline far faster than reality trips the gate
    fast = {"benchmarks": {k: v / 1e6 for k, v in report["benchmarks"].items()}}
    (tmp_path / "fast.json").write_text(json.dumps(fast))
    assert run("bench", "--repeat", 2, "--baseline", tmp_path / "fast.json") == 1
    assert run("bench", "--repeat", 0) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fqm", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("fqm ")

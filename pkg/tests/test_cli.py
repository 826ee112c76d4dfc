import csv
import io
import json
import os
import subprocess
import sys

import pytest

from rhocalc.cli import resolve_group, run

from conftest import JOBS


def job(name):
    return os.path.join(JOBS, name)


def invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_hc_table_z2_csv(capsys):
    code, out, _ = invoke(capsys, "--group", job("z2.json"), "--cmd", "hc-table", "--degree", "4",
                          "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(int(r["deg"]), int(r["dim"])) for r in rows] == [(0, 2), (1, 0), (2, 2), (3, 0), (4, 2)]


def test_hc_table_shorthand_matches_file(capsys):
    a = invoke(capsys, "--group", "Z/2", "--cmd", "hc-table", "--degree", "3", "--format", "csv")[1]
    b = invoke(capsys, "--group", job("z2.json"), "--cmd", "hc-table", "--degree", "3", "--format", "csv")[1]
    assert a == b


def test_hc_table_infinite_class(capsys):
    code, out, _ = invoke(capsys, "--group", job("z.json"), "--cmd", "hc-table", "--degree", "3",
                          "--class", "2")
    rep = json.loads(out)
    assert code == 0 and rep["ok"]
    # centralizer mod <2> is Z/2, rationally a point
    assert [r["dim"] for r in rep["rows"]] == [1, 0, 0, 0]


def test_kernel_identities_exit_zero(capsys):
    code, out, _ = invoke(capsys, "--group", job("z4.json"), "--cmd", "kernel-identities", "--trials", "5")
    rep = json.loads(out)
    assert code == 0
    assert rep["status"] == "all 5 identities exact"
    assert all(r["failures"] == 0 for r in rep["rows"])


def test_pair_z2(capsys):
    code, out, _ = invoke(capsys, "--group", job("z2.json"), "--cmd", "pair", "--input", job("pair_z2.json"))
    rep = json.loads(out)
    assert code == 0
    assert rep["value"] == "1/2"
    assert rep["rows"][0]["agree"]


def test_pair_identity_class_rejected(capsys):
    code, out, _ = invoke(capsys, "--group", job("z2.json"), "--cmd", "pair", "--input", job("pair_z2.json"),
                          "--class", "0")
    assert code == 1 and json.loads(out)["error"] == "ClassMismatch"


@pytest.mark.parametrize("cmd,extra", [
    ("chern", ["--trials", "3"]),
    ("transgression-check", ["--trials", "2", "--degree", "1"]),
    ("burghelea-check", ["--degree", "3"]),
    ("as-identities", ["--trials", "4", "--degree", "1"]),
])
def test_other_commands(capsys, cmd, extra):
    code, out, _ = invoke(capsys, "--group", job("s3.json"), "--cmd", cmd, *extra)
    assert code == 0 and json.loads(out)["ok"]


def test_deterministic(capsys, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        assert run(["--group", "S3", "--cmd", "kernel-identities", "--trials", "4", "--seed", "7",
                    "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


@pytest.mark.parametrize("argv", [
    ["--group", "Z/0", "--cmd", "hc-table"],
    ["--group", "nonsense", "--cmd", "hc-table"],
    ["--group", "Z", "--cmd", "hc-table"],
    ["--group", "Z/2", "--cmd", "hc-table", "--degree", "99"],
    ["--group", "Z/2", "--cmd", "pair"],
])
def test_bad_input_nonzero(capsys, argv):
    code, out, err = invoke(capsys, *argv)
    assert code == 1
    assert json.loads(out)["ok"] is False
    assert err.startswith("rhocalc:")


def test_non_idempotent_rejected(capsys, tmp_path):
    bad = tmp_path / "p.json"
    bad.write_text(json.dumps({"idempotent": [[{"1": "1"}]]}))
    code, out, _ = invoke(capsys, "--group", "Z/2", "--cmd", "chern", "--input", str(bad))
    assert code == 1 and json.loads(out)["error"] == "UncertifiedInput"


def test_resolve_group():
    assert len(resolve_group("S3").ball()) == 6
    assert len(resolve_group("Z/5").ball()) == 5
    assert not resolve_group("Z^2").is_finite


def test_console_module():
    res = subprocess.run([sys.executable, "-m", "rhocalc", "--group", "Z/3", "--cmd", "hc-table",
                          "--degree", "2", "--format", "csv"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.splitlines()[1:] == ["0,3", "1,0", "2,3"]

import json
import os
import pathlib
import shutil
import subprocess
import xml.etree.ElementTree as ET

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


def cli_path():
    exe = os.environ.get("KINEX_CLI") or shutil.which("kinex")
    if not exe:
        candidate = ROOT / "build" / "kinex"
        exe = str(candidate) if candidate.exists() else None
    if not exe:
        pytest.skip("kinex executable not found")
    return exe


def kinex(*args):
    return subprocess.run([cli_path(), *map(str, args)], capture_output=True, text=True)


def test_default_chain(tmp_path, config_dir):
    cfg = config_dir / "default.json"
    assert kinex("simulate", "--config", cfg, "--out", tmp_path / "s").returncode == 0
    assert kinex("extract", "--in", tmp_path / "s", "--out", tmp_path / "x", "--model", "gl").returncode == 0
    r = kinex("counts", "--config", cfg, "--out", tmp_path / "x", "--depairing", tmp_path / "x" / "depairing.json")
    assert r.returncode == 0, r.stderr
    assert kinex("report", "--in", tmp_path / "x", "--out", tmp_path / "report.json").returncode == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["ordered"] is True
    row = next(o for o in rep["ordering"] if o["T_K"] == 4.0)
    assert 6.0 <= row["I_DCR_uA"] <= 10.0
    assert abs(row["Idep_uA"] / 25.0 - 1.0) < 0.02
    header = (tmp_path / "x" / "depairing.csv").read_text().splitlines()[0]
    assert header == "branch,T_K,Idep_uA,Idep_sigma,C,C_sigma,gamma_ratio"
    for svg in (tmp_path / "x").glob("*.svg"):
        ET.parse(svg)


def test_usage_and_data_errors(tmp_path, data_dir):
    assert kinex("simulate", "--nope").returncode == 1
    r = kinex("fit", "--in", data_dir / "malformed_option.s2p", "--out", tmp_path)
    assert r.returncode == 2
    assert "line 3" in r.stderr

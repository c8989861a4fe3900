import csv
import json
import subprocess
import sys

import pytest

from sigmapf.cli import main
from sigmapf.pf import PFSpectrum
from sigmapf.report import SPECTRUM_HEADER, emit_spectrum_table
from sigmapf.scenario import bundled_scenario_paths


def write_config(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


BASE = {
    "name": "tiny",
    "group": {"family": "su", "n": 2},
    "automorphism": {"declared_order": 1},
    "frame": [{"idiag": [1, -1]}],
    "w": ["pi/4"],
    "xi": [["1"]],
    "operations": ["decompose", "orbit-spectrum", "pf-spectrum", "check-austere"],
}


def read_rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_list(capsys):
    assert main(["list"]) == 0
    names = capsys.readouterr().out.split()
    assert names == [p.stem for p in bundled_scenario_paths()]


def test_valid_run_writes_artifacts(tmp_path):
    cfg = write_config(tmp_path, BASE)
    assert main(["pf-spectrum", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    out = tmp_path / "o" / "tiny"
    assert (out / "pf_spectrum_xi0.csv").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["exit_code"] == 0 and summary["operations"] == ["pf-spectrum"]


@pytest.mark.parametrize("broken", [
    "{not json",
    {"name": "x"},
    dict(BASE, group={"family": "e8", "n": 1}),
    dict(BASE, operations=["fly"]),
    dict(BASE, automorphism={"outer": "complex_conjugation", "declared_order": 3}),
    dict(BASE, frame=[{"idiag": [1, 0]}]),
    dict(BASE, w=["pi/4", "pi/3"]),
])
def test_config_errors_exit_2(tmp_path, broken, capsys):
    cfg = write_config(tmp_path, broken)
    code = main(["decompose" if isinstance(broken, str) else "run-all", "--config", cfg, "--out", str(tmp_path)])
    assert code == 2
    assert "config error" in capsys.readouterr().err


def test_missing_file_exit_2(tmp_path):
    assert main(["decompose", "--config", str(tmp_path / "nope.json")]) == 2


def test_grid_must_divide_by_four(tmp_path):
    cfg = write_config(tmp_path, dict(BASE, operations=["verify-pathspace"]))
    assert main(["verify-pathspace", "--config", cfg, "--grid", "130", "--out", str(tmp_path)]) == 2


def test_failed_expectation_exit_1(tmp_path):
    cfg = write_config(tmp_path, dict(BASE, expect={"austere_finite": True}))
    assert main(["check-austere", "--config", cfg, "--out", str(tmp_path)]) == 1


def test_undecidable_exit_3(tmp_path):
    # a float w next to pi: theta = 2 w is within rounding of 2 pi, so membership in 2 pi Z is undecidable
    cfg = write_config(tmp_path, dict(BASE, w=[3.141592653589793]))
    assert main(["orbit-spectrum", "--config", cfg, "--out", str(tmp_path)]) == 3


def test_fiber_enumeration_rows(tmp_path):
    cfg = str([p for p in bundled_scenario_paths() if p.stem == "su3_fiber"][0])
    assert main(["pf-spectrum", "--config", cfg, "--enumerate", "2", "--out", str(tmp_path)]) == 0
    rows = read_rows(tmp_path / "su3_fiber" / "pf_spectrum_xi0.csv")
    assert rows[0] == SPECTRUM_HEADER
    body = rows[1:]
    assert {r[0] for r in body} == {"lattice"}
    pos = [r for r in body if float(r[4]) > 0]
    neg = [r for r in body if float(r[4]) < 0]
    # M = 2 and |Delta+| = 3: n = 1, 2 per root and sign
    assert len(pos) == len(neg) == 2 * 3


def test_empty_spectrum_table_is_header_only(tmp_path):
    assert emit_spectrum_table(None, 2) == ",".join(SPECTRUM_HEADER) + "\n"
    empty = PFSpectrum((), (), (), ())
    emit_spectrum_table(empty, 2, tmp_path / "t.csv")
    assert read_rows(tmp_path / "t.csv") == [SPECTRUM_HEADER]
    # xi = 0 kills every family
    cfg = write_config(tmp_path, dict(BASE, w=["0"], xi=[["0"]]))
    assert main(["pf-spectrum", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert read_rows(tmp_path / "tiny" / "pf_spectrum_xi0.csv") == [SPECTRUM_HEADER]


def test_same_seed_same_bytes(tmp_path):
    cfg = str([p for p in bundled_scenario_paths() if p.stem == "su3_order3"][0])
    for d in ("a", "b"):
        assert main(["run-all", "--config", cfg, "--out", str(tmp_path / d)]) == 0
    for f in (tmp_path / "a" / "su3_order3").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / "su3_order3" / f.name).read_bytes(), f.name


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "sigmapf.cli", "list"], capture_output=True, text=True)
    assert proc.returncode == 0 and "su2_fiber" in proc.stdout


def test_xi_length_exit_2(tmp_path):
    cfg = write_config(tmp_path, dict(BASE, xi=[["1", "2"]]))
    assert main(["orbit-spectrum", "--config", cfg, "--out", str(tmp_path)]) == 2

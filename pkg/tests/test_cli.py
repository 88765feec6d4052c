import io
import json
import subprocess
import sys

import pytest

from qspheres.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    return code, json.loads(text)


def test_nf():
    code, data = run_json("nf", "C'C", "--theta", "1/4")
    assert code == 0
    assert data["command"] == "nf"
    assert data["result"]["normal_form"] == "1 - 1/2 E - F"
    assert set(data) == {"command", "config", "result", "residuals"}


def test_nf_on_other_presentation():
    code, data = run_json("nf", "b a", "--presentation", "heegaard", "--theta", "1/4")
    assert code == 0
    assert data["result"]["normal_form"] == "t^3 a b"


def test_pair_exact():
    code, data = run_json("pair", "--mu", "3", "--mode", "exact")
    assert code == 0
    assert data["result"]["exact"] == "3/1"


def test_pair_both_reports_numeric():
    code, data = run_json("pair", "--mu", "-2", "--N", "48")
    assert code == 0
    assert abs(data["result"]["numeric"] + 2) < 1e-8


def test_bad_parameters_exit_2(capsys):
    assert main(["pair", "--p", "1"], io.StringIO()) == 2
    assert "configuration error" in capsys.readouterr().err
    assert main(["nf", "E + X"], io.StringIO()) == 2
    assert main(["pair", "--theta", "one"], io.StringIO()) == 2


def test_unknown_command_exits_2():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"], io.StringIO())
    assert info.value.code == 2


def test_output_is_byte_identical_across_runs():
    argv = ("pair-sweep", "--mu-range=-2..2", "--N", "40", "--theta", "1/3")
    assert run(*argv)[1] == run(*argv)[1]


def test_parallel_sweep_matches_serial():
    argv = ("pair-sweep", "--mu-range=-2..2", "--N", "40")
    serial = run_json(*argv)[1]
    parallel = run_json(*argv, "--jobs", "2")[1]
    serial["config"].pop("jobs")
    parallel["config"].pop("jobs")
    assert serial == parallel


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sample\np = 2/3\nq = 1/2\ntheta = 1/4\nmu = 2\nmode = exact\n")
    code, data = run_json("pair", "--config", str(cfg))
    assert code == 0
    assert data["config"]["p"] == "2/3" and data["config"]["mu"] == 2
    code, data = run_json("pair", "--config", str(cfg), "--mu", "-1")
    assert data["config"]["mu"] == -1
    assert data["result"]["exact"] == "-1/1"


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("no equals sign here\n")
    assert main(["pair", "--config", str(cfg)], io.StringIO()) == 2


def test_csv_output():
    code, text = run("lens", "--n", "2", "--mu", "2", "--format", "csv", "--N", "40")
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0].startswith("mu")
    assert len(lines) > 2


def test_out_dir(tmp_path, monkeypatch):
    code, _ = run("pair", "--mu", "1", "--out-dir", str(tmp_path / "a"), "--N", "40")
    assert code == 0
    assert (tmp_path / "a" / "pair.json").exists()
    assert (tmp_path / "a" / "pair.csv").exists()
    monkeypatch.setenv("QSPHERES_OUTPUT_DIR", str(tmp_path / "b"))
    run("witness-signs")
    data = json.loads((tmp_path / "b" / "witness-signs.json").read_text())
    assert data["command"] == "witness-signs"


def test_witness_signs():
    code, data = run_json("witness-signs")
    assert code == 0
    assert data["result"]["mirror"] == [1, 1]
    assert data["result"]["podles"] == [1, -1]


def test_torus_free():
    code, data = run_json("torus-free", "--mu", "2")
    assert code == 0
    assert data["result"]["unitary"] is True


def test_idempotent_command():
    code, data = run_json("idempotent", "--mu", "1", "--theta", "1/4")
    assert code == 0
    assert data["result"]["verified"] is True


def test_summability_command():
    code, data = run_json("summability", "--expr", "C", "--N", "40")
    assert code == 0
    assert data["result"]["ratio"] <= data["result"]["bound"]


def test_check_presentations():
    code, data = run_json("check-presentations", "--N", "32")
    assert code == 0
    assert all(v < 1e-12 for v in data["residuals"].values())
    assert len(data["residuals"]) == 6


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qspheres.cli", "nf", "E F"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["normal_form"] == "0"

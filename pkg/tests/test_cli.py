import io
import json
import subprocess
import sys

import pytest

from runsapprox.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_pmf_two_trials():
    code, text = run("pmf", "--k1", "1", "--k2", "1", "--n", "2", "--p", "0.5")
    assert code == 0
    assert text == "m,probability\n0,0.7500000\n1,0.2500000\n"


def test_pmf_methods_agree():
    base = ["pmf", "--k1", "2", "--k2", "1", "--n", "14", "--q", "0.35"]
    outputs = {run(*base, "--method", m)[1] for m in ("recursive", "closed-form", "dp", "brute")}
    assert len(outputs) == 1


def test_pmf_exact_json_and_precision(tmp_path):
    target = tmp_path / "law.json"
    code, _ = run("pmf", "--k1", "1", "--k2", "1", "--n", "4", "--p", "0.5", "--exact",
                  "--format", "json", "--output", str(target))
    assert code == 0
    assert json.loads(target.read_text())["masses"][0] == "5/16"
    _, text = run("pmf", "--k1", "1", "--k2", "1", "--n", "2", "--p", "0.5", "--precision", "2")
    assert "0,0.75" in text


def test_malformed_probability_is_usage_error(capsys):
    code, _ = run("pmf", "--k1", "1", "--k2", "1", "--n", "3", "--p", "abc")
    assert code == 2
    assert "invalid trial specification" in capsys.readouterr().err


def test_missing_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        run("bounds", "--n", "31")
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_bounds_reproduce_table_column():
    code, text = run("bounds", "--all", "--n", "31", "--q", "0.25", "--k1", "3", "--k2", "2",
                     "--alpha-preset", "n/k", "--precision", "10")
    assert code == 0
    values = {line.split(",")[0]: float(line.split(",")[1]) for line in text.splitlines()[1:]}
    expected = {"poisson_table": 0.0153348, "thm21": 0.4721530, "cor41": 0.1261160,
                "thm22": 0.0583356, "cor42": 0.1495820}
    for name, v in expected.items():
        assert values[name] == pytest.approx(v, abs=5e-7)


def test_bounds_printed_poisson_and_json():
    code, text = run("bounds", "--bound", "poisson", "--poisson-variant", "printed", "--n", "31",
                     "--q", "0.25", "--k1", "3", "--k2", "2", "--format", "json")
    assert code == 0
    rep = json.loads(text)["bounds"][0]
    assert rep["name"] == "poisson_printed" and round(rep["value"], 7) == 0.0063952


def test_table_command(capsys):
    code, text = run("table", "1")
    assert code == 0 and "0.4721525" in text
    assert "failures 0" in capsys.readouterr().err


def test_verify_suites():
    assert run("verify", "stein")[0] == 0
    code, text = run("verify", "tables")
    assert code == 0 and "table 3" in text
    assert run("verify", "nope")[0] == 2


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "defaults.txt"
    cfg.write_text("# grid\nk1 = 1\nk2 = 1\nn = 5\nprecision = 3\n")
    code, text = run("--config", str(cfg), "pmf", "--p", "0.5")
    assert code == 0 and "0,0.188" in text
    code, text = run("--config", str(cfg), "pmf", "--p", "0.5", "--n", "2")
    assert text.splitlines()[1] == "0,0.750"
    bad = tmp_path / "bad.txt"
    bad.write_text("nonsense\n")
    assert run("--config", str(bad), "pmf", "--p", "0.5")[0] == 2


def test_simulate_command_deterministic():
    args = ["simulate", "--k1", "1", "--k2", "1", "--n", "8", "--p", "0.5", "--reps", "5000",
            "--seed", "3"]
    assert run(*args, "--threads", "1")[1] == run(*args, "--threads", "2")[1]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "runsapprox.cli", "pmf", "--k1", "1", "--k2", "1",
                           "--n", "2", "--p", "0.5"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("m,probability")

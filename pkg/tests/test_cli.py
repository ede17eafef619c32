import json
import subprocess
import sys

import pytest

from anisocs.cli import UsageError, main, parse_args
from anisocs.errors import ConfigError


def _config(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def _kv(line):
    return dict(p.split("=", 1) for p in line.split())


def test_parse_phase(tmp_path):
    inv = parse_args(["phase", "--config", _config(tmp_path, {"grid_n": 8}), "--jobs", "1"])
    assert inv.study_tag == "phase" and inv.config["study"] == "phase"
    assert inv.config["grid_n"] == 8 and inv.formats == ("json",)


def test_seed_override(tmp_path):
    inv = parse_args(["phase", "--config", _config(tmp_path, {"seed": 3}), "--seed", "42"])
    assert inv.config["seed"] == 42


def test_repeatable_format(tmp_path):
    inv = parse_args(["phase", "--config", _config(tmp_path, {}), "--format", "csv", "--format", "svg"])
    assert inv.formats == ("csv", "svg")


@pytest.mark.parametrize("argv", [["bogus"], ["phase"], ["phase", "--config", "/nonexistent.json"],
                                  ["phase", "--wat"], []])
def test_usage_errors(argv):
    with pytest.raises(UsageError):
        parse_args(argv)


def test_schema_error_pointer(tmp_path):
    with pytest.raises(ConfigError) as info:
        parse_args(["phase", "--config", _config(tmp_path, {"m": [4, 0]})])
    assert info.value.pointer == "/m/1"
    with pytest.raises(ConfigError) as info:
        parse_args(["phase", "--config", _config(tmp_path, {"solver": {"max_iters": 0}})])
    assert info.value.pointer == "/solver/max_iters"


def test_study_mismatch(tmp_path):
    with pytest.raises(ConfigError) as info:
        parse_args(["phase", "--config", _config(tmp_path, {"study": "coherence"})])
    assert info.value.pointer == "/study"


def test_unknown_subcommand_exit_and_stderr(capsys):
    assert main(["bogus"]) == 2
    out = capsys.readouterr()
    assert out.out == ""
    assert "usage:" in out.err
    assert json.loads(out.err.strip().splitlines()[-1])["exit_code"] == 2


def test_config_error_record(tmp_path, capsys):
    assert main(["phase", "--config", _config(tmp_path, {"trials": 0})]) == 2
    rec = json.loads(capsys.readouterr().err.strip())
    assert rec["error"] == "ConfigError" and rec["pointer"] == "/trials"


def test_coherence_identity_prints_mu_one(tmp_path, capsys):
    cfg = _config(tmp_path, {"grid_n": 8, "measurement": "identity", "sparsity": "dirac"})
    assert main(["coherence", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    kv = _kv(capsys.readouterr().out.strip())
    assert float(kv["mu"]) == 1.0 and kv["decay"] == "false"


def test_replacement_check(tmp_path, capsys):
    assert main(["replacement-check", "--out", str(tmp_path)]) == 0
    kv = _kv(capsys.readouterr().out.strip())
    assert float(kv["min_ratio"]) >= 0.5 and kv["holds"] == "true"
    assert json.loads((tmp_path / "replacement.json").read_text())["min_ratio"] == kv["exact"]


def test_recover_non_convergence_exit_3(tmp_path, capsys):
    cfg = _config(tmp_path, {"grid_n": 16, "s": [3], "m": [8], "trials": 2, "solver": {"max_iters": 5}})
    out = tmp_path / "o"
    assert main(["recover", "--config", cfg, "--out", str(out), "--jobs", "1"]) == 3
    assert "converged=false" in capsys.readouterr().out
    rep = json.loads((out / "report.json").read_text())
    assert len(rep["trials"]) == 2 and not any(t["converged"] for t in rep["trials"])


def test_phase_writes_files_and_echoes_seed(tmp_path, capsys):
    cfg = _config(tmp_path, {"grid_n": 16, "s": [2], "m": [8], "trials": 2})
    out = tmp_path / "o"
    code = main(["phase", "--config", cfg, "--out", str(out), "--seed", "42", "--jobs", "1",
                 "--format", "json", "--format", "csv", "--format", "svg"])
    assert code == 0
    kv = _kv(capsys.readouterr().out.strip())
    assert kv["study"] == "phase" and 0.0 <= float(kv["success_rate"]) <= 1.0
    rep = json.loads((out / "report.json").read_text())
    assert rep["config"]["seed"] == 42 and rep["config"]["jobs"] == 1
    for name in ("trials.csv", "success.svg", "log_scheme.svg"):
        assert (out / name).exists()


def test_report_replays_exactly(tmp_path, capsys):
    cfg = _config(tmp_path, {"grid_n": 16, "s": [2], "m": [6], "trials": 2})
    main(["phase", "--config", cfg, "--out", str(tmp_path / "a"), "--jobs", "1"])
    first = json.loads((tmp_path / "a" / "report.json").read_text())
    replay = _config(tmp_path, first["config"], "replay.json")
    main(["phase", "--config", replay, "--out", str(tmp_path / "b"), "--jobs", "1"])
    assert (tmp_path / "a" / "report.json").read_text() == (tmp_path / "b" / "report.json").read_text()
    capsys.readouterr()


def test_sample(tmp_path, capsys):
    cfg = _config(tmp_path, {"scheme": "variable_density", "N": 32, "m": 10, "seed": 5})
    assert main(["sample", "--config", cfg, "--out", str(tmp_path)]) == 0
    kv = _kv(capsys.readouterr().out.strip())
    assert kv["m"] == "10" and kv["seed"] == "5"
    pat = json.loads((tmp_path / "pattern.json").read_text())
    assert len(pat["indices"]) == 10


def test_sample_schema(tmp_path):
    with pytest.raises(ConfigError) as info:
        parse_args(["sample", "--config", _config(tmp_path, {"N": 4})])
    assert info.value.pointer == ""


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "anisocs", "nope"], capture_output=True, text=True)
    assert proc.returncode == 2 and "usage:" in proc.stderr and proc.stdout == ""

import json

import pytest

from orthoasym.cli import COMMANDS, ConfigError, main, resolve_parameters


def write_cfg(tmp_path, command, parameters=None, **extra):
    cfg = {"schema": "orthoasym-config/1", "command": command, "parameters": parameters or {}, **extra}
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    return p


def test_unknown_parameter_named():
    with pytest.raises(ConfigError, match="foo"):
        resolve_parameters("family", {"foo": 1})
    with pytest.raises(ConfigError):
        resolve_parameters("no-such-command", {})


def test_bad_config_exit_1(tmp_path, capsys):
    p = write_cfg(tmp_path, "family", {"foo": 1})
    assert main(["--config", str(p), "--out", str(tmp_path / "o")]) == 1
    assert "foo" in capsys.readouterr().err
    p = tmp_path / "top.json"
    p.write_text(json.dumps({"schema": "orthoasym-config/1", "command": "family", "extra": 1}))
    assert main(["--config", str(p)]) == 1


def test_family_report(tmp_path):
    out = tmp_path / "fam"
    assert main(["family", "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    for key in ("schema", "version", "command", "parameters", "seed", "results", "verdict", "paper_refs",
                "tolerances_used"):
        assert key in rep
    assert rep["command"] == "family"


def test_eval_verdict(tmp_path):
    p = write_cfg(tmp_path, "eval", {"family": "chebyshev_u", "N": 50, "lambdas": [0.1, 0.5]})
    assert main(["--config", str(p), "--out", str(tmp_path / "ev")]) == 0
    rep = json.loads((tmp_path / "ev" / "report.json").read_text())
    assert rep["verdict"] == "pass"


def test_list_builtin(capsys):
    assert main(["list-builtin"]) == 0
    text = capsys.readouterr().out
    assert "hermite" in text and "chebyshev_u" in text


def test_seeded_runs_identical(tmp_path):
    params = {"trials": 10, "n_max": 4000, "center_range": [5.0, 40.0], "width_range": [1.0, 10.0]}
    outs = []
    for k in range(2):
        p = write_cfg(tmp_path, "sobolev", params, seed=3)
        o = tmp_path / f"s{k}"
        assert main(["--config", str(p), "--out", str(o)]) == 0
        outs.append((o / "sobolev.csv").read_text())
    assert outs[0] == outs[1]


def test_every_command_has_defaults():
    for name, (defaults, fn) in COMMANDS.items():
        assert isinstance(defaults, dict) and callable(fn)

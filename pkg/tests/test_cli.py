import json
import os
import re
import subprocess
import sys

import pytest

from cpsglab.cli import main, parse_config
from cpsglab.errors import ConfigError
from cpsglab.scenarios import CATALOG, CATALOG_BY_ID, list_catalog, run_scenario

FAST_OVERRIDES = {
    "thm34-holomorphic": {"k": "300", "n_hi": "10"},
}


def write_config(path, body):
    path.write_text(body)
    return str(path)


def test_catalog_has_expected_entries():
    ids = [e.scenario_id for e in CATALOG]
    expected = ["thm34-holomorphic", "thm36-cp-rate", "thm41-no-log",
                "thm42-inverse-equiv", "thm23-characterizations",
                "prop35-lower-bound", "sec44-lower-subsequence", "prop47-poly",
                "thm48-equivalence", "appendix-dcalc", "norms-selftest"]
    assert ids == expected
    text = list_catalog()
    assert len(text.splitlines()) >= 11
    for sid in expected:
        assert sid in text
    # deterministic ordering
    assert list_catalog() == text


def test_every_catalog_id_round_trips_through_config(tmp_path):
    body = "[run]\noutput_dir = out\n\n"
    for e in CATALOG:
        body += f"[scenario:{e.scenario_id}]\n"
    cfg = parse_config(write_config(tmp_path / "all.cfg", body))
    assert [sid for sid, _, _ in cfg.scenarios] == [e.scenario_id for e in CATALOG]


def test_unknown_scenario_id_exits_2(tmp_path):
    cfg = write_config(tmp_path / "bad.cfg",
                       "[scenario:does-not-exist]\nk = 5\n")
    assert main(["run", cfg]) == 2


def test_config_diagnostics(tmp_path):
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config(write_config(tmp_path / "a.cfg", "[run]\nbogus = 1\n"))
    with pytest.raises(ConfigError, match="unknown section"):
        parse_config(write_config(tmp_path / "b.cfg", "[whatever]\n"))
    with pytest.raises(ConfigError, match="bad integer"):
        parse_config(write_config(tmp_path / "c.cfg", "[run]\nseed = abc\n"))
    with pytest.raises(ConfigError):
        parse_config(str(tmp_path / "missing.cfg"))


def test_empty_scenario_list_writes_empty_manifest(tmp_path):
    out = tmp_path / "out"
    cfg = write_config(tmp_path / "empty.cfg",
                       f"[run]\noutput_dir = {out}\nseed = 7\n")
    assert main(["run", cfg]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["schema"] == "v1"
    assert manifest["scenarios"] == []
    assert manifest["seed"] == 7


def _run_fast_config(tmp_path, out_name):
    out = tmp_path / out_name
    params = "\n".join(f"{k} = {v}" for k, v in FAST_OVERRIDES["thm34-holomorphic"].items())
    cfg = write_config(
        tmp_path / f"{out_name}.cfg",
        f"[run]\noutput_dir = {out}\nseed = 1234\njobs = 1\n\n"
        f"[scenario:thm34-holomorphic]\n{params}\n")
    rc = main(["run", cfg])
    return rc, out


def test_run_writes_results_curves_figures_manifest(tmp_path):
    rc, out = _run_fast_config(tmp_path, "out")
    assert rc == 0
    names = sorted(os.listdir(out))
    assert "manifest.json" in names
    assert "thm34-holomorphic.json" in names
    assert "thm34-holomorphic__cayley_decay.csv" in names
    assert "thm34-holomorphic__cayley_decay.png" in names
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["scenarios"][0]["verdict"] == "pass"
    record = json.loads((out / "thm34-holomorphic.json").read_text())
    assert record["verdict"] == "pass"
    assert record["payload"]["result"]["fitted"]["exponent"] > 0.8
    csv_head = (out / "thm34-holomorphic__cayley_decay.csv").read_text().splitlines()
    assert csv_head[0].startswith("#")
    assert "param,norm,argmax_mode" in csv_head
    assert (out / "thm34-holomorphic__cayley_decay.png").stat().st_size > 1000


def test_run_determinism_modulo_manifest_timestamp(tmp_path):
    _, out1 = _run_fast_config(tmp_path, "out1")
    _, out2 = _run_fast_config(tmp_path, "out2")
    names1 = sorted(os.listdir(out1))
    names2 = sorted(os.listdir(out2))
    assert names1 == names2
    for name in names1:
        b1 = (out1 / name).read_bytes()
        b2 = (out2 / name).read_bytes()
        if name == "manifest.json":
            strip = lambda b: re.sub(rb'"created": "[^"]*"', b'"created": ""', b)
            assert strip(b1) == strip(b2)
        else:
            assert b1 == b2, name


def test_check_subcommand_and_param_override(capsys):
    rc = main(["check", "thm34-holomorphic", "--param", "k=300",
               "--param", "n_hi=10"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["verdict"] == "pass"
    assert doc["payload"]["result"]["details"]["K"] == 300


def test_check_unknown_id_and_bad_param():
    assert main(["check", "nope"]) == 2
    assert main(["check", "thm34-holomorphic", "--param", "oops"]) == 2


def test_run_scenario_rejects_unknown_parameter():
    with pytest.raises(KeyError):
        run_scenario("thm34-holomorphic", {"bogus": 1})


def test_cpsg_jobs_env_override(tmp_path, monkeypatch):
    out = tmp_path / "outj"
    cfg = write_config(
        tmp_path / "j.cfg",
        f"[run]\noutput_dir = {out}\nseed = 1\njobs = 1\n\n"
        "[scenario:thm34-holomorphic]\nk = 300\nn_hi = 10\n")
    monkeypatch.setenv("CPSG_JOBS", "2")
    assert main(["run", cfg]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["jobs"] == 2


def test_console_entrypoint():
    proc = subprocess.run([sys.executable, "-m", "cpsglab.cli", "list"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "thm34-holomorphic" in proc.stdout


def test_tagged_sections_allow_repeats(tmp_path):
    out = tmp_path / "outt"
    cfg = write_config(
        tmp_path / "t.cfg",
        f"[run]\noutput_dir = {out}\nseed = 3\n\n"
        "[scenario:thm34-holomorphic:a]\nk = 300\nn_hi = 10\n\n"
        "[scenario:thm34-holomorphic:b]\nk = 400\nn_hi = 10\n")
    assert main(["run", cfg]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert len(manifest["scenarios"]) == 2
    assert {s["tag"] for s in manifest["scenarios"]} == {"a", "b"}
    assert (out / "thm34-holomorphic__a.json").exists()
    assert (out / "thm34-holomorphic__b.json").exists()

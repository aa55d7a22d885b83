import json

import numpy as np
import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

from edgestep import cli
from edgestep import generator as gen
from edgestep.config import ConfigError, dump_config, from_dict, parse_config

MINIMAL = """
command: generate
edge_step: {family: constant, params: {p: 0.5}}
horizon: 1000
seed: 42
"""


def test_minimal_generate():
    cfg = parse_config(MINIMAL)
    assert cfg.command == "generate" and cfg.horizon == 1000 and cfg.seed == 42
    assert cfg.f.p == 0.5


def test_all_errors_reported():
    text = """
command: generate
edge_step: {family: power_law, params: {c: 1, gamma: 1.2, colour: red}}
horizon: -5
extra: 1
"""
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    errs = info.value.errors
    assert "gamma must lie in [0,1)" in errs
    assert "missing required field 'seed'" in errs
    assert any("extra" in e for e in errs) and any("colour" in e for e in errs)
    assert any("horizon" in e for e in errs)


@pytest.mark.parametrize("text,needle", [
    ("command: campaign\nedge_step: {family: constant, params: {p: 0.5}}\nhorizon: 100\nseed: 1\n"
     "replicas: 10\nparams: {kind: clt, s: 500}", "anchor"),
    ("command: urn\nedge_step: {family: constant, params: {p: 0.5}}\nhorizon: 100\nseed: 1\n"
     "params: {colour: 1}", "colour"),
    ("command: bootstrap\nedge_step: {family: constant, params: {p: 0.5}}\nhorizon: 100\nseed: 1\n"
     "params: {r: 1}", "r must"),
    ("command: launch\nedge_step: {family: constant, params: {p: 0.5}}\nhorizon: 100\nseed: 1", "command"),
    ("seed: [1", "malformed"),
])
def test_validation_cases(text, needle):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert any(needle in e for e in info.value.errors)


families = st.one_of(
    st.builds(lambda p: {"family": "constant", "params": {"p": p}}, st.floats(0.01, 1.0)),
    st.builds(lambda c, g: {"family": "power_law", "params": {"c": c, "gamma": g}},
              st.floats(0.1, 5.0), st.floats(0.0, 0.99)),
    st.builds(lambda c, g, b: {"family": "log_power", "params": {"c": c, "gamma": g, "beta": b}},
              st.floats(0.1, 5.0), st.floats(0.0, 0.99), st.floats(0.0, 3.0)),
    st.builds(lambda v: {"family": "tabulated", "params": {"values": v}},
              st.lists(st.floats(0.01, 1.0), min_size=1, max_size=5)),
)


@settings(max_examples=60, deadline=None)
@given(families, st.integers(10, 10**6), st.integers(0, 2**64 - 1), st.integers(2, 50),
       st.sampled_from(["generate", "normalize", "urn", "bootstrap", "campaign"]))
def test_round_trip(fdoc, horizon, seed, replicas, command):
    params = {"kind": "max_degree"} if command == "campaign" else {}
    doc = {"command": command, "edge_step": fdoc, "horizon": horizon, "seed": seed,
           "replicas": replicas, "params": params}
    cfg = from_dict(doc)
    again = parse_config(dump_config(cfg))
    assert again == cfg
    assert dump_config(again) == dump_config(cfg)


def run(tmp_path, command, text, *extra):
    path = tmp_path / f"{command}.yaml"
    path.write_text(text)
    return cli.main([command, "--config", str(path), "--out", str(tmp_path / command), *extra])


def test_generate_outputs_reload(tmp_path):
    text = MINIMAL.replace("horizon: 1000", "horizon: 10000")
    assert run(tmp_path, "generate", text) == 0
    out = tmp_path / "generate"
    G = gen.read_snapshot(out / "snapshot.bin")
    G.check()
    assert G.time == 10**4
    traj = gen.read_trajectory_csv(out / "trajectory.csv")
    assert traj["t"][-1] == 10**4 and traj["max_deg"][-1] == G.degrees.max()
    manifest = json.loads((out / "manifest.json").read_text())
    assert {"config_hash", "version", "wall_time_s"} <= set(manifest)
    again = gen.simulate(gen.ProcessConfig(parse_config(text).f, 10**4, 42))[1]
    assert np.array_equal(again.edges, G.edges)


def test_seed_override_and_byte_identical_csv(tmp_path):
    text = MINIMAL.replace("horizon: 1000", "horizon: 5000")
    run(tmp_path, "generate", text, "--seed", "7")
    first = (tmp_path / "generate" / "trajectory.csv").read_bytes()
    run(tmp_path, "generate", text, "--seed", "7")
    assert (tmp_path / "generate" / "trajectory.csv").read_bytes() == first
    run(tmp_path, "generate", text)
    assert (tmp_path / "generate" / "trajectory.csv").read_bytes() != first


def test_campaign_warns_and_gate_exit(tmp_path, capsys):
    text = """
edge_step: {family: constant, params: {p: 0.5}}
horizon: 10000
seed: 3
replicas: 10
params: {kind: clt}
"""
    code = run(tmp_path, "campaign", text)
    err = capsys.readouterr().err
    assert "below the statistical minimum" in err
    assert code in (0, 3)
    out = tmp_path / "campaign"
    assert (out / "raw.csv").exists() and (out / "summary.json").exists()
    assert (out / ("PASS" if code == 0 else "FAIL")).exists()


def test_gate_failure_exit_code(tmp_path, capsys):
    text = """
edge_step: {family: constant, params: {p: 0.5}}
horizon: 2000
seed: 3
replicas: 20
params: {kind: clt, vertex: 40, s: 20}
"""
    assert run(tmp_path, "campaign", text) == 3
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["status"] == "gate_failure"


def test_validation_exit_code(tmp_path, capsys):
    assert run(tmp_path, "generate", MINIMAL.replace("seed: 42", "")) == 2
    msg = json.loads(capsys.readouterr().err)
    assert msg["status"] == "validation_error" and "missing required field 'seed'" in msg["errors"]
    assert run(tmp_path, "urn", MINIMAL) == 2


def test_bootstrap_surfaces_classification_warning(tmp_path):
    run(tmp_path, "generate", MINIMAL)
    text = f"""
edge_step: {{family: constant, params: {{p: 0.5}}}}
horizon: 1000
seed: 1
replicas: 3
params: {{snapshot: {tmp_path / 'generate' / 'snapshot.bin'}, a: 5.0}}
"""
    assert run(tmp_path, "bootstrap", text) == 0
    summary = json.loads((tmp_path / "bootstrap" / "summary.json").read_text())
    assert any("summability" in w for w in summary["warnings"])
    rows = (tmp_path / "bootstrap" / "runs.csv").read_text().splitlines()
    assert len(rows) == 4


def test_bootstrap_anomaly_exit(tmp_path, monkeypatch):
    monkeypatch.setattr(cli.bp, "ROUND_CAP", 1)
    text = """
edge_step: {family: power_law, params: {c: 1, gamma: 0.5}}
horizon: 20000
seed: 1
replicas: 2
params: {a: 10.0}
"""
    assert run(tmp_path, "bootstrap", text) == 4


def test_normalize_and_urn(tmp_path):
    assert run(tmp_path, "normalize", MINIMAL.replace("generate", "normalize")) == 0
    header = (tmp_path / "normalize" / "normalization.csv").read_text().splitlines()[0]
    assert header.startswith("t,phi,xi")
    text = MINIMAL.replace("command: generate", "command: urn") + "replicas: 30\nparams: {birth_time: 3}\n"
    assert run(tmp_path, "urn", text) == 0
    assert (tmp_path / "urn" / "urn.csv").read_text().startswith("t,prop_mean")


def test_output_required(tmp_path):
    path = tmp_path / "g.yaml"
    path.write_text(MINIMAL)
    assert cli.main(["generate", "--config", str(path)]) == 2
    doc = yaml.safe_load(MINIMAL)
    doc["output"] = str(tmp_path / "o")
    path.write_text(yaml.safe_dump(doc))
    assert cli.main(["generate", "--config", str(path)]) == 0

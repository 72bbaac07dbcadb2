import json
import os
import subprocess
from pathlib import Path

import pytest

BIN = os.environ.get("PATROL_BIN")

pytestmark = pytest.mark.skipif(not BIN, reason="PATROL_BIN not set")

SMOKE_CONFIG = """
schema_version = 1

[experiment]
agents = 1
thresholds = [0.4, 0.4]
rollout_length = 20
alpha = 0.01
eta = 0.5
speed = 1.0
horizon = 200
seeds = [7]
allow_infeasible_thresholds = true

[geometry]
builtin = "smoke"

[graph]
model = "bernoulli"
p = 1.0

[policy]
hidden = 8

[training]
solo_episodes = 40
block_episodes = 0
passes = 0
"""


def run_cli(*args, **kwargs):
    return subprocess.run([BIN, *args], capture_output=True, text=True, **kwargs)


@pytest.fixture()
def config_file(tmp_path):
    path = tmp_path / "smoke.toml"
    path.write_text(SMOKE_CONFIG)
    return path


def read_all(directory):
    return {p.name: p.read_bytes() for p in Path(directory).iterdir() if p.is_file()}


def test_run_oracle_outputs_and_determinism(config_file, tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out in (out_a, out_b):
        r = run_cli("run", "--config", str(config_file), "--oracle", "--out", str(out))
        assert r.returncode == 0, r.stderr
    files_a = read_all(out_a)
    for name in ("averages.csv", "minimums.csv", "gossip_matrix.dat",
                 "gossip_trajectories.dat", "multipliers.csv", "margins.csv",
                 "occupancy_agent0.csv"):
        assert name in files_a
    assert files_a == read_all(out_b)

    # averages.csv: M zone columns plus the timestep column.
    first = (out_a / "averages.csv").read_text().splitlines()[0]
    assert len(first.split(",")) == 3  # M=2 zones + timestep
    assert len((out_a / "averages.csv").read_text().splitlines()) == 200


def test_run_rejects_bad_horizon(config_file, tmp_path):
    r = run_cli("run", "--config", str(config_file), "--oracle",
                "--horizon", "201", "--out", str(tmp_path / "x"))
    assert r.returncode == 2


def test_unknown_config_key_is_exit_2(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text(SMOKE_CONFIG + "\n[experiment]\nalpa = 0.1\n")
    r = run_cli("run", "--config", str(path), "--oracle", "--out", str(tmp_path / "x"))
    assert r.returncode == 2
    assert "alpa" in r.stderr


def test_missing_geometry_file_names_path(tmp_path):
    path = tmp_path / "geo.toml"
    path.write_text(SMOKE_CONFIG.replace('builtin = "smoke"',
                                         'file = "/nonexistent/geometry.json"'))
    r = run_cli("run", "--config", str(path), "--oracle", "--out", str(tmp_path / "x"))
    assert r.returncode == 2
    assert "/nonexistent/geometry.json" in r.stderr


def test_train_checkpoints_deterministic(config_file, tmp_path):
    out_a = tmp_path / "ta"
    out_b = tmp_path / "tb"
    for out in (out_a, out_b):
        r = run_cli("train", "--config", str(config_file), "--out", str(out))
        assert r.returncode == 0, r.stderr
        assert (out / "checkpoint_agent0.json").exists()
        assert (out / "training_log.json").exists()
    assert (out_a / "checkpoint_agent0.json").read_bytes() == \
           (out_b / "checkpoint_agent0.json").read_bytes()

    # Zero episodes: checkpoints equal the initialization either way.
    out_c = tmp_path / "tc"
    out_d = tmp_path / "td"
    for out in (out_c, out_d):
        r = run_cli("train", "--config", str(config_file), "--episodes", "0",
                    "--out", str(out))
        assert r.returncode == 0, r.stderr
    assert (out_c / "checkpoint_agent0.json").read_bytes() == \
           (out_d / "checkpoint_agent0.json").read_bytes()
    assert (out_c / "checkpoint_agent0.json").read_bytes() != \
           (out_a / "checkpoint_agent0.json").read_bytes()


def test_run_with_trained_checkpoints(config_file, tmp_path):
    out = tmp_path / "t"
    assert run_cli("train", "--config", str(config_file), "--out", str(out)).returncode == 0
    r = run_cli("run", "--config", str(config_file), "--out", str(out))
    assert r.returncode == 0, r.stderr
    assert (out / "averages.csv").exists()


def test_replay_detects_tampering(config_file, tmp_path):
    out = tmp_path / "base"
    assert run_cli("run", "--config", str(config_file), "--oracle",
                   "--out", str(out)).returncode == 0
    r = run_cli("replay", "--config", str(config_file), "--oracle",
                "--baseline", str(out))
    assert r.returncode == 0, r.stderr

    (out / "margins.csv").write_text("0,9.9,9.9\n")
    r = run_cli("replay", "--config", str(config_file), "--oracle",
                "--baseline", str(out))
    assert r.returncode == 3


def test_sweep_disc(tmp_path):
    path = tmp_path / "prox.toml"
    path.write_text(SMOKE_CONFIG.replace('model = "bernoulli"\np = 1.0',
                                         'model = "proximity"\ndisc = 3.0'))
    out = tmp_path / "sweep"
    r = run_cli("sweep-disc", "--config", str(path), "--oracle",
                "--disc-list", "2", "--disc-list", "5", "--out", str(out))
    assert r.returncode == 0, r.stderr
    rows = (out / "margin_radius.csv").read_text().splitlines()
    assert len(rows) == 2
    for row in rows:
        d, lo, hi = (float(v) for v in row.split(","))
        assert lo <= hi


def test_gossip_trace_output(tmp_path):
    path = tmp_path / "two.toml"
    path.write_text(SMOKE_CONFIG.replace("agents = 1", "agents = 2"))
    out = tmp_path / "trace"
    r = run_cli("run", "--config", str(path), "--oracle",
                "--gossip-trace", "--out", str(out))
    assert r.returncode == 0, r.stderr
    rows = (out / "gossip_trace.csv").read_text().splitlines()
    assert rows, "expected at least one gossip exchange"
    t, sender, receiver, bits = rows[0].split(",")
    assert int(sender) != int(receiver)
    assert int(bits) >= 0


def test_verify_report(config_file, tmp_path):
    out = tmp_path / "verify"
    r = run_cli("verify", "--config", str(config_file), "--trials", "500",
                "--out", str(out))
    assert r.returncode == 0, r.stderr + r.stdout
    report = json.loads((out / "verify_report.json").read_text())
    assert any("nbinom" in entry["claim"] for entry in report)
    assert all(entry["verdict"] in ("holds", "violated", "inconclusive")
               for entry in report)

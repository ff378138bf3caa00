import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from nobroadcast.cli import main
from nobroadcast.io import dumps, matrix_to_json


def write_state(path, m):
    path.write_text(dumps(matrix_to_json(np.asarray(m, dtype=complex))))
    return str(path)


@pytest.fixture
def files(tmp_path):
    half = 0.5 * np.eye(2)
    sz = np.diag([1.0, -1.0])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    return {
        "p": write_state(tmp_path / "p.json", np.diag([0.7, 0.3])),
        "q": write_state(tmp_path / "q.json", np.diag([0.2, 0.8])),
        "mixed": write_state(tmp_path / "mixed.json", half),
        "zero": write_state(tmp_path / "zero.json", np.diag([1.0, 0.0])),
        "one": write_state(tmp_path / "one.json", np.diag([0.0, 1.0])),
        "z": write_state(tmp_path / "z.json", half + 0.4 * sz),
        "x": write_state(tmp_path / "x.json", half + 0.4 * sx),
        "bad": write_state(tmp_path / "bad.json", np.diag([0.6, 0.6])),
        "dir": tmp_path,
    }


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def value(out, key):
    for line in out.splitlines():
        if line.startswith(key + " = "):
            return float(line.split(" = ", 1)[1])
    raise AssertionError(f"{key} not in output:\n{out}")


class TestFidelityCommand:
    def test_identical(self, files, capsys):
        code, out, _ = run(["fidelity", files["p"], files["p"]], capsys)
        assert code == 0
        assert value(out, "F") == pytest.approx(1.0, abs=1e-12)
        assert abs(value(out, "difference")) <= 1e-8

    def test_mixed_vs_pure(self, files, capsys):
        code, out, _ = run(["fidelity", files["mixed"], files["zero"]], capsys)
        assert code == 0
        assert value(out, "F") == pytest.approx(np.sqrt(0.5), abs=1e-12)
        assert "POVM optimal: true" in out

    def test_orthogonal(self, files, capsys):
        code, out, _ = run(["fidelity", files["zero"], files["one"]], capsys)
        assert code == 0 and value(out, "F") == 0.0

    def test_json_out(self, files, capsys):
        out_path = files["dir"] / "f.json"
        code, _, _ = run(["fidelity", files["z"], files["x"], "--out", out_path], capsys)
        assert code == 0
        data = json.loads(out_path.read_text())
        assert data["optimality"]["optimal"] is True
        assert data["manifest"]["command"] == "fidelity"
        assert data["manifest"]["seed"] == 0

    def test_malformed_state(self, files, capsys):
        code, _, err = run(["fidelity", files["bad"], files["p"]], capsys)
        assert code == 2
        assert "trace" in err

    def test_missing_file(self, files, capsys):
        code, _, err = run(["fidelity", files["dir"] / "nope.json", files["p"]], capsys)
        assert code == 2 and "cannot read" in err

    def test_invalid_json(self, files, capsys):
        (files["dir"] / "junk.json").write_text("[")
        code, _, _ = run(["fidelity", files["dir"] / "junk.json", files["p"]], capsys)
        assert code == 2


class TestBroadcastBuild:
    def test_commuting(self, files, capsys):
        target = files["dir"] / "ch.json"
        code, out, _ = run(["broadcast-build", files["p"], files["q"], target], capsys)
        assert code == 0
        assert value(out, "marginal error (state 0)") <= 1e-10
        assert value(out, "marginal error (state 1)") <= 1e-10
        assert set(json.loads(target.read_text())) == {"dims", "U", "sigma", "upsilon"}

    def test_identical(self, files, capsys):
        code, _, _ = run(["broadcast-build", files["z"], files["z"], files["dir"] / "c.json"], capsys)
        assert code == 0

    def test_noncommuting_exit_3(self, files, capsys):
        target = files["dir"] / "never.json"
        code, _, err = run(["broadcast-build", files["z"], files["x"], target], capsys)
        assert code == 3
        assert "NotCommuting" in err and "0.452548" in err
        assert not target.exists()


class TestSearchCommand:
    def config(self, files, **kw):
        cfg = {"ancilla_dim": 1, "restarts": 2, "max_iters": 100, **kw}
        path = files["dir"] / "cfg.json"
        path.write_text(json.dumps(cfg))
        return path

    def test_commuting(self, files, capsys):
        out_path = files["dir"] / "s.json"
        code, out, _ = run(["search", files["p"], files["q"], self.config(files), "--out", out_path], capsys)
        assert code == 0
        assert value(out, "quality") >= 1 - 1e-4
        data = json.loads(out_path.read_text())
        assert data["certified"] is True
        assert data["config"]["restarts"] == 2

    def test_noncommuting_stdout(self, files, capsys):
        code, out, _ = run(["search", files["z"], files["x"], self.config(files)], capsys)
        assert code == 0
        assert value(out, "quality") < 1
        assert "certified = true" in out
        payload = json.loads(out[out.index("{"):])
        assert payload["certified"] is True

    def test_seed_flag_overrides(self, files, capsys):
        out_path = files["dir"] / "s.json"
        run(["search", files["z"], files["x"], self.config(files, seed=3), "--seed", 9, "--out", out_path], capsys)
        assert json.loads(out_path.read_text())["config"]["seed"] == 9

    def test_missing_config(self, files, capsys):
        code, _, _ = run(["search", files["p"], files["q"], files["dir"] / "none.json"], capsys)
        assert code == 2

    def test_bad_optimizer_config(self, files, capsys):
        code, _, err = run(["search", files["p"], files["q"], self.config(files, restarts=0)], capsys)
        assert code == 1 and "restarts" in err


class TestSweepCommand:
    def test_default_grid(self, files, capsys):
        cfg = files["dir"] / "sweep.json"
        cfg.write_text(json.dumps({"search": {"restarts": 1, "max_iters": 60}}))
        csv_path = files["dir"] / "sweep.csv"
        code, _, _ = run(["sweep", cfg, csv_path], capsys)
        assert code == 0
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "theta,commutator_norm,quality,certified,iters"
        assert len(lines) == 1 + 5
        assert float(lines[1].split(",")[2]) >= 1 - 1e-4

    def test_json_format(self, files, capsys):
        cfg = files["dir"] / "sweep.json"
        cfg.write_text(json.dumps({"angles": [0.0, 1.0], "search": {"restarts": 1, "max_iters": 30}}))
        out = files["dir"] / "sweep.out"
        assert run(["sweep", cfg, out, "--format", "json"], capsys)[0] == 0
        assert len(json.loads(out.read_text())["rows"]) == 2

    def test_unknown_key(self, files, capsys):
        cfg = files["dir"] / "sweep.json"
        cfg.write_text(json.dumps({"angle": [0.0]}))
        code, _, _ = run(["sweep", cfg, files["dir"] / "o.csv"], capsys)
        assert code == 2
        assert not (files["dir"] / "o.csv").exists()


def test_installed_entry_point(files):
    exe = shutil.which("nobroadcast")
    cmd = [exe] if exe else [sys.executable, "-m", "nobroadcast.cli"]
    done = subprocess.run(cmd + ["fidelity", files["p"], files["p"]], capture_output=True, text=True)
    assert done.returncode == 0
    assert done.stdout.startswith("F = ")

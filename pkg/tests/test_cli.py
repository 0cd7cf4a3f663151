import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from tecell import api
from tecell.cli import RemoteBackend, main
from tecell.config import parse_config
from tecell.io import read_csv
from tecell.presets import nacl_config_dict
from tecell.service import app

from .conftest import decoupled_config


def write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def preset(t_final=10.0, **material):
    d = nacl_config_dict(1)
    d["solver"]["t_final"] = t_final
    d["material"].update(material)
    return d


# ---------------------------------------------------------------- run

def test_run_writes_one_row_per_time_level(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", write(tmp_path, preset()), "--output", str(out)]) == 0
    rows = read_csv(out / "trajectory.csv")
    assert len(rows) == 11
    assert [float(r["t"]) for r in rows] == [float(k) for k in range(11)]
    header = (out / "trajectory.csv").read_text().splitlines()[0]
    assert header.startswith("# t [s], theta_l2 [K m^(d/2)]")
    assert (out / "run_summary.json").exists() and (out / "run_meta.json").exists()
    assert "completed 10 steps" in capsys.readouterr().out


def test_decoupled_run_has_constant_norms(tmp_path):
    out = tmp_path / "out"
    assert main(["run", write(tmp_path, decoupled_config()), "--output", str(out)]) == 0
    rows = read_csv(out / "trajectory.csv")
    for col in ("theta_l2", "c_A_l2", "phi_l2"):
        vals = np.array([float(r[col]) for r in rows])
        np.testing.assert_allclose(vals, vals[0], rtol=1e-13, atol=1e-12)


def test_run_output_is_deterministic(tmp_path):
    cfg = write(tmp_path, preset(5.0))
    assert main(["run", cfg, "--output", str(tmp_path / "a")]) == 0
    assert main(["run", cfg, "--output", str(tmp_path / "b")]) == 0
    for name in ("trajectory.csv", "run_summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_output_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("TECELL_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["run", write(tmp_path, decoupled_config(t_final=1.0))]) == 0
    assert (tmp_path / "env" / "trajectory.csv").exists()


def test_snapshots_written(tmp_path):
    d = decoupled_config(t_final=2.0)
    d["output"] = {"snapshot_every": 1, "vtk": True}
    out = tmp_path / "out"
    assert main(["run", write(tmp_path, d), "--output", str(out)]) == 0
    assert len(list((out / "snapshots").glob("*.csv"))) == 3
    assert len(list((out / "snapshots").glob("*.vtk"))) == 3


def test_solver_failure_exits_nonzero_with_partial_output(tmp_path, capsys):
    d = preset(3.0)
    d["solver"]["picard"] = {"max_iters": 1}
    out = tmp_path / "out"
    assert main(["run", write(tmp_path, d), "--output", str(out)]) == 1
    assert len(read_csv(out / "trajectory.csv")) == 1
    assert "no convergence" in capsys.readouterr().err


def test_config_error_exits_one(tmp_path, capsys):
    d = preset()
    del d["solver"]["dt"]
    assert main(["run", write(tmp_path, d), "--output", str(tmp_path)]) == 1
    assert "solver.dt" in capsys.readouterr().err


# ---------------------------------------------------------------- certify

def test_certify_decoupled_exits_zero(tmp_path):
    out = tmp_path / "out"
    assert main(["certify", write(tmp_path, decoupled_config()), "--output", str(out)]) == 0
    report = json.loads((out / "certificate.json").read_text())["report"]
    assert report["certified"] is True


def test_certify_inflated_peltier_exits_two(tmp_path, capsys):
    out = tmp_path / "out"
    cfg = write(tmp_path, preset(peltier={"max": 100.0}))
    assert main(["certify", cfg, "--output", str(out)]) == 2
    text = capsys.readouterr().out
    assert "fails: B0 < 1" in text
    report = json.loads((out / "certificate.json").read_text())["report"]
    assert report["conditions"][0]["margin"] < 0


def test_certify_symbolic_includes_regression(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["certify", write(tmp_path, preset()), "--symbolic", "--output", str(out)]) == 0
    data = json.loads((out / "certificate.json").read_text())
    assert len(data["regression"]["rows"]) >= 15
    assert "published" in capsys.readouterr().out


# ---------------------------------------------------------------- sweep

def sweep_rows(tmp_path, data, *args):
    out = tmp_path / "sw"
    assert main(["sweep", write(tmp_path, data), *args, "--output", str(out)]) == 0
    return read_csv(out / "sweep.csv")


def test_empty_sweep(tmp_path):
    rows = sweep_rows(tmp_path, preset(), "--param", "Pi_sharp", "--from", "0", "--to", "1",
                      "--steps", "0")
    assert rows == []


def test_peltier_sweep_flips_certification(tmp_path):
    rows = sweep_rows(tmp_path, preset(), "--param", "Pi_sharp", "--from", "0", "--to", "1",
                      "--steps", "21", "--workers", "4")
    certified = [r["certified"] == "true" for r in rows]
    margins = np.array([float(r["margin"]) for r in rows])
    assert certified[0] and not certified[-1]
    assert np.all(np.diff(margins) < 0)
    assert [float(r["Pi_sharp"]) for r in rows] == list(np.linspace(0, 1, 21))


def test_emissivity_sweep_radiation_factor_decreases(tmp_path):
    rows = sweep_rows(tmp_path, preset(), "--param", "emissivity", "--from", "0.2", "--to", "0.5",
                      "--steps", "7")
    factor = np.array([float(r["radiation_factor"]) for r in rows])
    assert np.all(np.diff(factor) < 0)


def test_sweep_by_dotted_key(tmp_path):
    rows = sweep_rows(tmp_path, preset(), "--param", "material.species.0.soret_max", "--from",
                      "1e-8", "--to", "1e-6", "--steps", "3")
    assert len(rows) == 3


def test_unknown_sweep_parameter(tmp_path, capsys):
    code = main(["sweep", write(tmp_path, preset()), "--param", "material.nope", "--from", "0",
                 "--to", "1", "--steps", "2", "--output", str(tmp_path)])
    assert code == 1
    assert "unknown sweep parameter" in capsys.readouterr().err


def test_run_mode_sweep(tmp_path):
    d = decoupled_config(t_final=2.0)
    rows = sweep_rows(tmp_path, d, "--param", "solver.dt", "--from", "0.5", "--to", "1",
                      "--steps", "2", "--mode", "run")
    assert [r["completed"] for r in rows] == ["true", "true"]


# ---------------------------------------------------------------- service

@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    assert client.get("/health").json()["status"] == "ok"


def test_service_certify(client):
    r = client.post("/certify", json={"config": decoupled_config()})
    assert r.status_code == 200
    assert api.CertifyResponse.model_validate(r.json()).report.certified


def test_service_rejects_bad_config(client):
    d = decoupled_config()
    del d["solver"]["dt"]
    r = client.post("/run", json={"config": d})
    assert r.status_code == 422 and "solver.dt" in r.json()["detail"]


def test_service_sweep_unknown_key(client):
    r = client.post("/sweep", json={"config": preset(), "param": "x.y", "start": 0, "stop": 1,
                                    "steps": 2})
    assert r.status_code == 422


def test_remote_backend_matches_local(client):
    remote = RemoteBackend.__new__(RemoteBackend)
    remote.client = client
    d = decoupled_config(t_final=3.0)
    res = remote.run(d, None)
    local = api.run(parse_config(d))
    assert res.trajectory_csv == local.trajectory_csv
    assert res.completed

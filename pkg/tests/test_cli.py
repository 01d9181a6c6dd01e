import csv
import json

import numpy as np
import pytest

from heismod.cli import main
from heismod.report import Report


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def write_spec(tmp_path, obj, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_mod_cones(capsys):
    code, rep, _ = run(capsys, "mod-cones", "--a", "1", "--b", str(np.e))
    assert code == 0 and rep["pass"]
    res = rep["results"]
    assert res["closed_form"] == pytest.approx(1.566942351023631, rel=1e-12)
    assert rep["command"] == "mod-cones"
    assert rep["inputs"]["quad_rtol"] == 1e-6
    assert isinstance(rep["runtime_ms"], int)


def test_mod_cones_bad_ring(capsys):
    code, rep, err = run(capsys, "mod-cones", "--a", "2", "--b", "1")
    assert code == 2 and rep is None
    assert "0 < a < b" in err


def test_report_json_round_trip(capsys):
    _, rep, _ = run(capsys, "mod-cones", "--quad-n", "32")
    again = Report.from_json(json.dumps(rep))
    assert again.to_dict() == rep


def test_mod_cones_csv(capsys, tmp_path):
    path = tmp_path / "leaf.csv"
    code, _, _ = run(capsys, "mod-cones", "--csv", str(path))
    assert code == 0
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "psi"
    assert len(rows) > 10


def test_verify_stretch(capsys):
    code, rep, _ = run(capsys, "verify-stretch", "--k", "0.5")
    assert code == 0 and rep["pass"]
    res = rep["results"]
    assert res["mean_dist_23"] == pytest.approx(2 ** (1 / 3), rel=1e-6)
    assert res["max_distortion"] == pytest.approx(4.0)
    assert res["mean_dist_2"] == pytest.approx(8.0, rel=1e-5)
    assert all(c["pass"] for c in rep["checks"])


@pytest.mark.parametrize("k", ["2", "0", "-1"])
def test_verify_stretch_rejects_k(capsys, k):
    code, _, err = run(capsys, "verify-stretch", "--k", k)
    assert code == 2 and "error" in err


def test_contact_check(capsys, tmp_path):
    path = tmp_path / "res.csv"
    code, rep, _ = run(capsys, "contact-check", "--map", "stretch:0.5", "--samples", "200",
                       "--fd", "1e-5", "--csv", str(path))
    assert code == 0
    assert rep["results"]["max_r1"] <= 1e-6
    assert rep["results"]["lambda_min"] > 0
    header = path.read_text().splitlines()[0]
    assert header == "xi,psi,eta,abs_r1,abs_r2,lambda,K"


def test_contact_check_composite(capsys):
    code, rep, _ = run(capsys, "contact-check", "--map", "rotation:0.7|compose|inversion",
                       "--samples", "100")
    assert code == 0 and rep["pass"]


def test_contact_check_unknown_map(capsys):
    code, _, err = run(capsys, "contact-check", "--map", "shear:2")
    assert code == 2 and "shear" in err


def test_contact_check_deterministic(capsys):
    _, a, _ = run(capsys, "contact-check", "--map", "stretch:0.3", "--samples", "50", "--seed", "4")
    _, b, _ = run(capsys, "contact-check", "--map", "stretch:0.3", "--samples", "50", "--seed", "4")
    assert a["results"] == b["results"]


def test_surface_cone_admissible(capsys, tmp_path):
    spec = write_spec(tmp_path, {"type": "cone", "params": {"psi": 0.4},
                                 "ring": {"a": 1, "b": float(np.e)}})
    code, rep, _ = run(capsys, "surface", spec, "--rho", "rho23")
    assert code == 0
    res = rep["results"]
    assert res["rho_integral"] == pytest.approx(1.0, abs=1e-9)
    assert res["characteristic_count"] == 0
    exact = 4 * np.pi / 3 * (np.e**3 - 1) * np.sqrt(np.cos(0.4))
    assert res["horizontal_area"] == pytest.approx(exact, rel=1e-8)


def test_surface_plane_flags_origin(capsys, tmp_path):
    spec = write_spec(tmp_path, {"type": "plane-t0", "params": {"half_width": 1.0}})
    code, rep, _ = run(capsys, "surface", spec)
    assert code == 0
    res = rep["results"]
    assert res["characteristic_count"] == 1
    assert (res["characteristic_0_u"], res["characteristic_0_v"]) == (0.0, 0.0)
    # integral of 2|z| over the square [-1,1]^2
    exact = 8 * (np.sqrt(2) + np.arcsinh(1.0)) / 3
    assert res["horizontal_area"] == pytest.approx(exact, rel=1e-8)


def test_surface_graph_psi(capsys, tmp_path):
    spec = write_spec(tmp_path, {"type": "graph-psi", "ring": {"a": 1, "b": float(np.e)},
                                 "params": {"psi0": 0.2, "terms": [
                                     {"eps": 0.2, "p": 1, "q": 1, "phase": 0.3}]}})
    code, rep, _ = run(capsys, "surface", spec, "--rho", "rho23")
    assert code == 0
    assert rep["results"]["rho_integral"] >= 1.0


def test_surface_flow_csv(capsys, tmp_path):
    spec = write_spec(tmp_path, {"type": "gauge-sphere", "params": {"radius": 1.0}})
    path = tmp_path / "flow.csv"
    code, rep, _ = run(capsys, "surface", spec, "--flow", "3", "--flow-steps", "50",
                       "--csv", str(path))
    assert code == 0
    assert rep["results"]["flow_lines"] == 3
    assert path.read_text().splitlines()[0] == "line,u,v,x,y,t"


@pytest.mark.parametrize("obj", [
    {"params": {}},
    {"type": "torus"},
    {"type": "graph-psi", "params": {"psi0": 1.5, "terms": [{"eps": 0.2, "p": 1, "q": 0, "phase": 0}]}},
    {"type": "cone", "ring": {"a": 1}},
])
def test_surface_bad_spec(capsys, tmp_path, obj):
    code, _, err = run(capsys, "surface", write_spec(tmp_path, obj))
    assert code == 2 and "error" in err


def test_surface_density_needs_ring(capsys, tmp_path):
    spec = write_spec(tmp_path, {"type": "plane-t0"})
    code, _, _ = run(capsys, "surface", spec, "--rho", "rho23")
    assert code == 2


def test_surface_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "surface", str(tmp_path / "nope.json"))
    assert code == 2


def test_env_quad_n(capsys, monkeypatch):
    monkeypatch.setenv("HEISMOD_QUAD_N", "48")
    code, rep, _ = run(capsys, "mod-cones")
    assert code == 0
    assert rep["inputs"]["env_quad_n"] == "48"


def test_quad_n_validation(capsys):
    code, _, _ = run(capsys, "mod-cones", "--quad-n", "1")
    assert code == 2


def test_missing_command():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2

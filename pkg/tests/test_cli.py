import json

import pytest

from magflow.cli import main


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(p)


def test_helicity_default(capsys):
    code, out, _ = run(capsys, "helicity")
    rep = json.loads(out)
    assert code == 0 and rep["helicity_formula"] == 0 and rep["s_h"] == pytest.approx(1.0)


def test_helicity_half(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"magnetic": {"a": 0.5}})
    code, out, _ = run(capsys, "helicity", "--config", cfg)
    rep = json.loads(out)
    assert code == 0 and rep["helicity_formula"] == pytest.approx(59.218, abs=1e-3) and rep["s_h"] == pytest.approx(2.0)
    cfg = write(tmp_path, "z.json", {"magnetic": {"a": 0.0}})
    rep = json.loads(run(capsys, "helicity", "--config", cfg)[1])
    assert rep["helicity_formula"] == pytest.approx(78.957, abs=1e-3) and rep["s_h"] is None


def test_config_errors(tmp_path, capsys):
    cfg = write(tmp_path, "bad.json", {"tolerances": {"geometry": -1}, "metric": {"bumps": [{"amplitude": 1, "support_radius": 2}]}})
    code, _, err = run(capsys, "verify", "--config", cfg)
    assert code == 2 and "tolerances.geometry" in err and "metric.bumps[0]" in err
    code, _, err = run(capsys, "helicity", "--config", str(tmp_path / "missing.json"))
    assert code == 2 and "not found" in err
    code, _, err = run(capsys, "helicity", "--config", write(tmp_path, "x.json", "{not json"))
    assert code == 2
    code, _, err = run(capsys, "helicity", "--config", write(tmp_path, "y.json", {"unknown": 1}))
    assert code == 2 and "unknown" in err
    code, _, _ = run(capsys, "nonsense")
    assert code == 2


def test_flow_period(tmp_path, capsys):
    cfg = write(tmp_path, "f.json", {"flow": {"s": 2.0, "T": 5.0, "dt": 0.01, "initial": [0.3, 1.2, 0.4]}})
    out = tmp_path / "traj.csv"
    code, stdout, _ = run(capsys, "flow", "--config", cfg, "--output", str(out))
    assert code == 0 and "period: 3.62759" in stdout
    data = out.read_bytes()
    assert data.startswith(b"t,x,y,theta\n") and b"\r" not in data
    geo = write(tmp_path, "g.json", {"magnetic": {"a": 0.0}, "flow": {"T": 10.0, "initial": [0, 1, 0.3]}})
    code, stdout, err = run(capsys, "flow", "--config", geo)
    assert code == 0 and stdout.startswith("t,x,y,theta") and "period: none" in err


def test_flow_blowup_exit(tmp_path, capsys):
    cfg = write(tmp_path, "f.json", {"flow": {"s": 2.0, "T": 5.0, "dt": 0.5}, "tolerances": {"integrator": 1e-12}})
    assert run(capsys, "flow", "--config", cfg)[0] == 1


def test_critical_deterministic(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"crit": {"r_grid": [1.0, 8.0], "samples": 512}})
    code, out1, _ = run(capsys, "critical", "--config", cfg)
    _, out2, _ = run(capsys, "critical", "--config", cfg)
    assert code == 0 and out1 == out2
    rep = json.loads(out1)
    assert rep["estimate"]["lower"] >= 0.495 and rep["estimate"]["upper"] == pytest.approx(0.5)
    assert rep["s_h"] == pytest.approx(1.0)
    assert rep["theorem"]["s_c_le_s_h"]


def test_radon_tables(tmp_path, capsys):
    cfg = write(tmp_path, "r.json", {"radon": {"r_grid": [1.0], "s_list": [0.0], "alpha_list": [], "n_max": 3}})
    code, out, _ = run(capsys, "radon", "kernel", "--config", cfg)
    assert code == 0 and out.splitlines()[0] == "r,s_or_alpha,imaginary,value" and len(out.splitlines()) == 2
    g = write(tmp_path, "g.json", {"radon": {"s_list": [1.0], "n_max": 3}})
    code, out, _ = run(capsys, "radon", "growth", "--config", g)
    assert code == 0 and len(out.splitlines()) == 4
    code, out, _ = run(capsys, "radon", "probe")
    assert code == 0 and all(line.endswith(",0") for line in out.splitlines()[1:])
    code, out, _ = run(capsys, "radon", "meanvalue", "--config", cfg)
    assert code == 0 and out.count("\n") == 1 + 2 * 2


def test_negative_alpha_rejected(tmp_path, capsys):
    cfg = write(tmp_path, "r.json", {"radon": {"alpha_list": [0.7]}})
    code, _, err = run(capsys, "radon", "kernel", "--config", cfg)
    assert code == 2 and "radon.alpha_list" in err

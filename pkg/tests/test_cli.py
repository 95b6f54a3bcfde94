import os
import subprocess
import sys

import numpy as np
import pytest

from ssie.cli import ConfigError, RunConfig, main, parse_config_text


def write_cfg(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def run(tmp_path, command, text, *extra):
    cfg = write_cfg(tmp_path, text)
    return main([command, "--config", cfg, "--out", str(tmp_path / "out")] + list(extra))


def read_csv(path):
    lines = open(path).read().splitlines()
    return lines[0], lines[1].split(","), [l.split(",") for l in lines[2:]]


def test_parse_config():
    d = parse_config_text("# comment\neps_i = 2+0.1j  # inline\n\nformulation=T\n")
    assert d == {"eps_i": "2+0.1j", "formulation": "T"}
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config_text("epsilon = 3")
    with pytest.raises(ConfigError, match="key = value"):
        parse_config_text("just words")


@pytest.mark.parametrize("text, match", [
    ("formulation = U", "formulation"),
    ("mesh = icosphere:x", "level"),
    ("eps_i = four", "eps_i"),
    ("direction = 0,1", "three"),
    ("solver = cg", "solver"),
    ("omega = -1", "omega"),
    ("lipschitz = maybe", "boolean"),
])
def test_config_type_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        RunConfig.from_text(text)


def test_digest_is_order_independent():
    a = RunConfig.from_text("eps_i = 3\nb = 2j")
    b = RunConfig.from_text("b = 2j\neps_i = 3")
    assert a.digest == b.digest
    assert a.digest != RunConfig.from_text("eps_i = 3").digest


def test_medium_rescaling():
    cfg = RunConfig.from_text("eps_i = 2.25")
    med = cfg.medium(4.5)
    assert med.kappa_e == pytest.approx(4.5) and med.kappa_i == pytest.approx(6.75)


def test_validate_exit_codes(tmp_path, capsys):
    assert run(tmp_path, "validate", "") == 0
    assert "final_ok=True" in capsys.readouterr().out
    assert run(tmp_path, "validate", "b = 0") == 1
    assert "interior-eigenvalue exclusion not certified" in capsys.readouterr().out


def test_usage_errors(tmp_path, capsys):
    assert main(["validate", "--config", str(tmp_path / "nope.cfg")]) == 2
    assert run(tmp_path, "solve", "mesh = %s" % (tmp_path / "missing.off")) == 2
    assert "mesh file not found" in capsys.readouterr().err
    assert run(tmp_path, "sweep", "sweep_kappa = 4.2,4.8,0") == 2
    assert "empty" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_solve_level1(tmp_path, capsys):
    text = "mesh = icosphere:1\nfar_theta = 7\nfar_phi = 5\n"
    assert run(tmp_path, "solve", text) == 0
    out = capsys.readouterr().out
    assert "far_field_error_vs_mie" in out
    head, hdr, rows = read_csv(tmp_path / "out" / "farfield.csv")
    assert head.startswith("# config_sha256=") and "version=" in head
    assert hdr == ["theta", "phi", "re_E_theta", "im_E_theta", "re_E_phi", "im_E_phi"]
    assert len(rows) == 35
    _, hdr, rows = read_csv(tmp_path / "out" / "density.csv")
    assert hdr == ["index", "basis", "re", "im"] and len(rows) == 120
    report = (tmp_path / "out" / "report.txt").read_text()
    err = float(report.split("far_field_error_vs_mie ")[1].split()[0])
    assert err < 0.3


def test_output_is_deterministic(tmp_path):
    text = "mesh = icosphere:1\nformulation = Tprime\nfar_theta = 5\nfar_phi = 4\n"
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir()
    b.mkdir()
    assert run(a, "solve", text) == 0
    assert run(b, "solve", text) == 0
    for f in ("farfield.csv", "density.csv"):
        assert (a / "out" / f).read_bytes() == (b / "out" / f).read_bytes()


def test_b_zero_needs_force(tmp_path, capsys):
    text = "mesh = icosphere:1\nb = 0\nfar_theta = 3\nfar_phi = 3\n"
    assert run(tmp_path, "solve", text) == 1
    err = capsys.readouterr().err
    assert "interior-eigenvalue exclusion not certified" in err and "--force" in err
    assert not (tmp_path / "out" / "farfield.csv").exists()
    assert run(tmp_path, "solve", text, "--force") == 0
    assert (tmp_path / "out" / "farfield.csv").exists()


def test_sweep_small(tmp_path, capsys):
    text = ("mesh = icosphere:0\nsweep_kappa = 2.6,2.9,2\nfar_theta = 5\nfar_phi = 4\n"
            "eps_i = 1.5\n")
    assert run(tmp_path, "sweep", text) == 0
    _, hdr, rows = read_csv(tmp_path / "out" / "sweep.csv")
    assert hdr == ["kappa_e", "cond", "far_field_error", "near_resonance", "status"]
    assert [r[4] for r in rows] == ["ok", "ok"]
    # 2.7437 lies within one grid step of both points
    assert [r[3] for r in rows] == ["yes", "yes"]
    assert all(np.isfinite(float(r[1])) for r in rows)


def test_sweep_rejects_without_force(tmp_path):
    text = "mesh = icosphere:0\nsweep_kappa = 1,2,2\nb = 0\nfar_theta = 3\nfar_phi = 3\n"
    assert run(tmp_path, "sweep", text) == 1
    _, _, rows = read_csv(tmp_path / "out" / "sweep.csv")
    assert [r[4] for r in rows] == ["rejected", "rejected"]


def test_diagnose_and_fault_hook(tmp_path, capsys):
    text = "mesh = icosphere:2\ndiagnose_checks = jumps\n"
    assert run(tmp_path, "diagnose", text) == 0
    assert "FAIL" not in capsys.readouterr().out
    assert run(tmp_path, "diagnose", text + "fault = flip_magnetic\n") == 1
    out = capsys.readouterr().out
    assert "jump_dirichlet_magnetic" in out and "FAIL" in out


def test_mie_command(tmp_path, capsys):
    assert run(tmp_path, "mie", "far_theta = 4\nfar_phi = 3\n") == 0
    assert "scattering_cross_section" in capsys.readouterr().out
    _, _, rows = read_csv(tmp_path / "out" / "mie_farfield.csv")
    assert len(rows) == 12


def test_module_entry_point_and_threads_env(tmp_path):
    cfg = write_cfg(tmp_path, "")
    env = dict(os.environ, SSIE_THREADS="1")
    r = subprocess.run([sys.executable, "-m", "ssie", "validate", "--config", cfg],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 0 and "final_ok=True" in r.stdout
    env["SSIE_THREADS"] = "lots"
    r = subprocess.run([sys.executable, "-m", "ssie", "validate", "--config", cfg],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 2 and "SSIE_THREADS" in r.stderr

import csv
import glob
import hashlib
import io
import json
import os

import numpy as np
import pytest

import nskresolvent.symbols as sy
from nskresolvent.cli import main, resolve_config, ConfigError, EXIT, SUITES, fmt, csv_text, dumps


def run(tmp_path, *argv):
    return main(list(argv) + ["--out", str(tmp_path)])


def only_run(tmp_path):
    runs = sorted(glob.glob(str(tmp_path / "*")))
    assert len(runs) == 1
    return runs[0]


def manifest(path):
    with open(os.path.join(path, "manifest.json")) as fh:
        return json.load(fh)


def test_solve_minimal(tmp_path):
    assert run(tmp_path, "solve") == EXIT["ok"]
    d = only_run(tmp_path)
    m = manifest(d)
    assert m["status"] == "ok" and m["verdicts"]["solve"]["verdict"] == "pass"
    assert m["tool"] == "nskresolvent" and m["parameters"]["params"]["rho_minus"] == 2
    # every data file is referenced exactly once, with its hash
    files = sorted(f for f in os.listdir(d) if f != "manifest.json")
    listed = [a["file"] for a in m["artifacts"]]
    assert sorted(listed) == files and len(set(listed)) == len(listed)
    for a in m["artifacts"]:
        with open(os.path.join(d, a["file"]), "rb") as fh:
            assert hashlib.sha256(fh.read()).hexdigest() == a["sha256"]


def test_solve_csv_long_format(tmp_path):
    assert run(tmp_path, "solve", "--set", "solve.nx=8") == 0
    with open(os.path.join(only_run(tmp_path), "field.csv")) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["x1", "side", "x_N", "component", "re", "im"]
    comps = {(r["side"], r["component"]) for r in rows}
    assert ("interface", "H") in comps and ("plus", "rho") in comps and ("minus", "pi") in comps
    assert {("plus", "u1"), ("plus", "u2"), ("minus", "u1"), ("minus", "u2")} <= comps
    # 8 grid points x (1 + 3 stations x 3 components x 2 sides)
    assert len(rows) == 8 * (1 + 3 * 3 * 2)


def test_solve_rerun_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, "solve", "--set", "solve.data=gaussian") == 0
    assert run(b, "solve", "--set", "solve.data=gaussian") == 0
    with open(os.path.join(only_run(a), "field.csv"), "rb") as fa, \
            open(os.path.join(only_run(b), "field.csv"), "rb") as fb:
        assert fa.read() == fb.read()


def test_solve_from_boundary_csv(tmp_path):
    x = np.arange(8) * 2 * np.pi / 8
    src = tmp_path / "bd.csv"
    src.write_text("x1,h1,g\n" + "".join(f"{a:.17g},{np.cos(a):.17g},{np.sin(a):.17g}\n" for a in x))
    out = tmp_path / "runs"
    assert main(["solve", "--out", str(out), "--set", "solve.data=csv", "--set", f"solve.file={src}"]) == 0
    bad = tmp_path / "bad.csv"
    bad.write_text("x1,g\n0,1\n")
    assert main(["solve", "--out", str(out), "--set", "solve.data=csv", "--set", f"solve.file={bad}"]) == 2


def test_equal_densities_exit_2(tmp_path, capsys):
    code = run(tmp_path, "solve", "--set", "params.rho_plus=1", "--set", "params.rho_minus=1")
    assert code == EXIT["config"] == 2
    assert "EqualDensities" in capsys.readouterr().err


def test_certify_refuses_kappa_mu_nu(tmp_path, capsys):
    code = run(tmp_path, "certify", "--set", "params.kappa_plus=2.0")
    assert code == 2
    assert "KappaEqualsMuNu" in capsys.readouterr().err
    # refused before any run directory is created
    assert not glob.glob(str(tmp_path / "*"))


def test_suite_routing(tmp_path):
    assert run(tmp_path, "certify", "--suite", "lopatinski", "--grid-preset", "smoke") == 0
    m = manifest(only_run(tmp_path))
    assert list(m["verdicts"]) == ["lopatinski"]
    assert {a["file"] for a in m["artifacts"]} == {"lopatinski.csv", "lopatinski.json"}


def test_certification_failure_exit_4(tmp_path):
    code = run(tmp_path, "certify", "--suite", "residuals", "--set", "residuals.draws=3",
               "--set", "residuals.tol=1e-30")
    assert code == EXIT["certification"] == 4
    assert manifest(only_run(tmp_path))["status"] == "certification failure"


def test_numerical_error_exit_3(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(sy, "DEGENERATE_TOL", 10.0)
    assert run(tmp_path, "solve") == EXIT["numerical"] == 3
    assert "DegenerateRoots" in capsys.readouterr().err
    assert manifest(only_run(tmp_path))["status"] == "numerical error"


@pytest.mark.parametrize("argv", [
    ["certify", "--suite", "bogus"],
    ["solve", "--suite", "lopatinski"],
    ["solve", "--set", "nonsense"],
    ["solve", "--set", "params.nope=1"],
    ["solve", "--set", "params.mu_plus=abc"],
    ["solve", "--grid-preset", "huge"],
    ["solve", "--threads", "0"],
    ["solve", "--set", "solve.lambda=-1"],
])
def test_config_errors_exit_2(tmp_path, argv):
    if "--grid-preset" in argv:
        with pytest.raises(SystemExit) as exc:
            run(tmp_path, *argv)
        assert exc.value.code == 2
    else:
        assert run(tmp_path, *argv) == 2


def test_ini_file_and_precedence(tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[params]\nsigma = 0.5\nmu_plus = 1.5\n[residuals]\ndraws = 7\n")
    cfg = resolve_config(str(ini), ["params.sigma=0.25"], "smoke")
    assert cfg["params"]["sigma"] == 0.25 and cfg["params"]["mu_plus"] == 1.5
    assert cfg["residuals"]["draws"] == 7 and isinstance(cfg["residuals"]["draws"], int)
    assert cfg["grid_preset"] == "smoke"
    with pytest.raises(ConfigError):
        resolve_config(str(tmp_path / "missing.ini"))


def test_suites_listed():
    assert set(SUITES) == {"residuals", "lopatinski", "kinetic", "multipliers", "kernel", "oracle"}


def test_formatting_helpers():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(True) == "true" and fmt(3) == "3" and fmt(float("nan")) == "nan"
    text = csv_text({"a": np.array([1.0, 2.0]), "z": np.array([1 + 2j, 3 - 4j])})
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["a", "z_re", "z_im"] and rows[2] == ["2", "3", "-4"]
    assert json.loads(dumps({"x": 0.1}))["x"] == 0.1
    assert "0.10000000000000001" in dumps({"x": 0.1})

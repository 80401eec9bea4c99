import json
import os
import subprocess
import sys

import jsonschema
import pytest

from spinfock.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, load_schema, run_command

SCHEMA = load_schema()


def validate(doc, kind):
    jsonschema.validate(doc, {**SCHEMA, "$ref": f"#/$defs/{kind}"})


def run(capsys, *argv):
    status = run_command(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def test_parse_closes_angular_momentum(capsys):
    status, out, _ = run(capsys, "parse", "[L1,L2] - i*L3")
    assert status == EXIT_OK and out == "0\n"


def test_parse_json(capsys):
    status, out, _ = run(capsys, "parse", "[p1, x1]", "--format", "json")
    doc = json.loads(out)
    validate(doc, "parse")
    assert doc["canonical"] == "-i"


def test_parse_radial(capsys):
    status, out, _ = run(capsys, "parse", "j*(j+1)*r^-2", "--context", "radial", "--j", "1/2")
    assert status == EXIT_OK and out == "3/4*r^-2\n"


def test_parse_error_is_usage(capsys):
    status, _, err = run(capsys, "parse", "x4")
    assert status == EXIT_USAGE and "column 1" in err


def test_unknown_flag(capsys):
    status, _, _ = run(capsys, "spectrum", "--bogus")
    assert status == EXIT_USAGE


def test_decimal_half_integer_rejected(capsys):
    status, _, err = run(capsys, "spectrum", "--j", "0.5")
    assert status == EXIT_USAGE and "1/2" in err


def test_spectrum_rows(capsys):
    status, out, _ = run(capsys, "spectrum", "--model", "dipole", "--j", "1/2", "--n-max", "2",
                         "--mass", "1", "--alpha", "1")
    doc = json.loads(out)
    validate(doc, "spectrum")
    assert [r["epsilon"] for r in doc["rows"]] == ["-1/9", "-1/25", "-1/49"]
    assert [r["E"] for r in doc["rows"]] == ["-2/9", "-2/25", "-2/49"]


def test_spectrum_csv(capsys):
    _, out, _ = run(capsys, "spectrum", "--format", "csv")
    assert out.splitlines()[0] == "model,j,n,N,epsilon,E,E_formula,kappa_degeneracy,partners"


def test_verify_dipole(capsys):
    status, out, _ = run(capsys, "verify", "--model", "dipole", "--format", "json")
    doc = json.loads(out)
    validate(doc, "verify")
    assert status == EXIT_OK
    ids = {r["identity"] for r in doc}
    assert {"O4_JJ", "O4_RJ", "O4_RR", "CONS_J", "CONS_R"} <= ids
    assert all(r["passed"] for r in doc)


def test_verify_failure_still_emits_report(capsys):
    status, out, _ = run(capsys, "verify", "--model", "spin-orbit")
    doc = json.loads(out)
    validate(doc, "verify")
    failed = [r["identity"] for r in doc if not r["passed"]]
    assert status == EXIT_FAIL and failed == ["CASIMIR_DEF"]


def test_oracle_spin_orbit(capsys):
    status, out, _ = run(capsys, "oracle", "--model", "spin-orbit", "--j", "1/2", "--grid", "3000:120")
    doc = json.loads(out)
    validate(doc, "oracle")
    row = doc["rows"][0]
    assert status == EXIT_OK and row["closed_form"] == "-1/9" and row["passed"]
    assert float(row["tol"]) == 5e-3


def test_oracle_failure_exit(capsys):
    status, out, _ = run(capsys, "oracle", "--grid", "200:40", "--tol", "1e-9")
    assert status == EXIT_FAIL
    assert json.loads(out)["rows"]


def test_wavefunction_csv(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SPINFOCK_OUTPUT_DIR", str(tmp_path))
    status, out, _ = run(capsys, "wavefunction", "--n", "1", "--grid", "2000:60",
                         "--output", "psi.csv", "--normalize")
    assert status == EXIT_OK and out == ""
    lines = (tmp_path / "psi.csv").read_text().splitlines()
    assert lines[0].startswith("# ")
    assert lines[1] == "r,re_up,im_up,re_down,im_down"
    assert len(lines) == 2002


def test_wavefunction_under_resolved(capsys):
    status, _, _ = run(capsys, "wavefunction", "--n", "2", "--grid", "60:80")
    assert status == 3


def test_dirac(capsys):
    status, out, _ = run(capsys, "dirac", "--n-max", "1")
    doc = json.loads(out)
    validate(doc, "dirac")
    assert status == EXIT_OK and doc["reduction"]["passed"]
    assert doc["energies"][0]["epsilon"] == "-1/9"


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# spectrum defaults\nmodel = spin-orbit\nj = 3/2\nn-max = 0\n")
    _, out, _ = run(capsys, "spectrum", "--config", str(cfg))
    (row,) = json.loads(out)["rows"]
    assert row["model"] == "SPIN_ORBIT" and row["epsilon"] == "-1/25"
    # explicit flags win over the file
    _, out, _ = run(capsys, "spectrum", "--config", str(cfg), "--j", "1/2")
    assert json.loads(out)["rows"][0]["j"] == "1/2"


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour=blue\n")
    status, _, _ = run(capsys, "spectrum", "--config", str(cfg))
    assert status == EXIT_USAGE


def test_dirac_seed_determinism(capsys):
    _, a, _ = run(capsys, "dirac", "--seed", "5")
    _, b, _ = run(capsys, "dirac", "--seed", "5")
    _, c, _ = run(capsys, "dirac", "--seed", "6")
    assert a == b and a != c


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spinfock", "parse", "s1*s2"],
                          capture_output=True, text=True, env={**os.environ})
    assert proc.returncode == 0 and proc.stdout == "i*s3\n"

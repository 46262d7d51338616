import json
import subprocess
import sys

import pytest

from nearhol.cli import (
    CONJECTURE_SCHEMA,
    EXIT_FAIL,
    EXIT_OK,
    EXIT_UNSUPPORTED,
    EXIT_USAGE,
    SPECTRUM_SCHEMA,
    VERIFY_SCHEMA,
    JobConfig,
    cmd_spectrum,
    cmd_verify,
    main,
    table_from_dict,
    table_to_dict,
)
from nearhol.errors import ParameterError
from nearhol.suites import Check


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_cp1(capsys):
    code, out, _ = run(capsys, "spectrum", "--space", "I:1,1", "--bundle", "line:0", "--cutoff", "2")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["schema"] == SPECTRUM_SCHEMA
    assert doc["header"] == {"r": 1, "a": 0, "b": 0, "g": 2, "n": 1}
    assert len(doc["rows"]) == 3
    assert all(r["multiplicity"] == 1 for r in doc["rows"])
    assert all(r["status"] == "InL2" for r in doc["rows"])


def test_spectrum_cotangent_i22(capsys):
    code, out, _ = run(capsys, "spectrum", "--space", "I:2,2", "--bundle", "cotangent", "--cutoff", "3")
    assert code == EXIT_OK
    doc = json.loads(out)
    rows = doc["rows"]
    assert [r["multiplicity"] for r in rows] == [1, 2, 2, 1, 1, 1]
    for r in rows:
        if r["m"][-1] <= 1:
            assert r["status"] == "Undecided"


def test_spectrum_exceptional_is_combinatorial(capsys):
    code, out, _ = run(capsys, "spectrum", "--space", "EVII", "--bundle", "line:1", "--cutoff", "2")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["header"]["n"] == 27 and doc["rows"]


def test_rational_weight_bundle(capsys):
    code, out, _ = run(capsys, "spectrum", "--space", "I:2,2", "--bundle", "mu:1/2,1/2,-1/2,-1/2", "--cutoff", "1")
    assert code == EXIT_OK
    assert json.loads(out)["bundle"] == "mu:1/2,1/2,-1/2,-1/2"


def test_table_round_trip(capsys):
    for argv in (["--space", "I:2,2", "--bundle", "cotangent", "--cutoff", "3"],
                 ["--space", "III:3", "--bundle", "line:-2", "--cutoff", "2"],
                 ["--space", "EIII", "--bundle", "line:1", "--cutoff", "2"]):
        _, out, _ = run(capsys, "spectrum", *argv)
        doc = json.loads(out)
        table, data = table_from_dict(doc)
        assert table_to_dict(table, data) == doc


def test_table_from_dict_rejects_bad_input(capsys):
    _, out, _ = run(capsys, "spectrum", "--space", "I:1,1")
    doc = json.loads(out)
    with pytest.raises(ParameterError):
        table_from_dict({**doc, "schema": "nearhol.spectrum/0"})
    with pytest.raises(ParameterError):
        table_from_dict({**doc, "header": {**doc["header"], "g": 3}})


@pytest.mark.parametrize("fmt", ["csv", "md"])
def test_other_formats(capsys, fmt):
    code, out, _ = run(capsys, "spectrum", "--space", "I:1,2", "--cutoff", "2", "--output", fmt)
    assert code == EXIT_OK
    assert f"schema: {SPECTRUM_SCHEMA}" in out
    assert "weight" in out and "multiplicity" in out
    if fmt == "md":
        assert "|---|" in out


def test_verify_jordan_pass(capsys):
    code, out, _ = run(capsys, "verify", "--space", "I:2,2", "--suite", "jordan", "--seed", "7")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["schema"] == VERIFY_SCHEMA and doc["passed"]
    names = {c["name"] for c in doc["checks"]}
    assert {"det_bergman_genus", "fundamental_identity", "qmap_identities"} <= names
    assert all(c["residual"] <= c["tolerance"] for c in doc["checks"])


def test_verify_integrals_cp1(capsys):
    code, out, _ = run(capsys, "verify", "--space", "I:1,1", "--suite", "integrals")
    assert code == EXIT_OK
    checks = {c["name"]: c for c in json.loads(out)["checks"]}
    assert checks["cp1_pi_baseline"]["passed"]
    assert checks["cp1_pi_baseline"]["residual"] < 1e-3


def test_verify_exceptional(capsys):
    code, _, err = run(capsys, "verify", "--space", "EIII", "--suite", "jordan")
    assert code == EXIT_UNSUPPORTED and "unsupported" in err
    code, out, _ = run(capsys, "verify", "--space", "EIII", "--suite", "decomp")
    assert code == EXIT_OK and json.loads(out)["suites"] == ["decomp"]


def test_verify_failure_exit(monkeypatch, capsys):
    import nearhol.cli as cli

    def fake(data, suites, seed, spec, cutoff):
        return [Check("jordan", "broken", 1.0, 0.0, False)]

    monkeypatch.setattr(cli, "run_suites", fake)
    code, out, err = run(capsys, "verify", "--space", "I:1,1", "--suite", "jordan")
    assert code == EXIT_FAIL
    assert "jordan.broken" in err
    assert json.loads(out)["passed"] is False


@pytest.mark.parametrize("argv", [
    ["spectrum", "--space", "V:3"],
    ["spectrum", "--space", "IV:2"],
    ["spectrum", "--space", "I:2"],
    ["spectrum", "--space", "I:1,1", "--cutoff", "99"],
    ["spectrum", "--space", "I:1,1", "--cutoff", "-1"],
    ["spectrum", "--space", "I:1,1", "--seed", str(2**64)],
    ["spectrum", "--space", "I:1,1", "--bundle", "tangent"],
    ["spectrum", "--space", "I:1,1", "--output", "xml"],
    ["verify", "--space", "I:1,1", "--suite", "everything"],
    ["spectrum"],
    [],
])
def test_usage_errors(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == EXIT_USAGE


def test_conjecture_line_bundles(capsys):
    for k in range(-3, 4):
        code, out, _ = run(capsys, "conjecture", "--space", "I:2,2", "--bundle", f"line:{k}", "--cutoff", "4")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["schema"] == CONJECTURE_SCHEMA
        assert doc["counts"]["disagree"] == 0 and doc["counts"]["unknown"] == 0


def test_conjecture_cp1_cotangent(capsys):
    code, out, _ = run(capsys, "conjecture", "--space", "I:1,1", "--bundle", "cotangent", "--cutoff", "5")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["counts"] == {"agree": 6, "disagree": 0, "unknown": 0}
    assert any(r["source"] == "probe:Divergent" for r in doc["rows"])


def test_conjecture_empty_scan(capsys):
    code, out, _ = run(capsys, "conjecture", "--space", "I:1,1", "--cutoff", "0")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert len(doc["rows"]) == 1 and doc["rows"][0]["status"] == "agree"


def test_conjecture_reports_cp2_counterexample(capsys):
    # the literal degree criterion fails on CP^2; the scan reports it rather than asserting
    code, out, _ = run(capsys, "conjecture", "--space", "I:1,2", "--bundle", "cotangent", "--cutoff", "2")
    doc = json.loads(out)
    assert code == EXIT_OK
    bad = [r for r in doc["rows"] if r["status"] == "disagree"]
    assert bad and all(not r["dominant"] for r in bad)


def test_out_file(tmp_path, capsys):
    target = tmp_path / "table.json"
    code = main(["spectrum", "--space", "I:1,1", "--out", str(target)])
    assert code == EXIT_OK and capsys.readouterr().out == ""
    assert json.loads(target.read_text())["schema"] == SPECTRUM_SCHEMA


def test_byte_stable():
    cfg = JobConfig("I:2,2", "cotangent", 3)
    assert cmd_spectrum(cfg) == cmd_spectrum(cfg)
    v = JobConfig("I:1,2", suite="jordan", seed=5)
    assert cmd_verify(v) == cmd_verify(v)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nearhol.cli", "spectrum", "--space", "I:1,1", "--cutoff", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["cutoff"] == 1

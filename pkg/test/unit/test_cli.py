# test/unit/test_cli.py

import json

import pytest

from padicla import cli
from padicla.schemas import ExperimentReport
from padicla.utils import SCHEMA_TAG


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def failure_record(err):
    return json.loads(err.strip().splitlines()[-1])


# --- ring ---

def test_ring_text(capsys):
    """Test the ring command in text format."""
    code, out, _ = run(capsys, "ring", "gamma(3, X) - X", "--prime", "2", "--cap", "10", "--format", "text")
    assert code == 0
    assert out == "X^2 + X^3 + O(X^10)\n"


def test_ring_json(capsys):
    """Test the ring command in its default JSON format."""
    code, out, _ = run(capsys, "ring", "T mod p", "--ring", "witt", "--prime", "3", "--witt-length", "2")
    payload = json.loads(out)
    assert code == 0
    assert payload == {"schema_tag": SCHEMA_TAG, "ring": "witt", "expr": "T mod p", "value": "X"}


def test_ring_parse_error(capsys):
    """Test that a parse error exits with 2 and a JSON record on stderr."""
    code, out, err = run(capsys, "ring", "X + $", "--prime", "3")
    assert code == 2
    assert out == ""
    record = failure_record(err)
    assert record["error"] == "ParseError"
    assert record["details"]["position"] == "4"


# --- configuration ---

def test_config_file_and_flag_override(capsys, config_file):
    """Test that the file sets the prime and cap and flags win over it."""
    code, out, _ = run(capsys, "ring", "gamma(3, X) - X", "--config", str(config_file), "--format", "text")
    assert code == 0 and out == "X^2 + X^3 + O(X^10)\n"
    code, out, _ = run(capsys, "ring", "gamma(3, X) - X", "--config", str(config_file), "--cap", "3", "--format", "text")
    assert out == "X^2 + O(X^3)\n"


@pytest.mark.parametrize("flags", [["--prime", "4"], ["--witt-length", "9"], ["--lambda-grid", "a,b"]])
def test_invalid_configuration(capsys, flags):
    """Test that invalid settings exit with 2."""
    code, _, err = run(capsys, "ring", "X", *flags)
    assert code == 2
    assert failure_record(err)["exit_code"] == 2


def test_missing_config_file(capsys, tmp_path):
    """Test that an unreadable config file is a usage error."""
    code, _, _ = run(capsys, "ring", "X", "--config", str(tmp_path / "absent.cfg"))
    assert code == 2


def test_version(capsys):
    """Test --version."""
    with pytest.raises(SystemExit) as exc_info:
        cli.main(["--version"])
    assert exc_info.value.code == 0
    assert "padicla" in capsys.readouterr().out


# --- mahler ---

def test_mahler_coeffs(capsys):
    """Test the Mahler coefficients of x^2."""
    code, out, _ = run(capsys, "mahler", "coeffs", "x^2", "--prime", "3", "--degree", "4")
    payload = json.loads(out)
    assert code == 0
    assert payload["coefficients"] == {"1": "1 + O(3^60)", "2": "2 + O(3^60)"}
    assert payload["tail"] == "+inf"
    assert payload["heuristic_tail"] is True


def test_mahler_eval(capsys):
    """Test evaluating x^2 at 5 through its expansion."""
    code, out, _ = run(capsys, "mahler", "eval", "x^2", "--prime", "3", "--degree", "4", "--at", "5")
    assert code == 0
    assert json.loads(out)["value"] == "25 + O(3^60)"


def test_mahler_check(capsys):
    """Test both growth conditions from the command line."""
    code, out, _ = run(capsys, "mahler", "check", "x^2", "--prime", "3", "--degree", "4", "--lam", "0", "--mu", "-1")
    payload = json.loads(out)
    assert code == 0
    assert payload["cond1"] is True and payload["cond2"] is True
    assert payload["best_mu"] == "-1"


def test_mahler_restrict_text(capsys):
    """Test the restriction to level 1 in text format."""
    code, out, _ = run(capsys, "mahler", "restrict", "x^2", "--prime", "3", "--degree", "4", "--level", "1", "--format", "text")
    assert code == 0
    assert out == "# restricted to level 1\ndegree: 4\n1: 9 + O(3^60)\n2: 18 + O(3^60)\ntail: +inf\n"


def test_mahler_input_file(capsys, tmp_path):
    """Test re-expanding stored coefficients."""
    path = tmp_path / "square.txt"
    path.write_text("degree: 2\n1: 1\n2: 2\ntail: +inf\n", encoding="utf-8")
    code, out, _ = run(capsys, "mahler", "coeffs", "--input", str(path), "--prime", "3")
    assert code == 0
    assert json.loads(out)["coefficients"] == {"1": "1 + O(3^60)", "2": "2 + O(3^60)"}


@pytest.mark.parametrize(
    "argv",
    [
        ["mahler", "coeffs"],
        ["mahler", "eval", "x^2", "--degree", "4"],
        ["mahler", "check", "x^2", "--degree", "4", "--lam", "0"],
        ["mahler", "restrict", "x^2", "--degree", "4"],
    ],
)
def test_mahler_usage_errors(capsys, argv):
    """Test that incomplete mahler requests exit with 2."""
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert failure_record(err)["error"] == "UsageError"


def test_mahler_budget_exhausted(capsys):
    """Test that an oversized grid exits with 3."""
    code, _, err = run(capsys, "mahler", "coeffs", "x + y + z", "--degree", "60")
    assert code == 3
    assert failure_record(err)["error"] == "BudgetExceeded"


# --- witness ---

def test_witness_json(capsys):
    """Test the witness search for X over F_3."""
    code, out, _ = run(
        capsys, "witness", "X", "--prime", "3", "--cap", "12", "--levels", "0,1", "--lambda-grid", "1,0", "--degree", "4"
    )
    payload = json.loads(out)
    assert code == 0
    assert payload["found"] is True
    assert (payload["level"], payload["lam"]) == (0, "1")
    assert payload["expr"] == "X"


# --- experiment ---

def test_experiment_writes_report(capsys, tmp_path):
    """Test an experiment run with an output prefix."""
    prefix = tmp_path / "out" / "cob"
    code, out, _ = run(
        capsys, "experiment", "coboundary", "--prime", "3", "--cap", "8", "--samples", "1", "--levels", "0", "--out", str(prefix)
    )
    report = json.loads((tmp_path / "out" / "cob.json").read_text(encoding="utf-8"))
    assert code == (0 if report["passed"] else 1)
    assert out.startswith("coboundary: ")
    assert report["experiment"] == "coboundary"
    assert (tmp_path / "out" / "cob.csv").read_text(encoding="utf-8").splitlines()[0].startswith("constant,")


def test_experiment_property_failure(capsys, monkeypatch):
    """Test that a failed property exits with 1."""
    report = ExperimentReport(
        schema_tag=SCHEMA_TAG,
        experiment="coboundary",
        config={},
        fingerprint="0",
        passed=False,
        failures=["residual_bound"],
        tables={"solves": []},
        primary_table="solves",
    )
    monkeypatch.setattr(cli, "run_experiment", lambda name, config: report)
    code, out, err = run(capsys, "experiment", "coboundary", "--format", "text")
    assert code == 1
    assert "failed: residual_bound" in out
    assert failure_record(err)["error"] == "PropertyFailure"

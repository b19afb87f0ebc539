# test/unit/test_experiments.py

import pytest
from functools import lru_cache
from fractions import Fraction

from padicla.config import RunConfig
from padicla.schemas import ExperimentReport
from padicla.series import PerfLaurent
from padicla.services.experiments import (
    EXPERIMENTS,
    _saturated_text,
    _strictly_decreasing,
    coboundary_lambda,
    counterexample_degree,
    counterexample_element,
    deep_family,
    render,
    resolving_cap,
    run_experiment,
    separating_degree,
    write_report,
)
from padicla.utils import SCHEMA_TAG


@pytest.fixture
def report():
    return ExperimentReport(
        schema_tag=SCHEMA_TAG,
        experiment="demo",
        config={"prime": 3},
        fingerprint="abc",
        passed=False,
        failures=["gain"],
        summary={"t": "1"},
        tables={"rows": [{"b": True, "a": None}, {"a": "1/2", "b": False}]},
        primary_table="rows",
    )


# --- helpers ---

def test_strictly_decreasing():
    """Test the degradation-curve predicate."""
    assert _strictly_decreasing([Fraction(3), Fraction(2), Fraction(-1)])
    assert not _strictly_decreasing([Fraction(1), Fraction(1)])
    assert not _strictly_decreasing([Fraction(3), None])


def test_deep_family():
    """Test three distinct elements per prime, every coefficient and numerator prime to p."""
    assert deep_family(2) == [(1, 1), (1, 3), (1, 5)]
    assert deep_family(3) == [(1, 1), (1, 4), (2, 7)]
    for p in (2, 3, 5):
        family = deep_family(p)
        assert len({numerator for _, numerator in family}) == 3
        assert all(c % p and r % p for c, r in family)


def test_degrees_and_caps():
    """Test the Mahler degrees that separate radii and the resolving cap."""
    assert separating_degree(2) == 4
    assert separating_degree(3) == 3
    assert counterexample_degree(2) == 16
    assert counterexample_degree(3) == 9
    assert resolving_cap(Fraction(1, 9), 3) == 1
    assert resolving_cap(Fraction(4), 4) == 17


def test_counterexample_element():
    """Test that every Witt coordinate of s_n is 1 + X."""
    s = counterexample_element(3, 2)
    one_plus_x = PerfLaurent.one(3) + PerfLaurent.X(3)
    assert s.digits == (one_plus_x, one_plus_x)


def test_coboundary_lambda():
    """Test the target radius per prime."""
    assert coboundary_lambda(2) == 1
    assert coboundary_lambda(5) == 0


def test_saturated_text():
    """Test the recognition of rendered saturated valuations."""
    assert _saturated_text("+inf")
    assert _saturated_text(">=8")
    assert not _saturated_text("3")


# --- running ---

def test_registry():
    """Test the experiment names."""
    assert sorted(EXPERIMENTS) == ["coboundary", "counterexample", "decompletion", "tatesen", "witt-la"]
    with pytest.raises(ValueError):
        run_experiment("nonsense", None)


@pytest.mark.parametrize("name", ["coboundary", "tatesen"])
def test_reruns_are_byte_identical(name, small_config):
    """Test that equal configs give equal reports in every format."""
    first = run_experiment(name, small_config)
    second = run_experiment(name, small_config)
    for fmt in ("json", "csv", "text"):
        assert render(first, fmt) == render(second, fmt)
    assert first.fingerprint == small_config.fingerprint()
    assert first.config == small_config.describe()
    assert first.passed == (not first.failures)


def test_coboundary_rows(small_config):
    """Test that every coboundary row is either solved or refused."""
    report = run_experiment("coboundary", small_config)
    rows = report.tables["solves"]
    assert len(rows) == 2 * small_config.samples
    assert {row["status"] for row in rows} <= {"ok", "gain_too_small"}


def test_tatesen_tables(small_config):
    """Test the tables and headline constants of the Tate-Sen run."""
    report = run_experiment("tatesen", small_config)
    assert set(report.tables) == {"projections", "ts3", "ts4"}
    assert [row["kind"] for row in report.tables["projections"]] == ["monomial", "trace"]
    assert report.summary["c1"] is not None
    assert report.primary_table == "ts3"


# --- output ---

def test_render_text(report):
    """Test the text summary."""
    assert render(report, "text") == "demo: FAILED\n  t = 1\n  failed: gain\n"


def test_render_csv(report):
    """Test the CSV of the primary table."""
    assert render(report, "csv") == "a,b\n,true\n1/2,false\n"


def test_render_json_is_stable(report):
    """Test sorted keys and the trailing newline."""
    text = render(report, "json")
    assert text.endswith("}\n")
    assert text.index('"config"') < text.index('"experiment"')


def test_write_report(report, tmp_path):
    """Test that a prefix yields a JSON and a CSV file."""
    paths = write_report(report, str(tmp_path / "runs" / "demo"))
    assert [p.name for p in paths] == ["demo.json", "demo.csv"]
    assert (tmp_path / "runs" / "demo.csv").read_text(encoding="utf-8") == render(report, "csv")


# --- witness experiments ---

@lru_cache(maxsize=None)
def wide_report(name, prime):
    """One run per (experiment, prime) at a degree large enough for every check."""
    config = RunConfig(prime=prime, degree=16, samples=1, levels=[0, 1], witt_length=2)
    return run_experiment(name, config)


def test_counterexample_tables(small_config):
    """Test one radius row per Witt length and one level row per (n, level)."""
    report = run_experiment("counterexample", small_config)
    assert [row["n"] for row in report.tables["radii"]] == [1, 2, 3]
    assert len(report.tables["levels"]) == 3 * len(small_config.levels)
    assert report.primary_table == "radii"


def test_decompletion_tables(small_config):
    """Test the root ladder, the random rows and the three-step degradation curves."""
    report = run_experiment("decompletion", small_config)
    rows = report.tables["witnesses"]
    assert [row["element"] for row in rows[:4]] == ["X", "X^(1/3)", "X^(1/9)", "X^(1/27)"]
    assert len(rows) == 4 + 4 * small_config.samples
    assert len(report.tables["degradation"]) == 9


def test_witt_la_tables(small_config):
    """Test the named Witt elements lead the witness table."""
    report = run_experiment("witt-la", small_config)
    labels = [row["element"] for row in report.tables["witnesses"]]
    assert labels[:3] == ["T", "phiinv(T) + p*T", "[X]*(1+T)"]
    assert len(labels) == 3 + 3 * small_config.samples


@pytest.mark.parametrize("prime", [2, 3])
@pytest.mark.parametrize("name", ["decompletion", "witt-la", "counterexample", "tatesen", "coboundary"])
def test_experiment_passes(name, prime):
    """Test that every property check of the experiment holds at p = 2 and p = 3."""
    report = wide_report(name, prime)
    assert report.passed, report.failures


@pytest.mark.parametrize("prime, floor", [(2, "2"), (3, "1")])
def test_decompletion_ladder(prime, floor):
    """Test that X^(1/p^m) is first certified at level m, always with the same lambda."""
    rows = [row for row in wide_report("decompletion", prime).tables["witnesses"] if row["ladder"]]
    assert [(row["m"], row["level"], row["lam"]) for row in rows] == [(m, m, floor) for m in range(4)]
    assert not any(row["cap_limited"] for row in rows)


@pytest.mark.parametrize("prime, expected", [(2, ["1", "0", "-1"]), (3, ["0", "-1", "-2"])])
def test_degradation_curves(prime, expected):
    """Test that each deep element loses one unit of lambda per truncation layer."""
    rows = wide_report("decompletion", prime).tables["degradation"]
    for coefficient, numerator in deep_family(prime):
        curve = [row for row in rows if (row["coefficient"], row["numerator"]) == (coefficient, numerator)]
        assert [row["lam"] for row in curve] == expected
        assert not any(row["cap_limited"] for row in curve)


@pytest.mark.parametrize("prime, expected", [(2, ["2", "1", "0"]), (3, ["1", "0", "-1"])])
def test_counterexample_radii_decrease(prime, expected):
    """Test that the best lambda of s_n at level 0 drops by one with each Witt length."""
    report = wide_report("counterexample", prime)
    rows = report.tables["radii"]
    assert [row["lam_at_fixed_level"] for row in rows] == expected
    assert [row["decreasing"] for row in rows] == [None, True, True]
    assert all(row["reduction_consistent"] for row in rows)


@pytest.mark.parametrize("prime", [2, 3])
def test_coboundary_rows_are_verified(prime):
    """Test that no solved row is left with a residual known only to the cap."""
    rows = wide_report("coboundary", prime).tables["solves"]
    solved = [row for row in rows if row["status"] == "ok"]
    assert solved
    assert all(row["verdict"] == "met" for row in solved)

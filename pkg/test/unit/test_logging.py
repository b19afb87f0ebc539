# test/unit/test_logging.py

import json
import logging

import pytest
from fractions import Fraction

from padicla.config import settings
from padicla.logging_config import (
    StructuredFormatter,
    generate_run_id,
    get_run_id,
    log_precision_event,
    log_solver_event,
    log_witness_event,
    set_run_id,
    setup_logging,
)


@pytest.fixture
def run_id():
    set_run_id("run-1")
    yield "run-1"
    set_run_id("")


def make_record(**extra):
    record = logging.LogRecord("padicla.test", logging.WARNING, __file__, 10, "cap %s reached", (8,), None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


# --- formatter ---

def test_structured_formatter(run_id):
    """Test one JSON object per record with the run id and extra fields."""
    entry = json.loads(StructuredFormatter().format(make_record(lam=Fraction(1, 2), steps=3)))
    assert entry["message"] == "cap 8 reached"
    assert entry["level"] == "WARNING"
    assert entry["run_id"] == "run-1"
    assert entry["lam"] == "1/2"
    assert entry["steps"] == 3
    assert entry["logger"] == "padicla.test"


def test_structured_formatter_without_run_id():
    """Test that a missing run id renders as null."""
    set_run_id("")
    entry = json.loads(StructuredFormatter().format(make_record()))
    assert entry["run_id"] is None


# --- setup ---

def test_setup_logging_levels(monkeypatch):
    """Test the testing-environment level and the LOG_LEVEL override."""
    try:
        assert setup_logging().level == logging.WARNING
        monkeypatch.setattr(settings, "LOG_LEVEL", "debug")
        assert setup_logging().level == logging.DEBUG
    finally:
        monkeypatch.undo()
        setup_logging()


def test_run_id_helpers():
    """Test setting, reading and generating run ids."""
    set_run_id("abc")
    assert get_run_id() == "abc"
    set_run_id("")
    assert len(generate_run_id()) == 36
    assert generate_run_id() != generate_run_id()


# --- events ---

def test_solver_event_warns_on_stall(caplog):
    """Test that a stalled solve is logged as a warning."""
    log_solver_event("ts3", 40, None, status="stalled")
    record = caplog.records[-1]
    assert record.levelno == logging.WARNING
    assert (record.solver, record.event_type) == ("ts3", "solver_statistics")


def test_precision_event(caplog):
    """Test the precision-exhaustion event fields."""
    log_precision_event("invert", "cap reached", {"cap": 8})
    record = caplog.records[-1]
    assert record.name == "padicla.precision"
    assert (record.event_type, record.cap) == ("precision_exhausted", 8)


def test_witness_event_levels(caplog):
    """Test debug for found witnesses and info for missing ones."""
    caplog.set_level(logging.DEBUG, logger="padicla.witness")
    log_witness_event(True, 0, "1", "-3", 8)
    log_witness_event(False, None, checked_up_to=8)
    assert [r.levelno for r in caplog.records[-2:]] == [logging.DEBUG, logging.INFO]
    assert caplog.records[-1].event_type == "witness_missing"

# test/unit/test_utils.py

import pytest
from fractions import Fraction

from padicla.padic import INF, ExtVal
from padicla.utils import (
    dumps_csv,
    dumps_json,
    fmt_rational,
    parse_rational,
    read_config_file,
    to_jsonable,
    write_json,
)


# --- rationals ---

def test_fmt_rational():
    """Test exact rendering of integers, fractions and valuations."""
    assert fmt_rational(Fraction(4, 2)) == "2"
    assert fmt_rational(Fraction(-1, 3)) == "-1/3"
    assert fmt_rational(None) is None
    assert fmt_rational(INF) == "+inf"
    assert fmt_rational(ExtVal(3, saturated=True)) == ">=3"


def test_parse_rational():
    """Test plain, fractional and parenthesized input."""
    assert parse_rational(" 5 ") == 5
    assert parse_rational("(1/3)") == Fraction(1, 3)
    for bad in ("x", "1/0", ""):
        with pytest.raises(ValueError):
            parse_rational(bad)


# --- serialization ---

def test_to_jsonable():
    """Test that nested Fractions and valuations become strings."""
    payload = {"a": [Fraction(1, 2), ExtVal(2)], 3: (INF,)}
    assert to_jsonable(payload) == {"a": ["1/2", "2"], "3": ["+inf"]}


def test_dumps_json():
    """Test sorted keys, indentation and the trailing newline."""
    assert dumps_json({"b": 1, "a": Fraction(1, 3)}) == '{\n  "a": "1/3",\n  "b": 1\n}\n'


def test_dumps_csv():
    """Test booleans, empty cells and a fixed column order."""
    rows = [{"x": True, "y": None, "z": "dropped"}, {"x": False, "y": Fraction(2, 3)}]
    assert dumps_csv(rows, ["y", "x"]) == "y,x\n,true\n2/3,false\n"


def test_write_json_creates_directories(tmp_path):
    """Test that the writer creates parent directories."""
    path = write_json(str(tmp_path / "a" / "b.json"), {"k": 1})
    assert path.read_text(encoding="utf-8") == '{\n  "k": 1\n}\n'


# --- config files ---

def test_read_config_file(config_file):
    """Test comments, whitespace and key normalization."""
    assert read_config_file(str(config_file)) == {"prime": "2", "cap": "10", "lambda_grid": "1, 0, -1"}


def test_read_config_file_error(tmp_path):
    """Test that a line without '=' names its line number."""
    path = tmp_path / "broken.cfg"
    path.write_text("prime = 3\nseed 4\n", encoding="utf-8")
    with pytest.raises(ValueError, match=r"broken.cfg:2: expected 'key = value'"):
        read_config_file(str(path))

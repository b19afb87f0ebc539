# test/unit/test_modules.py

import pytest
from fractions import Fraction

from padicla.errors import ParseError
from padicla.modules import PadicModule, SeriesModule, WittModule, make_module
from padicla.padic import INF, ExtVal, PadicInt
from padicla.series import PerfLaurent
from padicla.witt import element_T, witt_from_int


# --- PadicModule ---

def test_padic_parse_and_format(padic3):
    """Test both accepted text forms of a p-adic integer."""
    x = padic3.parse("5 + O(3^10)")
    assert (x.precision, x.residue) == (10, 5)
    assert padic3.parse("7").precision == 60
    assert padic3.fmt(x) == "5 + O(3^10)"


def test_padic_parse_errors(padic3):
    """Test that garbage and foreign precision markers are refused."""
    with pytest.raises(ParseError):
        padic3.parse("five")
    with pytest.raises(ParseError):
        padic3.parse("5 + O(2^10)")


def test_padic_truncate_and_equal(padic3):
    """Test truncation to a valuation bound and equality at the common precision."""
    x = padic3.from_int(28)
    assert padic3.truncate(x, ExtVal(2)).precision == 2
    assert padic3.truncate(x, INF) is x
    assert padic3.equal(padic3.truncate(x, ExtVal(2)), padic3.from_int(1))


def test_padic_action_is_trivial(padic3):
    """Test that Z_p carries the trivial action."""
    x = padic3.from_int(5)
    assert padic3.act(4, x) is x
    assert padic3.val(padic3.scale(9, x)) == 2


# --- SeriesModule ---

def test_series_module_action(series3):
    """Test that the series handle acts through gamma_act at its cap."""
    y = series3.act(4, PerfLaurent.X(3))
    assert str(series3.sub(y, PerfLaurent.X(3))) == "X^3 + X^4 + O(X^12)"


def test_series_module_scale_and_zero(series3):
    """Test scaling by integers and p-adic scalars."""
    X = PerfLaurent.X(3)
    assert series3.is_zero(series3.scale(3, X))
    assert series3.scale(PadicInt.of(2, 3, 5), X) == X.scale(2)
    assert series3.describe() == {"module": "series", "prime": 3, "cap": "12"}


def test_series_module_parse(series3):
    """Test reading series through the handle."""
    assert series3.parse("X + O(X^4)").cap == 4


# --- WittModule ---

def test_witt_module_valuation():
    """Test that the Witt handle values elements by val_r."""
    module = WittModule(3, 2, Fraction(1, 2), 8)
    assert module.val(element_T(3, 2)) == 1
    assert module.val(module.from_int(3)) == 2
    assert module.is_zero(module.zero())


def test_witt_module_truncate():
    """Test truncation at a val_r bound, coordinate by coordinate."""
    module = WittModule(3, 2, 1, 8)
    truncated = module.truncate(element_T(3, 2), ExtVal(2))
    # coordinate 1 keeps val < 3 * (2 - 1) = 3
    assert str(truncated.digits[0]) == "X + O(X^2)"
    assert str(truncated.digits[1]) == "X + X^2 + O(X^3)"


def test_witt_module_parse_checks_ring():
    """Test that elements of another Witt ring are refused."""
    module = WittModule(3, 2)
    assert module.parse(str(witt_from_int(3, 3, 2))).agrees_with(witt_from_int(3, 3, 2))
    with pytest.raises(ParseError):
        module.parse(str(witt_from_int(3, 3, 1)))


# --- factory ---

def test_make_module():
    """Test building handles by name."""
    assert isinstance(make_module("padic", 5), PadicModule)
    assert isinstance(make_module("series", 5, cap=10), SeriesModule)
    witt = make_module("witt", 5, cap=10, length=2, r=1)
    assert isinstance(witt, WittModule) and witt.length == 2
    with pytest.raises(ValueError):
        make_module("matrix", 5)

# test/unit/test_coboundary.py

import pytest
from fractions import Fraction

from padicla.errors import GainTooSmall
from padicla.mahler import MahlerFn
from padicla.modules import SeriesModule
from padicla.padic import ExtVal
from padicla.series import PerfLaurent
from padicla.services.coboundary import CoboundarySolution, coboundary_solve, predicted_residual
from padicla.services.group import GroupContext


def test_trivial_action(padic3):
    """Test that a constant under the trivial action integrates to 5 binom(x, 1).

    The residual vanishes only up to the precision, so it cannot verify an
    infinite prediction.
    """
    f = MahlerFn.from_coeffs(padic3, [padic3.from_int(5)])
    solution = coboundary_solve(f, GroupContext(3, 0), 0, terms=3)
    assert [(n, a.residue) for n, a in solution.fn.stored()] == [((1,), 5)]
    assert solution.gain.is_inf
    assert solution.verdict == "unverified"
    assert not solution.meets
    assert solution.constant is None


def test_series_coefficient():
    """Test the truncated series for f = X at p = 3."""
    module = SeriesModule(3, 12)
    f = MahlerFn.from_coeffs(module, [PerfLaurent.X(3)])
    solution = coboundary_solve(f, GroupContext(3, 0), 0, terms=4)
    assert solution.gain == 2
    assert solution.fn.degree == f.degree + 4 + 1
    assert solution.fn.coefficient((1,)).val == 1
    assert solution.meets


def test_capped_residual_is_unverified():
    """Test that a residual known only to a small cap does not count as meeting the prediction."""
    f = MahlerFn.from_coeffs(SeriesModule(3, 6), [PerfLaurent.X(3)])
    solution = coboundary_solve(f, GroupContext(3, 0), 0, terms=4)
    assert solution.predicted == 6
    assert solution.residual.saturated and solution.residual == 4
    assert solution.verdict == "unverified"
    assert not solution.meets
    assert solution.deciding_cap() == 12
    wide = MahlerFn.from_coeffs(SeriesModule(3, 12), [PerfLaurent.X(3)])
    assert coboundary_solve(wide, GroupContext(3, 0), 0, terms=4).verdict == "met"


@pytest.mark.parametrize(
    "residual, predicted, verdict",
    [
        (ExtVal(7), ExtVal(5), "met"),
        (ExtVal(7, saturated=True), ExtVal(5), "met"),
        (ExtVal(3, saturated=True), ExtVal(5), "unverified"),
        (ExtVal(3), ExtVal(5), "missed"),
        (ExtVal(None), ExtVal(None), "met"),
        (ExtVal(9, saturated=True), ExtVal(None), "unverified"),
    ],
)
def test_verdict(padic3, residual, predicted, verdict):
    """Test the three outcomes of comparing a residual with its prediction."""
    f = MahlerFn.from_coeffs(padic3, [padic3.from_int(1)])
    solution = CoboundarySolution(f, 1, ExtVal(1), Fraction(0), predicted, residual)
    assert solution.verdict == verdict
    assert solution.meets == (verdict == "met")


def test_gain_too_small():
    """Test that a gain of 2/3 cannot beat p^0."""
    module = SeriesModule(3, 12)
    f = MahlerFn.from_coeffs(module, [PerfLaurent.monomial(3, Fraction(1, 3))])
    with pytest.raises(GainTooSmall) as exc_info:
        coboundary_solve(f, GroupContext(3, 0), 0, terms=3)
    assert exc_info.value.details["gain"] == ExtVal(Fraction(2, 3))


def test_predicted_residual():
    """Test (K+1)s - ceil(p^lam' (K+1)) + min(val(m_n) - floor(p^lam' n))."""
    module = SeriesModule(3, 12)
    f = MahlerFn.from_coeffs(module, [PerfLaurent.X(3)])
    assert predicted_residual(f, ExtVal(2), 0, 4) == 5 * 2 - 5 + 1
    assert predicted_residual(f, ExtVal(None), 0, 4).is_inf


def test_two_variables_refused(padic3):
    """Test that only one-variable functions are integrated."""
    f = MahlerFn.from_coeffs(padic3, {(0, 0): padic3.from_int(1)})
    with pytest.raises(ValueError):
        coboundary_solve(f, GroupContext(3, 0), 0)

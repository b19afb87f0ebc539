# test/unit/test_series.py

import pytest
from fractions import Fraction
from hypothesis import given, settings, strategies as st

from padicla.errors import DomainError, InsufficientPrecision, NotInvertible, ParseError
from padicla.padic import PadicInt
from padicla.series import (
    PerfLaurent,
    binomial_series_1plusX,
    from_y_components,
    gamma_act,
    monomial_projection,
    substitute,
    trace_projection,
    y_components,
)


# --- construction and text ---

def test_build_normalizes_depth():
    """Test that an element is stored at its minimal depth."""
    x = PerfLaurent.build(3, 2, {9: 1})
    assert x == PerfLaurent.X(3)
    assert x.depth == 0
    assert PerfLaurent.monomial(3, Fraction(1, 9)).depth == 2


def test_text_form():
    """Test the printed form of exact and capped elements."""
    assert str(PerfLaurent.X(2)) == "X"
    assert str(PerfLaurent.monomial(3, Fraction(1, 9))) == "X^(1/9)"
    assert str(PerfLaurent.zero(3)) == "0"
    assert str(PerfLaurent.zero(3, 5)) == "O(X^5)"


def test_from_text_reads_printed_form():
    """Test that from_text reads back the printed form including the cap."""
    text = "2*X^(1/3) + X^2 + O(X^5)"
    x = PerfLaurent.from_text(text, 3)
    assert str(x) == text
    assert x.cap.value == 5


def test_from_text_rejects_garbage():
    """Test ParseError on an unknown term."""
    with pytest.raises(ParseError):
        PerfLaurent.from_text("3*Y", 3)


# --- ring structure ---

def test_characteristic_p():
    """Test that p copies of X cancel."""
    X = PerfLaurent.X(3)
    total = X + X + X
    assert total.is_zero
    assert total.val.is_inf


def test_frobenius_on_sums():
    """Test (1+X)^2 = 1 + X^2 in characteristic 2."""
    one_plus_x = PerfLaurent.one(2) + PerfLaurent.X(2)
    assert str(one_plus_x ** 2) == "1 + X^2"


def test_frobenius_and_roots():
    """Test that phi and phi^-1 are mutually inverse."""
    X = PerfLaurent.X(3)
    root = X.pth_root()
    assert root == PerfLaurent.monomial(3, Fraction(1, 3))
    assert root.frobenius() == X
    assert X.frobenius_inverse().frobenius() == X


def test_invert_to_cap():
    """Test the geometric series for (1+X)^-1."""
    one_plus_x = PerfLaurent.one(2) + PerfLaurent.X(2)
    inverse = one_plus_x.invert(5)
    assert str(inverse) == "1 + X + X^2 + X^3 + X^4 + O(X^5)"
    assert (inverse * one_plus_x).agrees_with(PerfLaurent.one(2))


def test_invert_zero_fails():
    """Test that zero has no inverse."""
    with pytest.raises(NotInvertible):
        PerfLaurent.zero(3).invert()


def test_valuation_of_capped_zero():
    """Test that a capped zero has a saturated valuation."""
    v = PerfLaurent.zero(3, 5).val
    assert v.saturated and v.value == 5
    assert PerfLaurent.monomial(3, Fraction(1, 9)).val == Fraction(1, 9)


def test_pow_rational():
    """Test p-power roots and the rejection of other denominators."""
    X = PerfLaurent.X(3)
    assert X.pow_rational(Fraction(1, 3)) == PerfLaurent.monomial(3, Fraction(1, 3))
    with pytest.raises(DomainError):
        X.pow_rational(Fraction(1, 2))


def test_truncate_drops_high_terms():
    """Test truncation below the cap."""
    x = PerfLaurent.from_exponents(3, {Fraction(1): 1, Fraction(7): 1})
    assert str(x.truncate(5)) == "X + O(X^5)"


# --- cyclotomic action ---

def test_gamma_act_p2():
    """Test 3.X - X = X^2 + X^3 over F_2."""
    X = PerfLaurent.X(2)
    diff = gamma_act(3, X, 10) - X
    assert str(diff) == "X^2 + X^3 + O(X^10)"
    assert diff.val == 2


def test_gamma_act_p3():
    """Test val(4.X - X) = 3 over F_3."""
    X = PerfLaurent.X(3)
    assert (gamma_act(4, X, 10) - X).val == 3


def test_gamma_act_on_roots():
    """Test 3.X^(1/2) - X^(1/2) = X + X^(3/2) over F_2."""
    x = PerfLaurent.monomial(2, Fraction(1, 2))
    diff = gamma_act(3, x, 6) - x
    assert diff.val == 1
    assert diff.coefficient(Fraction(3, 2)) == 1


def test_gamma_act_rejects_non_units():
    """Test that only units act."""
    with pytest.raises(DomainError):
        gamma_act(3, PerfLaurent.X(3), 5)


def test_gamma_act_needs_enough_digits_of_a():
    """Test that a coarse a = 1 mod p^2 only fixes X^k up to X^(k + p^2 - 1)."""
    a = PadicInt(3, 2, 1)
    assert str(gamma_act(a, PerfLaurent.X(3), 7)) == "X + O(X^7)"
    with pytest.raises(InsufficientPrecision):
        gamma_act(a, PerfLaurent.monomial(3, -3), 7)


@given(
    p=st.sampled_from([2, 3]),
    m=st.integers(min_value=1, max_value=3),
    u=st.integers(min_value=1, max_value=50),
)
@settings(max_examples=20, deadline=None)
def test_gamma_valuation_is_p_power(p, m, u):
    """Test val(a.X - X) = p^m exactly when val_p(a - 1) = m."""
    if u % p == 0:
        u += 1
    a = 1 + p ** m * u
    X = PerfLaurent.X(p)
    assert (gamma_act(a, X, p ** m + 2) - X).val == p ** m


def test_gamma_group_law():
    """Test a.(b.x) = (ab).x on a depth-one element."""
    x = PerfLaurent.monomial(3, Fraction(1, 3)) + PerfLaurent.X(3)
    lhs = gamma_act(4, gamma_act(7, x, 8), 8)
    rhs = gamma_act(28, x, 8)
    assert lhs.agrees_with(rhs)


def test_binomial_series():
    """Test (1+X)^3 over F_2 to a cap."""
    assert str(binomial_series_1plusX(3, 5, p=2)) == "1 + X + X^2 + X^3 + O(X^5)"


def test_substitute():
    """Test f(g) for f = X and the rejection of a unit g."""
    X = PerfLaurent.X(3)
    g = PerfLaurent.from_exponents(3, {Fraction(2): 1, Fraction(3): 1})
    assert substitute(X, g).agrees_with(g)
    with pytest.raises(DomainError):
        substitute(X, PerfLaurent.one(3) + X)


# --- projections ---

def test_monomial_projection():
    """Test that only exponents in p^-n Z survive."""
    x = PerfLaurent.X(3) + PerfLaurent.monomial(3, Fraction(1, 3))
    assert monomial_projection(0, x) == PerfLaurent.X(3)
    assert monomial_projection(1, x) == x


def test_trace_projection_of_root():
    """Test that the level-0 trace of X^(1/p) is the constant -1."""
    x = PerfLaurent.monomial(3, Fraction(1, 3))
    assert trace_projection(0, x) == PerfLaurent.constant(3, -1)


def test_trace_projection_is_idempotent():
    """Test R_n(R_n(x)) = R_n(x)."""
    x = PerfLaurent.from_exponents(3, {Fraction(1, 9): 1, Fraction(4, 3): 2, Fraction(2): 1})
    once = trace_projection(1, x)
    assert trace_projection(1, once).agrees_with(once)


def test_trace_projection_commutes_with_gamma():
    """Test that the trace projection is equivariant up to the cap."""
    x = PerfLaurent.from_exponents(3, {Fraction(1, 3): 1, Fraction(5, 3): 1})
    lhs = trace_projection(0, gamma_act(4, x, 8))
    rhs = gamma_act(4, trace_projection(0, x), 8)
    defect = (lhs - rhs).val
    assert defect.is_inf or defect.saturated


def test_y_components_reassemble():
    """Test that the Y-decomposition sums back to the element."""
    x = PerfLaurent.from_exponents(3, {Fraction(1, 9): 1, Fraction(4, 3): 2})
    m, comps = y_components(x)
    assert m == 2
    assert from_y_components(3, m, comps).agrees_with(x)


def test_y_components_at_requested_depth():
    """Test decomposing a depth-0 element at a larger depth."""
    X = PerfLaurent.X(2)
    m, comps = y_components(X, depth=1)
    assert m == 1
    assert set(comps) == {0}
    assert from_y_components(2, m, comps).agrees_with(X)

# test/unit/test_parser.py

import pytest

from padicla.errors import DomainError, ParseError, Unsupported
from padicla.mahler import mahler_coeffs
from padicla.parser import (
    SeriesRing,
    WittRing,
    make_ring,
    parse_polynomial,
    parse_ring_expr,
    polynomial_oracle,
    tokenize,
)


def series(text, p=3, cap=10):
    return str(parse_ring_expr(text, SeriesRing(p, cap)))


# --- tokens ---

def test_tokenize():
    """Test token kinds and positions."""
    tokens = tokenize("gamma(3, X) - X")
    assert [t.kind for t in tokens] == ["name", "op", "int", "op", "name", "op", "op", "name", "end"]
    assert tokens[2].position == 6


def test_tokenize_rejects_stray_characters():
    """Test that the error points at the offending character."""
    with pytest.raises(ParseError) as exc_info:
        tokenize("X $ 1")
    assert exc_info.value.position == 2


# --- series mode ---

def test_gamma_expression():
    """Test gamma(3, X) - X over F_2."""
    assert series("gamma(3, X) - X", p=2) == "X^2 + X^3 + O(X^10)"


def test_negative_power():
    """Test (1+X)^-1 inverted to the ring cap."""
    assert series("(1+X)^-1", p=2, cap=5) == "1 + X + X^2 + X^3 + X^4 + O(X^5)"


def test_roots_and_frobenius():
    """Test rational exponents, phi and phi^-1."""
    assert series("X^(1/3)") == "X^(1/3)"
    assert series("phi(X) - X^3") == "0"
    assert series("phiinv(X)") == "X^(1/3)"
    assert series("3*X") == "0"
    assert series("-X + 2*X") == "X"


def test_series_mode_T_and_brackets():
    """Test that T and [.] collapse in series mode."""
    assert series("T") == "X"
    assert series("[X] mod p") == "X"


# --- Witt mode ---

def test_witt_expressions():
    """Test integers, Teichmuller lifts and reduction mod p in W_2."""
    ring = WittRing(3, 2, 8)
    assert str(parse_ring_expr("p", ring)) == "W2@p=3 [0; 1]"
    assert str(parse_ring_expr("[X]", ring)) == "W2@p=3 [X; 0]"
    assert str(parse_ring_expr("T mod p", ring)) == "X"
    assert str(parse_ring_expr("T mod 3", ring)) == "X"


def test_witt_rejects_rational_powers():
    """Test that roots are only taken in series mode."""
    with pytest.raises(Unsupported):
        parse_ring_expr("X^(1/3)", WittRing(3, 1))


def test_make_ring():
    """Test building rings by name."""
    assert isinstance(make_ring("series", 3), SeriesRing)
    assert make_ring("witt", 3, length=2).length == 2
    with pytest.raises(ValueError):
        make_ring("adeles", 3)


# --- errors ---

@pytest.mark.parametrize("text", ["", "X +", "Y", "gamma(3 X)", "X^(1/0)", "(X", "X X"])
def test_parse_errors(text):
    """Test that malformed expressions raise ParseError."""
    with pytest.raises(ParseError):
        parse_ring_expr(text, SeriesRing(3))


def test_other_moduli_refused():
    """Test that only reduction mod p is offered."""
    with pytest.raises(DomainError):
        parse_ring_expr("X mod 5", SeriesRing(3))


# --- polynomials ---

def test_parse_polynomial():
    """Test variable detection and binomials."""
    poly, gens = parse_polynomial("x^2 + y")
    assert [g.name for g in gens] == ["x", "y"]
    poly, gens = parse_polynomial("binom(x, 2)")
    assert poly.eval(5) == 10


def test_parse_polynomial_errors():
    """Test foreign symbols, syntax errors and the variable count."""
    with pytest.raises(ParseError):
        parse_polynomial("w + 1")
    with pytest.raises(ParseError):
        parse_polynomial("x +")
    with pytest.raises(DomainError):
        parse_polynomial("x*y", d=1)


def test_polynomial_oracle():
    """Test that binom(x, 2) expands to a single Mahler coefficient."""
    oracle = polynomial_oracle("binom(x, 2)", 3)
    assert oracle((5,)).residue == 10
    f = mahler_coeffs(oracle, 4)
    assert [(n, a.residue) for n, a in f.stored()] == [((2,), 1)]


def test_polynomial_oracle_rational_values():
    """Test an integer-valued polynomial with rational coefficients."""
    oracle = polynomial_oracle("x*(x+1)/2", 3, precision=10)
    assert oracle((3,)).residue == 6
    assert oracle((3,)).precision == 10

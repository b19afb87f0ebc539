# padicla/parser.py
"""
Expression grammar of the ``ring`` and ``witness`` commands, and the
polynomial oracles of the ``mahler`` command.

Ring expressions::

    expr   := sum ["mod" "p"]
    sum    := ["-"] prod (("+" | "-") prod)*
    prod   := power ("*" power)*
    power  := atom ["^" exp]
    exp    := ["-"] INT | "(" ["-"] INT ["/" INT] ")"
    atom   := INT | "p" | "X" | "T" | "[" sum "]" | "(" sum ")"
            | "phi(" sum ")" | "phiinv(" sum ")" | "gamma(" ["-"] INT "," sum ")"

In series mode T is X (T = [1+X] - 1 reduces to X mod p) and [e] is e. In
Witt mode X is [X], integers go through Z -> W_n(F_p) and the bracket body
is read in series mode.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from tokenize import TokenError
from typing import Any, List, Optional, Sequence, Tuple, Union

from sympy import Poly, Symbol, binomial, expand_func
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from padicla.config import settings
from padicla.errors import DomainError, ParseError, Unsupported
from padicla.mahler import FnOracle
from padicla.modules import PadicModule
from padicla.padic import PadicInt, Rational
from padicla.series import PerfLaurent, gamma_act
from padicla.witt import (
    WittElem,
    element_T,
    gamma_act_witt,
    phi,
    phi_inverse,
    reduce,
    teichmuller,
    witt_from_int,
    witt_invert,
    witt_pow,
)

logger = logging.getLogger(__name__)

Value = Union[PerfLaurent, WittElem]

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|(phiinv|phi|gamma|mod|[A-Za-z]+)|(.))")


@dataclass(frozen=True)
class Token:
    kind: str  # int | name | op | end
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == pos:
            break
        number, name, op = match.groups()
        start = match.start(match.lastindex) if match.lastindex else pos
        if number is not None:
            tokens.append(Token("int", number, start))
        elif name is not None:
            tokens.append(Token("name", name, start))
        elif op is not None:
            if op not in "+-*^()[],/":
                raise ParseError(f"unexpected character {op!r}", start, text)
            tokens.append(Token("op", op, start))
        pos = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


# -- rings ------------------------------------------------------------------------------

class SeriesRing:
    """Evaluation in Ẽ: values are PerfLaurent."""

    def __init__(self, prime: int, cap: Optional[Rational] = None):
        self.prime = prime
        self.cap = Fraction(settings.DEFAULT_CAP if cap is None else cap)

    def integer(self, k: int) -> PerfLaurent:
        return PerfLaurent.constant(self.prime, k)

    def X(self) -> PerfLaurent:
        return PerfLaurent.X(self.prime)

    def T(self) -> PerfLaurent:
        return self.X()

    def teichmuller(self, x: PerfLaurent) -> PerfLaurent:
        return x

    def phi(self, x: PerfLaurent) -> PerfLaurent:
        return x.frobenius()

    def phi_inverse(self, x: PerfLaurent) -> PerfLaurent:
        return x.frobenius_inverse()

    def gamma(self, a: int, x: PerfLaurent) -> PerfLaurent:
        return gamma_act(a, x, self.cap)

    def power(self, x: PerfLaurent, e: Fraction) -> PerfLaurent:
        if e.denominator != 1:
            return x.pow_rational(e)
        if e < 0:
            return (x ** int(-e)).invert(self.cap)
        return x ** int(e)

    def mod_p(self, x: PerfLaurent) -> PerfLaurent:
        return x


class WittRing:
    """Evaluation in W_n(Ẽ): values are WittElem."""

    def __init__(self, prime: int, length: int, cap: Optional[Rational] = None):
        self.prime = prime
        self.length = length
        self.cap = Fraction(settings.DEFAULT_CAP if cap is None else cap)

    def integer(self, k: int) -> WittElem:
        return witt_from_int(k, self.prime, self.length)

    def X(self) -> WittElem:
        return teichmuller(PerfLaurent.X(self.prime), self.length)

    def T(self) -> WittElem:
        return element_T(self.prime, self.length)

    def teichmuller(self, x: PerfLaurent) -> WittElem:
        return teichmuller(x, self.length)

    def phi(self, u: WittElem) -> WittElem:
        return phi(u)

    def phi_inverse(self, u: WittElem) -> WittElem:
        return phi_inverse(u)

    def gamma(self, a: int, u: WittElem) -> WittElem:
        return gamma_act_witt(a, u, self.cap)

    def power(self, u: WittElem, e: Fraction) -> WittElem:
        if e.denominator != 1:
            raise Unsupported("rational powers are only defined in series mode", {"exponent": e})
        if e < 0:
            return witt_pow(witt_invert(u, self.cap), int(-e))
        return witt_pow(u, int(e))

    def mod_p(self, u: WittElem) -> PerfLaurent:
        return reduce(u, 1).mod_p()


Ring = Union[SeriesRing, WittRing]


def make_ring(kind: str, prime: int, cap: Optional[Rational] = None, length: int = 1) -> Ring:
    if kind == "series":
        return SeriesRing(prime, cap)
    if kind == "witt":
        return WittRing(prime, length, cap)
    raise ValueError(f"unknown ring {kind!r}")


# -- recursive descent --------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, ring: Ring):
        self.text = text
        self.ring = ring
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def error(self, message: str, token: Optional[Token] = None) -> ParseError:
        token = token or self.current
        return ParseError(message, token.position, self.text)

    def advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def accept(self, text: str) -> bool:
        if self.current.kind in ("op", "name") and self.current.text == text:
            self.index += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            found = self.current.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")

    def integer(self) -> int:
        negative = self.accept("-")
        token = self.current
        if token.kind != "int":
            raise self.error("expected an integer")
        self.advance()
        return -int(token.text) if negative else int(token.text)

    def parse(self) -> Any:
        value = self.sum(self.ring)
        if self.accept("mod"):
            if not self.accept("p"):
                modulus = self.integer()
                if modulus != self.ring.prime:
                    raise DomainError("only reduction mod p is supported", {"modulus": modulus})
            value = self.ring.mod_p(value)
        if self.current.kind != "end":
            raise self.error(f"unexpected {self.current.text!r}")
        return value

    def sum(self, ring: Ring) -> Any:
        if self.accept("-"):
            value = ring.integer(0) - self.product(ring)
        else:
            value = self.product(ring)
        while True:
            if self.accept("+"):
                value = value + self.product(ring)
            elif self.accept("-"):
                value = value - self.product(ring)
            else:
                return value

    def product(self, ring: Ring) -> Any:
        value = self.power(ring)
        while self.accept("*"):
            value = value * self.power(ring)
        return value

    def power(self, ring: Ring) -> Any:
        base = self.atom(ring)
        if not self.accept("^"):
            return base
        if self.accept("("):
            numerator = self.integer()
            denominator = 1
            if self.accept("/"):
                denominator = self.integer()
                if denominator <= 0:
                    raise self.error("exponent denominator must be positive")
            self.expect(")")
            exponent = Fraction(numerator, denominator)
        else:
            exponent = Fraction(self.integer())
        return ring.power(base, exponent)

    def atom(self, ring: Ring) -> Any:
        token = self.current
        if token.kind == "int":
            self.advance()
            return ring.integer(int(token.text))
        if self.accept("("):
            value = self.sum(ring)
            self.expect(")")
            return value
        if self.accept("["):
            inner = self.sum(SeriesRing(ring.prime, ring.cap))
            self.expect("]")
            return ring.teichmuller(inner)
        if token.kind != "name":
            raise self.error(f"unexpected {token.text or 'end of input'!r}")
        self.advance()
        name = token.text
        if name == "X":
            return ring.X()
        if name == "T":
            return ring.T()
        if name == "p":
            return ring.integer(ring.prime)
        if name in ("phi", "phiinv"):
            self.expect("(")
            value = self.sum(ring)
            self.expect(")")
            return ring.phi(value) if name == "phi" else ring.phi_inverse(value)
        if name == "gamma":
            self.expect("(")
            a = self.integer()
            self.expect(",")
            value = self.sum(ring)
            self.expect(")")
            return ring.gamma(a, value)
        raise self.error(f"unknown name {name!r}", token)


def parse_ring_expr(text: str, ring: Ring) -> Value:
    """Parse and evaluate ``text`` in ``ring``."""
    if not text.strip():
        raise ParseError("empty expression", 0, text)
    return _Parser(text, ring).parse()


# -- polynomial oracles ----------------------------------------------------------------------

VARIABLES = ("x", "y", "z")


def parse_polynomial(text: str, d: Optional[int] = None) -> Tuple[Poly, Tuple[Symbol, ...]]:
    """A rational polynomial in x, y, z, with binom(x, k) allowed."""
    symbols = tuple(Symbol(name) for name in VARIABLES)
    local = {name: sym for name, sym in zip(VARIABLES, symbols)}
    local["binom"] = binomial
    try:
        expr = parse_expr(text, local_dict=local, transformations=standard_transformations + (convert_xor,))
    except (SyntaxError, TypeError, TokenError) as e:
        raise ParseError(f"not a polynomial: {e}", 0, text) from e
    expr = expand_func(expr)
    used = sorted((s for s in expr.free_symbols), key=lambda s: s.name)
    if any(s.name not in VARIABLES for s in used):
        raise ParseError("polynomials may only use x, y and z", 0, text)
    if d is None:
        d = max([VARIABLES.index(s.name) + 1 for s in used] or [1])
    gens = symbols[:d]
    if any(s not in gens for s in used):
        raise DomainError(f"polynomial uses more than {d} variables", {"d": d})
    try:
        return Poly(expr, *gens, domain="QQ"), gens
    except Exception as e:  # sympy raises PolynomialError and friends
        raise ParseError(f"not a polynomial: {e}", 0, text) from e


def polynomial_oracle(text: str, prime: int, d: Optional[int] = None, precision: Optional[int] = None) -> FnOracle:
    """An oracle Z_{>=0}^d -> Z_p evaluating an integer-valued polynomial."""
    poly, gens = parse_polynomial(text, d)
    module = PadicModule(prime, precision)

    def fn(point: Sequence[int]) -> PadicInt:
        value = poly.eval(dict(zip(gens, point)))
        return PadicInt.of(Fraction(int(value.p), int(value.q)), prime, module.precision)

    return FnOracle(module, len(gens), fn, label=text)



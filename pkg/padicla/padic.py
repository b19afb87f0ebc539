# padicla/padic.py
"""
Truncated p-adic integers, extended-rational valuations, multi-indices and
the binomial functions underlying every Mahler expansion.

Nothing here uses floating point: p^lambda for rational lambda is compared
and floored through exact integer roots.
"""

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Iterator, Optional, Sequence, Tuple, Union

from sympy import integer_log, integer_nthroot, isprime

from padicla.errors import DomainError, InsufficientPrecision, NotInvertible

Rational = Union[int, Fraction]


class Prime(int):
    """An int that is known to be prime."""

    def __new__(cls, p: int) -> "Prime":
        p = int(p)
        if p < 2 or not isprime(p):
            raise ValueError(f"{p} is not a prime")
        return super().__new__(cls, p)


@total_ordering
@dataclass(frozen=True, eq=False)
class ExtVal:
    """A valuation in Q ∪ {+inf}.

    ``value is None`` means +inf. ``saturated`` marks a value that is only a
    lower bound coming from a precision cap ("indistinguishable from zero
    beyond this point"); it does not take part in comparisons.
    """

    value: Optional[Fraction]
    saturated: bool = field(default=False)

    def __post_init__(self):
        if self.value is not None and not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))

    @classmethod
    def of(cls, v: Union["ExtVal", Rational, None], saturated: bool = False) -> "ExtVal":
        if isinstance(v, ExtVal):
            return v
        return cls(None if v is None else Fraction(v), saturated)

    @property
    def is_inf(self) -> bool:
        return self.value is None

    def _key(self) -> Tuple[int, Fraction]:
        return (1, Fraction(0)) if self.value is None else (0, self.value)

    def __eq__(self, other) -> bool:
        if not isinstance(other, (ExtVal, int, Fraction)):
            return NotImplemented
        return self._key() == ExtVal.of(other)._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __lt__(self, other) -> bool:
        if not isinstance(other, (ExtVal, int, Fraction)):
            return NotImplemented
        return self._key() < ExtVal.of(other)._key()

    def __add__(self, other) -> "ExtVal":
        other = ExtVal.of(other)
        sat = self.saturated or other.saturated
        if self.value is None or other.value is None:
            return ExtVal(None, sat)
        return ExtVal(self.value + other.value, sat)

    __radd__ = __add__

    def __sub__(self, other: Rational) -> "ExtVal":
        if isinstance(other, ExtVal):
            if other.value is None:
                raise ValueError("cannot subtract +inf")
            other = other.value
        return self + (-Fraction(other))

    def meets(self, bound: Rational) -> bool:
        """True when the valuation is certified ``>= bound`` up to precision."""
        return self.saturated or self.value is None or self.value >= bound

    def __str__(self) -> str:
        if self.value is None:
            return "+inf"
        text = str(self.value)
        return f">={text}" if self.saturated else text

    def __repr__(self) -> str:
        return f"ExtVal({self})"


INF = ExtVal(None)


def ext_min(values) -> ExtVal:
    """Minimum of valuations; +inf for an empty collection."""
    best = INF
    for v in values:
        v = ExtVal.of(v)
        if v < best or (v == best and best.saturated and not v.saturated):
            best = v
    return best


def _val_int(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PadicInt:
    """A p-adic integer known modulo p^precision."""

    prime: int
    precision: int
    residue: int

    def __post_init__(self):
        if self.precision < 0:
            raise ValueError("precision must be non-negative")
        object.__setattr__(self, "residue", self.residue % (self.prime ** self.precision))

    @classmethod
    def of(cls, value: Rational, p: int, precision: int) -> "PadicInt":
        value = Fraction(value)
        modulus = p ** precision
        if value.denominator % p == 0:
            raise DomainError(f"{value} is not a {p}-adic integer", {"value": value})
        residue = value.numerator * pow(value.denominator, -1, modulus) if modulus > 1 else 0
        return cls(p, precision, residue)

    @property
    def modulus(self) -> int:
        return self.prime ** self.precision

    def _coerce(self, other) -> "PadicInt":
        if isinstance(other, PadicInt):
            if other.prime != self.prime:
                raise ValueError("mismatched primes")
            return other
        if isinstance(other, (int, Fraction)):
            return PadicInt.of(other, self.prime, self.precision)
        return NotImplemented

    def __add__(self, other) -> "PadicInt":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = min(self.precision, other.precision)
        return PadicInt(self.prime, n, self.residue + other.residue)

    __radd__ = __add__

    def __neg__(self) -> "PadicInt":
        return PadicInt(self.prime, self.precision, -self.residue)

    def __sub__(self, other) -> "PadicInt":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "PadicInt":
        return (-self) + other

    def __mul__(self, other) -> "PadicInt":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = min(self.precision, other.precision)
        return PadicInt(self.prime, n, self.residue * other.residue)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "PadicInt":
        if e < 0:
            return self.inverse() ** (-e)
        return PadicInt(self.prime, self.precision, pow(self.residue, e, self.modulus))

    def is_unit(self) -> bool:
        return self.precision > 0 and self.residue % self.prime != 0

    def inverse(self) -> "PadicInt":
        if not self.is_unit():
            raise NotInvertible(f"{self} is not a unit", {"residue": self.residue})
        return PadicInt(self.prime, self.precision, pow(self.residue, -1, self.modulus))

    def valuation(self) -> ExtVal:
        """Exact valuation below the precision, else saturated at N."""
        if self.residue == 0:
            return ExtVal(Fraction(self.precision), saturated=True)
        return ExtVal(Fraction(_val_int(self.residue, self.prime)))

    def divide_by_p_power(self, k: int) -> "PadicInt":
        """Exact division by p^k; the result loses k digits of precision."""
        if k > self.precision:
            raise InsufficientPrecision(
                f"cannot divide by p^{k} at precision {self.precision}", {"k": k}
            )
        if self.residue % (self.prime ** k):
            raise DomainError(f"{self} is not divisible by p^{k}")
        return PadicInt(self.prime, self.precision - k, self.residue // self.prime ** k)

    def reduce(self, precision: int) -> "PadicInt":
        return PadicInt(self.prime, min(precision, self.precision), self.residue)

    def __int__(self) -> int:
        return self.residue

    def __str__(self) -> str:
        return f"{self.residue} + O({self.prime}^{self.precision})"


def val_p(x: Union[int, Fraction, PadicInt], p: Optional[int] = None) -> ExtVal:
    """p-adic valuation of an integer, rational or PadicInt."""
    if isinstance(x, PadicInt):
        return x.valuation()
    if p is None:
        raise ValueError("a prime is required for plain numbers")
    x = Fraction(x)
    if x == 0:
        return INF
    return ExtVal(Fraction(_val_int(abs(x.numerator), p) - _val_int(x.denominator, p)))


def binom_int(m: int, j: int) -> int:
    if m < 0 or j < 0:
        raise ValueError("binom_int takes non-negative arguments")
    return math.comb(m, j)


def val_factorial(n: int, p: int) -> int:
    """val_p(n!) by Legendre's formula."""
    v, q = 0, p
    while q <= n:
        v += n // q
        q *= p
    return v


def binom_padic(x: PadicInt, n: int) -> PadicInt:
    """binom(x, n) = x(x-1)...(x-n+1)/n! at precision N - val_p(n!)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    p, N = x.prime, x.precision
    if n == 0:
        return PadicInt(p, N, 1)
    v = val_factorial(n, p)
    if N <= v:
        raise InsufficientPrecision(
            f"binom(x, {n}) needs precision > {v}, have {N}",
            {"n": n, "precision": N, "loss": v},
        )
    modulus = p ** N
    num = 1
    for i in range(n):
        num = num * (x.residue - i) % modulus
    unit = math.factorial(n) // p ** v
    out = N - v
    return PadicInt(p, out, (num // p ** v) * pow(unit, -1, p ** out))


class MultiIndex(tuple):
    """A d-tuple of non-negative integers."""

    def __new__(cls, entries: Sequence[int]) -> "MultiIndex":
        entries = tuple(int(e) for e in entries)
        if any(e < 0 for e in entries):
            raise ValueError("multi-index entries must be non-negative")
        return super().__new__(cls, entries)

    @property
    def d(self) -> int:
        return len(self)

    @property
    def norm1(self) -> int:
        return sum(self)

    @property
    def sup(self) -> int:
        return max(self) if self else 0

    def plus(self, other: Sequence[int]) -> "MultiIndex":
        return MultiIndex(a + b for a, b in zip(self, other))

    def minus(self, other: Sequence[int]) -> "MultiIndex":
        return MultiIndex(a - b for a, b in zip(self, other))

    def dominates(self, other: Sequence[int]) -> bool:
        return all(a >= b for a, b in zip(self, other))

    @classmethod
    def zero(cls, d: int) -> "MultiIndex":
        return cls((0,) * d)

    @classmethod
    def unit(cls, d: int, i: int, k: int = 1) -> "MultiIndex":
        return cls(tuple(k if j == i else 0 for j in range(d)))

    @classmethod
    def box(cls, d: int, N: int) -> Iterator["MultiIndex"]:
        """All n with |n|_inf <= N, lexicographically."""
        for entries in itertools.product(range(N + 1), repeat=d):
            yield cls(entries)


def binom_multi(x: Sequence[PadicInt], n: MultiIndex) -> PadicInt:
    result = None
    for xi, ni in zip(x, n):
        term = binom_padic(xi, ni)
        result = term if result is None else result * term
    return result


def binom_int_multi(x: Sequence[int], n: MultiIndex) -> int:
    out = 1
    for xi, ni in zip(x, n):
        out *= math.comb(xi, ni) if xi >= 0 else _binom_negative(xi, ni)
    return out


def _binom_negative(x: int, n: int) -> int:
    # binom(x, n) = (-1)^n binom(n - x - 1, n) for negative x
    return (-1) ** n * math.comb(n - x - 1, n)


def _root_parts(p: int, lam: Fraction, t: int) -> Tuple[int, bool]:
    """floor((p^lam * t)) and whether p^lam * t is an integer."""
    a, b = lam.numerator, lam.denominator
    if a >= 0:
        root, exact = integer_nthroot(p ** a * t ** b, b)
        return int(root), bool(exact)
    q, r = divmod(t ** b, p ** (-a))
    root, exact = integer_nthroot(q, b)
    return int(root), bool(exact) and r == 0


def floor_power(p: int, lam: Rational, t: int) -> int:
    """floor(p^lam * t) for an integer t >= 0."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return _root_parts(p, Fraction(lam), t)[0]


def ceil_power(p: int, lam: Rational, t: int) -> int:
    """ceil(p^lam * t) for an integer t >= 0."""
    root, exact = _root_parts(p, Fraction(lam), t)
    return root if exact else root + 1


def floor_weighted(p: int, lam: Rational, n: Sequence[int]) -> int:
    """Σ_i floor(p^lam * n_i)."""
    return sum(floor_power(p, lam, ni) for ni in n)


def power_ge(p: int, lam: Rational, scale: Rational, value: Rational, strict: bool = False) -> bool:
    """Decide ``value >= p^lam * scale`` exactly (``>`` when strict); scale >= 0."""
    lam, scale, value = Fraction(lam), Fraction(scale), Fraction(value)
    if scale < 0:
        raise ValueError("scale must be non-negative")
    if scale == 0:
        return value > 0 if strict else value >= 0
    if value <= 0:
        return False
    b = lam.denominator
    lhs = (value / scale) ** b
    rhs = Fraction(p) ** lam.numerator
    return lhs > rhs if strict else lhs >= rhs


def growth_bound(p: int, lam: Rational, k: int) -> Fraction:
    """p^lam * p^k, exact for integral lam, rounded up otherwise."""
    lam = Fraction(lam)
    if lam.denominator == 1:
        return Fraction(p) ** (int(lam) + k)
    if k >= 0:
        return Fraction(ceil_power(p, lam, p ** k))
    # p^(lam + k) with k < 0: ceil(p^lam * p^(k + K)) / p^K keeps an upper bound
    return Fraction(ceil_power(p, lam, 1), p ** (-k))


def log_level(n: Union[int, Sequence[int]], p: int) -> int:
    """floor(log_p |n|_inf)."""
    sup = n if isinstance(n, int) else (max(n) if len(n) else 0)
    if sup <= 0:
        raise DomainError("log_level of the zero index", {"n": n})
    return int(integer_log(sup, p)[0])

# padicla/services/sampling.py
"""Seeded random inputs for the experiments. Every draw goes through the
``random.Random`` instance passed in, so a run is fixed by its seed."""

import random
from fractions import Fraction
from typing import Dict, Optional

from padicla.padic import Rational
from padicla.series import PerfLaurent
from padicla.witt import WittElem, teichmuller, witt_add, witt_scalar, witt_zero


def random_series(
    rng: random.Random,
    p: int,
    depth: int,
    cap: Optional[int] = None,
    terms: int = 4,
    low: int = 1,
    high: int = 4,
) -> PerfLaurent:
    """A random element of F_p[X^{1/p^depth}] with exponents in [low, high).

    The first term always sits at a point of exact depth ``depth`` so the
    element does not collapse to a shallower field.
    """
    scale = p ** depth
    coeffs: Dict[int, int] = {}
    first = low * scale + (1 if depth else 0)
    coeffs[first] = rng.randrange(1, p)
    for _ in range(terms - 1):
        k = rng.randrange(low * scale, high * scale)
        if k == first:
            continue
        coeffs[k] = (coeffs.get(k, 0) + rng.randrange(1, p)) % p
    return PerfLaurent.build(p, depth, coeffs, cap)


def random_unit(rng: random.Random, p: int, depth: int, spread: int = 4) -> int:
    """An integer a with val_p(a - 1) == depth exactly."""
    while True:
        u = rng.randrange(1, p ** spread)
        if u % p:
            return 1 + p ** depth * u


def random_witt(rng: random.Random, p: int, length: int, depth: int, cap: Optional[int] = None) -> WittElem:
    """Σ_i p^i [x_i] with each x_i a random polynomial in X^{1/p^depth}."""
    acc = witt_zero(p, length)
    for i in range(length):
        digit = random_series(rng, p, depth, cap, terms=2, low=0, high=2)
        acc = witt_add(acc, witt_scalar(p ** i, teichmuller(digit, length)))
    return acc


def deep_element(p: int, J: int, coefficient: int = 1, numerator: int = 1, cap: Optional[Rational] = None) -> PerfLaurent:
    """Σ_{j=1}^{J} c((1 + X^{1/p^j})^r - 1), a truncation of a completion-only element.

    1 + X^{1/p^j} is (1+X)^{1/p^j}, so with p ∤ r the j-th term moves like
    (1+X)^{r/p^j} and the J-th term sets the orbit valuations.
    """
    if coefficient % p == 0 or numerator % p == 0:
        raise ValueError("coefficient and numerator must be prime to p")
    one = PerfLaurent.one(p)
    acc = PerfLaurent.zero(p)
    for j in range(1, J + 1):
        acc = acc + ((one + PerfLaurent.monomial(p, Fraction(1, p ** j))) ** numerator - one).scale(coefficient)
    return acc.truncate(cap)

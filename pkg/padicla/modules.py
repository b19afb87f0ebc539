# padicla/modules.py
"""
Valued modules that Mahler coefficients live in.

A handle bundles the module operations, the valuation and the Γ-action so
that mahler.py and the services never look inside an element.
"""

import logging
import math
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Any, Optional, Union

from padicla.config import settings
from padicla.errors import ParseError
from padicla.padic import ExtVal, PadicInt, Rational
from padicla.series import PerfLaurent, gamma_act
from padicla.witt import (
    WittElem,
    gamma_act_witt,
    val_r,
    witt_add,
    witt_from_int,
    witt_neg,
    witt_scalar,
    witt_zero,
)

logger = logging.getLogger(__name__)

Scalar = Union[int, PadicInt]


class ValuedModuleHandle(ABC):
    """Interface of a valued Z_p-module with a continuous Γ-action."""

    name: str = "module"

    def __init__(self, prime: int):
        self.prime = prime

    @abstractmethod
    def zero(self) -> Any:
        ...

    @abstractmethod
    def from_int(self, k: int) -> Any:
        ...

    @abstractmethod
    def add(self, x: Any, y: Any) -> Any:
        ...

    @abstractmethod
    def neg(self, x: Any) -> Any:
        ...

    def sub(self, x: Any, y: Any) -> Any:
        return self.add(x, self.neg(y))

    @abstractmethod
    def scale(self, c: Scalar, x: Any) -> Any:
        """The Z_p-module action."""

    @abstractmethod
    def val(self, x: Any) -> ExtVal:
        ...

    def act(self, a: Scalar, x: Any) -> Any:
        """Action of a ∈ Z_p^× (trivial unless overridden)."""
        return x

    @abstractmethod
    def truncate(self, x: Any, bound: ExtVal) -> Any:
        """Forget everything of valuation >= bound."""

    @abstractmethod
    def equal(self, x: Any, y: Any) -> bool:
        """Equality up to the precision both sides carry."""

    @abstractmethod
    def fmt(self, x: Any) -> str:
        ...

    @abstractmethod
    def parse(self, text: str) -> Any:
        ...

    def is_zero(self, x: Any) -> bool:
        return self.val(x).is_inf or self.val(x).saturated

    def describe(self) -> dict:
        return {"module": self.name, "prime": self.prime}


class PadicModule(ValuedModuleHandle):
    """Z_p at fixed precision with the trivial action."""

    name = "padic"

    def __init__(self, prime: int, precision: Optional[int] = None):
        super().__init__(prime)
        self.precision = settings.PADIC_PRECISION if precision is None else precision

    def _lift(self, x: Scalar) -> PadicInt:
        if isinstance(x, PadicInt):
            return x
        return PadicInt.of(x, self.prime, self.precision)

    def zero(self) -> PadicInt:
        return self._lift(0)

    def from_int(self, k: int) -> PadicInt:
        return self._lift(k)

    def add(self, x: PadicInt, y: PadicInt) -> PadicInt:
        return x + y

    def neg(self, x: PadicInt) -> PadicInt:
        return -x

    def scale(self, c: Scalar, x: PadicInt) -> PadicInt:
        if isinstance(c, PadicInt):
            return c * x
        return x * c

    def val(self, x: PadicInt) -> ExtVal:
        return x.valuation()

    def truncate(self, x: PadicInt, bound: ExtVal) -> PadicInt:
        if bound.is_inf:
            return x
        return x.reduce(max(0, math.ceil(bound.value)))

    def equal(self, x: PadicInt, y: PadicInt) -> bool:
        n = min(x.precision, y.precision)
        return x.reduce(n).residue == y.reduce(n).residue

    def fmt(self, x: PadicInt) -> str:
        return str(x)

    def parse(self, text: str) -> PadicInt:
        body, sep, tail = text.partition(" + O(")
        try:
            if not sep:
                return self._lift(int(body))
            base, _, exponent = tail.rstrip(")").partition("^")
            if int(base) != self.prime:
                raise ParseError(f"expected precision marker in {self.prime}", len(body), text)
            return PadicInt(self.prime, int(exponent), int(body))
        except ValueError as e:
            raise ParseError(f"not a p-adic integer: {text!r}", 0, text) from e

    def describe(self) -> dict:
        return {**super().describe(), "precision": self.precision}


class SeriesModule(ValuedModuleHandle):
    """Ẽ = completed perfect Laurent series, acted on by (a·f)(X) = f((1+X)^a - 1)."""

    name = "series"

    def __init__(self, prime: int, cap: Optional[Rational] = None):
        super().__init__(prime)
        self.cap = Fraction(settings.DEFAULT_CAP if cap is None else cap)

    def zero(self) -> PerfLaurent:
        return PerfLaurent.zero(self.prime)

    def from_int(self, k: int) -> PerfLaurent:
        return PerfLaurent.constant(self.prime, k)

    def add(self, x: PerfLaurent, y: PerfLaurent) -> PerfLaurent:
        return x + y

    def neg(self, x: PerfLaurent) -> PerfLaurent:
        return -x

    def scale(self, c: Scalar, x: PerfLaurent) -> PerfLaurent:
        c = int(c.residue) if isinstance(c, PadicInt) else c
        return x.scale(c)

    def val(self, x: PerfLaurent) -> ExtVal:
        return x.val

    def act(self, a: Scalar, x: PerfLaurent) -> PerfLaurent:
        return gamma_act(a, x, self.cap)

    def truncate(self, x: PerfLaurent, bound: ExtVal) -> PerfLaurent:
        return x if bound.is_inf else x.truncate(bound.value)

    def equal(self, x: PerfLaurent, y: PerfLaurent) -> bool:
        return x.agrees_with(y)

    def fmt(self, x: PerfLaurent) -> str:
        return str(x)

    def parse(self, text: str) -> PerfLaurent:
        return PerfLaurent.from_text(text, self.prime)

    def describe(self) -> dict:
        return {**super().describe(), "cap": str(self.cap)}


class WittModule(ValuedModuleHandle):
    """W_n(Ẽ) = Ã/p^n with the valuation val_r and the componentwise action."""

    name = "witt"

    def __init__(self, prime: int, length: int, r: Optional[Rational] = None, cap: Optional[Rational] = None):
        super().__init__(prime)
        self.length = length
        self.r = Fraction(settings.DEFAULT_WITT_R if r is None else r)
        self.cap = Fraction(settings.DEFAULT_CAP if cap is None else cap)

    def zero(self) -> WittElem:
        return witt_zero(self.prime, self.length)

    def from_int(self, k: int) -> WittElem:
        return witt_from_int(k, self.prime, self.length)

    def add(self, x: WittElem, y: WittElem) -> WittElem:
        return witt_add(x, y)

    def neg(self, x: WittElem) -> WittElem:
        return witt_neg(x)

    def scale(self, c: Scalar, x: WittElem) -> WittElem:
        return witt_scalar(c, x)

    def val(self, x: WittElem) -> ExtVal:
        return val_r(x, self.r)

    def act(self, a: Scalar, x: WittElem) -> WittElem:
        return gamma_act_witt(a, x, self.cap)

    def truncate(self, x: WittElem, bound: ExtVal) -> WittElem:
        if bound.is_inf:
            return x
        digits = []
        for i, w in enumerate(x.digits):
            # val_r >= bound on coordinate i means val(w_i) >= p^i (bound - i/r)
            limit = self.prime ** i * (bound.value - Fraction(i) / self.r)
            digits.append(w.truncate(limit))
        return WittElem(x.prime, tuple(digits))

    def equal(self, x: WittElem, y: WittElem) -> bool:
        return x.agrees_with(y)

    def fmt(self, x: WittElem) -> str:
        return str(x)

    def parse(self, text: str) -> WittElem:
        elem = WittElem.from_text(text)
        if elem.prime != self.prime or elem.length != self.length:
            raise ParseError(f"expected an element of W{self.length} at p={self.prime}", 0, text)
        return elem

    def describe(self) -> dict:
        return {**super().describe(), "length": self.length, "r": str(self.r), "cap": str(self.cap)}


def make_module(kind: str, prime: int, cap: Optional[Rational] = None, length: int = 1, r: Optional[Rational] = None) -> ValuedModuleHandle:
    """Build a handle from its short name (padic, series, witt)."""
    if kind == "padic":
        return PadicModule(prime)
    if kind == "series":
        return SeriesModule(prime, cap)
    if kind == "witt":
        return WittModule(prime, length, r, cap)
    raise ValueError(f"unknown module kind {kind!r}")

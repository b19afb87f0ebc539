# padicla/series.py
"""
Truncated Laurent series over F_p with exponents in p^{-m}Z.

A ``PerfLaurent`` stores its terms at a common depth m: the pair (k, c)
stands for c * X^{k/p^m}. Everything at or above ``cap`` is unknown, so an
element is an approximation of a point of the X-adic completion of
∪_m F_p((X^{1/p^m})). Exact elements carry an infinite cap.

The cyclotomic action (a·f)(X) = f((1+X)^a - 1) is computed in the basis
Y = 1 + X^{1/p^m}, where the action is Y^j -> Y^{aj}, and (1+Z)^e is
expanded through Lucas' theorem.
"""

import itertools
import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple, Union

from padicla.config import settings
from padicla.errors import CapExhausted, DomainError, InsufficientPrecision, NotInvertible, ParseError
from padicla.padic import INF, ExtVal, PadicInt, Rational

logger = logging.getLogger(__name__)


def _min_cap(*caps: ExtVal) -> ExtVal:
    best = INF
    for c in caps:
        if c < best:
            best = c
    return ExtVal(best.value)


@dataclass(frozen=True)
class PerfLaurent:
    """An element of F_p((X^{1/p^depth})) known modulo X^cap."""

    prime: int
    depth: int
    terms: Tuple[Tuple[int, int], ...]
    cap: ExtVal = INF

    # -- construction -------------------------------------------------

    @classmethod
    def build(cls, p: int, depth: int, coeffs: Dict[int, int], cap: Union[ExtVal, Rational, None] = None) -> "PerfLaurent":
        """Normalize scaled coefficients {k: c} at ``depth`` into an element."""
        cap = INF if cap is None else ExtVal(ExtVal.of(cap).value)
        scale = p ** depth
        limit = None if cap.is_inf else cap.value * scale
        items = {}
        for k, c in coeffs.items():
            c %= p
            if c and (limit is None or k < limit):
                items[k] = c
        while depth > 0 and all(k % p == 0 for k in items):
            items = {k // p: c for k, c in items.items()}
            depth -= 1
        if not items:
            depth = 0
        return cls(p, depth, tuple(sorted(items.items())), cap)

    @classmethod
    def from_exponents(cls, p: int, coeffs: Dict[Fraction, int], cap: Union[ExtVal, Rational, None] = None) -> "PerfLaurent":
        depth = 0
        for e in coeffs:
            e = Fraction(e)
            depth = max(depth, _p_depth(e.denominator, p))
        scale = p ** depth
        scaled: Dict[int, int] = {}
        for e, c in coeffs.items():
            k = Fraction(e) * scale
            scaled[int(k)] = scaled.get(int(k), 0) + c
        return cls.build(p, depth, scaled, cap)

    @classmethod
    def zero(cls, p: int, cap: Union[ExtVal, Rational, None] = None) -> "PerfLaurent":
        return cls.build(p, 0, {}, cap)

    @classmethod
    def constant(cls, p: int, c: int, cap: Union[ExtVal, Rational, None] = None) -> "PerfLaurent":
        return cls.build(p, 0, {0: c}, cap)

    @classmethod
    def one(cls, p: int) -> "PerfLaurent":
        return cls.constant(p, 1)

    @classmethod
    def monomial(cls, p: int, exponent: Rational, c: int = 1, cap: Union[ExtVal, Rational, None] = None) -> "PerfLaurent":
        return cls.from_exponents(p, {Fraction(exponent): c}, cap)

    @classmethod
    def X(cls, p: int) -> "PerfLaurent":
        return cls.monomial(p, 1)

    # -- inspection ---------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.cap.is_inf

    @property
    def is_zero(self) -> bool:
        """No term is known below the cap."""
        return not self.terms

    def items(self) -> List[Tuple[Fraction, int]]:
        scale = self.prime ** self.depth
        return [(Fraction(k, scale), c) for k, c in self.terms]

    def coefficient(self, exponent: Rational) -> int:
        return dict(self.items()).get(Fraction(exponent), 0)

    def leading(self) -> Tuple[Fraction, int]:
        if not self.terms:
            raise NotInvertible("element has no term below its cap", {"cap": self.cap})
        k, c = self.terms[0]
        return Fraction(k, self.prime ** self.depth), c

    @property
    def val(self) -> ExtVal:
        if self.terms:
            return ExtVal(Fraction(self.terms[0][0], self.prime ** self.depth))
        if self.cap.is_inf:
            return INF
        return ExtVal(self.cap.value, saturated=True)

    def scaled(self, depth: int) -> Dict[int, int]:
        if depth < self.depth:
            raise ValueError("cannot lower the depth of a scaled view")
        factor = self.prime ** (depth - self.depth)
        return {k * factor: c for k, c in self.terms}

    # -- ring structure -----------------------------------------------

    def _coerce(self, other) -> "PerfLaurent":
        if isinstance(other, PerfLaurent):
            if other.prime != self.prime:
                raise ValueError("mismatched primes")
            return other
        if isinstance(other, int):
            return PerfLaurent.constant(self.prime, other)
        return NotImplemented

    def __add__(self, other) -> "PerfLaurent":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        m = max(self.depth, other.depth)
        acc = self.scaled(m)
        for k, c in other.scaled(m).items():
            acc[k] = acc.get(k, 0) + c
        return PerfLaurent.build(self.prime, m, acc, _min_cap(self.cap, other.cap))

    __radd__ = __add__

    def __neg__(self) -> "PerfLaurent":
        return PerfLaurent.build(self.prime, self.depth, {k: -c for k, c in self.terms}, self.cap)

    def __sub__(self, other) -> "PerfLaurent":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "PerfLaurent":
        return (-self) + other

    def scale(self, c: int) -> "PerfLaurent":
        return PerfLaurent.build(self.prime, self.depth, {k: v * c for k, v in self.terms}, self.cap)

    def __mul__(self, other) -> "PerfLaurent":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.prime
        cap = _min_cap(self.cap + other.val, other.cap + self.val)
        m = max(self.depth, other.depth)
        left = sorted(self.scaled(m).items())
        right = sorted(other.scaled(m).items())
        limit = None if cap.is_inf else cap.value * p ** m
        acc: Dict[int, int] = {}
        if right:
            low = right[0][0]
            for k1, c1 in left:
                if limit is not None and k1 + low >= limit:
                    break
                for k2, c2 in right:
                    k = k1 + k2
                    if limit is not None and k >= limit:
                        break
                    acc[k] = (acc.get(k, 0) + c1 * c2) % p
        return PerfLaurent.build(p, m, acc, cap)

    __rmul__ = __mul__

    def shift(self, exponent: Rational) -> "PerfLaurent":
        """Multiply by X^exponent."""
        return self * PerfLaurent.monomial(self.prime, exponent)

    def truncate(self, cap: Union[ExtVal, Rational, None]) -> "PerfLaurent":
        if cap is None:
            return self
        cap = _min_cap(self.cap, ExtVal.of(cap))
        return PerfLaurent.build(self.prime, self.depth, dict(self.terms), cap)

    def agrees_with(self, other: "PerfLaurent", cap: Union[ExtVal, Rational, None] = None) -> bool:
        """Equality of all terms below the common cap."""
        common = _min_cap(self.cap, other.cap, INF if cap is None else ExtVal.of(cap))
        return self.truncate(common).terms_at(other.truncate(common))

    def terms_at(self, other: "PerfLaurent") -> bool:
        m = max(self.depth, other.depth)
        return self.scaled(m) == other.scaled(m)

    def invert(self, cap: Optional[Rational] = None) -> "PerfLaurent":
        """Multiplicative inverse.

        A capped input known mod X^B with leading exponent e gives an inverse
        known mod X^{B - 2e}. An exact input is inverted to ``cap``
        (``INVERT_CAP_DEFAULT`` if omitted).
        """
        p = self.prime
        e0, c0 = self.leading()
        if self.is_exact:
            out_cap = Fraction(settings.INVERT_CAP_DEFAULT if cap is None else cap)
        else:
            out_cap = self.cap.value - 2 * e0
            if cap is not None:
                out_cap = min(out_cap, Fraction(cap))
        rel = out_cap + e0
        if rel <= 0:
            return PerfLaurent.zero(p, out_cap)
        unit = self * PerfLaurent.monomial(p, -e0, pow(c0, -1, p))
        m = unit.depth
        h = [(k, c) for k, c in unit.terms if k > 0]
        bound = math.ceil(rel * p ** m)
        w = [0] * bound
        w[0] = 1
        for k in range(1, bound):
            s = 0
            for j, c in h:
                if j > k:
                    break
                if w[k - j]:
                    s += c * w[k - j]
            w[k] = -s % p
        inv_c0 = pow(c0, -1, p)
        coeffs = {k: w[k] * inv_c0 for k in range(bound) if w[k]}
        core = PerfLaurent.build(p, m, coeffs, rel)
        return core.shift(-e0).truncate(out_cap)

    def __pow__(self, e: int) -> "PerfLaurent":
        if e < 0:
            return (self ** (-e)).invert()
        p = self.prime
        result = PerfLaurent.one(p)
        base = self
        while e:
            e, digit = divmod(e, p)
            for _ in range(digit):
                result = result * base
            if e:
                base = base.frobenius()
        return result

    def pow_rational(self, e: Rational) -> "PerfLaurent":
        """f^(k/p^s) = pth_root^s(f^k); other denominators are rejected."""
        e = Fraction(e)
        s = _p_depth(e.denominator, self.prime)
        if self.prime ** s != e.denominator:
            raise DomainError(f"exponent {e} needs a root of order prime to p", {"exponent": e})
        out = self ** e.numerator
        for _ in range(s):
            out = out.pth_root()
        return out

    # -- Frobenius ----------------------------------------------------

    def frobenius(self) -> "PerfLaurent":
        p = self.prime
        cap = self.cap if self.is_exact else ExtVal(self.cap.value * p)
        if self.depth > 0:
            return PerfLaurent(p, self.depth - 1, self.terms, cap)
        return PerfLaurent(p, 0, tuple((k * p, c) for k, c in self.terms), cap)

    def frobenius_inverse(self) -> "PerfLaurent":
        p = self.prime
        cap = self.cap if self.is_exact else ExtVal(self.cap.value / p)
        return PerfLaurent.build(p, self.depth + 1, dict(self.terms), cap)

    def pth_root(self) -> "PerfLaurent":
        return self.frobenius_inverse()

    # -- text ---------------------------------------------------------

    def __str__(self) -> str:
        parts = [_fmt_term(e, c) for e, c in self.items()]
        if not self.is_exact:
            parts.append("O(1)" if self.cap.value == 0 else f"O({_fmt_power(self.cap.value)})")
        return " + ".join(parts) if parts else "0"

    @classmethod
    def from_text(cls, text: str, p: int) -> "PerfLaurent":
        """Parse the output of ``str`` back bit-exactly."""
        text = text.strip()
        if text == "0":
            return cls.zero(p)
        coeffs: Dict[Fraction, int] = {}
        cap: Optional[Fraction] = None
        pos = 0
        for chunk in text.split(" + "):
            body = chunk.strip()
            cap_match = _CAP_RE.fullmatch(body)
            term_match = _TERM_RE.fullmatch(body)
            if cap_match:
                cap = _parse_power(cap_match.group(1))
            elif body.isdigit():
                coeffs[Fraction(0)] = coeffs.get(Fraction(0), 0) + int(body)
            elif term_match:
                e = _parse_power(term_match.group(2))
                coeffs[e] = coeffs.get(e, 0) + int(term_match.group(1) or 1)
            else:
                raise ParseError(f"unrecognized series term {body!r}", pos, text)
            pos += len(chunk) + 3
        return cls.from_exponents(p, coeffs, cap)


_POWER = r"X(?:\^(?:\d+|\(-?\d+(?:/\d+)?\)))?"
_TERM_RE = re.compile(rf"(?:(\d+)\*)?({_POWER})")
_CAP_RE = re.compile(rf"O\(({_POWER}|1)\)")


def _parse_power(text: Optional[str]) -> Fraction:
    if text is None or text == "1":
        return Fraction(0)
    if text == "X":
        return Fraction(1)
    body = text[2:]
    if body.startswith("("):
        body = body[1:-1]
    return Fraction(body)


def _fmt_power(e: Fraction) -> str:
    if e == 1:
        return "X"
    if e.denominator == 1 and e >= 0:
        return f"X^{e}"
    return f"X^({e})"


def _fmt_term(e: Fraction, c: int) -> str:
    if e == 0:
        return str(c)
    return ("" if c == 1 else f"{c}*") + _fmt_power(e)


def _p_depth(n: int, p: int) -> int:
    d = 0
    while n % p == 0:
        n //= p
        d += 1
    return d


# -- binomial expansions --------------------------------------------------

def _digits(n: int, p: int, length: int) -> Tuple[int, ...]:
    out = []
    for _ in range(length):
        n, d = divmod(n, p)
        out.append(d)
    return tuple(out)


@lru_cache(maxsize=None)
def _binom_mod_table(p: int) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(math.comb(a, b) % p for b in range(p)) for a in range(p))


@lru_cache(maxsize=4096)
def _lucas_terms(p: int, digits: Tuple[int, ...], bound: Fraction) -> Tuple[Tuple[int, int], ...]:
    table = _binom_mod_table(p)
    out = []
    for choice in itertools.product(*(range(d + 1) for d in digits)):
        j, coeff, place = 0, 1, 1
        for d, jd in zip(digits, choice):
            j += jd * place
            coeff = coeff * table[d][jd] % p
            place *= p
        if j < bound and coeff:
            out.append((j, coeff))
    return tuple(sorted(out))


def lucas_coefficients(e: PadicInt, bound: Rational) -> Dict[int, int]:
    """{j: binom(e, j) mod p} for 0 <= j < bound, by Lucas' theorem."""
    p = e.prime
    bound = Fraction(bound)
    if bound <= 0:
        return {}
    jmax = math.ceil(bound) - 1
    length = max(1, len(_digits_full(jmax, p)))
    if e.precision < length:
        raise InsufficientPrecision(
            f"(1+X)^e to X^{bound} needs {length} digits of e, have {e.precision}",
            {"precision": e.precision, "needed": length},
        )
    return dict(_lucas_terms(p, _digits(e.residue, p, length), bound))


def _digits_full(n: int, p: int) -> List[int]:
    out = []
    while n:
        n, d = divmod(n, p)
        out.append(d)
    return out


def _as_padic(a: Union[int, PadicInt], p: int) -> PadicInt:
    if isinstance(a, PadicInt):
        if a.prime != p:
            raise ValueError("mismatched primes")
        return a
    return PadicInt.of(a, p, settings.PADIC_PRECISION)


def binomial_series_1plusX(a: Union[int, PadicInt], cap: Rational, p: Optional[int] = None) -> PerfLaurent:
    """(1+X)^a = Σ_{j < cap} (binom(a, j) mod p) X^j."""
    if p is None:
        if not isinstance(a, PadicInt):
            raise ValueError("a prime is required for integer exponents")
        p = a.prime
    a = _as_padic(a, p)
    return PerfLaurent.build(p, 0, lucas_coefficients(a, cap), Fraction(cap))


@lru_cache(maxsize=None)
def _dominated(p: int, k: int) -> Tuple[Tuple[int, int], ...]:
    """(j, binom(k, j) (-1)^(k-j) mod p) over the j digit-dominated by k."""
    digits = _digits_full(k, p) or [0]
    return tuple((j, c * (-1) ** ((k - j) % 2) % p) for j, c in _lucas_terms(p, tuple(digits), Fraction(k + 1)))


def _to_y_basis(p: int, coeffs: Iterable[Tuple[int, int]]) -> Dict[int, int]:
    """Rewrite Σ c_k Z^k as Σ d_j (1+Z)^j."""
    out: Dict[int, int] = {}
    for k, c in coeffs:
        for j, b in _dominated(p, k):
            out[j] = (out.get(j, 0) + c * b) % p
    return {j: d for j, d in out.items() if d}


def _gamma_integral(a: PadicInt, f: PerfLaurent, target: Fraction) -> PerfLaurent:
    """The action on a depth-0 element, known mod Z^min(cap, target)."""
    p = f.prime
    bound = target if f.is_exact else min(target, f.cap.value)
    if f.is_exact and (not f.terms or (len(f.terms) == 1 and f.terms[0][0] == 0)):
        return f
    if not f.terms:
        return PerfLaurent.zero(p, bound)
    k0 = f.terms[0][0]
    # a = 1 mod p^prec moves X^k0 by at least X^(k0 + p^prec - 1)
    if (a - 1).residue == 0 and k0 + p ** a.precision - 1 >= bound:
        return f.truncate(bound)
    shift = min(k0, 0)
    h_bound = bound - shift
    h_terms = [(k - shift, c) for k, c in f.terms if k - shift < h_bound]
    acc: Dict[int, int] = {}
    for j, d in _to_y_basis(p, h_terms).items():
        for i, b in lucas_coefficients(a * j, h_bound).items():
            acc[i] = (acc.get(i, 0) + d * b) % p
    image = PerfLaurent.build(p, 0, acc, h_bound)
    if shift:
        lifted = lucas_coefficients(a, h_bound + 1)
        ratio = PerfLaurent.build(p, 0, {i - 1: c for i, c in lifted.items() if i > 0}, h_bound)
        image = (ratio ** (-shift)).invert(h_bound) * image
        image = image.shift(shift)
    return image.truncate(bound)


def gamma_act(a: Union[int, PadicInt], f: PerfLaurent, cap: Optional[Rational] = None) -> PerfLaurent:
    """(a·f)(X) = f((1+X)^a - 1) for a unit a.

    The image is known to min(cap(f), cap); an exact input without ``cap``
    uses ``DEFAULT_CAP``.
    """
    p = f.prime
    a = _as_padic(a, p)
    if not a.is_unit():
        raise DomainError("gamma_act needs a p-adic unit", {"a": a})
    if cap is None:
        target = Fraction(settings.DEFAULT_CAP) if f.is_exact else f.cap.value
    else:
        target = Fraction(cap)
    m = f.depth
    g = f
    for _ in range(m):
        g = g.frobenius()
    image = _gamma_integral(a, g, target * p ** m)
    for _ in range(m):
        image = image.pth_root()
    return image


def substitute(f: PerfLaurent, g: PerfLaurent, cap: Optional[Rational] = None) -> PerfLaurent:
    """f(g) for val(g) > 0, with X^{k/p^m} evaluated as pth_root^m(g^k)."""
    p = f.prime
    if not g.terms or g.val.value <= 0:
        raise DomainError("substitute needs val(g) > 0", {"g": g})
    v = g.val.value
    if not f.terms:
        return PerfLaurent.zero(p, None if f.is_exact else f.cap.value * v)
    m = f.depth
    F = f
    for _ in range(m):
        F = F.frobenius()
    k0 = F.terms[0][0]
    scale = p ** m
    out_cap: Optional[Fraction] = None if cap is None else Fraction(cap) * scale
    if k0 < 0 and out_cap is None:
        out_cap = Fraction(settings.INVERT_CAP_DEFAULT) * scale
    head = F.shift(-k0)
    h_target = None if out_cap is None else out_cap - k0 * v
    composed = _compose(head, g, h_target)
    if k0:
        factor = g ** k0 if k0 > 0 else (g ** (-k0)).invert(out_cap)
        composed = factor * composed
    if out_cap is not None:
        composed = composed.truncate(out_cap)
    if not composed.terms:
        raise CapExhausted("leading term of f(g) falls beyond the cap", {"cap": composed.cap})
    for _ in range(m):
        composed = composed.pth_root()
    return composed


def _compose(h: PerfLaurent, g: PerfLaurent, target: Optional[Fraction]) -> PerfLaurent:
    """h(g) for a power series h, splitting h = Σ_r X^r h_r^p."""
    p = h.prime
    v = g.val.value
    if target is not None:
        g = g.truncate(target)
        h = h.truncate(target / v)
    if not h.terms:
        return PerfLaurent.zero(p, None if h.is_exact else h.cap.value * v)
    if h.terms[-1][0] == 0:
        const = PerfLaurent.constant(p, h.terms[0][1])
        return const if h.is_exact else const.truncate(h.cap.value * v)
    parts: List[Dict[int, int]] = [dict() for _ in range(p)]
    for k, c in h.terms:
        parts[k % p][k // p] = c
    acc = PerfLaurent.zero(p)
    power = PerfLaurent.one(p)
    sub_target = None if target is None else target / p
    for r in range(p):
        part_cap = None if h.is_exact else (h.cap.value - r) / p
        part = PerfLaurent.build(p, 0, parts[r], part_cap)
        if part.terms or not part.is_exact:
            acc = acc + power * _compose(part, g, sub_target).frobenius()
        if r < p - 1:
            power = power * g
    return acc if target is None else acc.truncate(target)


# -- projections ------------------------------------------------------------

def monomial_projection(n: int, f: PerfLaurent) -> PerfLaurent:
    """Keep the terms whose exponent lies in p^{-n}Z."""
    if n < 0:
        raise ValueError("n must be non-negative")
    p, m = f.prime, f.depth
    if m <= n:
        return f
    step = p ** (m - n)
    return PerfLaurent.build(p, m, {k: c for k, c in f.terms if k % step == 0}, f.cap)


def y_components(f: PerfLaurent, depth: Optional[int] = None) -> Tuple[int, Dict[int, PerfLaurent]]:
    """Write f = Σ_{0 <= j < p^m} (1+X^{1/p^m})^j F_j(X) with F_j in F_p((X)).

    m is the depth of f unless a larger ``depth`` is requested.
    """
    p = f.prime
    m = f.depth if depth is None else max(depth, f.depth)
    size = p ** m
    buckets: Dict[int, Dict[int, int]] = {r: {} for r in range(size)}
    for k, c in f.scaled(m).items():
        r = k % size
        buckets[r][(k - r) // size] = c
    pieces = {}
    for r in range(size):
        cap = None if f.is_exact else f.cap.value - Fraction(r, size)
        pieces[r] = PerfLaurent.build(p, 0, buckets[r], cap)
    comps: Dict[int, PerfLaurent] = {}
    for r, piece in pieces.items():
        if not piece.terms and piece.is_exact:
            continue
        for j, b in _dominated(p, r):
            comps[j] = comps[j] + piece.scale(b) if j in comps else piece.scale(b)
    return m, comps


def y_power(p: int, m: int, j: int) -> PerfLaurent:
    """(1 + X^{1/p^m})^j, an exact polynomial of depth <= m."""
    digits = _digits_full(j, p) or [0]
    return PerfLaurent.build(p, m, dict(_lucas_terms(p, tuple(digits), Fraction(j + 1))))


def from_y_components(p: int, m: int, comps: Dict[int, PerfLaurent]) -> PerfLaurent:
    acc = PerfLaurent.zero(p)
    for j in sorted(comps):
        acc = acc + y_power(p, m, j) * comps[j]
    return acc


def trace_projection(n: int, f: PerfLaurent) -> PerfLaurent:
    """Normalized-trace projection onto F_p((X^{1/p^n})).

    Keeps the Y-components F_j with p^{m-n} | j; commutes with gamma_act.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    p, m = f.prime, f.depth
    if m <= n:
        return f
    depth, comps = y_components(f)
    step = p ** (depth - n)
    kept = {j: comp for j, comp in comps.items() if j % step == 0}
    return from_y_components(p, depth, kept)

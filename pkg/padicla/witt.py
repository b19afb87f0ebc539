# padicla/witt.py
"""
Length-n p-typical Witt vectors over PerfLaurent.

Elements are stored in Witt coordinates (w_0, ..., w_{n-1}); the element
Σ p^i [x_i] has coordinates w_i = x_i^{p^i}. Ring laws come from the
universal structure polynomials, derived once per (p, n) by solving the
ghost equations over Z and then reduced mod p.
"""

import logging
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from sympy import ZZ
from sympy.polys.rings import ring

from padicla.config import settings
from padicla.errors import DomainError, InsufficientPrecision, ParseError
from padicla.padic import INF, ExtVal, PadicInt, Rational
from padicla.series import PerfLaurent, gamma_act

logger = logging.getLogger(__name__)

Monomial = Tuple[int, Tuple[int, ...]]


@dataclass(frozen=True)
class CarryLaw:
    """Witt addition and multiplication polynomials in length n."""

    prime: int
    length: int
    sum_terms: Tuple[Tuple[Monomial, ...], ...]
    prod_terms: Tuple[Tuple[Monomial, ...], ...]
    ring: Any = field(compare=False, repr=False)
    sums: Tuple[Any, ...] = field(compare=False, repr=False)
    prods: Tuple[Any, ...] = field(compare=False, repr=False)

    @property
    def gens(self) -> Tuple[Any, ...]:
        return tuple(self.ring.gens)

    def ghost(self, coords: Sequence[Any], k: int) -> Any:
        """w_k(x) = Σ_{i<=k} p^i x_i^{p^{k-i}} over the integer ring."""
        p = self.prime
        return sum((p ** i * coords[i] ** (p ** (k - i)) for i in range(k + 1)), self.ring.zero)


_LAWS: Dict[Tuple[int, int], CarryLaw] = {}
_LAWS_LOCK = threading.Lock()


def _reduced(poly: Any, p: int) -> Tuple[Monomial, ...]:
    out = []
    for monom, coeff in poly.terms():
        c = int(coeff) % p
        if c:
            out.append((c, tuple(monom)))
    return tuple(sorted(out, key=lambda t: t[1]))


def _derive(p: int, n: int) -> CarryLaw:
    names = ",".join([f"a{i}" for i in range(n)] + [f"b{i}" for i in range(n)])
    R, *gens = ring(names, ZZ)
    a, b = gens[:n], gens[n:]

    def ghost(xs: Sequence[Any], k: int) -> Any:
        return sum((p ** i * xs[i] ** (p ** (k - i)) for i in range(k + 1)), R.zero)

    sums: List[Any] = []
    prods: List[Any] = []
    for k in range(n):
        s = ghost(a, k) + ghost(b, k) - sum((p ** i * sums[i] ** (p ** (k - i)) for i in range(k)), R.zero)
        t = ghost(a, k) * ghost(b, k) - sum((p ** i * prods[i] ** (p ** (k - i)) for i in range(k)), R.zero)
        sums.append(s.quo_ground(p ** k))
        prods.append(t.quo_ground(p ** k))
    return CarryLaw(
        prime=p,
        length=n,
        sum_terms=tuple(_reduced(s, p) for s in sums),
        prod_terms=tuple(_reduced(t, p) for t in prods),
        ring=R,
        sums=tuple(sums),
        prods=tuple(prods),
    )


def carry_law(p: int, n: int) -> CarryLaw:
    """Cached structure polynomials for W_n over F_p-algebras."""
    if n < 1:
        raise ValueError("Witt length must be at least 1")
    if n > settings.MAX_WITT_LENGTH:
        raise DomainError(f"Witt length {n} exceeds {settings.MAX_WITT_LENGTH}", {"length": n})
    key = (p, n)
    with _LAWS_LOCK:
        law = _LAWS.get(key)
        if law is None:
            logger.debug("Deriving Witt carry law for p=%s, n=%s", p, n)
            law = _derive(p, n)
            _LAWS[key] = law
    return law


@dataclass(frozen=True)
class WittElem:
    """An element of W_n(Ẽ) in Witt coordinates."""

    prime: int
    digits: Tuple[PerfLaurent, ...]

    def __post_init__(self):
        if not self.digits:
            raise ValueError("a Witt vector needs at least one coordinate")
        if any(d.prime != self.prime for d in self.digits):
            raise ValueError("mismatched primes")

    @property
    def length(self) -> int:
        return len(self.digits)

    def mod_p(self) -> PerfLaurent:
        return self.digits[0]

    def teichmuller_digits(self) -> Tuple[PerfLaurent, ...]:
        """x_i with self = Σ p^i [x_i]."""
        out = []
        for i, w in enumerate(self.digits):
            for _ in range(i):
                w = w.pth_root()
            out.append(w)
        return tuple(out)

    def _check(self, other: "WittElem") -> None:
        if not isinstance(other, WittElem):
            raise TypeError("expected a WittElem")
        if other.prime != self.prime or other.length != self.length:
            raise ValueError("mismatched Witt rings")

    def _coerce(self, other) -> "WittElem":
        if isinstance(other, int):
            return witt_from_int(other, self.prime, self.length)
        self._check(other)
        return other

    def __add__(self, other) -> "WittElem":
        return witt_add(self, self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> "WittElem":
        return witt_add(self, witt_neg(self._coerce(other)))

    def __rsub__(self, other) -> "WittElem":
        return witt_add(self._coerce(other), witt_neg(self))

    def __neg__(self) -> "WittElem":
        return witt_neg(self)

    def __mul__(self, other) -> "WittElem":
        return witt_mul(self, self._coerce(other))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "WittElem":
        return witt_pow(self, e)

    def agrees_with(self, other: "WittElem", cap: Optional[Rational] = None) -> bool:
        self._check(other)
        return all(a.agrees_with(b, cap) for a, b in zip(self.digits, other.digits))

    def __str__(self) -> str:
        return f"W{self.length}@p={self.prime} [" + "; ".join(str(d) for d in self.digits) + "]"

    @classmethod
    def from_text(cls, text: str) -> "WittElem":
        text = text.strip()
        head, sep, rest = text.partition(" [")
        if not sep or not rest.endswith("]") or not head.startswith("W") or "@p=" not in head:
            raise ParseError("expected 'W<n>@p=<p> [d0; d1; ...]'", 0, text)
        length_text, prime_text = head[1:].split("@p=")
        p, n = int(prime_text), int(length_text)
        digits = tuple(PerfLaurent.from_text(part, p) for part in rest[:-1].split("; "))
        if len(digits) != n:
            raise ParseError(f"expected {n} coordinates, found {len(digits)}", len(head), text)
        return cls(p, digits)


def _evaluate(terms: Tuple[Monomial, ...], variables: Sequence[PerfLaurent], p: int) -> PerfLaurent:
    powers: Dict[Tuple[int, int], PerfLaurent] = {}
    acc = PerfLaurent.zero(p)
    for coeff, exps in terms:
        value: Optional[PerfLaurent] = PerfLaurent.constant(p, coeff)
        for idx, e in enumerate(exps):
            if not e:
                continue
            base = variables[idx]
            if not base.terms and base.is_exact:
                value = None
                break
            key = (idx, e)
            if key not in powers:
                powers[key] = base ** e
            value = value * powers[key]
        if value is not None:
            acc = acc + value
    return acc


def witt_add(u: WittElem, v: WittElem) -> WittElem:
    u._check(v)
    law = carry_law(u.prime, u.length)
    variables = u.digits + v.digits
    return WittElem(u.prime, tuple(_evaluate(t, variables, u.prime) for t in law.sum_terms))


def witt_mul(u: WittElem, v: WittElem) -> WittElem:
    u._check(v)
    law = carry_law(u.prime, u.length)
    variables = u.digits + v.digits
    return WittElem(u.prime, tuple(_evaluate(t, variables, u.prime) for t in law.prod_terms))


def witt_zero(p: int, n: int) -> WittElem:
    return WittElem(p, tuple(PerfLaurent.zero(p) for _ in range(n)))


def witt_one(p: int, n: int) -> WittElem:
    return teichmuller(PerfLaurent.one(p), n)


def witt_from_int(k: int, p: int, n: int) -> WittElem:
    """The image of an integer in W_n(F_p) ⊂ W_n(Ẽ)."""
    modulus = p ** n
    r = k % modulus
    digits = []
    for _ in range(n):
        t = r % p
        omega = pow(t, p ** (n - 1), modulus) if t else 0
        digits.append(PerfLaurent.constant(p, t))
        r = ((r - omega) % modulus) // p
    return WittElem(p, tuple(digits))


def witt_scalar(c: Union[int, PadicInt], u: WittElem) -> WittElem:
    """Action of Z_p on W_n through Z/p^n."""
    if isinstance(c, PadicInt):
        if c.precision < u.length:
            raise InsufficientPrecision("scalar known to fewer digits than the Witt length", {"precision": c.precision})
        c = c.residue
    return witt_mul(witt_from_int(c, u.prime, u.length), u)


def witt_neg(u: WittElem) -> WittElem:
    if u.prime != 2:
        return WittElem(u.prime, tuple(-d for d in u.digits))
    return witt_mul(witt_from_int(-1, 2, u.length), u)


def witt_sub(u: WittElem, v: WittElem) -> WittElem:
    return witt_add(u, witt_neg(v))


def teichmuller(x: PerfLaurent, n: int) -> WittElem:
    p = x.prime
    return WittElem(p, (x,) + tuple(PerfLaurent.zero(p) for _ in range(n - 1)))


def element_T(p: int, n: int, cap: Optional[Rational] = None) -> WittElem:
    """T = [1 + X] - 1."""
    one_plus_x = PerfLaurent.one(p) + PerfLaurent.X(p)
    T = witt_sub(teichmuller(one_plus_x, n), witt_one(p, n))
    return T if cap is None else truncate(T, cap)


def truncate(u: WittElem, cap: Rational) -> WittElem:
    return WittElem(u.prime, tuple(d.truncate(cap) for d in u.digits))


def reduce(u: WittElem, length: int) -> WittElem:
    """Reduction W_n -> W_length (drop the last coordinates)."""
    if not 1 <= length <= u.length:
        raise ValueError("invalid target length")
    return WittElem(u.prime, u.digits[:length])


def witt_pow(u: WittElem, e: int) -> WittElem:
    if e < 0:
        return witt_pow(witt_invert(u), -e)
    result = witt_one(u.prime, u.length)
    base = u
    while e:
        if e & 1:
            result = witt_mul(result, base)
        e >>= 1
        if e:
            base = witt_mul(base, base)
    return result


def witt_invert(u: WittElem, cap: Optional[Rational] = None) -> WittElem:
    """Inverse by Newton iteration v <- v(2 - uv), started at [u_0^{-1}]."""
    p, n = u.prime, u.length
    v = teichmuller(u.digits[0].invert(cap), n)
    two = witt_from_int(2, p, n)
    for _ in range(n):
        v = witt_mul(v, witt_sub(two, witt_mul(u, v)))
    return v


def phi(u: WittElem) -> WittElem:
    return WittElem(u.prime, tuple(d.frobenius() for d in u.digits))


def phi_inverse(u: WittElem) -> WittElem:
    return WittElem(u.prime, tuple(d.frobenius_inverse() for d in u.digits))


def gamma_act_witt(a: Union[int, PadicInt], u: WittElem, cap: Optional[Rational] = None) -> WittElem:
    return WittElem(u.prime, tuple(gamma_act(a, d, cap) for d in u.digits))


def val_r(u: WittElem, r: Rational) -> ExtVal:
    """min_i(i/r + val(w_i)/p^i); saturated when only capped coordinates reach the minimum."""
    r = Fraction(r)
    if r <= 0:
        raise ValueError("r must be positive")
    p = u.prime
    resolved: Optional[Fraction] = None
    capped: Optional[Fraction] = None
    for i, w in enumerate(u.digits):
        v = w.val
        if v.is_inf:
            continue
        value = Fraction(i) / r + v.value / p ** i
        if v.saturated:
            capped = value if capped is None else min(capped, value)
        else:
            resolved = value if resolved is None else min(resolved, value)
    if resolved is None and capped is None:
        return INF
    if capped is None or (resolved is not None and resolved <= capped):
        return ExtVal(resolved)
    return ExtVal(capped, saturated=True)

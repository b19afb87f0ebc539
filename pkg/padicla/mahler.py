# padicla/mahler.py
"""
Functions Z_p^d -> M in the binomial (Mahler) basis.

A ``MahlerFn`` stores a_n for |n|_inf <= N and a lower bound ``tail`` on
val(a_n) beyond N. A ``FnOracle`` is a black box evaluated at non-negative
integer points; ``mahler_coeffs`` turns one into the other by iterated
forward differences on the grid [0, N]^d.
"""

import logging
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from padicla.config import settings
from padicla.errors import BudgetExceeded, DomainError, ParseError, TailUnbounded
from padicla.modules import ValuedModuleHandle
from padicla.padic import (
    INF,
    ExtVal,
    MultiIndex,
    PadicInt,
    Rational,
    binom_int,
    binom_int_multi,
    binom_padic,
    ceil_power,
    ext_min,
    floor_power,
    floor_weighted,
    growth_bound,
    log_level,
    power_ge,
    val_p,
)

logger = logging.getLogger(__name__)

Point = Tuple[int, ...]
Scalar = Union[int, PadicInt]


@dataclass(eq=False)
class FnOracle:
    """A deterministic function on Z_{>=0}^d with memoized, budgeted evaluation."""

    module: ValuedModuleHandle
    d: int
    fn: Callable[[Point], Any]
    budget: int = field(default_factory=lambda: settings.ORACLE_BUDGET)
    label: str = "oracle"
    _memo: Dict[Point, Any] = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        if not 1 <= self.d <= settings.MAX_DIMENSION:
            raise DomainError(f"dimension must lie in 1..{settings.MAX_DIMENSION}", {"d": self.d})

    @property
    def evaluations(self) -> int:
        return len(self._memo)

    def __call__(self, point: Sequence[int]) -> Any:
        point = tuple(int(x) for x in point)
        with self._lock:
            if point in self._memo:
                return self._memo[point]
            if len(self._memo) >= self.budget:
                raise BudgetExceeded(
                    f"{self.label} exceeded its budget of {self.budget} evaluations",
                    {"budget": self.budget},
                )
        value = self.fn(point)
        with self._lock:
            self._memo[point] = value
        return value


@dataclass(frozen=True, eq=False)
class MahlerFn:
    """f(x) = Σ a_n binom(x, n), with a_n stored for |n|_inf <= degree."""

    module: ValuedModuleHandle
    d: int
    degree: int
    coeffs: Dict[MultiIndex, Any]
    tail: ExtVal = INF
    heuristic_tail: bool = False

    @classmethod
    def from_coeffs(
        cls,
        module: ValuedModuleHandle,
        coeffs: Union[Sequence[Any], Dict[Sequence[int], Any]],
        degree: Optional[int] = None,
        d: Optional[int] = None,
        tail: ExtVal = INF,
    ) -> "MahlerFn":
        """Build from a list (d = 1) or a {multi-index: element} map."""
        if not isinstance(coeffs, dict):
            coeffs = {(n,): a for n, a in enumerate(coeffs)}
        items = {MultiIndex(n): a for n, a in coeffs.items()}
        if d is None:
            d = len(next(iter(items))) if items else 1
        if any(len(n) != d for n in items):
            raise ValueError("multi-indices of mixed dimension")
        top = max((n.sup for n in items), default=0)
        degree = top if degree is None else degree
        if top > degree:
            raise ValueError("coefficient index beyond the degree bound")
        kept = {n: a for n, a in items.items() if not _negligible(module, a)}
        return cls(module, d, degree, kept, tail)

    @property
    def prime(self) -> int:
        return self.module.prime

    def coefficient(self, n: Sequence[int]) -> Any:
        n = MultiIndex(n)
        if n.sup > self.degree:
            raise DomainError("coefficient beyond the stored degree", {"n": n, "degree": self.degree})
        return self.coeffs.get(n, self.module.zero())

    def indices(self) -> Iterable[MultiIndex]:
        return MultiIndex.box(self.d, self.degree)

    def stored(self) -> List[Tuple[MultiIndex, Any]]:
        return sorted(self.coeffs.items())

    def equals(self, other: "MahlerFn") -> bool:
        """Coefficientwise agreement over both degree boxes."""
        top = max(self.degree, other.degree)
        for n in MultiIndex.box(self.d, top):
            a = self.coeffs.get(n, self.module.zero())
            b = other.coeffs.get(n, self.module.zero())
            if not self.module.equal(a, b):
                return False
        return True

    def __call__(self, x: Sequence[Scalar]) -> Any:
        return evaluate(self, x)


def _negligible(module: ValuedModuleHandle, a: Any) -> bool:
    """Zero, or indistinguishable from zero at the precision carried."""
    return module.is_zero(a)


def _check_box(d: int, N: int) -> None:
    if (N + 1) ** d > settings.ORACLE_BUDGET:
        raise BudgetExceeded(
            f"grid [0, {N}]^{d} exceeds the oracle budget",
            {"degree": N, "d": d, "budget": settings.ORACLE_BUDGET},
        )


def _grid_values(oracle: FnOracle, N: int) -> Dict[MultiIndex, Any]:
    _check_box(oracle.d, N)
    return {x: oracle(x) for x in MultiIndex.box(oracle.d, N)}


def _difference_transform(module: ValuedModuleHandle, table: Dict[MultiIndex, Any], d: int, N: int) -> Dict[MultiIndex, Any]:
    """Newton forward differences along every axis: values -> Δ^n(0)."""
    out = dict(table)
    for axis in range(d):
        for base in MultiIndex.box(d - 1, N):
            line = [MultiIndex(base[:axis] + (k,) + base[axis:]) for k in range(N + 1)]
            values = [out[n] for n in line]
            for j in range(1, N + 1):
                for k in range(N, j - 1, -1):
                    values[k] = module.sub(values[k], values[k - 1])
            out.update(zip(line, values))
    return out


def mahler_coeffs(oracle: FnOracle, N: int) -> MahlerFn:
    """a_n = Δ^n(f)(0) for |n|_inf <= N.

    The tail bound is read off the outermost layer |n|_inf = N and is
    flagged heuristic: finite data cannot certify a tail.
    """
    if N < 0:
        raise ValueError("degree must be non-negative")
    module = oracle.module
    coeffs = _difference_transform(module, _grid_values(oracle, N), oracle.d, N)
    outer = [a for n, a in coeffs.items() if n.sup == N and N > 0]
    if all(module.is_zero(a) for a in outer):
        tail = INF
    else:
        tail = ext_min(module.val(a) for a in outer)
    fn = MahlerFn.from_coeffs(module, coeffs, degree=N, d=oracle.d, tail=tail)
    return MahlerFn(module, fn.d, fn.degree, fn.coeffs, tail, heuristic_tail=True)


def _as_point(x: Sequence[Scalar], p: int) -> Tuple[Optional[Point], List[PadicInt]]:
    ints = [int(v) for v in x if isinstance(v, int)]
    if len(ints) == len(x):
        return tuple(ints), []
    padics = [v if isinstance(v, PadicInt) else PadicInt.of(v, p, settings.PADIC_PRECISION) for v in x]
    return None, padics


def evaluate(f: MahlerFn, x: Sequence[Scalar]) -> Any:
    """Σ a_n binom(x, n); exact at integer points of the stored box."""
    if len(x) != f.d:
        raise ValueError(f"expected a point of dimension {f.d}")
    module = f.module
    point, padics = _as_point(x, f.prime)
    acc = module.zero()
    for n, a in f.stored():
        if point is not None:
            c = binom_int_multi(point, n)
            if c:
                acc = module.add(acc, module.scale(c, a))
        else:
            c = None
            for xi, ni in zip(padics, n):
                term = binom_padic(xi, ni)
                c = term if c is None else c * term
            acc = module.add(acc, module.scale(c, a))
    inside = point is not None and all(0 <= xi <= f.degree for xi in point)
    if inside or f.tail.is_inf:
        return acc
    return module.truncate(acc, f.tail)


def as_oracle(f: MahlerFn, budget: Optional[int] = None) -> FnOracle:
    return FnOracle(
        f.module,
        f.d,
        lambda point: evaluate(f, point),
        settings.ORACLE_BUDGET if budget is None else budget,
        label="mahler",
    )


# -- difference operators ----------------------------------------------------

def delta_multi(f: Union[FnOracle, MahlerFn], n: Sequence[int]) -> Union[FnOracle, MahlerFn]:
    """Δ^n: a coefficient shift on expansions, an alternating sum on oracles."""
    n = MultiIndex(n)
    if isinstance(f, MahlerFn):
        if len(n) != f.d:
            raise ValueError("multi-index dimension mismatch")
        degree = max(f.degree - n.sup, 0)
        coeffs = {}
        dropped = []
        for m, a in f.coeffs.items():
            if m.dominates(n):
                shifted = m.minus(n)
                if shifted.sup <= degree:
                    coeffs[shifted] = a
                else:
                    dropped.append(f.module.val(a))
        tail = ext_min([f.tail] + dropped)
        return MahlerFn(f.module, f.d, degree, coeffs, tail, f.heuristic_tail)
    module = f.module
    terms = []
    for i in MultiIndex.box(f.d, n.sup):
        if n.dominates(i):
            sign = -1 if (n.norm1 - i.norm1) % 2 else 1
            terms.append((i, sign * binom_int_multi(n, i)))

    def fn(point: Point) -> Any:
        acc = module.zero()
        for i, c in terms:
            acc = module.add(acc, module.scale(c, f(tuple(a + b for a, b in zip(point, i)))))
        return acc

    return FnOracle(module, f.d, fn, f.budget, label=f"delta{tuple(n)}({f.label})")


def delta_dir(f: Union[FnOracle, MahlerFn], y: Sequence[Scalar], k: int = 1) -> Union[FnOracle, MahlerFn]:
    """k-fold Δ_y(f)(x) = f(x + y) - f(x)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if isinstance(f, MahlerFn):
        g = f
        for _ in range(k):
            g = subtract(shift(g, y), g)
        return g
    if not all(isinstance(v, int) and v >= 0 for v in y):
        raise DomainError("oracle directions must be non-negative integers", {"y": tuple(y)})
    module = f.module
    terms = [(j, (-1) ** (k - j) * binom_int(k, j)) for j in range(k + 1)]

    def fn(point: Point) -> Any:
        acc = module.zero()
        for j, c in terms:
            acc = module.add(acc, module.scale(c, f(tuple(a + j * b for a, b in zip(point, y)))))
        return acc

    return FnOracle(module, f.d, fn, f.budget, label=f"delta_dir({f.label})")


def add(f: MahlerFn, g: MahlerFn) -> MahlerFn:
    if f.d != g.d:
        raise ValueError("dimension mismatch")
    module = f.module
    degree = max(f.degree, g.degree)
    coeffs = dict(f.coeffs)
    for n, b in g.coeffs.items():
        coeffs[n] = module.add(coeffs[n], b) if n in coeffs else b
    coeffs = {n: a for n, a in coeffs.items() if not _negligible(module, a)}
    return MahlerFn(module, f.d, degree, coeffs, ext_min([f.tail, g.tail]), f.heuristic_tail or g.heuristic_tail)


def scale(c: Scalar, f: MahlerFn) -> MahlerFn:
    module = f.module
    coeffs = {n: module.scale(c, a) for n, a in f.coeffs.items()}
    coeffs = {n: a for n, a in coeffs.items() if not _negligible(module, a)}
    return MahlerFn(module, f.d, f.degree, coeffs, f.tail, f.heuristic_tail)


def subtract(f: MahlerFn, g: MahlerFn) -> MahlerFn:
    return add(f, scale(-1, g))


# -- valuations ----------------------------------------------------------------

def val_op(f: MahlerFn) -> ExtVal:
    """inf_n val(a_n), the sup-norm valuation of f."""
    return ext_min([f.module.val(a) for _, a in f.stored()] + [f.tail])


def val_lambda(f: MahlerFn, lam: Rational) -> ExtVal:
    """inf_n (val(a_n) - floor(p^lam n)).

    A finite tail cannot be controlled against the growing floor term and
    raises TailUnbounded.
    """
    if not f.tail.is_inf:
        raise TailUnbounded(
            "tail bound does not dominate the p^lambda growth",
            {"tail": f.tail, "lambda": lam, "degree": f.degree},
        )
    p = f.prime
    return ext_min(f.module.val(a) - floor_weighted(p, lam, n) for n, a in f.stored())


def growth_level(n: Union[int, Sequence[int]], p: int) -> int:
    """floor(log_p |n|_inf), with the index 0 read as level 0."""
    sup = n if isinstance(n, int) else max(n, default=0)
    return 0 if sup == 0 else log_level(sup, p)


def meets_growth(v: ExtVal, p: int, lam: Rational, k: int, mu: Rational) -> bool:
    """v >= p^lam * p^k + mu, decided exactly."""
    if v.saturated or v.is_inf:
        return True
    return power_ge(p, lam, Fraction(p) ** k, v.value - Fraction(mu))


def check_cond1(f: MahlerFn, lam: Rational, mu: Rational) -> bool:
    """val(a_n) >= p^lam p^floor(log_p |n|_inf) + mu for every stored n."""
    _check_box(f.d, f.degree)
    p = f.prime
    for n, a in f.stored():
        if not meets_growth(f.module.val(a), p, lam, growth_level(n, p), mu):
            return False
    return True


def check_cond2(f: Union[FnOracle, MahlerFn], lam: Rational, mu: Rational, N: Optional[int] = None) -> bool:
    """val^op(Δ_i^n f) >= p^lam p^floor(log_p n) + mu on the grid [0, N]^d."""
    if isinstance(f, MahlerFn):
        N = f.degree if N is None else N
        f = as_oracle(f)
    if N is None:
        raise ValueError("an oracle needs an explicit grid bound N")
    module = f.module
    p = module.prime
    grid = _grid_values(f, N)
    for axis in range(f.d):
        layer = dict(grid)
        for n in range(N + 1):
            if n:
                nxt = {}
                for x, value in layer.items():
                    if x[axis] <= N - n:
                        up = MultiIndex(x[:axis] + (x[axis] + 1,) + x[axis + 1:])
                        nxt[x] = module.sub(layer[up], value)
                layer = nxt
            v = ext_min(module.val(value) for value in layer.values())
            if not meets_growth(v, p, lam, growth_level(n, p), mu):
                return False
    return True


def best_mu(f: MahlerFn, lam: Rational) -> ExtVal:
    """The largest mu with check_cond1(f, lam, mu), rounded down for irrational p^lam."""
    p = f.prime
    candidates = []
    for n, a in f.stored():
        v = f.module.val(a)
        if v.saturated or v.is_inf:
            continue
        candidates.append(v - growth_bound(p, lam, growth_level(n, p)))
    return ext_min(candidates)


# -- shifts, gains and restriction ---------------------------------------------

def _binom_scalar(z: Scalar, k: int, p: int) -> Scalar:
    if isinstance(z, int):
        return binom_int_multi((z,), MultiIndex((k,)))
    return binom_padic(z, k)


def shift(f: MahlerFn, z: Sequence[Scalar]) -> MahlerFn:
    """sh_z(f)(x) = f(x + z) by Vandermonde: a'_j = Σ_{n >= j} a_n binom(z, n - j)."""
    if len(z) != f.d:
        raise ValueError("shift dimension mismatch")
    module = f.module
    p = f.prime
    if all(isinstance(v, int) and v == 0 for v in z):
        return f
    tables = []
    for zi in z:
        tables.append([_binom_scalar(zi, k, p) for k in range(f.degree + 1)])
    coeffs: Dict[MultiIndex, Any] = {}
    for n, a in f.coeffs.items():
        for j in MultiIndex.box(f.d, f.degree):
            if not n.dominates(j):
                continue
            c: Any = 1
            for axis, k in enumerate(n.minus(j)):
                factor = tables[axis][k]
                c = factor * c if isinstance(factor, PadicInt) else c * factor
            if isinstance(c, int) and c == 0:
                continue
            term = module.scale(c, a)
            coeffs[j] = module.add(coeffs[j], term) if j in coeffs else term
    if not f.tail.is_inf:
        coeffs = {j: module.truncate(a, f.tail) for j, a in coeffs.items()}
    coeffs = {j: a for j, a in coeffs.items() if not _negligible(module, a)}
    return MahlerFn(module, f.d, f.degree, coeffs, f.tail, f.heuristic_tail)


def gain_term_exceeds(p: int, lam: Rational, l: int, j: int, c: Rational) -> bool:
    """p^lam j - 1 + val_p(binom(p^l, j)) > c."""
    v = val_p(binom_int(p ** l, j), p)
    if v.is_inf:
        return True
    return not power_ge(p, lam, j, Fraction(c) + 1 - v.value)


def gain_level(p: int, lam: Rational, c: Rational, max_level: int = 64) -> int:
    """Least l >= 0 with inf_{j >= 1}(p^lam j - 1 + val_p(binom(p^l, j))) > c.

    binom(p^l, j) vanishes for j > p^l, so the infimum runs over j <= p^l.
    """
    if Fraction(c) <= 0:
        raise ValueError("c must be positive")
    for l in range(max_level + 1):
        if all(gain_term_exceeds(p, lam, l, j, c) for j in range(1, p ** l + 1)):
            return l
    raise DomainError("no level found below the search limit", {"lambda": lam, "c": c})


def restriction_level(p: int, lam: Rational, lam_prime: Rational) -> Tuple[int, int]:
    """(l, c) with c > p^lam' + 1 and l = gain_level(lam, c)."""
    c = floor_power(p, lam_prime, 1) + 2
    return gain_level(p, lam, c), c


@dataclass(frozen=True, eq=False)
class Restriction:
    fn: MahlerFn
    level: int
    lam: Optional[Fraction] = None
    lam_prime: Optional[Fraction] = None
    mu_prime: Optional[ExtVal] = None


def restrict(f: MahlerFn, l: int, lam: Optional[Rational] = None, lam_prime: Optional[Rational] = None) -> Restriction:
    """g(y) = f(p^l y) on the rescaled coordinate y.

    With ``lam`` and ``lam_prime`` the predicted certificate (lam', mu') of
    the restriction is attached: mu' = val_lam(f) - ceil(p^lam').
    """
    if l < 0:
        raise ValueError("level must be non-negative")
    if l == 0:
        g = f
    else:
        step = f.prime ** l
        module = f.module
        values = {}
        _check_box(f.d, f.degree)
        for y in MultiIndex.box(f.d, f.degree):
            values[y] = evaluate(f, tuple(step * v for v in y))
        coeffs = _difference_transform(module, values, f.d, f.degree)
        if not f.tail.is_inf:
            coeffs = {n: module.truncate(a, f.tail) for n, a in coeffs.items()}
        g = MahlerFn.from_coeffs(module, coeffs, degree=f.degree, d=f.d, tail=f.tail)
    if lam is None or lam_prime is None:
        return Restriction(g, l)
    base = val_lambda(f, lam)
    mu = base if base.is_inf else ExtVal(base.value - growth_bound(f.prime, lam_prime, 0), base.saturated)
    return Restriction(g, l, Fraction(lam), Fraction(lam_prime), mu)


def antidifference(f: MahlerFn, axis: int = 0) -> MahlerFn:
    """F with Δ_axis F = f: b_{n + e_axis} = a_n and b_n = 0 when n_axis = 0."""
    step = MultiIndex.unit(f.d, axis)
    coeffs = {n.plus(step): a for n, a in f.coeffs.items()}
    return MahlerFn(f.module, f.d, f.degree + 1, coeffs, f.tail, f.heuristic_tail)


# -- cofinality ----------------------------------------------------------------

def lambda_from_witness(p: int, d: int, lam: Rational, mu: Rational) -> Tuple[Fraction, Fraction]:
    """(lam', nu) with val_lam'(f) >= nu for any f meeting cond 1 at (lam, mu)."""
    spread = 0 if d == 1 else growth_level(d - 1, p) + 1
    return Fraction(lam) - 1 - spread, Fraction(mu)


def witness_from_lambda(p: int, d: int, lam: Rational, nu: Rational) -> Tuple[Fraction, Fraction]:
    """(lam, mu) meeting cond 1 for any f with val_lam(f) >= nu."""
    return Fraction(lam), Fraction(nu) - d - ceil_power(p, lam, 1)


# -- text format -----------------------------------------------------------------

def to_text(f: MahlerFn) -> str:
    lines = [f"degree: {f.degree}"]
    for n, a in f.stored():
        lines.append(",".join(str(i) for i in n) + ": " + f.module.fmt(a))
    lines.append(f"tail: {f.tail}")
    return "\n".join(lines) + "\n"


def from_text(text: str, module: ValuedModuleHandle, d: Optional[int] = None) -> MahlerFn:
    """Parse ``to_text`` output: "n1,n2: element" lines plus degree and tail lines."""
    degree: Optional[int] = None
    tail = INF
    coeffs: Dict[Tuple[int, ...], Any] = {}
    offset = 0
    for raw in text.splitlines(keepends=True):
        line = raw.strip()
        if line and not line.startswith("#"):
            key, sep, body = line.partition(": ")
            if not sep:
                raise ParseError("expected 'index: element'", offset, line)
            if key == "degree":
                degree = int(body)
            elif key == "tail":
                tail = _parse_tail(body, offset)
            else:
                try:
                    index = tuple(int(part) for part in key.split(","))
                except ValueError as e:
                    raise ParseError(f"bad multi-index {key!r}", offset, line) from e
                coeffs[index] = module.parse(body)
        offset += len(raw)
    if not coeffs and d is None:
        d = 1
    return MahlerFn.from_coeffs(module, coeffs, degree=degree, d=d, tail=tail)


def _parse_tail(body: str, offset: int) -> ExtVal:
    if body == "+inf":
        return INF
    saturated = body.startswith(">=")
    try:
        return ExtVal(Fraction(body[2:] if saturated else body), saturated)
    except ValueError as e:
        raise ParseError(f"bad tail bound {body!r}", offset, body) from e


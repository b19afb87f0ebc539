# padicla/services/group.py
"""
The group side of locally analytic vectors: the subgroups G_l of Z_p^×,
orbit maps in the Mahler basis, witness search and c-smallness.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, List, Optional, Sequence, Tuple, Union

from padicla.config import settings
from padicla.errors import CapExhausted, DomainError
from padicla.logging_config import log_precision_event, log_witness_event
from padicla.mahler import MahlerFn, growth_level
from padicla.modules import SeriesModule, ValuedModuleHandle
from padicla.padic import INF, ExtVal, MultiIndex, PadicInt, Prime, Rational, ext_min, growth_bound, power_ge, val_p
from padicla.schemas import CSmallReport, SharpSmoothRow, WitnessRecord
from padicla.series import PerfLaurent, gamma_act
from padicla.utils import fmt_rational

logger = logging.getLogger(__name__)

Scalar = Union[int, PadicInt]


@dataclass(frozen=True)
class GroupContext:
    """G_l = 1 + p^{l+1} Z_p (1 + 2^{l+2} Z_2 for p = 2) with generator g_l."""

    prime: int
    level: int = 0
    precision: int = field(default_factory=lambda: settings.PADIC_PRECISION)

    def __post_init__(self):
        Prime(self.prime)
        if self.level < 0:
            raise ValueError("level must be non-negative")

    @property
    def min_depth(self) -> int:
        """n(g_l) = val_p(g_l - 1); G_l is the set of a with n(a) >= min_depth."""
        return self.level + (2 if self.prime == 2 else 1)

    @property
    def generator(self) -> PadicInt:
        p = self.prime
        base = 5 if p == 2 else 1 + p
        return PadicInt.of(base, p, self.precision) ** (p ** self.level)

    def chart(self, x: Scalar) -> PadicInt:
        """c(x) = g_l^x.

        For a p-adic x known mod p^k the image is known mod p^{k + n(g_l)}.
        """
        g = self.generator
        if isinstance(x, int):
            return g ** x
        precision = min(self.precision, x.precision + self.min_depth)
        return PadicInt(self.prime, precision, pow(g.residue, x.residue, self.prime ** precision))

    def depth_of(self, a: Scalar) -> ExtVal:
        return depth_of(a, self.prime)

    def contains(self, a: Scalar) -> bool:
        return self.depth_of(a).meets(self.min_depth)


def depth_of(a: Scalar, p: int) -> ExtVal:
    """n(a) = val_p(a - 1)."""
    if isinstance(a, PadicInt):
        return (a - 1).valuation()
    return val_p(a - 1, p)


# -- orbits ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OrbitMahler:
    """The orbit map x -> g_l^x(m) in the Mahler basis: a_n = (g_l - 1)^n(m)."""

    base: Any
    level: int
    generator: PadicInt
    fn: MahlerFn

    @property
    def coefficients(self) -> List[Any]:
        return [self.fn.coefficient((n,)) for n in range(self.fn.degree + 1)]


def orbit_mahler(module: ValuedModuleHandle, m: Any, ctx: GroupContext, N: int) -> OrbitMahler:
    """Iterate a_{n+1} = g(a_n) - a_n from a_0 = m.

    The action is an isometry, so val(a_n) >= val(a_N) for every n > N and the
    tail bound is certified rather than heuristic.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    g = ctx.generator
    coeffs = [m]
    current = m
    for _ in range(N):
        if module.is_zero(current):
            break
        current = module.sub(module.act(g, current), current)
        coeffs.append(current)
    tail = module.val(current)
    fn = MahlerFn.from_coeffs(module, coeffs, degree=N, d=1, tail=tail)
    return OrbitMahler(m, ctx.level, g, fn)


# -- witnesses ---------------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    """A certificate (level, lambda, mu) up to index ``checked_up_to``, or NoWitness.

    ``cap_limited`` marks a search in which some larger radius could be
    neither certified nor refuted at the module's cap.
    """

    found: bool
    checked_up_to: int
    level: Optional[int] = None
    lam: Optional[Fraction] = None
    mu: Optional[ExtVal] = None
    tail: ExtVal = INF
    cap: Optional[Fraction] = None
    cap_limited: bool = False

    def to_record(self) -> WitnessRecord:
        return WitnessRecord(
            found=self.found,
            level=self.level,
            lam=fmt_rational(self.lam),
            mu=fmt_rational(self.mu),
            checked_up_to=self.checked_up_to,
            cap=fmt_rational(self.cap),
            tail=str(self.tail),
            cap_limited=self.cap_limited,
        )


def certify(f: MahlerFn, lam: Rational) -> Optional[ExtVal]:
    """The best mu over 1 <= |n| <= N for ``lam``, or None when lam is refuted.

    Each index contributes val(a_n) - p^lam p^floor(log_p |n|); a margin
    below -WITNESS_SLACK * p^lam refutes lam. Missing indices count at the
    tail when the tail is a cap. A cap value that falls below the floor
    while no resolved value does leaves lam undecided: CapExhausted.
    """
    p = f.prime
    module = f.module
    floor = ExtVal(-settings.WITNESS_SLACK * growth_bound(p, lam, 0))
    resolved: List[ExtVal] = []
    capped: List[ExtVal] = []
    for n in MultiIndex.box(f.d, f.degree):
        if n.sup == 0:
            continue
        a = f.coeffs.get(n)
        v = f.tail if a is None else module.val(a)
        if v.is_inf or (a is None and not v.saturated):
            continue
        margin = ExtVal(v.value - growth_bound(p, lam, growth_level(n, p)), saturated=v.saturated)
        (capped if v.saturated else resolved).append(margin)
    if any(m < floor for m in resolved):
        return None
    if any(m < floor for m in capped):
        raise CapExhausted(
            f"lambda = {fmt_rational(Fraction(lam))} is undecided at the cap",
            {"lam": fmt_rational(Fraction(lam)), "degree": f.degree},
        )
    mu = ext_min(resolved + capped)
    return ExtVal(0) if mu.is_inf else mu


def _cap_of(module: ValuedModuleHandle) -> Optional[Fraction]:
    cap = getattr(module, "cap", None)
    return None if cap is None else Fraction(cap)


def _best_on_grid(orbit: OrbitMahler, grid: Sequence[Fraction]) -> Tuple[Optional[Fraction], Optional[ExtVal], bool]:
    cap_limited = False
    for lam in grid:
        try:
            mu = certify(orbit.fn, lam)
        except CapExhausted as e:
            log_precision_event("certify", e.message, {"level": orbit.level})
            cap_limited = True
            continue
        if mu is not None:
            return lam, mu, cap_limited
    return None, None, cap_limited


def best_lambda_at_level(
    module: ValuedModuleHandle,
    m: Any,
    level: int,
    lambdas: Iterable[Rational],
    N: int,
) -> Witness:
    """Largest lambda on the grid certified at ``level``, with its mu."""
    grid = sorted({Fraction(v) for v in lambdas}, reverse=True)
    cap = _cap_of(module)
    try:
        orbit = orbit_mahler(module, m, GroupContext(module.prime, level), N)
    except CapExhausted as e:
        log_precision_event("best_lambda_at_level", e.message, {"level": level})
        return Witness(False, N, cap=cap, cap_limited=True)
    lam, mu, cap_limited = _best_on_grid(orbit, grid)
    if lam is None:
        return Witness(False, N, tail=orbit.fn.tail, cap=cap, cap_limited=cap_limited)
    return Witness(True, N, level, lam, mu, orbit.fn.tail, cap, cap_limited)


def witness_search(
    module: ValuedModuleHandle,
    m: Any,
    levels: Sequence[int],
    lambdas: Iterable[Rational],
    N: int,
) -> Witness:
    """Smallest level, then largest lambda, then its best mu.

    Levels whose orbit exhausts the cap are skipped, as are radii the cap
    cannot decide; either marks the result ``cap_limited``. NoWitness is a
    value.
    """
    grid = sorted({Fraction(v) for v in lambdas}, reverse=True)
    cap = _cap_of(module)
    cap_limited = False
    for level in sorted(set(levels)):
        try:
            orbit = orbit_mahler(module, m, GroupContext(module.prime, level), N)
        except CapExhausted as e:
            log_precision_event("witness_search", e.message, {"level": level})
            cap_limited = True
            continue
        lam, mu, undecided = _best_on_grid(orbit, grid)
        cap_limited = cap_limited or undecided
        if lam is not None:
            log_witness_event(True, level, lam, mu, N)
            return Witness(True, N, level, lam, mu, orbit.fn.tail, cap, cap_limited)
    log_witness_event(False, None, checked_up_to=N)
    return Witness(False, N, cap=cap, cap_limited=cap_limited)


# -- c-smallness and smoothness ------------------------------------------------------

def c_small_check(
    ctx: GroupContext,
    lam: Rational,
    c: Rational,
    basis: Sequence[Any] = (),
    element: Any = None,
    generator: Optional[Scalar] = None,
    module: Optional[ValuedModuleHandle] = None,
) -> CSmallReport:
    """val((g-1) varpi) > c, val((g-1) m_i) >= c and lambda > log_p(c+1).

    ``element`` is the pseudouniformizer (X by default); ``generator``
    replaces g_l, e.g. by 1 for the identity sanity check. A value that is
    only a cap-limited lower bound counts at its cap value.
    """
    p = ctx.prime
    lam, c = Fraction(lam), Fraction(c)
    module = module or SeriesModule(p)
    g = ctx.generator if generator is None else generator
    varpi = PerfLaurent.X(p) if element is None else element

    def gain(x: Any) -> ExtVal:
        return module.val(module.sub(module.act(g, x), x))

    def above(v: ExtVal, strict: bool) -> bool:
        if v.is_inf:
            return True
        return v.value > c if strict else v.value >= c

    varpi_val = gain(varpi)
    basis_vals = [gain(b) for b in basis]
    gain_ok = above(varpi_val, strict=True)
    basis_ok = all(above(v, strict=False) for v in basis_vals)
    lambda_ok = not power_ge(p, lam, 1, c + 1)
    return CSmallReport(
        c=fmt_rational(c),
        level=ctx.level,
        lam=fmt_rational(lam),
        generator=str(g),
        varpi_val=str(varpi_val),
        basis_vals=[str(v) for v in basis_vals],
        gain_ok=gain_ok,
        basis_ok=basis_ok,
        lambda_ok=lambda_ok,
        c_small=gain_ok and basis_ok and lambda_ok,
    )


def sharp_smooth_check(p: int, J: int, m: int, a: Optional[Scalar] = None, cap: Optional[Rational] = None) -> List[SharpSmoothRow]:
    """Measure val(a.X^{1/p^j} - X^{1/p^j}) against p^{m-j} for j = 0..J.

    ``a`` defaults to 1 + p^m (5 for p = 2, m = 2 and so on). The bound is
    met with equality when n(a) = m exactly.
    """
    if a is None:
        a = 1 + p ** m
    n_a = depth_of(a, p)
    if not n_a.meets(m):
        raise DomainError(f"a must lie in 1 + {p}^{m} Z_{p}", {"a": a, "m": m})
    cap = Fraction(settings.DEFAULT_CAP if cap is None else cap)
    rows = []
    for j in range(J + 1):
        x = PerfLaurent.monomial(p, Fraction(1, p ** j))
        if n_a.is_inf:
            measured = INF
        else:
            measured = (gamma_act(a, x, cap) - x).val
        bound = Fraction(p) ** (m - j)
        rows.append(
            SharpSmoothRow(
                j=j,
                m=m,
                a=str(a),
                measured=str(measured),
                bound=fmt_rational(bound),
                holds=measured.meets(bound),
                exact=not measured.is_inf and not measured.saturated and measured.value == bound,
            )
        )
    return rows

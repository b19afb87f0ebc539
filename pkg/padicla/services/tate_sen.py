# padicla/services/tate_sen.py
"""
The Tate-Sen conditions for the cyclotomic tower over Q_p, measured on
concrete elements: the almost-trace element, the projections R_n, the
inversion of gamma - 1 on their complements and the gain of a - 1 on
phi^{-n}(T^k).
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple, Union

from padicla.config import settings
from padicla.errors import DomainError, SolveStalled, Unsupported
from padicla.logging_config import log_solver_event
from padicla.padic import ExtVal, PadicInt, Rational, binom_padic, ext_min
from padicla.schemas import ProjectionRecord
from padicla.series import (
    PerfLaurent,
    binomial_series_1plusX,
    gamma_act,
    monomial_projection,
    trace_projection,
    y_components,
    y_power,
)
from padicla.services.group import depth_of
from padicla.utils import fmt_rational
from padicla.witt import (
    WittElem,
    element_T,
    gamma_act_witt,
    phi_inverse,
    val_r,
    witt_add,
    witt_from_int,
    witt_invert,
    witt_mul,
    witt_pow,
    witt_scalar,
    witt_sub,
)

logger = logging.getLogger(__name__)

Scalar = Union[int, PadicInt]
Projection = Literal["trace", "monomial"]

# TS1 holds with the trivial element for trivial H, so c_1 can be taken as 0.
TS1_CONSTANT = Fraction(0)


def ts1_witness(p: int, h1_order: int = 1, h2_order: int = 1) -> PerfLaurent:
    """alpha with Σ_{τ in H_1/H_2} τ(alpha) = 1; only trivial H is handled."""
    if h1_order != 1 or h2_order != 1:
        raise Unsupported(
            "almost-trace elements are only built for trivial H",
            {"h1_order": h1_order, "h2_order": h2_order},
        )
    return PerfLaurent.one(p)


# -- projections R_n -----------------------------------------------------------------

PROJECTIONS: Dict[str, Callable[[int, PerfLaurent], PerfLaurent]] = {
    "monomial": monomial_projection,
    "trace": trace_projection,
}


def projection_loss(kind: str, n: int, x: PerfLaurent) -> Optional[Fraction]:
    """val(x) - val(R_n(x)); None when either side carries no term."""
    image = PROJECTIONS[kind](n, x)
    vx, vr = x.val, image.val
    if vx.is_inf or vx.saturated or vr.is_inf or vr.saturated:
        return None
    return vx.value - vr.value


def equivariance_defect(kind: str, n: int, x: PerfLaurent, a: Scalar, cap: Rational) -> ExtVal:
    """val(R_n(a.x) - a.R_n(x)); +inf (or saturated) for an equivariant R_n."""
    project = PROJECTIONS[kind]
    return (project(n, gamma_act(a, x, cap)) - gamma_act(a, project(n, x), cap)).val


def measure_projection(kind: str, n: int, samples: Sequence[PerfLaurent], a: Scalar, cap: Rational) -> ProjectionRecord:
    project = PROJECTIONS[kind]
    losses = [loss for loss in (projection_loss(kind, n, x) for x in samples) if loss is not None]
    c2 = max([Fraction(0)] + losses)
    defect = ext_min(equivariance_defect(kind, n, x, a, cap) for x in samples)
    idempotent = all(project(n, project(n, x)).agrees_with(project(n, x)) for x in samples)
    return ProjectionRecord(
        kind=kind,
        n=n,
        c2=fmt_rational(c2),
        equivariance_defect=str(defect),
        idempotent=idempotent,
        samples=len(samples),
    )


# -- (gamma - 1)^{-1} on X_n -------------------------------------------------------------

@dataclass(frozen=True)
class TS3Solution:
    y: PerfLaurent
    residual: ExtVal
    loss: Optional[Fraction]
    steps: int
    projection: str
    status: str = "ok"


def _as_padic(a: Scalar, p: int) -> PadicInt:
    if isinstance(a, PadicInt):
        return a
    return PadicInt.of(a, p, settings.PADIC_PRECISION)


def _loss(x: PerfLaurent, y: PerfLaurent) -> Optional[Fraction]:
    vx, vy = x.val, y.val
    if vx.is_inf or vy.is_inf or vx.saturated or vy.saturated:
        return None
    return vx.value - vy.value


def ts3_invert(
    x: PerfLaurent,
    a: Scalar,
    n: int,
    cap: Optional[Rational] = None,
    projection: Projection = "trace",
) -> TS3Solution:
    """y with a.y - y = x up to cap, for x in the complement of R_n.

    ``projection`` picks the complement: the kernel of the normalized trace
    (block solve in the Y-decomposition) or of the monomial projection
    (exponent-ascending triangular solve).
    """
    p = x.prime
    a = _as_padic(a, p)
    n_a = depth_of(a, p)
    if n_a.is_inf or n_a.saturated:
        raise DomainError("gamma - 1 is zero for a = 1", {"a": a})
    if n_a.value > n:
        raise DomainError(f"n(a) = {n_a} exceeds n = {n}", {"a": a, "n": n})
    if x.is_exact:
        x = x.truncate(settings.DEFAULT_CAP if cap is None else cap)
    elif cap is not None:
        x = x.truncate(cap)
    if projection == "trace":
        if trace_projection(n, x).terms:
            raise DomainError("x has a nonzero trace component", {"n": n})
        solve = _solve_trace
    elif projection == "monomial":
        if monomial_projection(n, x).terms:
            raise DomainError("x has a nonzero monomial component", {"n": n})
        solve = _solve_monomial
    else:
        raise ValueError(f"unknown projection {projection!r}")
    if not x.terms:
        return TS3Solution(PerfLaurent.zero(p, x.cap), x.val, None, 0, projection)
    try:
        y, steps = solve(x, a, n, int(n_a.value))
    except SolveStalled as e:
        log_solver_event(f"ts3_{projection}", int(e.details.get("steps", 0)), None, status="stalled")
        raise
    residual = (gamma_act(a, y) - y - x).val
    loss = _loss(x, y)
    log_solver_event(f"ts3_{projection}", steps, loss)
    return TS3Solution(y, residual, loss, steps, projection)


def _lift_order(a: PadicInt, target: int) -> Tuple[int, PadicInt]:
    """Least L = p^t with val_p(a^L - 1) >= target, and a^L."""
    p = a.prime
    L, power = 1, a
    while not (power - 1).valuation().meets(target):
        L *= p
        power = power ** p
    return L, power


def _solve_block(G: PerfLaurent, q: PadicInt, aL: PadicInt, max_steps: int) -> Tuple[PerfLaurent, int]:
    """F in F_p((X)) with (1+X)^q aL.F - F = G, q a p-adic integer.

    With q = p^v u, the operator sends X^k to u X^{k + p^v} plus higher terms.
    """
    p = G.prime
    C = G.cap.value
    v = q.valuation()
    if v.saturated:
        raise SolveStalled("block exponent vanishes at the working precision", {"q": q})
    e = p ** int(v.value)
    u = (q.residue // e) % p
    u_inv = pow(u, -1, p)
    R = G
    F: Dict[int, int] = {}
    steps = 0
    while R.terms:
        if steps >= max_steps:
            raise SolveStalled("block solve did not close at cap", {"steps": steps, "cap": C})
        E, c = R.leading()
        k = int(E) - e
        coeff = c * u_inv % p
        mono = PerfLaurent.monomial(p, k, coeff)
        image = binomial_series_1plusX(q, C - k) * gamma_act(aL, mono, C) - mono
        R = R - image.truncate(C)
        F[k] = (F.get(k, 0) + coeff) % p
        steps += 1
    return PerfLaurent.build(p, 0, F, C - e), steps


def _val_index(j: int, p: int, m: int) -> int:
    """val_p(j) capped at m, so that j = 0 lands in the top class."""
    if j == 0:
        return m
    v = 0
    while j % p == 0:
        j //= p
        v += 1
    return min(v, m)


def _solve_trace(x: PerfLaurent, a: PadicInt, n: int, s: int) -> Tuple[PerfLaurent, int]:
    """Block solve: gamma^L preserves each class v = val_p(j) of Y-components.

    On the component j it acts as F -> (1+X)^{q_j} gamma^L(F) with
    q_j = (a^L - 1) j / p^m, so (gamma^L - 1) z = x is solved block by block
    and y = Σ_{i<L} gamma^i(z).
    """
    p = x.prime
    m, comps = y_components(x, x.depth)
    classes: Dict[int, List[int]] = {}
    for j, comp in comps.items():
        if comp.terms:
            classes.setdefault(_val_index(j, p, m), []).append(j)
    y = PerfLaurent.zero(p)
    steps = 0
    budget = settings.SOLVE_MAX_STEPS
    for v in sorted(classes):
        L, aL = _lift_order(a, m - v)
        z = PerfLaurent.zero(p)
        for j in sorted(classes[v]):
            q = ((aL - 1) * j).divide_by_p_power(m)
            F, used = _solve_block(comps[j], q, aL, budget - steps)
            steps += used
            z = z + y_power(p, m, j) * F
        # (gamma - 1)(Σ_{i<L} gamma^i z) = (gamma^L - 1) z
        orbit = z
        block = z
        for _ in range(L - 1):
            orbit = gamma_act(a, orbit)
            block = block + orbit
        y = y + block
        logger.debug("trace class v=%s solved with L=%s", v, L)
    return y, steps


def _pivot(E: Fraction, p: int, s: int, lowest: int) -> Tuple[int, int]:
    """(k, depth) with (k + p^s - 1)/p^depth = E, p not dividing k and depth >= ``lowest``.

    One level deeper than the first admissible depth k is 1 mod p, so the search
    ends there.
    """
    depth = lowest
    while E.denominator > p ** depth:
        depth += 1
    k = int(E * p ** depth) - p ** s + 1
    if k % p:
        return k, depth
    return int(E * p ** (depth + 1)) - p ** s + 1, depth + 1


def _solve_monomial(x: PerfLaurent, a: PadicInt, n: int, s: int) -> Tuple[PerfLaurent, int]:
    """Match the lowest term of the remainder with the lowest term of (gamma - 1)X^{k/p^d}.

    (gamma - 1) X^{k/p^d} = k u X^{(k + p^s - 1)/p^d} + higher, u = (a - 1)/p^s mod p.
    Pivots stay at the depth of x when they can, so a preimage inside
    F_p((X^{1/p^depth(x)})) is found exactly.
    """
    p = x.prime
    C = x.cap.value
    u = (a - 1).divide_by_p_power(s).residue % p
    start_depth = x.depth
    R = x
    y = PerfLaurent.zero(p)
    steps = 0
    widest = Fraction(0)
    while R.terms:
        if steps >= settings.SOLVE_MAX_STEPS:
            raise SolveStalled("monomial solve did not close at cap", {"steps": steps, "cap": C})
        E, c = R.leading()
        k, depth = _pivot(E, p, s, start_depth)
        if depth > start_depth + settings.SOLVE_EXTRA_DEPTH:
            raise SolveStalled("pivot depth beyond the solve budget", {"exponent": E, "steps": steps, "depth": depth})
        coeff = c * pow(k * u % p, -1, p) % p
        mono = PerfLaurent.monomial(p, Fraction(k, p ** depth), coeff)
        image = gamma_act(a, mono, C) - mono
        if not image.terms or image.leading()[0] != E:
            raise SolveStalled("pivot vanishes at cap", {"exponent": E, "steps": steps, "cap": C})
        R = R - image
        y = y + mono
        widest = max(widest, E - Fraction(k, p ** depth))
        steps += 1
    return y.truncate(C - widest), steps


# -- gain of a - 1 on phi^{-n}(T^k) ------------------------------------------------------

@dataclass(frozen=True)
class TS4Check:
    lhs: WittElem
    rhs: WittElem
    compared_to: Fraction
    identity_holds: bool
    base_val: ExtVal
    lhs_val: ExtVal
    gain_bound: ExtVal
    gain_ok: bool

    @property
    def gain(self) -> Optional[Fraction]:
        if self.lhs_val.is_inf or self.base_val.is_inf:
            return None
        return self.lhs_val.value - self.base_val.value


def _phi_inverse_n(u: WittElem, n: int) -> WittElem:
    for _ in range(n):
        u = phi_inverse(u)
    return u


def _T_power(T: WittElem, k: int, cap: Rational) -> WittElem:
    if k >= 0:
        return witt_pow(T, k)
    return witt_pow(witt_invert(T, cap), -k)


def ts4_check(
    a: Scalar,
    n: int,
    k: int,
    length: int,
    p: Optional[int] = None,
    cap: Optional[Rational] = None,
    r: Optional[Rational] = None,
) -> TS4Check:
    """Compare (a - 1)(phi^{-n}(T^k)) with phi^{-n}(T^k) phi^{-n}(W^k - 1).

    W = a + Σ_{m >= 1} binom(a, m+1) T^m is the quotient ((1+T)^a - 1)/T,
    summed while phi^{-n}(T^{k+m}) can still be seen below the cap.
    """
    if p is None:
        if not isinstance(a, PadicInt):
            raise ValueError("a prime is required for integer a")
        p = a.prime
    a = _as_padic(a, p)
    if (a - 1).residue % p:
        raise DomainError("a must be congruent to 1 mod p", {"a": a})
    cap = Fraction(settings.DEFAULT_CAP if cap is None else cap)
    r = Fraction(settings.DEFAULT_WITT_R if r is None else r)
    # every Witt coordinate of T^m has X-adic valuation >= m
    M = max(1, math.ceil(cap * p ** n) - k)
    compared_to = min(cap, Fraction(M + 1 + k, p ** n))
    work_cap = M + 1 + abs(k)
    T = element_T(p, length, work_cap)
    Tk = _T_power(T, k, work_cap)
    base = _phi_inverse_n(Tk, n)
    lhs = witt_sub(gamma_act_witt(a, base, cap), base)

    W = witt_from_int(a.residue, p, length)
    power = T
    for m in range(1, M + 1):
        W = witt_add(W, witt_scalar(binom_padic(a, m + 1), power))
        power = witt_mul(power, T)
    Wk = _T_power(W, k, work_cap)
    rhs = witt_mul(base, _phi_inverse_n(witt_sub(Wk, witt_from_int(1, p, length)), n))

    base_val = val_r(base, r)
    lhs_val = val_r(lhs, r)
    t_val = val_r(_phi_inverse_n(T, n), r)
    if length == 1:
        step = t_val
    else:
        step = min(ExtVal(1 / r), t_val)
    gain_bound = base_val + step
    gain_ok = gain_bound.is_inf or lhs_val.meets(gain_bound.value)
    holds = lhs.agrees_with(rhs, compared_to)
    return TS4Check(lhs, rhs, compared_to, holds, base_val, lhs_val, gain_bound, gain_ok)

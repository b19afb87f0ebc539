# padicla/services/coboundary.py
"""
Degree-one coboundaries for Γ = Z_p: given f(x) = Σ m_n binom(x, n) with
values in a Γ-module, build F(x) = Σ_k (-1)^k Σ_n (γ-1)^k γ^{-k}(m'_n) binom(x, n+k+1)
with m'_n = γ^{-1}(m_n), so that γ(F(x+1)) - F(x) = f(x) up to the dropped
terms k > K.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional

from padicla.config import settings
from padicla.errors import GainTooSmall
from padicla.logging_config import log_solver_event
from padicla.mahler import MahlerFn
from padicla.padic import INF, ExtVal, Rational, ceil_power, ext_min, floor_power, power_ge
from padicla.services.group import GroupContext

logger = logging.getLogger(__name__)


Verdict = Literal["met", "missed", "unverified"]


@dataclass(frozen=True, eq=False)
class CoboundarySolution:
    fn: MahlerFn
    terms: int
    gain: ExtVal
    lam_prime: Fraction
    predicted: ExtVal
    residual: ExtVal

    @property
    def verdict(self) -> Verdict:
        """``unverified`` when the residual is only a cap bound below the prediction."""
        r, bound = self.residual, self.predicted
        if r.is_inf:
            return "met"
        if not bound.is_inf and r.value >= bound.value:
            return "met"
        return "unverified" if r.saturated else "missed"

    @property
    def meets(self) -> bool:
        return self.verdict == "met"

    def deciding_cap(self) -> Optional[int]:
        """Smallest cap at which residual terms known only to the cap clear the prediction."""
        if self.predicted.is_inf:
            return None
        p = self.fn.prime
        return math.ceil(self.predicted.value) + floor_power(p, self.lam_prime, self.fn.degree) + 1

    @property
    def constant(self) -> Optional[Fraction]:
        """residual - predicted, the measured O(1) of the estimate."""
        if self.residual.is_inf or self.predicted.is_inf:
            return None
        return self.residual.value - self.predicted.value


def _chains(f: MahlerFn, g_inv: Any, terms: int) -> Dict[int, List[Any]]:
    """c_{n,k} = (γ-1)^k γ^{-k}(γ^{-1} m_n) for k <= terms + 1, via c_{k+1} = c_k - γ^{-1} c_k."""
    module = f.module
    chains: Dict[int, List[Any]] = {}
    for (n,), m in f.stored():
        c = module.act(g_inv, m)
        chain = [c]
        for _ in range(terms + 1):
            c = module.sub(c, module.act(g_inv, c))
            chain.append(c)
        chains[n] = chain
    return chains


def measured_gain(f: MahlerFn, chains: Dict[int, List[Any]]) -> ExtVal:
    """Smallest val(c_{n,k+1}) - val(c_{n,k}) over pairs measured below the cap."""
    module = f.module
    gains = []
    for chain in chains.values():
        for before, after in zip(chain, chain[1:]):
            vb, va = module.val(before), module.val(after)
            if vb.is_inf or vb.saturated or va.is_inf or va.saturated:
                continue
            gains.append(va.value - vb.value)
    return ext_min(gains)


def predicted_residual(f: MahlerFn, gain: ExtVal, lam_prime: Rational, terms: int) -> ExtVal:
    """(K+1)s - ceil(p^lam' (K+1)) + min_n(val(m_n) - floor(p^lam' n))."""
    p = f.prime
    offsets = []
    for (n,), m in f.stored():
        v = f.module.val(m)
        if v.is_inf:
            continue
        offsets.append(ExtVal(v.value - floor_power(p, lam_prime, n), v.saturated))
    base = ext_min(offsets)
    if gain.is_inf or base.is_inf:
        return INF
    return ExtVal((terms + 1) * gain.value - ceil_power(p, lam_prime, terms + 1) + base.value, base.saturated)


def coboundary_solve(
    f: MahlerFn,
    ctx: GroupContext,
    lam_prime: Rational,
    terms: Optional[int] = None,
) -> CoboundarySolution:
    """F with γ(F(x+1)) - F(x) = f(x) up to the truncation at K = ``terms``.

    Raises GainTooSmall unless the measured gain s exceeds p^lam'.
    """
    if f.d != 1:
        raise ValueError("coboundaries are solved for one-variable functions")
    module = f.module
    p = f.prime
    lam_prime = Fraction(lam_prime)
    K = settings.COBOUNDARY_TERMS if terms is None else terms
    g = ctx.generator
    g_inv = g.inverse()
    chains = _chains(f, g_inv, K)
    gain = measured_gain(f, chains)
    if not gain.is_inf and not power_ge(p, lam_prime, 1, gain.value, strict=True):
        log_solver_event("coboundary", 0, None, status="gain_too_small")
        raise GainTooSmall(
            f"measured gain {gain} does not exceed p^{lam_prime}",
            {"gain": gain, "lambda_prime": lam_prime},
        )

    coeffs: Dict[int, Any] = {}
    for n, chain in chains.items():
        for k in range(K + 1):
            term = chain[k] if k % 2 == 0 else module.neg(chain[k])
            j = n + k + 1
            coeffs[j] = module.add(coeffs[j], term) if j in coeffs else term
    degree = f.degree + K + 1
    F = MahlerFn.from_coeffs(module, {(j,): b for j, b in coeffs.items()}, degree=degree, d=1)

    residual = residual_valuation(F, f, g, lam_prime)
    predicted = predicted_residual(f, gain, lam_prime, K)
    solution = CoboundarySolution(F, K, gain, lam_prime, predicted, residual)
    log_solver_event("coboundary", K, solution.constant)
    return solution


def residual_terms(F: MahlerFn, f: MahlerFn, g: Any) -> Dict[int, Any]:
    """r_j = γ(b_j + b_{j+1}) - b_j - f_j for 0 <= j <= deg F."""
    module = F.module
    out = {}
    for j in range(F.degree + 1):
        b_j = F.coefficient((j,))
        b_next = F.coefficient((j + 1,)) if j < F.degree else module.zero()
        f_j = f.coefficient((j,)) if j <= f.degree else module.zero()
        out[j] = module.sub(module.sub(module.act(g, module.add(b_j, b_next)), b_j), f_j)
    return out


def residual_valuation(F: MahlerFn, f: MahlerFn, g: Any, lam_prime: Rational) -> ExtVal:
    """min_j(val(r_j) - floor(p^lam' j)), the val_lam' of (γ-1)F - f."""
    p = F.prime
    values = []
    for j, r in residual_terms(F, f, g).items():
        v = F.module.val(r)
        if v.is_inf:
            continue
        values.append(ExtVal(v.value - floor_power(p, lam_prime, j), v.saturated))
    return ext_min(values)

# padicla/services/experiments.py
"""
Named experiments. Each one is a pure function of a RunConfig: every random
draw comes from ``random.Random(config.seed)``, samples run in a fixed order
and the report is assembled in one place, so equal configs give byte-equal
reports.
"""

import logging
import math
import random
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from padicla.config import RunConfig
from padicla.errors import CapExhausted, GainTooSmall, SolveStalled
from padicla.logging_config import log_experiment_event
from padicla.mahler import MahlerFn
from padicla.modules import SeriesModule, WittModule
from padicla.schemas import CoboundaryRecord, ExperimentReport, TS3Record, TS4Record
from padicla.series import PerfLaurent, monomial_projection, trace_projection
from padicla.services.coboundary import CoboundarySolution, coboundary_solve
from padicla.services.group import GroupContext, Witness, best_lambda_at_level, certify, orbit_mahler, witness_search
from padicla.services.sampling import deep_element, random_series, random_unit, random_witt
from padicla.services.tate_sen import TS1_CONSTANT, measure_projection, ts1_witness, ts3_invert, ts4_check
from padicla.utils import SCHEMA_TAG, dumps_csv, dumps_json, fmt_rational, write_text
from padicla.witt import WittElem, element_T, phi_inverse, reduce, teichmuller, witt_add, witt_mul, witt_scalar

logger = logging.getLogger(__name__)

# Caps used where the configured cap would make Witt computations slow
WITT_CAP = 12
TATESEN_CAP = 8
TS4_CAP = 4
COBOUNDARY_CAP = 32


def _witness_row(label: str, w: Witness, **extra: Any) -> Dict[str, Any]:
    record = w.to_record().model_dump()
    return {"element": label, **extra, **record}


def _report(
    name: str,
    config: RunConfig,
    checks: Dict[str, bool],
    tables: Dict[str, List[Dict[str, Any]]],
    primary: str,
    summary: Optional[Dict[str, Any]] = None,
) -> ExperimentReport:
    failures = sorted(key for key, ok in checks.items() if not ok)
    for key in failures:
        log_experiment_event(name, "property_failed", {"property": key}, severity="warning")
    return ExperimentReport(
        schema_tag=SCHEMA_TAG,
        experiment=name,
        config=config.describe(),
        fingerprint=config.fingerprint(),
        passed=not failures,
        failures=failures,
        summary=summary or {},
        tables=tables,
        primary_table=primary,
    )


def _strictly_decreasing(values: List[Optional[Fraction]]) -> bool:
    known = [v for v in values if v is not None]
    return len(known) == len(values) and all(a > b for a, b in zip(known, known[1:]))


def separating_degree(p: int) -> int:
    """Least N at which an orbit with val(a_n) = n p^e refutes lambda = e + 1."""
    return 4 if p == 2 else p


def counterexample_degree(p: int) -> int:
    return 16 if p == 2 else p ** 2


def resolving_cap(slope: Fraction, N: int) -> int:
    """A cap above slope * N, so orbit coefficients with val(a_n) = slope * n stay resolved up to N."""
    return math.floor(Fraction(slope) * N) + 1


def _certified_lam(w: Witness) -> Optional[Fraction]:
    return w.lam if w.found and not w.cap_limited else None


# -- decompletion -----------------------------------------------------------------------

def deep_family(p: int) -> List[Tuple[int, int]]:
    """(coefficient, numerator) pairs of three independent deep elements, all prime to p."""
    return [(1, 1), (1, p + 1), (p - 1, 2 * p + 1)]


def decompletion_experiment(config: RunConfig) -> ExperimentReport:
    """X^{1/p^m} is certified first at level m with lambda = n(g_0), random
    elements of F_p[X^{1/p^m}] by level m + 1, and truncations of a deep
    element lose one unit of lambda per layer."""
    p = config.prime
    rng = random.Random(config.seed)
    floor_lam = GroupContext(p, 0).min_depth
    grid = [lam for lam in config.lambdas if lam >= floor_lam]
    N = min(config.degree, separating_degree(p))
    module = SeriesModule(p, max(config.cap, resolving_cap(Fraction(p ** floor_lam), N)))
    rows = []
    for m in range(4):
        label = "X" if m == 0 else f"X^(1/{p ** m})"
        x = PerfLaurent.monomial(p, Fraction(1, p ** m))
        w = witness_search(module, x, list(range(m + 2)), grid, N)
        rows.append(_witness_row(label, w, m=m, ladder=True))
    for m in range(4):
        for i in range(config.samples):
            x = random_series(rng, p, m, module.cap)
            w = witness_search(module, x, list(range(m + 2)), grid, N)
            rows.append(_witness_row(f"random[{m}.{i}]", w, m=m, ladder=False))

    level = config.levels[0]
    depth = GroupContext(p, level).min_depth
    deep_rows = []
    curves_ok = True
    for coefficient, numerator in deep_family(p):
        curve = []
        for J in (1, 2, 3):
            deep_module = SeriesModule(p, resolving_cap(Fraction(p) ** (depth - J), N))
            x = deep_element(p, J, coefficient, numerator)
            best = best_lambda_at_level(deep_module, x, level, config.lambdas, N)
            curve.append(_certified_lam(best))
            deep_rows.append({
                "coefficient": coefficient,
                "numerator": numerator,
                "J": J,
                "level": level,
                "lam": fmt_rational(best.lam),
                "mu": fmt_rational(best.mu),
                "cap_limited": best.cap_limited,
                "checked_up_to": N,
                "cap": fmt_rational(deep_module.cap),
            })
        curves_ok = curves_ok and _strictly_decreasing(curve)

    floor_text = fmt_rational(Fraction(floor_lam))
    ladder = [row for row in rows if row["ladder"]]
    checks = {
        "witness_found": all(row["found"] for row in rows),
        "level_bound": all(row["found"] and row["level"] <= row["m"] + 1 for row in rows),
        "ladder": all(row["found"] and row["level"] == row["m"] and row["lam"] == floor_text for row in ladder),
        "degradation": curves_ok,
    }
    summary = {"lambda_floor": floor_text, "checked_up_to": N, "cap": fmt_rational(module.cap)}
    return _report("decompletion", config, checks, {"witnesses": rows, "degradation": deep_rows}, "witnesses", summary)


# -- Witt vectors ---------------------------------------------------------------------------

def witt_la_experiment(config: RunConfig) -> ExperimentReport:
    p = config.prime
    N = min(config.degree, separating_degree(p))
    rng = random.Random(config.seed)
    cap = min(config.cap, WITT_CAP)
    rows = []
    named_module = WittModule(p, 2, config.r, cap)
    T = element_T(p, 2)
    named = [
        ("T", 0, T),
        ("phiinv(T) + p*T", 1, witt_add(phi_inverse(T), witt_scalar(p, T))),
        ("[X]*(1+T)", 0, witt_mul(teichmuller(PerfLaurent.X(p), 2), teichmuller(PerfLaurent.one(p) + PerfLaurent.X(p), 2))),
    ]
    for label, m, u in named:
        w = witness_search(named_module, u, config.levels, config.lambdas, N)
        rows.append(_witness_row(label, w, m=m, n=2))
    for n in range(1, min(config.witt_length, 3) + 1):
        module = WittModule(p, n, config.r, cap)
        for m in range(3):
            for i in range(config.samples):
                u = random_witt(rng, p, n, m, cap)
                w = witness_search(module, u, config.levels, config.lambdas, N)
                rows.append(_witness_row(f"random[{m}.{n}.{i}]", w, m=m, n=n))
    checks = {"witness_found": all(row["found"] for row in rows)}
    return _report("witt-la", config, checks, {"witnesses": rows}, "witnesses")


# -- la versus pa -------------------------------------------------------------------------------

def counterexample_element(p: int, n: int) -> WittElem:
    """Σ_{i<n} p^i φ^{-i}(1+T); its i-th Witt coordinate is 1 + X."""
    one_plus_x = PerfLaurent.one(p) + PerfLaurent.X(p)
    return WittElem(p, tuple(one_plus_x for _ in range(n)))


def _reduction_consistent(s_n: WittElem, w: Witness, module: WittModule, N: int) -> bool:
    """The image of s_n in W_{n-1} certifies the same (level, lambda) with mu at least as large."""
    lower = WittModule(module.prime, s_n.length - 1, module.r, module.cap)
    try:
        orbit = orbit_mahler(lower, reduce(s_n, s_n.length - 1), GroupContext(module.prime, w.level), N)
        mu = certify(orbit.fn, w.lam)
    except CapExhausted:
        return False
    return mu is not None and mu >= w.mu


def counterexample_experiment(config: RunConfig) -> ExperimentReport:
    """s_n is locally analytic for every n, but its best lambda at a fixed level drops with n."""
    p = config.prime
    fixed_level = config.levels[0]
    depth = GroupContext(p, fixed_level).min_depth
    N = min(config.degree, counterexample_degree(p))
    cap = max(config.cap, p ** depth * N + 1)
    rows = []
    level_rows = []
    witnesses: Dict[int, Witness] = {}
    curve: List[Optional[Fraction]] = []
    consistent = True
    for n in range(1, 4):
        module = WittModule(p, n, config.r, cap)
        s_n = counterexample_element(p, n)
        w = witness_search(module, s_n, config.levels, config.lambdas, N)
        witnesses[n] = w
        best = best_lambda_at_level(module, s_n, fixed_level, config.lambdas, N)
        lam = _certified_lam(best)
        for level in config.levels:
            at_level = best if level == fixed_level else best_lambda_at_level(module, s_n, level, config.lambdas, N)
            level_rows.append({
                "n": n,
                "level": level,
                "lam": fmt_rational(at_level.lam),
                "mu": fmt_rational(at_level.mu),
                "cap_limited": at_level.cap_limited,
            })
        reduced_ok = True
        if n > 1 and w.found:
            reduced_ok = _reduction_consistent(s_n, w, module, N)
        consistent = consistent and reduced_ok
        rows.append(_witness_row(
            f"s_{n}",
            w,
            n=n,
            fixed_level=fixed_level,
            lam_at_fixed_level=fmt_rational(lam),
            decreasing=None if not curve or curve[-1] is None or lam is None else lam < curve[-1],
            reduction_consistent=reduced_ok,
        ))
        curve.append(lam)
    checks = {
        "witness_found": all(w.found for w in witnesses.values()),
        "decreasing": _strictly_decreasing(curve),
        "reduction_consistent": consistent,
    }
    summary = {"checked_up_to": N, "cap": fmt_rational(Fraction(cap)), "fixed_level": fixed_level}
    return _report("counterexample", config, checks, {"radii": rows, "levels": level_rows}, "radii", summary)


# -- Tate-Sen --------------------------------------------------------------------------------------

def _unit_depth(p: int) -> int:
    return 2 if p == 2 else 1


def tatesen_experiment(config: RunConfig) -> ExperimentReport:
    p = config.prime
    rng = random.Random(config.seed)
    cap = min(config.cap, TATESEN_CAP)
    n = 1
    alpha = ts1_witness(p)

    samples = [random_series(rng, p, n + 1, cap, low=0, high=3) for _ in range(config.samples)]
    a = random_unit(rng, p, _unit_depth(p))
    projections = [measure_projection(kind, n, samples, a, cap) for kind in ("monomial", "trace")]

    ts3_rows = []
    for i in range(config.samples):
        x = random_series(rng, p, n + 1, cap, low=1, high=3)
        a = random_unit(rng, p, 1)
        for kind, project in (("trace", trace_projection), ("monomial", monomial_projection)):
            target = x - project(n, x)
            try:
                solution = ts3_invert(target, a, n, cap, projection=kind)
                status, steps = "ok", solution.steps
                val_y, loss, residual = str(solution.y.val), fmt_rational(solution.loss), str(solution.residual)
            except SolveStalled as e:
                status, steps = "stalled", int(e.details.get("steps", 0))
                val_y, loss, residual = "", None, ""
            ts3_rows.append(TS3Record(
                sample=i,
                projection=kind,
                n=n,
                a=str(a),
                val_x=str(target.val),
                val_y=val_y,
                loss=loss,
                residual=residual,
                steps=steps,
                status=status,
            ).model_dump())

    ts4_rows = []
    gains = []
    for i in range(config.samples):
        a = random_unit(rng, p, 1)
        n4 = rng.choice((0, 1))
        k = rng.choice((1, 2, -1))
        length = rng.randint(1, min(config.witt_length, 2))
        check = ts4_check(a, n4, k, length, p=p, cap=TS4_CAP, r=config.r)
        if check.gain is not None:
            gains.append(check.gain)
        ts4_rows.append(TS4Record(
            sample=i,
            a=str(a),
            n=n4,
            k=k,
            length=length,
            compared_to=fmt_rational(check.compared_to),
            identity_holds=check.identity_holds,
            base_val=str(check.base_val),
            lhs_val=str(check.lhs_val),
            gain=fmt_rational(check.gain) if check.gain is not None else "+inf",
            gain_bound=str(check.gain_bound),
            gain_ok=check.gain_ok,
        ).model_dump())

    trace_ok = [row for row in ts3_rows if row["projection"] == "trace"]
    losses = [Fraction(row["loss"]) for row in trace_ok if row["loss"] is not None]
    by_kind = {record.kind: record for record in projections}
    summary = {
        "c1": fmt_rational(TS1_CONSTANT),
        "alpha": str(alpha),
        "c2_monomial": by_kind["monomial"].c2,
        "c2_trace": by_kind["trace"].c2,
        "c3": fmt_rational(max(losses)) if losses else None,
        "t": fmt_rational(min(gains)) if gains else None,
        "defect_monomial": by_kind["monomial"].equivariance_defect,
        "defect_trace": by_kind["trace"].equivariance_defect,
    }
    checks = {
        "c2_monomial_zero": by_kind["monomial"].c2 == "0",
        "trace_equivariant": _saturated_text(by_kind["trace"].equivariance_defect),
        "projections_idempotent": all(record.idempotent for record in projections),
        "ts3_residual": all(row["status"] == "ok" and _saturated_text(row["residual"]) for row in trace_ok),
        "ts4_identity": all(row["identity_holds"] for row in ts4_rows),
        "ts4_gain": all(row["gain_ok"] for row in ts4_rows),
    }
    tables = {
        "projections": [record.model_dump() for record in projections],
        "ts3": ts3_rows,
        "ts4": ts4_rows,
    }
    return _report("tatesen", config, checks, tables, "ts3", summary)


def _saturated_text(value: str) -> bool:
    """A rendered valuation that is +inf or only bounded by the cap."""
    return value == "+inf" or value.startswith(">=")


# -- coboundaries ------------------------------------------------------------------------------------

def coboundary_lambda(p: int) -> Fraction:
    """lambda' between the gains on F_p((X)) and on its first p-th root layer."""
    return Fraction(1) if p == 2 else Fraction(0)


def _solve_to_verdict(
    coeffs: Sequence[PerfLaurent],
    module: SeriesModule,
    ctx: GroupContext,
    lam_prime: Fraction,
) -> Tuple[CoboundarySolution, SeriesModule]:
    """Solve at the module's cap; an unverified residual is solved once more at its deciding cap."""
    solution = coboundary_solve(MahlerFn.from_coeffs(module, list(coeffs)), ctx, lam_prime)
    wider = solution.deciding_cap()
    if solution.verdict == "unverified" and wider is not None and wider > module.cap:
        module = SeriesModule(module.prime, wider)
        solution = coboundary_solve(MahlerFn.from_coeffs(module, list(coeffs)), ctx, lam_prime)
    return solution, module


def coboundary_experiment(config: RunConfig) -> ExperimentReport:
    p = config.prime
    rng = random.Random(config.seed)
    base_module = SeriesModule(p, min(config.cap, COBOUNDARY_CAP))
    ctx = GroupContext(p, config.levels[0])
    lam_prime = coboundary_lambda(p)
    rows = []
    solved_ok = True
    refused_ok = True
    for i in range(config.samples):
        for depth in (0, 1):
            # the exponent window of m_n moves with n and widens with the sample
            coeffs = [random_series(rng, p, depth, terms=3, low=1 + n, high=5 + n + i) for n in range(4)]
            row: Dict[str, Any] = {"sample": i, "depth": depth}
            try:
                solution, module = _solve_to_verdict(coeffs, base_module, ctx, lam_prime)
            except GainTooSmall as e:
                row.update(status="gain_too_small", gain=str(e.details.get("gain")), lam_prime=fmt_rational(lam_prime))
                refused_ok = refused_ok and depth == 1
                rows.append(row)
                continue
            record = CoboundaryRecord(
                sample=i,
                terms=solution.terms,
                gain=str(solution.gain),
                lam_prime=fmt_rational(lam_prime),
                predicted=str(solution.predicted),
                residual=str(solution.residual),
                meets=solution.meets,
                verdict=solution.verdict,
                cap=fmt_rational(module.cap),
                constant=fmt_rational(solution.constant),
            )
            row.update(status="ok", **record.model_dump())
            solved_ok = solved_ok and solution.verdict == "met"
            refused_ok = refused_ok and depth == 0
            rows.append(row)
    checks = {"residual_bound": solved_ok, "gain_too_small_raised": refused_ok}
    return _report("coboundary", config, checks, {"solves": rows}, "solves")


# -- registry and output -------------------------------------------------------------------------------

EXPERIMENTS: Dict[str, Callable[[RunConfig], ExperimentReport]] = {
    "decompletion": decompletion_experiment,
    "witt-la": witt_la_experiment,
    "counterexample": counterexample_experiment,
    "tatesen": tatesen_experiment,
    "coboundary": coboundary_experiment,
}


def run_experiment(name: str, config: RunConfig) -> ExperimentReport:
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}")
    log_experiment_event(name, "start", {"fingerprint": config.fingerprint()})
    report = EXPERIMENTS[name](config)
    log_experiment_event(name, "finish", {"passed": report.passed, "failures": report.failures})
    return report


def render(report: ExperimentReport, fmt: str) -> str:
    if fmt == "csv":
        return dumps_csv(report.tables[report.primary_table])
    if fmt == "text":
        lines = [f"{report.experiment}: {'passed' if report.passed else 'FAILED'}"]
        lines += [f"  {key} = {value}" for key, value in sorted(report.summary.items())]
        lines += [f"  failed: {key}" for key in report.failures]
        return "\n".join(lines) + "\n"
    return dumps_json(report.model_dump())


def write_report(report: ExperimentReport, prefix: str) -> List[Path]:
    """Write <prefix>.json and <prefix>.csv."""
    return [
        write_text(f"{prefix}.json", render(report, "json")),
        write_text(f"{prefix}.csv", render(report, "csv")),
    ]

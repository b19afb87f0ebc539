# padicla/schemas/report_schema.py

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field


class WitnessRecord(BaseModel):
    """An analyticity certificate (or its absence), valid up to precision."""
    found: bool = Field(..., description="Whether some (level, lambda, mu) certified the orbit")
    level: Optional[int] = Field(None, description="Smallest group level that certified")
    lam: Optional[str] = Field(None, description="Radius lambda as an exact rational")
    mu: Optional[str] = Field(None, description="Offset mu; '>=' marks a cap-limited bound")
    checked_up_to: int = Field(..., description="Largest Mahler index N checked")
    cap: Optional[str] = Field(None, description="Precision cap of the coefficient module")
    tail: str = Field("+inf", description="Lower bound on val(a_n) beyond N")
    cap_limited: bool = Field(False, description="Whether some larger radius was left undecided by the cap")


class CSmallReport(BaseModel):
    """Outcome of the c-smallness test for a group level and a radius."""
    c: str = Field(..., description="The constant c")
    level: int = Field(..., description="Group level l")
    lam: str = Field(..., description="Radius lambda")
    generator: str = Field(..., description="Group element used for the test")
    varpi_val: str = Field(..., description="val((g-1) varpi)")
    basis_vals: List[str] = Field(default_factory=list, description="val((g-1) m_i) per basis element")
    gain_ok: bool = Field(..., description="val((g-1) varpi) > c")
    basis_ok: bool = Field(..., description="val((g-1) m_i) >= c for every basis element")
    lambda_ok: bool = Field(..., description="lambda > log_p(c+1)")
    c_small: bool = Field(..., description="All three conditions hold")


class SharpSmoothRow(BaseModel):
    """One row of the X^{1/p^j} smoothness table."""
    j: int
    m: int = Field(..., description="n(a), the depth of the group element")
    a: str
    measured: str = Field(..., description="val(a.X^{1/p^j} - X^{1/p^j})")
    bound: str = Field(..., description="p^(m-j)")
    holds: bool
    exact: bool = Field(..., description="The measured value equals the bound")


class ProjectionRecord(BaseModel):
    """Measured behaviour of a projection R_n on a sample set."""
    kind: str = Field(..., description="monomial or trace")
    n: int
    c2: str = Field(..., description="Largest measured valuation loss, floored at 0")
    equivariance_defect: str = Field(..., description="Smallest val(R(a.x) - a.R(x)) over the samples")
    idempotent: bool
    samples: int


class TS3Record(BaseModel):
    """Statistics of one (gamma - 1)-inversion."""
    sample: int
    projection: str
    n: int
    a: str
    val_x: str
    val_y: str
    loss: Optional[str] = Field(None, description="val(x) - val(y)")
    residual: str = Field(..., description="val((gamma - 1) y - x)")
    steps: int
    status: str = Field(..., description="ok or stalled")


class TS4Record(BaseModel):
    """Both sides of the (a - 1)(phi^{-n}(T^k)) identity and its gain."""
    sample: int
    a: str
    n: int
    k: int
    length: int
    compared_to: str = Field(..., description="Cap at which both sides were compared")
    identity_holds: bool
    base_val: str = Field(..., description="val_r(phi^{-n}(T^k))")
    lhs_val: str = Field(..., description="val_r((a - 1) phi^{-n}(T^k))")
    gain: str
    gain_bound: str
    gain_ok: bool


class CoboundaryRecord(BaseModel):
    """Residual of a truncated coboundary series against its prediction."""
    sample: int
    terms: int = Field(..., description="Truncation K of the outer sum")
    gain: str = Field(..., description="Measured per-step gain s")
    lam_prime: str
    predicted: str
    residual: str
    meets: bool
    verdict: Literal["met", "missed", "unverified"] = Field(..., description="unverified: the residual is only a cap bound below the prediction")
    cap: Optional[str] = Field(None, description="Cap of the module the solve ran in")
    constant: Optional[str] = Field(None, description="residual - predicted, the measured O(1)")


class ExperimentReport(BaseModel):
    """A complete, reproducible experiment run."""
    schema_tag: str = Field(..., description="Versioned format tag")
    experiment: str
    config: Dict[str, Any] = Field(..., description="RunConfig.describe() of the run")
    fingerprint: str = Field(..., description="Hash of the configuration")
    passed: bool = Field(..., description="All asserted properties held")
    failures: List[str] = Field(default_factory=list, description="Names of failed properties")
    summary: Dict[str, Any] = Field(default_factory=dict, description="Headline constants")
    tables: Dict[str, List[Dict[str, Any]]] = Field(default_factory=dict, description="Named data tables")
    primary_table: str = Field(..., description="Table written to the CSV output")

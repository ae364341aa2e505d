"""Pydantic models for experiment configuration, records and API responses"""

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Optional, Dict, Any, List, Literal
from datetime import datetime

from app.config import settings


DomainKind = Literal["unit_disk", "model_holder", "regular_polygon", "rectangle"]
Family = Literal["power_w_n", "random_blaschke_in_w", "boundary_pole_rational", "banuelos_moore"]
ZeroLaw = Literal["uniform_disk", "boundary_band", "clustered"]
BlockStrategy = Literal["rudin_shapiro_scaled", "random_signs", "random_phases"]
SchurFamily = Literal["zero", "scaled_identity", "scaled_blaschke", "scaled_banuelos_moore"]
ExperimentName = Literal[
    "verify-theorem1",
    "lower-bound",
    "lemma1",
    "lemma2",
    "dolzhenko",
    "theorem3",
    "theorem4",
    "theorem5",
    "probe-peller",
    "selftest",
]

CSV_COLUMNS = [
    "experiment", "n", "p", "beta", "rho", "domain", "seed", "measured", "bound",
    "violation", "fit_slope", "fit_const", "r2", "wall_ms",
]


class DomainSpec(BaseModel):
    """Target domain G = phi(D)"""
    model_config = ConfigDict(extra="forbid")

    kind: DomainKind = "unit_disk"
    alpha: Optional[float] = Field(None, gt=0, lt=1, description="Hoelder exponent of model_holder")
    sides: Optional[int] = Field(None, ge=3, description="Side count of regular_polygon")
    circumradius: Optional[float] = Field(None, gt=0, description="Circumradius of regular_polygon")
    half_width: Optional[float] = Field(None, gt=0, description="Half side a of rectangle")
    half_height: Optional[float] = Field(None, gt=0, description="Half side b of rectangle")

    @model_validator(mode="after")
    def check_kind_parameters(self):
        required = {
            "unit_disk": [],
            "model_holder": ["alpha"],
            "regular_polygon": ["sides"],
            "rectangle": ["half_width", "half_height"],
        }[self.kind]
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"domain kind '{self.kind}' requires {', '.join(missing)}")
        return self

    def build(self):
        from app.core.domains import domain_from_spec

        return domain_from_spec(self.kind, **self.model_dump(exclude={"kind"}))


class ExperimentParameters(BaseModel):
    """Parameter object shared by every experiment; unused fields are ignored by a driver"""
    model_config = ConfigDict(extra="forbid")

    degrees: List[int] = Field(default_factory=lambda: [1, 2, 4, 8, 16], description="Degree grid n")
    samples: int = Field(1, ge=1, le=10000, description="Random samples per grid point")
    p: float = Field(1.0, gt=0, description="Integrability exponent")
    beta: float = Field(0.0, gt=-1, description="Exponent of the boundary-distance weight")
    rho: Optional[float] = Field(None, gt=0, description="Boundary offset of G_rho")
    domain: DomainSpec = Field(default_factory=DomainSpec)
    family: Family = "power_w_n"
    zero_law: ZeroLaw = "uniform_disk"
    band_delta: Optional[float] = Field(None, gt=0, lt=1, description="Width of the boundary band (default 1/n)")
    strategy: BlockStrategy = "rudin_shapiro_scaled"
    sign_randomization: bool = False
    j_max: List[int] = Field(default_factory=lambda: [1, 2, 3], description="Bañuelos–Moore block counts")
    r_grid: List[float] = Field(default_factory=lambda: [0.5, 0.9, 0.99], description="Radii for circle-mean checks")
    g_family: List[SchurFamily] = Field(
        default_factory=lambda: ["zero", "scaled_identity", "scaled_blaschke", "scaled_banuelos_moore"]
    )
    taylor_count: int = Field(settings.TAYLOR_COUNT, ge=1, le=settings.SCHUR_MAX_LENGTH)
    seed: Optional[int] = Field(None, ge=0)
    tol: float = Field(settings.QUADRATURE_TOL, gt=0, lt=1)
    bound_tol: float = Field(settings.BOUND_TOL, ge=0, lt=1)

    @field_validator("degrees")
    @classmethod
    def check_degrees(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("degrees must not be empty")
        if any(n < 0 or n > 4096 for n in v):
            raise ValueError("degrees must lie in [0, 4096]")
        return v

    @field_validator("j_max")
    @classmethod
    def check_j_max(cls, v: List[int]) -> List[int]:
        if any(j < 1 or j > 7 for j in v):
            raise ValueError("j_max values must lie in [1, 7]")
        return v

    @field_validator("r_grid")
    @classmethod
    def check_r_grid(cls, v: List[float]) -> List[float]:
        if any(r < 0 or r >= 1 for r in v):
            raise ValueError("r_grid must be a subset of [0, 1)")
        return v


class OutputPaths(BaseModel):
    model_config = ConfigDict(extra="forbid")

    csv: Optional[str] = None
    summary: Optional[str] = None


class ExperimentConfig(BaseModel):
    """A replayable experiment run"""
    model_config = ConfigDict(extra="forbid")

    experiment: ExperimentName
    parameters: ExperimentParameters = Field(default_factory=ExperimentParameters)
    output: OutputPaths = Field(default_factory=OutputPaths)
    jobs: Optional[int] = Field(None, ge=1, le=256)

    @model_validator(mode="after")
    def check_seed(self):
        from app.services.experiments import requires_seed

        if requires_seed(self.experiment, self.parameters) and self.parameters.seed is None:
            raise ValueError(f"experiment '{self.experiment}' is randomized and needs a seed")
        return self


class ExperimentRecord(BaseModel):
    """One row of results; the CSV columns plus JSON-only details"""

    experiment: str
    n: Optional[int] = None
    p: Optional[float] = None
    beta: Optional[float] = None
    rho: Optional[float] = None
    domain: Optional[str] = None
    seed: Optional[int] = None
    measured: Optional[float] = None
    bound: Optional[float] = None
    violation: bool = False
    fit_slope: Optional[float] = None
    fit_const: Optional[float] = None
    r2: Optional[float] = None
    wall_ms: float = 0.0
    bound_tol: Optional[float] = None
    converged: bool = True
    extras: Dict[str, Any] = Field(default_factory=dict)


class FitResult(BaseModel):
    model: str
    slope: float
    constant: float
    r2: float


class RunSummary(BaseModel):
    """Outcome of one experiment run"""

    experiment: str
    parameters: Dict[str, Any]
    records: List[ExperimentRecord]
    fits: Dict[str, FitResult] = Field(default_factory=dict)
    violations: int = 0
    non_converged: int = 0
    exit_code: int = 0
    metadata: Dict[str, Any] = Field(default_factory=dict)
    wall_ms: float = 0.0


class ExperimentInfo(BaseModel):
    name: str
    description: str
    randomized: str = Field(..., description="always, family-dependent or never")


class SelftestRow(BaseModel):
    """Quadrature result against its closed-form oracle"""

    name: str
    measured: float
    expected: float
    abs_error: float
    tolerance: float
    passed: bool


class HealthResponse(BaseModel):
    """Health check response"""
    status: str
    timestamp: datetime
    version: str
    numerics: Dict[str, str]
    jobs: int


class ErrorResponse(BaseModel):
    """Error response"""
    error: str
    detail: Optional[str] = None
    timestamp: datetime

"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class StrategyParamsModel(BaseModel):
    family: Literal["FULL_SU3", "REDUCED6", "SO3"]
    phi: float
    theta: float
    chi: float
    alpha1: float = 0.0
    alpha2: float = 0.0
    alpha3: float = 0.0
    beta1: float = 0.0
    beta2: float = 0.0


class PayoffRequest(BaseModel):
    """Evaluate symmetric play of one strategy."""

    params: StrategyParamsModel
    state: str = "ghz"
    fidelity: float = Field(default=1.0, ge=0.0, le=1.0)
    convention: Literal["paper", "standard"] = "standard"


class PayoffResponse(BaseModel):
    payoff: float
    state: str
    fidelity: float
    convention: str


class ReproduceRequest(BaseModel):
    preset: Literal[1, 2, 3]
    convention: Literal["paper", "standard"] = "standard"


class ReproduceResponse(BaseModel):
    preset: int
    params: StrategyParamsModel
    payoff: float
    expected: float
    passed: bool
    tolerance: float


class ClassicalProfile(BaseModel):
    profile: tuple[int, int, int]
    payoffs: tuple[int, int, int]


class ClassicalResponse(BaseModel):
    expectation: float
    expectation_exact: str
    paying_profiles_per_player: int
    profiles: list[ClassicalProfile]
    embedding_ok: bool


class OptimizeRequest(BaseModel):
    family: Literal["FULL_SU3", "REDUCED6", "SO3"]
    state: str = "ghz"
    fidelity: float = Field(default=1.0, ge=0.0, le=1.0)
    seed: int = 42
    n_starts: int = Field(default=200, ge=1)
    convention: Literal["paper", "standard"] = "standard"


class OptimizeResponse(BaseModel):
    best_payoff: float
    best_params: StrategyParamsModel
    seed: int
    n_starts: int
    starts: int
    converged_fraction: float


class NashRequest(BaseModel):
    fd_step: float = Field(default=1e-5, ge=1e-6, le=1e-3)
    state: str = "ghz"
    fidelity: float = Field(default=1.0, ge=0.0, le=1.0)
    convention: Literal["paper", "standard"] = "standard"
    grid_points_per_axis: int = Field(default=5, ge=2)


class NashResponse(BaseModel):
    family: str
    fd_step: float
    gradient: list[float]
    gradient_closed_form: Optional[list[float]]
    hessian: list[list[float]]
    eigenvalues: list[float]
    max_unilateral_gain: float
    payoff_at_optimum: float
    verdict: bool


class GridAxisModel(BaseModel):
    name: str
    start: float
    stop: float
    steps: int = Field(ge=2)


class SweepRequest(BaseModel):
    kind: Literal["fidelity", "entanglement"]
    convention: Literal["paper", "standard"] = "standard"
    axes: Optional[list[GridAxisModel]] = None  # default grids when omitted


class SweepResponse(BaseModel):
    kind: str
    columns: list[str]
    rows: list[list[float]]
    max_residual: float
    observed_min: float
    observed_max: float


class CalibrationResponse(BaseModel):
    convention: Literal["paper", "standard"]
    checked_payoff: float
    payoff_by_convention: dict[str, float]
    final_state_match: dict[str, bool]
    timestamp: str


class HealthResponse(BaseModel):
    status: str
    version: str

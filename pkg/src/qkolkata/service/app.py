"""HTTP facade over the game engine.

Handlers are plain functions taking and returning pydantic models so the CLI
can invoke them in-process; the FastAPI routes are thin registrations on top.
All endpoints are stateless and deterministic given the request body.
"""

from __future__ import annotations

from datetime import datetime, timezone

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import ContractViolation, NumericalIntegrityError
from ..game import (
    Convention,
    calibrate_convention,
    classical_baseline,
    classical_profile_table,
    verify_classical_embedding,
)
from ..optimize import ObjectiveSpec, nash_check, objective, optimize_family
from ..su3 import StrategyFamily, StrategyParams, reference_optimum
from ..sweeps import (
    GridAxis,
    entanglement_sweep,
    fidelity_sweep,
    max_residual,
    observed_range,
)
from . import schemas

REPRODUCE_TARGETS = {1: 2 / 3, 2: 2 / 3, 3: 40 / 81}
REPRODUCE_FAMILIES = {
    1: StrategyFamily.FULL_SU3,
    2: StrategyFamily.REDUCED6,
    3: StrategyFamily.SO3,
}
REPRODUCE_TOLERANCE = 1e-9


def _params_model(p: StrategyParams) -> schemas.StrategyParamsModel:
    return schemas.StrategyParamsModel(**p.to_json_dict())


def _params_from_model(m: schemas.StrategyParamsModel) -> StrategyParams:
    return StrategyParams.from_json_dict(m.model_dump())


def handle_payoff(req: schemas.PayoffRequest) -> schemas.PayoffResponse:
    params = _params_from_model(req.params)
    spec = ObjectiveSpec(
        family=params.family,
        state=req.state,
        fidelity=req.fidelity,
        convention=Convention(req.convention),
    )
    return schemas.PayoffResponse(
        payoff=objective(spec, params),
        state=req.state,
        fidelity=req.fidelity,
        convention=req.convention,
    )


def handle_reproduce(req: schemas.ReproduceRequest) -> schemas.ReproduceResponse:
    family = REPRODUCE_FAMILIES[req.preset]
    params = reference_optimum(family)
    spec = ObjectiveSpec(family=family, convention=Convention(req.convention))
    payoff = objective(spec, params)
    expected = REPRODUCE_TARGETS[req.preset]
    return schemas.ReproduceResponse(
        preset=req.preset,
        params=_params_model(params),
        payoff=payoff,
        expected=expected,
        passed=abs(payoff - expected) <= REPRODUCE_TOLERANCE,
        tolerance=REPRODUCE_TOLERANCE,
    )


def handle_classical() -> schemas.ClassicalResponse:
    expectation = classical_baseline()
    profiles = [
        schemas.ClassicalProfile(profile=row["profile"], payoffs=row["payoffs"])
        for row in classical_profile_table()
    ]
    return schemas.ClassicalResponse(
        expectation=float(expectation),
        expectation_exact=f"{expectation.numerator}/{expectation.denominator}",
        paying_profiles_per_player=12,
        profiles=profiles,
        embedding_ok=verify_classical_embedding(),
    )


def handle_optimize(req: schemas.OptimizeRequest) -> schemas.OptimizeResponse:
    spec = ObjectiveSpec(
        family=StrategyFamily(req.family),
        state=req.state,
        fidelity=req.fidelity,
        convention=Convention(req.convention),
    )
    result = optimize_family(spec, seed=req.seed, n_starts=req.n_starts)
    return schemas.OptimizeResponse(
        best_payoff=result.best_payoff,
        best_params=_params_model(result.best_params),
        seed=result.seed,
        n_starts=result.n_starts,
        starts=result.starts,
        converged_fraction=result.converged_fraction,
    )


def handle_nash(req: schemas.NashRequest) -> schemas.NashResponse:
    spec = ObjectiveSpec(
        family=StrategyFamily.REDUCED6,
        state=req.state,
        fidelity=req.fidelity,
        convention=Convention(req.convention),
    )
    report = nash_check(spec, step=req.fd_step, grid_points_per_axis=req.grid_points_per_axis)
    d = report.to_json_dict()
    return schemas.NashResponse(**d)


def handle_sweep(req: schemas.SweepRequest) -> schemas.SweepResponse:
    conv = Convention(req.convention)
    axes = [GridAxis(a.name, a.start, a.stop, a.steps) for a in (req.axes or [])]
    if req.kind == "fidelity":
        if len(axes) > 1:
            raise ContractViolation("fidelity sweep takes a single axis")
        rows = fidelity_sweep(axes[0] if axes else None, convention=conv)
    else:
        if axes and len(axes) != 2:
            raise ContractViolation("entanglement sweep takes two axes")
        gt, gp = (axes[0], axes[1]) if axes else (None, None)
        rows = entanglement_sweep(gt, gp, convention=conv)
    lo, hi = observed_range(rows)
    return schemas.SweepResponse(
        kind=req.kind,
        columns=list(rows[0].names) + ["simulated", "closed_form", "residual"],
        rows=[list(r.coords) + [r.simulated, r.closed_form, r.residual] for r in rows],
        max_residual=max_residual(rows),
        observed_min=lo,
        observed_max=hi,
    )


def handle_calibrate() -> schemas.CalibrationResponse:
    result = calibrate_convention()
    return schemas.CalibrationResponse(
        convention=result.convention.value,
        checked_payoff=result.checked_payoff,
        payoff_by_convention=result.payoff_by_convention,
        final_state_match=result.final_state_match,
        timestamp=datetime.now(timezone.utc).isoformat(),
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="qkolkata",
        description="Three-player quantum Kolkata restaurant game engine",
        version=__version__,
    )

    def wrap(fn, *args):
        try:
            return fn(*args)
        except (ContractViolation, NumericalIntegrityError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/payoff", response_model=schemas.PayoffResponse)
    def payoff(req: schemas.PayoffRequest):
        return wrap(handle_payoff, req)

    @app.post("/reproduce", response_model=schemas.ReproduceResponse)
    def reproduce(req: schemas.ReproduceRequest):
        return wrap(handle_reproduce, req)

    @app.post("/classical", response_model=schemas.ClassicalResponse)
    def classical():
        return wrap(handle_classical)

    @app.post("/optimize", response_model=schemas.OptimizeResponse)
    def optimize(req: schemas.OptimizeRequest):
        return wrap(handle_optimize, req)

    @app.post("/nash", response_model=schemas.NashResponse)
    def nash(req: schemas.NashRequest):
        return wrap(handle_nash, req)

    @app.post("/sweep", response_model=schemas.SweepResponse)
    def sweep(req: schemas.SweepRequest):
        return wrap(handle_sweep, req)

    @app.post("/calibrate", response_model=schemas.CalibrationResponse)
    def calibrate():
        return wrap(handle_calibrate)

    return app


app = create_app()

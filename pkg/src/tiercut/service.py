"""HTTP front end: the runtime as a long-running, multi-client service.

The service keeps one zone registry across requests, so repeated deploy
calls for the same region exercise the reuse paths. Domain outcomes
(infeasible placements, failed deploys) are still 200s with the outcome
in the body; only malformed scenarios and requests are 4xx.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import runner
from .costs import CostError
from .model import ModelError
from .scenario import ScenarioError
from .scheduling import ZoneRegistry
from .schemas import (
    CostRequest,
    CostResponse,
    DeployRequestModel,
    DeployResponse,
    PartitionRequest,
    PartitionResponse,
    RegistryResponse,
    ReplayRequest,
    ReplayResponse,
    SimulateRequest,
    SimulateResponse,
)


def create_app(registry: ZoneRegistry | None = None) -> FastAPI:
    app = FastAPI(title="tiercut", version="0.1.0")
    app.state.registry = registry if registry is not None else ZoneRegistry()

    @app.exception_handler(ScenarioError)
    async def _scenario_error(request, exc: ScenarioError):
        raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/partition", response_model=PartitionResponse)
    def partition_endpoint(req: PartitionRequest) -> PartitionResponse:
        return _guard(runner.run_partition, req)

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate_endpoint(req: SimulateRequest) -> SimulateResponse:
        return _guard(runner.run_simulate, req)

    @app.post("/cost", response_model=CostResponse)
    def cost_endpoint(req: CostRequest) -> CostResponse:
        return _guard(runner.run_cost, req)

    @app.post("/replay", response_model=ReplayResponse)
    def replay_endpoint(req: ReplayRequest) -> ReplayResponse:
        return _guard(runner.run_replay, req)

    @app.post("/deploy", response_model=DeployResponse)
    def deploy_endpoint(req: DeployRequestModel) -> DeployResponse:
        return _guard(runner.run_deploy, req, app.state.registry)

    @app.get("/registry", response_model=RegistryResponse)
    def registry_endpoint() -> RegistryResponse:
        return runner.registry_snapshot(app.state.registry)

    return app


def _guard(fn, *args):
    try:
        return fn(*args)
    except (ScenarioError, ModelError, CostError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


app = create_app()

"""HTTP face of the experiment harness.

One POST endpoint per pipeline stage, all synchronous: requests run the
stage to completion and return its summary. Harness errors map to
status codes by kind (bad input 400, missing prerequisites 404,
diverged training 500) with the machine-readable error code in the
body.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..harness import (ConfigError, HarnessError, MissingArtifactError,
                       TrainingFailedError, config_from_dict, run_ablate,
                       run_attack_stage, run_evaluate, run_gen_data,
                       run_train)
from .schemas import (AblateRequest, ErrorResponse, HealthResponse,
                      StageRequest, StageResponse, TrainRequest)

_STATUS_BY_CODE = {
    ConfigError.code: 400,
    MissingArtifactError.code: 404,
    TrainingFailedError.code: 500,
}


def create_app() -> FastAPI:
    app = FastAPI(title="invlab", version=__version__)

    @app.exception_handler(HarnessError)
    async def _harness_error(request: Request, exc: HarnessError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        body = ErrorResponse(error=exc.code, message=str(exc),
                             details=exc.details or None)
        return JSONResponse(status_code=status,
                            content=body.model_dump(exclude_none=True))

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        # Domain rejections below the harness layer (corpus size floors
        # and the like) are the caller's input problem, same as bad-config.
        body = ErrorResponse(error="invalid-value", message=str(exc))
        return JSONResponse(status_code=400,
                            content=body.model_dump(exclude_none=True))

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(version=__version__)

    @app.post("/gen-data", response_model=StageResponse)
    def gen_data(req: StageRequest) -> StageResponse:
        cfg = config_from_dict(req.config, req.seed)
        return StageResponse(stage="gen-data",
                             summary=run_gen_data(cfg, req.out_dir))

    @app.post("/train", response_model=StageResponse)
    def train(req: TrainRequest) -> StageResponse:
        cfg = config_from_dict(req.config, req.seed)
        return StageResponse(stage="train",
                             summary=run_train(cfg, req.out_dir, req.which))

    @app.post("/attack", response_model=StageResponse)
    def attack(req: StageRequest) -> StageResponse:
        cfg = config_from_dict(req.config, req.seed)
        return StageResponse(stage="attack",
                             summary=run_attack_stage(cfg, req.out_dir))

    @app.post("/evaluate", response_model=StageResponse)
    def evaluate(req: StageRequest) -> StageResponse:
        cfg = config_from_dict(req.config, req.seed)
        return StageResponse(stage="evaluate",
                             summary=run_evaluate(cfg, req.out_dir))

    @app.post("/ablate", response_model=StageResponse)
    def ablate(req: AblateRequest) -> StageResponse:
        cfg = config_from_dict(req.config, req.seed)
        return StageResponse(stage="ablate",
                             summary=run_ablate(cfg, req.out_dir, req.axis))

    return app


app = create_app()

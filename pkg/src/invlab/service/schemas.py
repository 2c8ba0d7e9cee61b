"""Request/response bodies for the HTTP service.

Every stage endpoint takes the same envelope: an optional config
document (defaults apply when omitted), the output directory on the
server's filesystem, and an optional master-seed override.
"""

from __future__ import annotations

from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict


class StageRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: Optional[dict] = None
    out_dir: str
    seed: Optional[int] = None


class TrainRequest(StageRequest):
    which: Optional[Tuple[Literal["target", "eval", "indep", "prior"], ...]] = None


class AblateRequest(StageRequest):
    axis: Literal["L", "radii", "decomposition"]


class StageResponse(BaseModel):
    ok: bool = True
    stage: str
    summary: dict


class ErrorResponse(BaseModel):
    ok: bool = False
    error: str
    message: str
    details: Optional[dict] = None


class HealthResponse(BaseModel):
    status: str = "ok"
    version: str

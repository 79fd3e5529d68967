"""HTTP service exposing the command layer.

Requests carry the run configuration as text (the same format the CLI
reads from disk) plus per-command parameters; crystal data referenced by
path in the config can be inlined as crystal_text so remote servers never
touch client filesystems.  Errors come back as 422 with a body
``{"error": {"kind": "validation" | "numerical", "message": ...}}``; the
CLI maps the kind to its exit code.
"""

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .commands import (
    cmd_design,
    cmd_figures,
    cmd_grid,
    cmd_scan_tilt,
    cmd_scan_waist,
    cmd_summary,
)
from .errors import ConfigError, SpdcTiltError
from .runconfig import RunConfig, parse_runconfig


class ConfigPayload(BaseModel):
    """Base request: inline configuration text plus optional crystal data."""

    config_text: str | None = None
    crystal_text: str | None = None

    def runconfig(self) -> RunConfig:
        if self.config_text is None:
            if self.crystal_text is not None:
                return RunConfig(crystal_text=self.crystal_text)
            return RunConfig()
        return parse_runconfig(self.config_text, "<request config>", self.crystal_text)


class SummaryRequest(ConfigPayload):
    n: int | None = Field(default=None, ge=16)
    tolerance: float = Field(default=0.05, gt=0.0, lt=0.5)
    strip_phase: bool = False


class ScanTiltRequest(ConfigPayload):
    xi_min_deg: float = -80.0
    xi_max_deg: float = 80.0
    step_deg: float = 0.5


class ScanWaistRequest(ConfigPayload):
    w_min_um: float = 10.0
    w_max_um: float = 300.0
    n_points: int = Field(default=59, ge=2)
    tolerance: float = Field(default=0.05, gt=0.0, lt=0.5)


class GridRequest(ConfigPayload):
    n: int | None = Field(default=None, ge=16)
    tolerance: float = Field(default=0.05, gt=0.0, lt=0.5)
    strip_phase: bool = False


class DesignRequest(ConfigPayload):
    target_bandwidth_nm: float
    tolerance: float = Field(default=0.05, gt=0.0, lt=0.5)


class FiguresRequest(ConfigPayload):
    n: int | None = Field(default=None, ge=16)
    tolerance: float = Field(default=0.05, gt=0.0, lt=0.5)
    strip_phase: bool = False


class CommandResponse(BaseModel):
    record: dict
    files: dict[str, str]


class HealthResponse(BaseModel):
    status: str
    version: str


app = FastAPI(
    title="spdctilt",
    version=__version__,
    description="Joint-spectrum engineering for tilted-pump noncollinear SPDC",
)


@app.exception_handler(SpdcTiltError)
async def _spdc_error(request: Request, exc: SpdcTiltError) -> JSONResponse:
    kind = "validation" if isinstance(exc, ConfigError) else "numerical"
    return JSONResponse(
        status_code=422, content={"error": {"kind": kind, "message": str(exc)}}
    )


@app.get("/v1/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/v1/summary", response_model=CommandResponse)
def summary(req: SummaryRequest) -> CommandResponse:
    result = cmd_summary(req.runconfig(), req.n, req.tolerance, req.strip_phase)
    return CommandResponse(record=result.record, files=result.files)


@app.post("/v1/scan-tilt", response_model=CommandResponse)
def scan_tilt(req: ScanTiltRequest) -> CommandResponse:
    result = cmd_scan_tilt(req.runconfig(), req.xi_min_deg, req.xi_max_deg, req.step_deg)
    return CommandResponse(record=result.record, files=result.files)


@app.post("/v1/scan-waist", response_model=CommandResponse)
def scan_waist(req: ScanWaistRequest) -> CommandResponse:
    result = cmd_scan_waist(
        req.runconfig(), req.w_min_um, req.w_max_um, req.n_points, req.tolerance
    )
    return CommandResponse(record=result.record, files=result.files)


@app.post("/v1/grid", response_model=CommandResponse)
def grid(req: GridRequest) -> CommandResponse:
    result = cmd_grid(req.runconfig(), req.n, req.tolerance, req.strip_phase)
    return CommandResponse(record=result.record, files=result.files)


@app.post("/v1/design", response_model=CommandResponse)
def design(req: DesignRequest) -> CommandResponse:
    result = cmd_design(req.runconfig(), req.target_bandwidth_nm, req.tolerance)
    return CommandResponse(record=result.record, files=result.files)


@app.post("/v1/figures", response_model=CommandResponse)
def figures(req: FiguresRequest) -> CommandResponse:
    result = cmd_figures(req.runconfig(), req.n, req.tolerance, req.strip_phase)
    return CommandResponse(record=result.record, files=result.files)

"""HTTP service exposing run, certify and sweep."""
from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import __version__, api
from .config import parse_config
from .errors import ConfigError, TecellError

app = FastAPI(title="tecell", version=__version__)


def _config(data: dict):
    try:
        return parse_config(data)
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/run", response_model=api.RunResponse)
def run(req: api.RunRequest) -> api.RunResponse:
    cfg = _config(req.config)
    try:
        return api.run(cfg, req.output_dir)
    except TecellError as exc:
        raise HTTPException(status_code=500, detail=f"{type(exc).__name__}: {exc}") from exc


@app.post("/certify", response_model=api.CertifyResponse)
def certify(req: api.CertifyRequest) -> api.CertifyResponse:
    cfg = _config(req.config)
    try:
        return api.certify(cfg, req.symbolic)
    except TecellError as exc:
        raise HTTPException(status_code=500, detail=f"{type(exc).__name__}: {exc}") from exc


@app.post("/sweep", response_model=api.SweepResponse)
def sweep(req: api.SweepRequest) -> api.SweepResponse:
    try:
        return api.sweep(req.config, req.param, req.start, req.stop, req.steps, req.mode, req.workers)
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except TecellError as exc:
        raise HTTPException(status_code=500, detail=f"{type(exc).__name__}: {exc}") from exc

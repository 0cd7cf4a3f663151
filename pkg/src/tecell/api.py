"""Run, certify and sweep operations on a parsed configuration.

These functions back both the HTTP service and the in-process CLI; their
request and response models are the wire format of the service.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field

from . import __version__
from .certificate import CertificateReport, check_smallness, nacl_regression
from .certificate.regression import RegressionTable
from .config import CellConfig, deep_merge, parse_config, set_dotted
from .coupler import SolverOptions, run_transient
from .errors import ConfigError, TecellError
from .io import csv_text, trajectory_csv, write_snapshot
from .presets import PRESET_NAME


class RunRequest(BaseModel):
    config: dict[str, Any]
    output_dir: Optional[str] = None   # server-side directory for snapshots


class StepSummary(BaseModel):
    index: int
    t: float
    iterations: int
    residuals: list[float]
    converged: bool


class RunResponse(BaseModel):
    completed: bool
    failure: Optional[str]
    failed_step: Optional[int]
    steps: list[StepSummary]
    trajectory_csv: str
    snapshots: list[str] = []
    validation: list[str] = []
    runtime_s: float = 0.0


class CertifyRequest(BaseModel):
    config: dict[str, Any]
    symbolic: Optional[bool] = None


class CertifyResponse(BaseModel):
    report: CertificateReport
    regression: Optional[RegressionTable] = None


class SweepRequest(BaseModel):
    config: dict[str, Any]
    param: str
    start: float
    stop: float
    steps: int = Field(ge=0)
    mode: Literal["certify", "run"] = "certify"
    workers: int = Field(default=1, ge=1)


class SweepResponse(BaseModel):
    param: str
    mode: str
    columns: list[str]
    rows: list[list[Any]]
    csv: str


# sweep shorthands: name -> dotted keys set to the same value
PARAM_ALIASES = {
    "Pi_sharp": ("material.peltier.max",),
    "alpha_sharp": ("material.seebeck.max", "material.seebeck.law"),
    "emissivity": ("material.radiation.emissivity", "material.radiation.emissivity_min",
                   "material.radiation.emissivity_max"),
}


def run(cfg: CellConfig, output_dir: Optional[str] = None) -> RunResponse:
    from .materials import validate_hypotheses

    start = time.perf_counter()
    mesh, model = cfg.mesh(), cfg.material_model()
    report = validate_hypotheses(model, mesh=mesh)
    s = cfg.solver
    traj = run_transient(mesh, model, s.picard, s.t_final, s.dt,
                         options=SolverOptions(compat_tol=s.compat_tol, lin_tol=s.lin_tol))
    names = [sp.name for sp in model.species]
    snaps: list[str] = []
    every = cfg.output.snapshot_every
    if every and output_dir is not None:
        for k, state in enumerate(traj.states):
            if k % every == 0:
                snaps += [str(p) for p in write_snapshot(Path(output_dir), k, mesh, state, names,
                                                         cfg.output.vtk)]
    return RunResponse(
        completed=traj.completed, failure=traj.failure, failed_step=traj.failed_step,
        steps=[StepSummary(index=st.index, t=st.t, iterations=st.iterations,
                           residuals=st.residuals, converged=st.converged) for st in traj.steps],
        trajectory_csv=trajectory_csv(mesh, traj, names), snapshots=snaps,
        validation=[f"[{v.hypothesis}] {v.inequality}" for v in report.violations],
        runtime_s=time.perf_counter() - start)


def certify(cfg: CellConfig, symbolic: Optional[bool] = None) -> CertifyResponse:
    symbolic = cfg.certificate.symbolic if symbolic is None else symbolic
    model = cfg.material_model()
    ec = cfg.certificate.embedding()
    report = check_smallness(model, ec, cfg.mesh(), norm_overrides=cfg.certificate.norms,
                             symbolic=symbolic)
    regression = None
    if symbolic and cfg.material.get("preset") == PRESET_NAME:
        regression = nacl_regression(model, ec)
    return CertifyResponse(report=report, regression=regression)


def _resolved_material(cfg_dict: dict) -> dict:
    from .presets import nacl_material_dict

    mat = cfg_dict.get("material", {})
    return deep_merge(nacl_material_dict(), mat) if mat.get("preset") else mat


def _lookup(data: Any, key: str):
    node = data
    for part in key.split("."):
        if isinstance(node, list):
            node = node[int(part)]
        elif isinstance(node, dict) and part in node:
            node = node[part]
        else:
            raise KeyError(key)
    return node


def sweep_keys(cfg_dict: dict, param: str) -> tuple[str, ...]:
    """Dotted keys a sweep parameter sets; raises ConfigError for unknown keys."""
    keys = PARAM_ALIASES.get(param, (param,))
    view = dict(cfg_dict, material=_resolved_material(cfg_dict))
    for key in keys:
        try:
            value = _lookup(view, key)
        except (KeyError, IndexError, ValueError):
            if key == "material.peltier.max":
                continue   # derived from the Kelvin relation when absent
            raise ConfigError(f"unknown sweep parameter {param!r} (no key {key!r})") from None
        if isinstance(value, dict) and "kind" in value:
            continue   # a coefficient law, replaced by a constant law of the swept value
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"sweep parameter {key!r} is not numeric")
    return keys


def sweep(cfg_dict: dict, param: str, start: float, stop: float, steps: int,
          mode: str = "certify", workers: int = 1) -> SweepResponse:
    parse_config(cfg_dict)
    keys = sweep_keys(cfg_dict, param)
    # spell out preset materials so list entries such as species.0 can be addressed
    cfg_dict = dict(cfg_dict, material=_resolved_material(cfg_dict))
    values = list(np.linspace(start, stop, steps)) if steps > 0 else []

    def evaluate(value: float) -> list[Any]:
        data = cfg_dict
        for key in keys:
            data = set_dotted(data, key, float(value))
        cfg = parse_config(data)
        if mode == "run":
            res = run(cfg)
            its = max((st.iterations for st in res.steps), default=0)
            return [float(value), res.completed, its, res.failure or ""]
        try:
            rep = check_smallness(cfg.material_model(), cfg.certificate.embedding(), cfg.mesh(),
                                  norm_overrides=cfg.certificate.norms)
        except TecellError as exc:
            return [float(value), False, math.nan, math.nan, math.nan, math.nan, str(exc)]
        b = cfg.material_model().bounds()
        rad = (b.b_min * b.k_min) ** (-1.0 / b.exponent) if b.b_min > 0 else math.inf
        return [float(value), rep.certified, rep.B0, rep.margin, rep.min_margin, rad,
                rep.reason or ""]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(evaluate, values))
    if mode == "run":
        cols = [(param, "-"), ("completed", "-"), ("max_picard_iterations", "-"), ("failure", "-")]
    else:
        cols = [(param, "-"), ("certified", "-"), ("B0", "-"), ("margin", "-"),
                ("min_margin", "-"), ("radiation_factor", "(W m^-2 K^-l W m^-1 K^-1)^(-1/l)"),
                ("reason", "-")]
    return SweepResponse(param=param, mode=mode, columns=[c for c, _ in cols], rows=rows,
                         csv=csv_text(cols, rows))


def run_metadata(runtime_s: float) -> dict:
    return {"version": __version__, "runtime_s": runtime_s,
            "finished": time.strftime("%Y-%m-%dT%H:%M:%S%z")}

"""Fixed-point coupling of potential, concentrations and temperature.

Each time step iterates the map

    (c, theta) -> phi -> (c', theta')

in Gauss-Seidel order (potential, then every species with the fresh
potential, then temperature with the fresh concentrations and potential),
relaxing the candidate between sweeps until the unrelaxed outputs settle.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from . import fem
from .errors import TecellError
from .geometry import Mesh
from .materials import MaterialModel
from .potential import solve_potential
from .species import step_concentration
from .temperature import step_temperature

log = logging.getLogger(__name__)


class PicardSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    tol: float = Field(default=1e-8, gt=0)
    max_iters: int = Field(default=50, ge=1)
    relaxation: float = Field(default=0.7, gt=0, le=1)


@dataclass
class FieldState:
    t: float
    theta: np.ndarray
    conc: np.ndarray     # (I, N)
    phi: np.ndarray
    negative_count: int = 0
    clamp_count: int = 0

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.conc = np.atleast_2d(np.asarray(self.conc, dtype=float))
        self.phi = np.asarray(self.phi, dtype=float)

    def check(self, mesh: Mesh) -> None:
        n = mesh.n_nodes
        if self.theta.shape != (n,) or self.phi.shape != (n,) or self.conc.shape[-1] != n:
            raise ValueError("field sizes do not match the mesh")
        for name, a in (("theta", self.theta), ("conc", self.conc), ("phi", self.phi)):
            if not np.all(np.isfinite(a)):
                raise ValueError(f"{name} has non-finite entries")

    def copy(self) -> "FieldState":
        return replace(self, theta=self.theta.copy(), conc=self.conc.copy(), phi=self.phi.copy())


@dataclass
class FieldScales:
    theta: float
    conc: np.ndarray
    phi: float = 1.0

    @classmethod
    def from_state(cls, mesh: Mesh, state: FieldState) -> "FieldScales":
        vol = mesh.lumped_mass.sum()

        def mean(u):
            m = abs(float(np.dot(mesh.lumped_mass, u)) / vol)
            return m if m > 0 else 1.0

        return cls(theta=mean(state.theta), conc=np.array([mean(c) for c in state.conc]))


@dataclass
class SolverOptions:
    compat_tol: float = 1e-8
    lin_tol: float = 1e-12


def relative_change(mesh: Mesh, a: FieldState, b: FieldState, scales: FieldScales) -> float:
    """Largest scaled RMS difference over the three fields."""
    vol = mesh.lumped_mass.sum()

    def rms(u, s):
        return fem.l2_norm(mesh, u) / (s * math.sqrt(vol))

    parts = [rms(a.theta - b.theta, scales.theta), rms(a.phi - b.phi, scales.phi)]
    parts += [rms(ca - cb, s) for ca, cb, s in zip(a.conc, b.conc, scales.conc)]
    return max(parts)


def initial_state(mesh: Mesh, model: MaterialModel, options: Optional[SolverOptions] = None) -> FieldState:
    """Initial temperature and concentrations with the consistent potential."""
    options = options or SolverOptions()
    x = mesh.nodes
    theta = model.initial_temperature.evaluate(x, np.zeros(mesh.n_nodes))
    conc = np.array([s.initial_concentration.evaluate(x, theta) for s in model.species]).reshape(
        len(model.species), mesh.n_nodes)
    phi = solve_potential(mesh, model, theta, conc, compat_tol=options.compat_tol,
                          lin_tol=options.lin_tol).phi
    return FieldState(0.0, theta, conc, phi)


def apply_map(mesh: Mesh, model: MaterialModel, state_n: FieldState, candidate: FieldState,
              dt: float, options: Optional[SolverOptions] = None) -> FieldState:
    """One unrelaxed sweep potential -> species -> temperature."""
    options = options or SolverOptions()
    phi = solve_potential(mesh, model, candidate.theta, candidate.conc,
                          compat_tol=options.compat_tol, lin_tol=options.lin_tol).phi
    conc = np.array([
        step_concentration(mesh, model, i, state_n.conc[i], candidate.theta, phi, dt,
                           c_lag=candidate.conc[i], lin_tol=options.lin_tol)
        for i in range(len(model.species))]).reshape(state_n.conc.shape)
    theta = step_temperature(mesh, model, state_n.theta, conc, phi, dt,
                             theta_lag=candidate.theta, lin_tol=options.lin_tol)
    _, clamped = model.clamp(theta)
    return FieldState(state_n.t + dt, theta, conc, phi,
                      negative_count=int(np.count_nonzero(conc < 0)), clamp_count=clamped)


def picard_step(mesh: Mesh, model: MaterialModel, state_n: FieldState, candidate: FieldState,
                dt: float, *, relaxation: float = 0.7, previous: Optional[FieldState] = None,
                scales: Optional[FieldScales] = None, options: Optional[SolverOptions] = None):
    """Apply the map once and relax.

    Returns ``(relaxed, mapped, residual)``.  The residual compares the mapped
    output with ``previous`` (the last mapped output) or, on the first sweep,
    with the candidate itself.
    """
    scales = scales or FieldScales.from_state(mesh, state_n)
    mapped = apply_map(mesh, model, state_n, candidate, dt, options)
    residual = relative_change(mesh, mapped, previous if previous is not None else candidate, scales)
    w = relaxation
    relaxed = FieldState(mapped.t,
                         w * mapped.theta + (1 - w) * candidate.theta,
                         w * mapped.conc + (1 - w) * candidate.conc,
                         w * mapped.phi + (1 - w) * candidate.phi,
                         mapped.negative_count, mapped.clamp_count)
    return relaxed, mapped, residual


@dataclass
class StepRecord:
    index: int
    t: float
    iterations: int
    residuals: list[float]
    converged: bool


@dataclass
class Trajectory:
    states: list[FieldState]
    steps: list[StepRecord] = field(default_factory=list)
    failure: Optional[str] = None
    failed_step: Optional[int] = None

    @property
    def completed(self) -> bool:
        return self.failure is None

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])


def run_transient(mesh: Mesh, model: MaterialModel, settings: PicardSettings, t_final: float,
                  dt: float, *, options: Optional[SolverOptions] = None,
                  initial: Optional[FieldState] = None) -> Trajectory:
    """Advance ceil(t_final / dt) steps from the initial data.

    A step that does not reach ``settings.tol`` in ``settings.max_iters``
    sweeps stops the run; the partial trajectory carries the failure.
    """
    if not dt > 0 or t_final < 0:
        raise ValueError("need dt > 0 and t_final >= 0")
    options = options or SolverOptions()
    state = initial.copy() if initial is not None else initial_state(mesh, model, options)
    state.check(mesh)
    traj = Trajectory(states=[state])
    scales = FieldScales.from_state(mesh, state)
    n_steps = math.ceil(t_final / dt - 1e-12) if t_final > 0 else 0

    for k in range(1, n_steps + 1):
        t_next = min(k * dt, t_final)
        h = t_next - state.t
        candidate, previous = state, None
        residuals: list[float] = []
        accepted = None
        try:
            for _ in range(settings.max_iters):
                candidate, mapped, res = picard_step(
                    mesh, model, state, candidate, h, relaxation=settings.relaxation,
                    previous=previous, scales=scales, options=options)
                residuals.append(res)
                previous = mapped
                if res <= settings.tol:
                    accepted = mapped
                    break
        except TecellError as exc:
            traj.steps.append(StepRecord(k, t_next, len(residuals), residuals, False))
            traj.failure, traj.failed_step = f"step {k}: {exc}", k
            log.error("step %d failed: %s", k, exc)
            return traj
        traj.steps.append(StepRecord(k, t_next, len(residuals), residuals, accepted is not None))
        if accepted is None:
            traj.failure = (f"step {k}: no convergence in {settings.max_iters} iterations, "
                            f"last residual {residuals[-1]:.3e}")
            traj.failed_step = k
            log.error(traj.failure)
            return traj
        accepted.t = t_next
        state = accepted
        traj.states.append(state)
        log.debug("step %d t=%g iterations=%d residual=%.3e", k, t_next, len(residuals), residuals[-1])
    return traj


def field_norms(mesh: Mesh, state: FieldState) -> dict[str, float]:
    """RMS-free L2 norms of the fields (lumped quadrature)."""
    out = {"theta": fem.l2_norm(mesh, state.theta), "phi": fem.l2_norm(mesh, state.phi)}
    for i, c in enumerate(state.conc):
        out[f"c{i}"] = fem.l2_norm(mesh, c)
    return out


def monitor_norms(mesh: Mesh, model: MaterialModel, traj: Trajectory, p: float = 2.0) -> dict[str, float]:
    """Space-time norms the certificate radii bound.

    Returns ``grad_theta`` = |grad theta|_{p,Q_T}, ``theta_wall`` =
    |theta|_{l,Sigma_T} and ``grad_c{i}`` = |grad c_i|_{p,Q_T}, using the
    right-endpoint rule in time.
    """
    ell = model.radiation.exponent
    vol = mesh.cell_volumes
    w_wall = mesh.boundary_node_weights("wall")
    acc = {"grad_theta": 0.0, "theta_wall": 0.0}
    acc.update({f"grad_c{i}": 0.0 for i in range(len(model.species))})
    for prev, cur in zip(traj.states[:-1], traj.states[1:]):
        h = cur.t - prev.t
        g = np.linalg.norm(fem.cell_gradient(mesh, cur.theta), axis=1)
        acc["grad_theta"] += h * float(np.dot(vol, g ** p))
        acc["theta_wall"] += h * float(np.dot(w_wall, np.abs(cur.theta) ** ell))
        for i, c in enumerate(cur.conc):
            gc = np.linalg.norm(fem.cell_gradient(mesh, c), axis=1)
            acc[f"grad_c{i}"] += h * float(np.dot(vol, gc ** p))
    return {k: v ** (1 / (ell if k == "theta_wall" else p)) for k, v in acc.items()}

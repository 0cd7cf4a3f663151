"""Implicit Euler step for the temperature.

Conductivity, radiation and cooling coefficients are lagged; the radiation
power |Theta|^(l-2) Theta on the wall is kept implicit and solved by a damped
Newton iteration.  Dufour and Peltier fluxes enter as a volumetric load.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse

from . import fem
from .errors import DivergenceError, DomainError, NonlinearDivergenceError
from .geometry import Mesh
from .materials import MaterialModel

NEWTON_TOL = 1e-10
NEWTON_MAX_ITERS = 50


def _power(theta, ell):
    theta = np.asarray(theta, dtype=float)
    return np.abs(theta) ** (ell - 2) * theta


def radiation_boundary_flux(model: MaterialModel, x, theta) -> np.ndarray:
    """h_R |theta|^(l-2) theta - gamma  [W m^-2]."""
    ell = model.radiation.exponent
    return model.h_radiation(x, theta) * _power(theta, ell) - model.gamma_wall(x, theta)


def newton_cooling_flux(model: MaterialModel, theta, electrode: str, x=None) -> np.ndarray:
    """h_C (theta - theta_e), with theta_e the external temperature of ``electrode``."""
    if electrode not in ("anode", "cathode"):
        raise DomainError(f"cooling applies on anode or cathode, not {electrode!r}")
    theta_e = model.cooling.theta_anode if electrode == "anode" else model.cooling.theta_cathode
    theta = np.asarray(theta, dtype=float)
    return model.h_cooling(x, theta) * (theta - theta_e)


def coupling_flux(mesh: Mesh, coeffs, theta_lag, conc, phi) -> np.ndarray:
    """Cellwise R theta^2 sum_j D'_j grad(c_j) + Pi sigma grad(phi)."""
    th = fem.cell_average(mesh, theta_lag)
    flux = (coeffs.peltier * coeffs.sigma)[:, None] * fem.cell_gradient(mesh, phi)
    for j in range(len(coeffs.valence)):
        flux += (coeffs.gas_constant * th ** 2 * coeffs.dufour[j])[:, None] * fem.cell_gradient(mesh, conc[j])
    return flux


@dataclass
class TemperatureSystem:
    """theta -> L theta + w_R * h_R * |theta|^(l-2) theta - rhs."""
    L: sparse.csr_matrix
    rad_weight: np.ndarray
    ell: float
    rhs: np.ndarray

    def residual(self, theta):
        return self.L @ theta + self.rad_weight * _power(theta, self.ell) - self.rhs

    def jacobian(self, theta):
        d = self.rad_weight * (self.ell - 1) * np.abs(theta) ** (self.ell - 2)
        return self.L + sparse.diags(d)


def assemble_temperature(mesh: Mesh, model: MaterialModel, theta_old, conc, phi, dt: float,
                         theta_lag=None, heat_source=None) -> TemperatureSystem:
    theta_old = np.asarray(theta_old, dtype=float)
    theta_lag = theta_old if theta_lag is None else np.asarray(theta_lag, dtype=float)
    conc = np.asarray(conc, dtype=float).reshape(len(model.species), mesh.n_nodes)
    x = mesh.nodes
    coeffs = fem.cell_coefficients(mesh, model, theta_lag)
    rho_cp = model.constants.rho_cp
    M = mesh.lumped_mass

    L = fem.stiffness(mesh, coeffs.conductivity) + sparse.diags(rho_cp * M / dt)
    rhs = rho_cp * M * theta_old / dt + fem.flux_load(mesh, coupling_flux(mesh, coeffs, theta_lag, conc, phi))
    if heat_source is not None:
        rhs += M * np.broadcast_to(np.asarray(heat_source, dtype=float), M.shape)

    w_wall = mesh.boundary_node_weights("wall")
    rad_weight = w_wall * model.h_radiation(x, theta_lag)
    rhs += w_wall * model.gamma_wall(x, theta_lag)

    h = model.h_cooling(x, theta_lag)
    cool = np.zeros(mesh.n_nodes)
    for electrode, theta_e in (("anode", model.cooling.theta_anode),
                               ("cathode", model.cooling.theta_cathode)):
        w = mesh.boundary_node_weights(electrode) * h
        cool += w
        rhs += w * theta_e
    L = L + sparse.diags(cool)
    return TemperatureSystem(L=sparse.csr_matrix(L), rad_weight=rad_weight,
                             ell=model.radiation.exponent, rhs=rhs)


def solve_temperature_system(system: TemperatureSystem, theta0, tol: float = NEWTON_TOL,
                             max_iters: int = NEWTON_MAX_ITERS, lin_tol: float = 1e-12) -> np.ndarray:
    """Damped Newton; the step is halved while it fails to reduce the residual norm."""
    theta = np.asarray(theta0, dtype=float).copy()
    if not np.any(system.rad_weight):
        return fem.solve_spd(system.L, system.rhs, tol=lin_tol, x0=theta)
    F = system.residual(theta)
    for _ in range(max_iters):
        delta = fem.solve_spd(system.jacobian(theta), -F, tol=lin_tol)
        lam, fnorm = 1.0, np.linalg.norm(F)
        while True:
            trial = theta + lam * delta
            F_trial = system.residual(trial)
            if np.linalg.norm(F_trial) <= fnorm or lam < 1e-8:
                break
            lam *= 0.5
        theta, F = trial, F_trial
        if np.max(np.abs(lam * delta)) <= tol * max(1.0, np.max(np.abs(theta))):
            return theta
    raise NonlinearDivergenceError(
        f"radiation Newton iteration did not reach {tol:g} in {max_iters} iterations")


def step_temperature(mesh: Mesh, model: MaterialModel, theta_old, conc, phi, dt: float, *,
                     theta_lag=None, heat_source=None, lin_tol: float = 1e-12) -> np.ndarray:
    """Advance the temperature by one implicit Euler step of length ``dt``.

    Coefficients are evaluated at ``theta_lag`` (default ``theta_old``).
    ``heat_source`` is an optional lagged nodal volumetric source [W m^-3].
    """
    if not dt > 0:
        raise DomainError(f"time step must be positive, got {dt}")
    for a in (theta_old, conc, phi):
        if not np.all(np.isfinite(a)):
            raise DivergenceError("non-finite field entering the temperature step")
    system = assemble_temperature(mesh, model, theta_old, conc, phi, dt, theta_lag, heat_source)
    theta = solve_temperature_system(system, theta_old, lin_tol=lin_tol)
    if not np.all(np.isfinite(theta)):
        raise DivergenceError("temperature became non-finite")
    return theta


def energy_balance(mesh: Mesh, model: MaterialModel, theta_old, theta_new, dt: float,
                   theta_lag=None, heat_source=None) -> dict[str, float]:
    """Terms of the discrete energy balance of one step [W per unit cross-section in 1-D].

    ``storage + radiation + cooling - absorbed - source`` vanishes up to
    solver precision because the volumetric coupling load sums to zero.
    """
    theta_lag = theta_old if theta_lag is None else theta_lag
    x = mesh.nodes
    w_wall = mesh.boundary_node_weights("wall")
    h = model.h_cooling(x, theta_lag)
    cooling = 0.0
    for electrode, theta_e in (("anode", model.cooling.theta_anode),
                               ("cathode", model.cooling.theta_cathode)):
        w = mesh.boundary_node_weights(electrode)
        cooling += float(np.dot(w * h, theta_new - theta_e))
    return {
        "storage": float(model.constants.rho_cp * np.dot(mesh.lumped_mass, theta_new - theta_old) / dt),
        "radiation": float(np.dot(w_wall * model.h_radiation(x, theta_lag),
                                  _power(theta_new, model.radiation.exponent))),
        "absorbed": float(np.dot(w_wall, model.gamma_wall(x, theta_lag))),
        "cooling": cooling,
        "source": 0.0 if heat_source is None else float(np.dot(
            mesh.lumped_mass, np.broadcast_to(np.asarray(heat_source, dtype=float), mesh.lumped_mass.shape))),
    }

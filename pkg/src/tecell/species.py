"""Implicit Euler step for one ionic concentration.

Lumped mass, P1 diffusion with the temperature-dependent coefficient, and a
Butler-Volmer boundary source g_i / (F z_i) on the electrodes where the
species reacts.  Soret and migration fluxes enter as a lagged volumetric load.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
import scipy.sparse as sparse

from . import fem
from .errors import DivergenceError, DomainError
from .geometry import Mesh
from .materials import FARADAY, GAS_CONSTANT, ButlerVolmerParams, MaterialModel, butler_volmer_value


def butler_volmer_flux(params: ButlerVolmerParams, theta, phi) -> np.ndarray:
    """Truncated Butler-Volmer current density [A m^-2]:
    J (exp(beta a) - exp(-(1 - beta) a)),  a = s F (phi - phi_eq) / (R theta) clipped to +-cap."""
    return butler_volmer_value(params, theta, phi, FARADAY, GAS_CONSTANT)


def boundary_source(mesh: Mesh, model: MaterialModel, species: int, theta, phi) -> np.ndarray:
    """Nodal load of int_Gamma g_i / (F z_i) v ds [mol s^-1 per node]."""
    s = model.species[species]
    load = np.zeros(mesh.n_nodes)
    for electrode, params in s.butler_volmer.items():
        w = mesh.boundary_node_weights(electrode)
        nodes = np.flatnonzero(w)
        if nodes.size == 0:
            continue
        g = butler_volmer_flux(params, np.asarray(theta)[nodes], np.asarray(phi)[nodes])
        load[nodes] += w[nodes] * g / (FARADAY * s.valence)
    return load


def drift_flux(mesh: Mesh, coeffs, species: int, c_lag, theta, phi) -> np.ndarray:
    """Cellwise c S grad(theta) + (t sigma / (F z)) grad(phi)."""
    i = species
    c_cell = fem.cell_average(mesh, c_lag)
    return ((c_cell * coeffs.soret[i])[:, None] * fem.cell_gradient(mesh, theta)
            + (coeffs.transference[i] * coeffs.sigma / (coeffs.faraday * coeffs.valence[i]))[:, None]
            * fem.cell_gradient(mesh, phi))


def step_concentration(mesh: Mesh, model: MaterialModel, species: int, c_old, theta, phi,
                       dt: float, *, c_lag=None, include_boundary: bool = True,
                       lin_tol: float = 1e-12) -> np.ndarray:
    """Advance c_i by one implicit Euler step of length ``dt``.

    ``theta`` and ``phi`` are the frozen fields the coefficients and sources
    are evaluated at; ``c_lag`` (default ``c_old``) multiplies the Soret term.
    """
    if not dt > 0:
        raise DomainError(f"time step must be positive, got {dt}")
    c_old = np.asarray(c_old, dtype=float)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c_lag = c_old if c_lag is None else np.asarray(c_lag, dtype=float)
    if not all(np.all(np.isfinite(a)) for a in (c_old, theta, phi, c_lag)):
        raise DivergenceError(f"non-finite field entering the step of species {species}")

    coeffs = fem.cell_coefficients(mesh, model, theta)
    M = mesh.lumped_mass
    A = fem.stiffness(mesh, coeffs.diffusion[species]) + sparse.diags(M / dt)
    b = M * c_old / dt + fem.flux_load(mesh, drift_flux(mesh, coeffs, species, c_lag, theta, phi))
    if include_boundary:
        b += boundary_source(mesh, model, species, theta, phi)
    c_new = fem.solve_spd(A, b, tol=lin_tol, x0=c_old)
    if not np.all(np.isfinite(c_new)):
        raise DivergenceError(f"species {species} concentration became non-finite")
    return c_new


def total_amount(mesh: Mesh, c) -> float:
    """Discrete integral of a nodal field (lumped quadrature)."""
    return float(np.dot(mesh.lumped_mass, c))

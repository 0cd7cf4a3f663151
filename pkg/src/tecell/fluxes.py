"""Pointwise constitutive fluxes: heat, ionic and electric current.

All functions take a :class:`~tecell.materials.CoefficientSet` evaluated at N
points and gradients of shape (N, d); species gradients are (I, N, d).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .materials import CoefficientSet, nernst_einstein_values


@dataclass
class FluxSet:
    q: np.ndarray        # W m^-2, (N, d)
    J: np.ndarray        # mol m^-2 s^-1, (I, N, d)
    j: np.ndarray        # A m^-2, (N, d)


def _col(a):
    return np.asarray(a, dtype=float)[..., None]


def heat_flux(coeffs: CoefficientSet, grad_theta, grad_c, grad_phi, theta) -> np.ndarray:
    """q = -K grad(theta) - R theta^2 sum_i D'_i grad(c_i) - Pi sigma grad(phi)."""
    grad_theta = np.atleast_2d(grad_theta)
    grad_c = np.asarray(grad_c, dtype=float).reshape(len(coeffs.valence), *grad_theta.shape)
    q = -np.einsum("nkl,nl->nk", coeffs.conductivity, grad_theta)
    if grad_c.size:
        q -= coeffs.gas_constant * _col(np.asarray(theta) ** 2) * np.einsum(
            "in,ink->nk", coeffs.dufour, grad_c)
    q -= _col(coeffs.peltier * coeffs.sigma) * np.atleast_2d(grad_phi)
    return q


def ionic_flux(coeffs: CoefficientSet, species: int, conc, grad_theta, grad_ci, grad_phi,
               theta) -> np.ndarray:
    """J_i = -c S grad(theta) - D grad(c) - u c grad(phi), u from Nernst-Einstein."""
    i = species
    D = coeffs.diffusion[i]
    u, _ = nernst_einstein_values(coeffs.valence[i], D, theta, conc, coeffs.sigma,
                                  coeffs.faraday, coeffs.gas_constant)
    conc = np.asarray(conc, dtype=float)
    return (-_col(conc * coeffs.soret[i]) * np.atleast_2d(grad_theta)
            - _col(D) * np.atleast_2d(grad_ci)
            - _col(u * conc) * np.atleast_2d(grad_phi))


def current_density(coeffs: CoefficientSet, grad_theta, grad_c, grad_phi, theta=None) -> np.ndarray:
    """j = -alpha sigma grad(theta) - F sum_i z_i D_i grad(c_i) - sigma grad(phi)."""
    grad_theta = np.atleast_2d(grad_theta)
    grad_c = np.asarray(grad_c, dtype=float).reshape(len(coeffs.valence), *grad_theta.shape)
    j = -_col(coeffs.seebeck * coeffs.sigma) * grad_theta - _col(coeffs.sigma) * np.atleast_2d(grad_phi)
    if grad_c.size:
        j -= coeffs.faraday * np.einsum("i,in,ink->nk", coeffs.valence, coeffs.diffusion, grad_c)
    return j


def all_fluxes(coeffs: CoefficientSet, conc, grad_theta, grad_c, grad_phi, theta) -> FluxSet:
    conc = np.atleast_2d(conc)
    grad_c = np.asarray(grad_c, dtype=float)
    J = np.array([ionic_flux(coeffs, i, conc[i], grad_theta, grad_c[i], grad_phi, theta)
                  for i in range(len(coeffs.valence))])
    return FluxSet(q=heat_flux(coeffs, grad_theta, grad_c, grad_phi, theta), J=J,
                   j=current_density(coeffs, grad_theta, grad_c, grad_phi, theta))

"""Electric potential at frozen temperature and concentrations.

The pure-Neumann problem

    int sigma(theta) grad(phi).grad(v) = int_Gamma g v - int (alpha sigma grad(theta)
                                          + F sum_i z_i D_i grad(c_i)).grad(v)

is solved with one node pinned; the discrete boundary mean is then removed
so that the returned potential has zero mean over the whole boundary.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import fem
from .errors import DivergenceError, IncompatibleDataError
from .geometry import ELECTRODES, TAGS, Mesh
from .materials import MaterialModel


@dataclass
class PotentialSolution:
    phi: np.ndarray
    boundary_mean: float                 # after normalization, V
    residual: float                      # relative residual of the assembled system
    compatibility_defect: float          # int_Gamma g ds, A (per unit cross-section in 1-D)
    boundary_current: dict[str, float] = field(default_factory=dict)  # inward normal current per tag
    total_current: float = 0.0           # assembled boundary current, matches int_Gamma g ds


def surface_current_load(mesh: Mesh, model: MaterialModel,
                         surface_current: Optional[dict[str, float]] = None) -> np.ndarray:
    sc = surface_current if surface_current is not None else model.surface_current.model_dump()
    load = np.zeros(mesh.n_nodes)
    for tag in ELECTRODES:
        load += sc.get(tag, 0.0) * mesh.boundary_node_weights(tag)
    return load


def thermodiffusive_flux(mesh: Mesh, coeffs, theta, conc) -> np.ndarray:
    """Cellwise alpha sigma grad(theta) + F sum_i z_i D_i grad(c_i)."""
    flux = (coeffs.seebeck * coeffs.sigma)[:, None] * fem.cell_gradient(mesh, theta)
    for i, z in enumerate(coeffs.valence):
        flux += coeffs.faraday * z * coeffs.diffusion[i][:, None] * fem.cell_gradient(mesh, conc[i])
    return flux


def solve_potential(mesh: Mesh, model: MaterialModel, theta, conc,
                    surface_current: Optional[dict[str, float]] = None, *,
                    compat_tol: float = 1e-8, lin_tol: float = 1e-12,
                    volume_source: Optional[Callable] = None,
                    sigma: Optional[np.ndarray] = None) -> PotentialSolution:
    """Solve for the potential with zero boundary mean.

    Parameters
    ----------
    theta, conc : ndarray
        Nodal temperature (N,) and concentrations (I, N) the coefficients are frozen at.
    surface_current : dict, optional
        Normal current per electrode tag; defaults to the model's.
    volume_source : callable, optional
        Extra right-hand side f(x) integrated against the test functions by
        quadrature (used for manufactured solutions).
    sigma : ndarray, optional
        Cellwise conductivity overriding the model's law.
    """
    theta = np.asarray(theta, dtype=float)
    conc = np.asarray(conc, dtype=float).reshape(len(model.species), mesh.n_nodes)
    if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(conc))):
        raise DivergenceError("non-finite temperature or concentration passed to the potential solve")

    coeffs = fem.cell_coefficients(mesh, model, theta)
    sig = coeffs.sigma if sigma is None else np.asarray(sigma, dtype=float)
    A = fem.stiffness(mesh, sig)

    g_load = surface_current_load(mesh, model, surface_current)
    defect = float(g_load.sum())
    g_scale = float(np.abs(g_load).sum())
    if abs(defect) > compat_tol * max(g_scale, np.finfo(float).tiny):
        raise IncompatibleDataError(
            f"net surface current {defect:.6g} exceeds tolerance {compat_tol:g} x {g_scale:.6g}")

    b_vol = fem.flux_load(mesh, thermodiffusive_flux(mesh, coeffs, theta, conc))
    if volume_source is not None:
        pts, w, bary = fem.quadrature(mesh)
        f = volume_source(pts.reshape(-1, mesh.dimension)).reshape(w.shape)
        local = np.einsum("mq,mq,qi->mi", w, f, bary)
        np.add.at(b_vol, mesh.cells.ravel(), local.ravel())
    b = g_load + b_vol

    # remove the (tolerated) incompatibility so every equation can hold exactly
    total = b.sum()
    if total != 0.0:
        w_gamma = mesh.boundary_node_weights(ELECTRODES)
        spread = w_gamma if w_gamma.sum() > 0 else mesh.lumped_mass
        b = b - total * spread / spread.sum()

    phi = np.zeros(mesh.n_nodes)
    if mesh.n_nodes > 1:
        A_red = A[1:, :][:, 1:]
        phi[1:] = fem.solve_spd(A_red, b[1:], tol=lin_tol)

    w_bnd = mesh.boundary_node_weights(TAGS)
    phi -= np.dot(w_bnd, phi) / w_bnd.sum()
    mean = float(np.dot(w_bnd, phi) / w_bnd.sum())

    r = A @ phi - b
    residual = float(np.linalg.norm(r) / max(np.linalg.norm(b), np.finfo(float).tiny))

    # inward normal current per tag from the cell gradients next to each face
    flux = sig[:, None] * fem.cell_gradient(mesh, phi) + thermodiffusive_flux(mesh, coeffs, theta, conc)
    normal = np.einsum("fd,fd->f", flux[mesh.face_cells], mesh.face_normals) * mesh.face_areas
    current = {tag: float(normal[mesh.face_mask(tag)].sum()) for tag in TAGS}
    # total through the whole boundary from the assembled equations
    total_current = float(np.sum((A @ phi - b_vol)[w_bnd > 0]))
    return PotentialSolution(phi=phi, boundary_mean=mean, residual=residual,
                             compatibility_defect=defect, boundary_current=current,
                             total_current=total_current)


def energy_estimate(mesh: Mesh, model: MaterialModel, phi, theta, conc,
                    trace_constant: float = 1.0) -> tuple[float, float]:
    """Both sides of  sigma_# |grad phi|_2 <= K |g|_2,Gamma + sigma^# alpha^# |grad theta|_2
    + sum_j D_j^# |grad c_j|_2  for a discrete solution."""
    b = model.bounds()
    vol = mesh.cell_volumes

    def grad_l2(u):
        return float(np.sqrt(np.dot(vol, (fem.cell_gradient(mesh, u) ** 2).sum(axis=1))))

    g = surface_current_load(mesh, model)
    w = mesh.boundary_node_weights(ELECTRODES)
    g_nodal = np.divide(g, w, out=np.zeros_like(g), where=w > 0)
    g_l2 = float(np.sqrt(np.dot(w, g_nodal ** 2)))
    conc = np.atleast_2d(conc)
    rhs = (trace_constant * g_l2 + b.sigma_max * b.seebeck * grad_l2(theta)
           + sum(sb.d_sharp * grad_l2(c) for sb, c in zip(b.species, conc)))
    return b.sigma_min * grad_l2(phi), rhs

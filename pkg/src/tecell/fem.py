"""P1 finite-element building blocks on simplicial meshes.

Coefficients are piecewise constant (evaluated at cell centroids); nodal
masses are lumped so the parabolic steps keep the M-matrix structure.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sparse
import scipy.sparse.linalg as spla

from .errors import AssemblyError
from .geometry import Mesh

DIRECT_SOLVE_LIMIT = 100_000


def stiffness(mesh: Mesh, coef: np.ndarray) -> sparse.csr_matrix:
    """Assemble  A_ij = sum_cells |T| (coef grad l_j) . grad l_i.

    ``coef`` is (M,) for an isotropic coefficient or (M, d, d) for a tensor.
    """
    g = mesh.basis_gradients
    coef = np.asarray(coef, dtype=float)
    if coef.ndim == 1:
        local = np.einsum("m,mik,mjk->mij", coef * mesh.cell_volumes, g, g)
    else:
        local = np.einsum("m,mkl,mjl,mik->mij", mesh.cell_volumes, coef, g, g)
    n = mesh.cells.shape[1]
    rows = np.repeat(mesh.cells, n, axis=1).ravel()
    cols = np.tile(mesh.cells, (1, n)).ravel()
    return sparse.csr_matrix((local.ravel(), (rows, cols)), shape=(mesh.n_nodes,) * 2)


def cell_gradient(mesh: Mesh, u: np.ndarray) -> np.ndarray:
    """Gradient of the P1 interpolant of nodal ``u`` on each cell, shape (M, d)."""
    return np.einsum("mi,mik->mk", np.asarray(u)[mesh.cells], mesh.basis_gradients)


def cell_average(mesh: Mesh, u: np.ndarray) -> np.ndarray:
    return np.asarray(u)[mesh.cells].mean(axis=1)


def flux_load(mesh: Mesh, flux: np.ndarray) -> np.ndarray:
    """Load vector of  -int_Omega flux . grad v  for cellwise-constant ``flux`` (M, d)."""
    contrib = -np.einsum("m,mk,mik->mi", mesh.cell_volumes, flux, mesh.basis_gradients)
    load = np.zeros(mesh.n_nodes)
    np.add.at(load, mesh.cells.ravel(), contrib.ravel())
    return load


def l2_norm(mesh: Mesh, u: np.ndarray) -> float:
    """Discrete L2 norm with lumped quadrature."""
    return float(np.sqrt(np.dot(mesh.lumped_mass, np.asarray(u) ** 2)))


def solve_spd(A: sparse.spmatrix, b: np.ndarray, tol: float = 1e-12,
              x0: np.ndarray | None = None) -> np.ndarray:
    """Direct sparse LU below DIRECT_SOLVE_LIMIT unknowns, else Jacobi-preconditioned CG."""
    A = sparse.csc_matrix(A)
    n = A.shape[0]
    if n <= DIRECT_SOLVE_LIMIT:
        try:
            x = spla.splu(A).solve(np.asarray(b, dtype=float))
        except RuntimeError as exc:  # singular factor
            raise AssemblyError(f"sparse factorization failed: {exc}") from exc
    else:
        d = A.diagonal()
        if np.any(d <= 0):
            raise AssemblyError("non-positive diagonal in SPD system")
        M = spla.LinearOperator((n, n), matvec=lambda v: v / d)
        x, info = spla.cg(A, b, x0=x0, rtol=tol, atol=0.0, M=M, maxiter=10 * n)
        if info != 0:
            raise AssemblyError(f"conjugate gradients did not converge (info={info})")
    if not np.all(np.isfinite(x)):
        raise AssemblyError("linear solve produced non-finite values")
    return x


# symmetric quadrature on the reference triangle, exact for degree 4
_TRI_BARY = np.array([
    [1 / 3, 1 / 3, 1 / 3],
    [0.108103018168070, 0.445948490915965, 0.445948490915965],
    [0.445948490915965, 0.108103018168070, 0.445948490915965],
    [0.445948490915965, 0.445948490915965, 0.108103018168070],
    [0.816847572980459, 0.091576213509771, 0.091576213509771],
    [0.091576213509771, 0.816847572980459, 0.091576213509771],
    [0.091576213509771, 0.091576213509771, 0.816847572980459],
])
_TRI_W = np.array([0.225, *[0.132394152788506] * 3, *[0.125939180544827] * 3])
_LINE_BARY = np.array([[0.5 - 0.5 * np.sqrt(3 / 5), 0.5 + 0.5 * np.sqrt(3 / 5)],
                       [0.5, 0.5],
                       [0.5 + 0.5 * np.sqrt(3 / 5), 0.5 - 0.5 * np.sqrt(3 / 5)]])
_LINE_W = np.array([5 / 18, 8 / 18, 5 / 18])


def quadrature(mesh: Mesh):
    """Physical quadrature points (M, q, d), weights (M, q) and barycentrics (q, d+1)."""
    bary, w = (_LINE_BARY, _LINE_W) if mesh.dimension == 1 else (_TRI_BARY, _TRI_W)
    pts = np.einsum("qi,mid->mqd", bary, mesh.nodes[mesh.cells])
    return pts, mesh.cell_volumes[:, None] * w[None, :], bary


def cell_coefficients(mesh: Mesh, model, theta: np.ndarray):
    """Material coefficients at cell centroids, with the cell-averaged temperature."""
    return model.evaluate(mesh.centroids, cell_average(mesh, theta), dim=mesh.dimension)


def boundary_tag_values(mesh: Mesh, values: dict[str, float]) -> np.ndarray:
    """Nodal field holding ``values[tag]`` on nodes of that tag, 0 elsewhere."""
    out = np.zeros(mesh.n_nodes)
    tags = np.array(mesh.node_tags)
    for tag, v in values.items():
        out[tags == tag] = v
    return out

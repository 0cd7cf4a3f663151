"""Interval and rectangle meshes with tagged boundary parts.

The boundary of the cell is split into anode, cathode, wall and outer parts.
Every boundary face carries exactly one tag.  In 1-D a face is a single end
point with unit "area" (unit cross-section convention), so surface integrals
reduce to point evaluations.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import factorial
from pathlib import Path

import numpy as np

from .errors import InvalidGeometryError

TAGS = ("anode", "cathode", "wall", "outer")
# corner nodes belong to the highest-priority adjacent tag
TAG_PRIORITY = {tag: rank for rank, tag in enumerate(TAGS)}
ELECTRODES = ("anode", "cathode")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Mesh:
    """Simplicial mesh (intervals in 1-D, triangles in 2-D).

    Attributes
    ----------
    nodes : (N, d) ndarray
        Node coordinates in metres.
    cells : (M, d+1) ndarray of int
        Vertex indices of each simplex.
    faces : (F, d) ndarray of int
        Vertex indices of each boundary face.
    face_tags : tuple of str
        One tag per boundary face.
    """

    nodes: np.ndarray
    cells: np.ndarray
    faces: np.ndarray
    face_tags: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", _readonly(np.asarray(self.nodes, dtype=float)))
        object.__setattr__(self, "cells", _readonly(np.asarray(self.cells, dtype=np.int64)))
        object.__setattr__(self, "faces", _readonly(np.asarray(self.faces, dtype=np.int64)))
        object.__setattr__(self, "face_tags", tuple(self.face_tags))
        if len(self.face_tags) != len(self.faces):
            raise InvalidGeometryError("one tag per boundary face is required")
        bad = set(self.face_tags) - set(TAGS)
        if bad:
            raise InvalidGeometryError(f"unknown boundary tags {sorted(bad)}")
        if np.any(self.cell_volumes <= 0.0):
            raise InvalidGeometryError("degenerate or inverted cell")

    @property
    def dimension(self) -> int:
        return self.nodes.shape[1]

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_cells(self) -> int:
        return self.cells.shape[0]

    @cached_property
    def _jacobians(self) -> np.ndarray:
        x = self.nodes[self.cells]  # (M, d+1, d)
        return np.transpose(x[:, 1:, :] - x[:, :1, :], (0, 2, 1))  # columns = edges

    @cached_property
    def cell_volumes(self) -> np.ndarray:
        d = self.dimension
        return _readonly(np.abs(np.linalg.det(self._jacobians)) / factorial(d))

    @cached_property
    def basis_gradients(self) -> np.ndarray:
        """Constant gradients of the P1 hat functions, shape (M, d+1, d)."""
        inv = np.linalg.inv(self._jacobians)  # rows of inv are grads of lambda_1..lambda_d
        g = np.empty((self.n_cells, self.dimension + 1, self.dimension))
        g[:, 1:, :] = inv
        g[:, 0, :] = -inv.sum(axis=1)
        return _readonly(g)

    @cached_property
    def centroids(self) -> np.ndarray:
        return _readonly(self.nodes[self.cells].mean(axis=1))

    @cached_property
    def face_areas(self) -> np.ndarray:
        if self.dimension == 1:
            return _readonly(np.ones(len(self.faces)))
        p = self.nodes[self.faces]
        return _readonly(np.linalg.norm(p[:, 1] - p[:, 0], axis=1))

    @cached_property
    def face_cells(self) -> np.ndarray:
        """Index of the cell each boundary face belongs to."""
        owner = {}
        for c, verts in enumerate(self.cells):
            for k in range(len(verts)):
                owner[tuple(sorted(np.delete(verts, k)))] = c
        return _readonly(np.array([owner[tuple(sorted(f))] for f in self.faces], dtype=np.int64))

    @cached_property
    def face_normals(self) -> np.ndarray:
        """Outward unit normal of each boundary face."""
        x = self.nodes
        if self.dimension == 1:
            n = np.sign(x[self.faces[:, 0], 0] - self.centroids[self.face_cells, 0])[:, None]
            return _readonly(n)
        t = x[self.faces[:, 1]] - x[self.faces[:, 0]]
        n = np.column_stack([t[:, 1], -t[:, 0]]) / np.linalg.norm(t, axis=1)[:, None]
        inward = np.einsum("fd,fd->f", n, self.centroids[self.face_cells] - x[self.faces[:, 0]]) > 0
        n[inward] *= -1.0
        return _readonly(n)

    @property
    def volume(self) -> float:
        return float(self.cell_volumes.sum())

    @cached_property
    def node_tags(self) -> tuple[str, ...]:
        """Boundary tag of each node ('' for interior nodes), corners by priority."""
        rank = np.full(self.n_nodes, len(TAGS))
        for face, tag in zip(self.faces, self.face_tags):
            rank[face] = np.minimum(rank[face], TAG_PRIORITY[tag])
        return tuple(TAGS[r] if r < len(TAGS) else "" for r in rank)

    def face_mask(self, tags) -> np.ndarray:
        if isinstance(tags, str):
            tags = (tags,)
        return np.array([t in tags for t in self.face_tags], dtype=bool)

    def boundary_node_weights(self, tags) -> np.ndarray:
        """Lumped boundary mass: each face spreads its area equally over its nodes."""
        w = np.zeros(self.n_nodes)
        mask = self.face_mask(tags)
        faces = self.faces[mask]
        share = self.face_areas[mask] / self.faces.shape[1]
        for k in range(self.faces.shape[1]):
            np.add.at(w, faces[:, k], share)
        return w

    @cached_property
    def lumped_mass(self) -> np.ndarray:
        w = np.zeros(self.n_nodes)
        share = self.cell_volumes / self.cells.shape[1]
        for k in range(self.cells.shape[1]):
            np.add.at(w, self.cells[:, k], share)
        return _readonly(w)


def _check_tags(*tags: str) -> None:
    for tag in tags:
        if tag not in TAGS:
            raise InvalidGeometryError(f"invalid boundary tag {tag!r}; expected one of {TAGS}")


def build_interval_mesh(length: float, cells: int, left_tag: str = "anode",
                        right_tag: str = "cathode") -> Mesh:
    """Uniform mesh of (0, length) with tagged end points."""
    if not length > 0:
        raise InvalidGeometryError(f"length must be positive, got {length}")
    if int(cells) != cells or cells < 1:
        raise InvalidGeometryError(f"need at least one cell, got {cells}")
    _check_tags(left_tag, right_tag)
    cells = int(cells)
    x = np.linspace(0.0, length, cells + 1)[:, None]
    conn = np.column_stack([np.arange(cells), np.arange(1, cells + 1)])
    faces = np.array([[0], [cells]])
    return Mesh(x, conn, faces, (left_tag, right_tag))


def build_rectangle_mesh(width: float, height: float, nx: int, ny: int,
                         side_tags: dict[str, str]) -> Mesh:
    """Structured right-triangle mesh of (0, width) x (0, height).

    ``side_tags`` maps each of 'left', 'right', 'bottom', 'top' to a tag.
    Every square is split along its (0,0)-(1,1) diagonal, so there are
    ``2 * nx * ny`` triangles, none of them obtuse.
    """
    if not (width > 0 and height > 0):
        raise InvalidGeometryError("width and height must be positive")
    if int(nx) != nx or int(ny) != ny or nx < 1 or ny < 1:
        raise InvalidGeometryError("nx and ny must be positive integers")
    sides = ("left", "right", "bottom", "top")
    if set(side_tags) != set(sides):
        raise InvalidGeometryError(f"side_tags must assign exactly the sides {sides}")
    _check_tags(*side_tags.values())
    nx, ny = int(nx), int(ny)
    xs = np.linspace(0.0, width, nx + 1)
    ys = np.linspace(0.0, height, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    def idx(i, j):
        return j * (nx + 1) + i

    i, j = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
    i, j = i.ravel(), j.ravel()
    n00, n10, n01, n11 = idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1)
    tri = np.concatenate([np.column_stack([n00, n10, n11]), np.column_stack([n00, n11, n01])])

    faces, tags = [], []
    for k in range(nx):
        faces.append((idx(k, 0), idx(k + 1, 0)))
        tags.append(side_tags["bottom"])
        faces.append((idx(k, ny), idx(k + 1, ny)))
        tags.append(side_tags["top"])
    for k in range(ny):
        faces.append((idx(0, k), idx(0, k + 1)))
        tags.append(side_tags["left"])
        faces.append((idx(nx, k), idx(nx, k + 1)))
        tags.append(side_tags["right"])
    return Mesh(nodes, tri, np.array(faces), tuple(tags))


def boundary_measure(mesh: Mesh, tag: str) -> float:
    """Total area of the faces carrying ``tag`` (0 if none)."""
    _check_tags(tag)
    return float(mesh.face_areas[mesh.face_mask(tag)].sum())


def write_vtk(path, mesh: Mesh, point_data: dict[str, np.ndarray] | None = None,
              cell_data: dict[str, np.ndarray] | None = None, title: str = "tecell") -> Path:
    """Write a legacy ASCII VTK unstructured grid."""
    path = Path(path)
    pts = np.zeros((mesh.n_nodes, 3))
    pts[:, : mesh.dimension] = mesh.nodes
    vtk_type = 3 if mesh.dimension == 1 else 5  # VTK_LINE, VTK_TRIANGLE
    npc = mesh.cells.shape[1]
    lines = ["# vtk DataFile Version 3.0", title, "ASCII", "DATASET UNSTRUCTURED_GRID",
             f"POINTS {mesh.n_nodes} double"]
    lines += [f"{p[0]:.17g} {p[1]:.17g} {p[2]:.17g}" for p in pts]
    lines.append(f"CELLS {mesh.n_cells} {mesh.n_cells * (npc + 1)}")
    lines += [f"{npc} " + " ".join(map(str, c)) for c in mesh.cells]
    lines.append(f"CELL_TYPES {mesh.n_cells}")
    lines += [str(vtk_type)] * mesh.n_cells

    def block(kind, n, data):
        if not data:
            return []
        out = [f"{kind} {n}"]
        for name, values in data.items():
            values = np.asarray(values, dtype=float)
            if values.ndim == 1:
                out += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
                out += [f"{v:.17g}" for v in values]
            else:
                vec = np.zeros((n, 3))
                vec[:, : values.shape[1]] = values
                out.append(f"VECTORS {name} double")
                out += [f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}" for v in vec]
        return out

    lines += block("POINT_DATA", mesh.n_nodes, point_data)
    lines += block("CELL_DATA", mesh.n_cells, cell_data)
    path.write_text("\n".join(lines) + "\n")
    return path

"""CSV, JSON and VTK writers for run and certificate artifacts."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .coupler import FieldState, Trajectory, field_norms
from .geometry import Mesh, write_vtk


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return "" if v is None else str(v)


def csv_text(columns: Sequence[tuple[str, str]], rows: Iterable[Sequence]) -> str:
    """CSV with a leading '# name [unit], ...' comment line describing the columns."""
    buf = io.StringIO()
    buf.write("# " + ", ".join(f"{name} [{unit}]" for name, unit in columns) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([name for name, _ in columns])
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def read_csv(path) -> list[dict[str, str]]:
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def trajectory_columns(species: Sequence[str]) -> list[tuple[str, str]]:
    cols = [("t", "s"), ("theta_l2", "K m^(d/2)")]
    cols += [(f"c_{name}_l2", "mol m^-3 m^(d/2)") for name in species]
    cols += [("phi_l2", "V m^(d/2)"), ("picard_iterations", "-"), ("residual", "-"),
             ("negative_count", "-"), ("clamp_count", "-")]
    return cols


def trajectory_csv(mesh: Mesh, traj: Trajectory, species: Sequence[str]) -> str:
    rows = []
    for k, state in enumerate(traj.states):
        norms = field_norms(mesh, state)
        step = traj.steps[k - 1] if k > 0 else None
        rows.append([state.t, norms["theta"], *[norms[f"c{i}"] for i in range(len(species))],
                     norms["phi"], step.iterations if step else 0,
                     step.residuals[-1] if step and step.residuals else 0.0,
                     state.negative_count, state.clamp_count])
    return csv_text(trajectory_columns(species), rows)


def snapshot_csv(mesh: Mesh, state: FieldState, species: Sequence[str]) -> str:
    cols = [(f"x{k}", "m") for k in range(mesh.dimension)] + [("theta", "K")]
    cols += [(f"c_{name}", "mol m^-3") for name in species] + [("phi", "V")]
    rows = [[*mesh.nodes[n], state.theta[n], *state.conc[:, n], state.phi[n]]
            for n in range(mesh.n_nodes)]
    return csv_text(cols, rows)


def write_snapshot(directory, index: int, mesh: Mesh, state: FieldState, species: Sequence[str],
                   vtk: bool) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = [directory / f"snapshot_{index:05d}.csv"]
    paths[0].write_text(snapshot_csv(mesh, state, species))
    if vtk:
        data = {"theta": state.theta, "phi": state.phi}
        data.update({f"c_{name}": c for name, c in zip(species, state.conc)})
        paths.append(write_vtk(directory / f"snapshot_{index:05d}.vtk", mesh, data,
                               title=f"t={state.t!r}"))
    return paths


def write_json(path, data) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path

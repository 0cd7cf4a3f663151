"""Data norms for the certificate, from the mesh and the material envelopes."""
from __future__ import annotations

from dataclasses import fields, replace
from typing import Optional

import numpy as np

from ..geometry import Mesh, boundary_measure
from ..materials import MaterialModel
from .constants import DataNorms, SpeciesNorms


def _field_norm(mesh: Mesh, u, q: float) -> float:
    return float(np.dot(mesh.lumped_mass, np.abs(u) ** q) ** (1 / q))


def _piecewise_norm(pieces: list[tuple[float, float]], q: float) -> float:
    """(sum |v|^q m)^(1/q) for constant values v on sets of measure m."""
    return float(sum(abs(v) ** q * m for v, m in pieces) ** (1 / q))


def data_norms(mesh: Mesh, model: MaterialModel, p: float, T: float) -> DataNorms:
    """Norms of g, gamma_i, gamma_w, gamma_e and the initial data.

    Boundary envelopes are constant on their boundary parts, so their
    space-time norms are exact; initial data use lumped quadrature.
    """
    pp = p / (p - 1)
    ell = model.radiation.exponent
    lp = ell / (ell - 1)
    meas = {tag: boundary_measure(mesh, tag) for tag in ("anode", "cathode", "wall")}
    sc = model.surface_current
    g = [(sc.anode, meas["anode"]), (sc.cathode, meas["cathode"])]

    theta0 = model.initial_temperature.evaluate(mesh.nodes, np.zeros(mesh.n_nodes))
    gw = model.gamma_wall_envelope()
    wall_T = meas["wall"] * T
    hc = model.cooling.max
    ge = [(hc * abs(model.cooling.theta_anode), meas["anode"] * T),
          (hc * abs(model.cooling.theta_cathode), meas["cathode"] * T)]

    species = []
    for s in model.species:
        c0 = s.initial_concentration.evaluate(mesh.nodes, theta0)
        env = s.gamma_envelope()
        parts = [(env, meas[e] * T) for e in s.butler_volmer] or [(env, 0.0)]
        species.append(SpeciesNorms(
            gamma_2=_piecewise_norm(parts, 2), gamma_p=_piecewise_norm(parts, p),
            gamma_pprime=_piecewise_norm(parts, pp),
            c0_2=_field_norm(mesh, c0, 2), c0_p=_field_norm(mesh, c0, p)))

    return DataNorms(
        g_2=_piecewise_norm(g, 2), g_p=_piecewise_norm(g, p),
        theta0_2=_field_norm(mesh, theta0, 2), theta0_p=_field_norm(mesh, theta0, p),
        gw_lprime=gw ** lp * wall_T, gw_p=gw * wall_T ** (1 / p),
        gw_int=gw ** ((ell + p - 2) / (ell - 1)) * wall_T,
        ge_2=_piecewise_norm(ge, 2), ge_p=_piecewise_norm(ge, p),
        ge_pprime=_piecewise_norm(ge, pp),
        species=tuple(species))


def apply_overrides(norms: DataNorms, overrides: Optional[dict]) -> DataNorms:
    """Replace computed norms by analytic values.

    ``overrides`` maps DataNorms field names to numbers; the key ``species``
    maps a species index (or name, with ``names``) to a dict of SpeciesNorms fields.
    """
    if not overrides:
        return norms
    top = {k: float(v) for k, v in overrides.items() if k != "species"}
    unknown = set(top) - {f.name for f in fields(DataNorms)}
    if unknown:
        raise KeyError(f"unknown norm override(s) {sorted(unknown)}")
    species = list(norms.species)
    for key, vals in (overrides.get("species") or {}).items():
        i = int(key)
        species[i] = replace(species[i], **{k: float(v) for k, v in vals.items()})
    return replace(norms, species=tuple(species), **top)

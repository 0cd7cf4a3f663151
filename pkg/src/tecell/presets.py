"""Molten sodium chloride electrolysis cell (Downs-type)."""
from __future__ import annotations

import math

from .materials import FARADAY, GAS_CONSTANT, MaterialModel, nernst_einstein_values

PRESET_NAME = "nacl-downs"

THETA_RANGE = (1080.0, 1250.0)
THETA_INITIAL = 1100.0
C0 = 2.5667e4                # mol m^-3, both ions
LENGTH = 0.13                # m, electrode gap of the 1-D reduction
CURRENT = 1.0e4              # A m^-2 operating current density
EXCHANGE_CURRENT = 1.0e4     # A m^-2
SEEBECK = 7.0e-5             # V K^-1, within the 1e-5 .. 1e-4 range
DUFOUR_RECIPROCAL = 6.9281e5
E_REDUCTION = -2.71          # V, Na+ + e- -> Na
E_OXIDATION = -1.36          # V, 2Cl- -> Cl2 + 2e-
VOLUME = 1.5e-3              # m^3


def cell_standard_potential() -> float:
    return E_REDUCTION + E_OXIDATION


def _linear(lo, hi):
    return {"kind": "table", "theta": list(THETA_RANGE), "values": [lo, hi]}


def _at_initial(lo, hi):
    f = (THETA_INITIAL - THETA_RANGE[0]) / (THETA_RANGE[1] - THETA_RANGE[0])
    return lo + f * (hi - lo)


def nacl_material_dict() -> dict:
    """Raw material block of the preset (plain JSON types, suitable for overrides)."""
    sigma0 = _at_initial(359.7, 398.0)
    # overpotential giving |g| = CURRENT with 2 J sinh(F eta / R theta)
    eta = math.asinh(CURRENT / (2 * EXCHANGE_CURRENT)) * GAS_CONSTANT * THETA_INITIAL / FARADAY
    drop = CURRENT * LENGTH / sigma0   # ohmic drop of the initial state, anode above cathode
    dufour_bound = 1.0 / DUFOUR_RECIPROCAL
    dufour_law = dufour_bound / (GAS_CONSTANT * THETA_RANGE[1] ** 2)

    def species(name, z, d_lo, d_hi, soret, electrode, phi_eq):
        D0 = _at_initial(d_lo, d_hi)
        _, t0 = nernst_einstein_values(z, D0, THETA_INITIAL, C0, sigma0)
        return {
            "name": name, "valence": z,
            "diffusion": _linear(d_lo, d_hi), "diffusion_min": d_lo, "diffusion_max": d_hi,
            "soret": soret, "soret_max": soret * C0,
            "dufour": dufour_law, "dufour_max": dufour_bound,
            "transference": float(t0),
            "initial_concentration": C0, "concentration_max": C0,
            "butler_volmer": {electrode: {"j0": EXCHANGE_CURRENT, "beta": 0.5, "electrons": 2,
                                          "phi_eq": phi_eq, "cap": 30.0, "stoich": 1.0}},
        }

    return {
        "preset": PRESET_NAME,
        "constants": {"density": 1500.0, "heat_capacity": 1197.8},
        "theta_range": list(THETA_RANGE),
        "conductivity": {"law": _linear(359.7, 398.0), "min": 359.7, "max": 398.0},
        "seebeck": {"law": SEEBECK, "max": SEEBECK},
        "peltier": {"kelvin": True},
        "thermal_conductivity": {"law": _linear(0.5, 0.6), "min": 0.5, "max": 0.6},
        "radiation": {"exponent": 5.0, "emissivity": _linear(0.2, 0.5),
                      "emissivity_min": 0.2, "emissivity_max": 0.5,
                      "wall_temperature": THETA_INITIAL},
        "cooling": {"law": 1000.0, "max": 1820.0,
                    "theta_anode": THETA_INITIAL, "theta_cathode": THETA_INITIAL},
        "surface_current": {"anode": CURRENT, "cathode": -CURRENT},
        "initial_temperature": THETA_INITIAL,
        "species": [
            species("Na+", 1, 7.7e-9, 12e-9, 1.2e-12, "cathode", -0.5 * drop + eta),
            species("Cl-", -1, 6.3e-9, 9.5e-9, 9.5e-11, "anode", 0.5 * drop - eta),
        ],
    }


def nacl_config_dict(dimension: int = 1) -> dict:
    if dimension == 1:
        geometry = {"dimension": 1, "length": LENGTH, "cells": 64,
                    "left_tag": "anode", "right_tag": "cathode"}
    else:
        geometry = {"dimension": 2, "width": LENGTH, "height": LENGTH, "nx": 16, "ny": 16,
                    "side_tags": {"left": "anode", "right": "cathode",
                                  "bottom": "wall", "top": "outer"}}
    return {
        "schema_version": 1,
        "geometry": geometry,
        "material": {"preset": PRESET_NAME},
        "solver": {"dt": 1.0, "t_final": 60.0},
        "certificate": {"n": 3, "volume": VOLUME, "T": 1.0},
    }


def nacl_preset(dimension: int = 1):
    """The molten-NaCl cell as ``(MaterialModel, CellConfig)``."""
    from .config import CellConfig

    model = MaterialModel.model_validate(nacl_material_dict())
    return model, CellConfig.model_validate(nacl_config_dict(dimension))

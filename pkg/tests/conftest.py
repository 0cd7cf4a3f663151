"""Shared builders for small material models and meshes."""
from __future__ import annotations

import copy

import pytest

from tecell.config import deep_merge
from tecell.materials import MaterialModel
from tecell.presets import nacl_material_dict, nacl_preset


def simple_material(**overrides) -> dict:
    """Single-species material with every coupling switched off."""
    base = {
        "constants": {"density": 1500.0, "heat_capacity": 1200.0},
        "theta_range": [1000.0, 1300.0],
        "conductivity": {"law": 380.0, "min": 380.0, "max": 380.0},
        "thermal_conductivity": {"law": 0.5, "min": 0.5, "max": 0.5},
        "initial_temperature": 1100.0,
        "species": [{
            "name": "A", "valence": 1, "diffusion": 1e-8, "diffusion_min": 1e-8,
            "diffusion_max": 1e-8, "initial_concentration": 100.0, "concentration_max": 100.0,
            "transference": 0.0, "transference_max": 0.0,
        }],
    }
    return deep_merge(base, overrides)


def simple_model(**overrides) -> MaterialModel:
    return MaterialModel.model_validate(simple_material(**overrides))


def decoupled_config(dimension: int = 1, t_final: float = 5.0) -> dict:
    """Config of the preset geometry with a fully decoupled material."""
    geometry = ({"dimension": 1, "length": 0.13, "cells": 16} if dimension == 1 else
                {"dimension": 2, "width": 0.13, "height": 0.13, "nx": 6, "ny": 6,
                 "side_tags": {"left": "anode", "right": "cathode", "bottom": "wall", "top": "outer"}})
    return {
        "schema_version": 1,
        "geometry": geometry,
        "material": simple_material(),
        "solver": {"dt": 1.0, "t_final": t_final},
        "certificate": {"n": dimension, "T": 1.0},
    }


@pytest.fixture(scope="session")
def nacl():
    """(MaterialModel, CellConfig) of the 1-D preset."""
    return nacl_preset(1)


@pytest.fixture
def nacl_dict():
    return copy.deepcopy(nacl_material_dict())


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])

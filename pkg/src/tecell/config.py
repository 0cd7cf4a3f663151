"""Run configuration: one JSON document with a versioned schema."""
from __future__ import annotations

import copy
import json
from pathlib import Path
from typing import Annotated, Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .certificate.constants import EmbeddingConstants
from .coupler import PicardSettings
from .errors import ConfigError
from .geometry import Mesh, build_interval_mesh, build_rectangle_mesh
from .materials import MaterialModel

SCHEMA_VERSION = 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class IntervalGeometry(_Strict):
    dimension: Literal[1] = 1
    length: float = Field(gt=0)
    cells: int = Field(ge=1)
    left_tag: str = "anode"
    right_tag: str = "cathode"

    def build(self) -> Mesh:
        return build_interval_mesh(self.length, self.cells, self.left_tag, self.right_tag)


class RectangleGeometry(_Strict):
    dimension: Literal[2] = 2
    width: float = Field(gt=0)
    height: float = Field(gt=0)
    nx: int = Field(ge=1)
    ny: int = Field(ge=1)
    side_tags: dict[str, str]

    def build(self) -> Mesh:
        return build_rectangle_mesh(self.width, self.height, self.nx, self.ny, self.side_tags)


Geometry = Annotated[Union[IntervalGeometry, RectangleGeometry], Field(discriminator="dimension")]


class SolverBlock(_Strict):
    dt: float = Field(gt=0)
    t_final: float = Field(ge=0)
    picard: PicardSettings = PicardSettings()
    lin_tol: float = Field(default=1e-12, gt=0)
    compat_tol: float = Field(default=1e-8, gt=0)
    bv_cap: Optional[float] = Field(default=None, gt=0)


class CertificateBlock(EmbeddingConstants):
    symbolic: bool = False
    norms: Optional[dict[str, Any]] = None

    def embedding(self) -> EmbeddingConstants:
        return EmbeddingConstants(**self.model_dump(exclude={"symbolic", "norms"}))


class OutputBlock(_Strict):
    directory: str = "output"
    snapshot_every: int = Field(default=0, ge=0)   # 0: no snapshots
    vtk: bool = False


def deep_merge(base: Any, override: Any) -> Any:
    """Recursive dict merge; lists of dicts of equal length merge item by item."""
    if isinstance(base, dict) and isinstance(override, dict):
        out = copy.deepcopy(base)
        for k, v in override.items():
            out[k] = deep_merge(base[k], v) if k in base else copy.deepcopy(v)
        return out
    if (isinstance(base, list) and isinstance(override, list) and len(base) == len(override)
            and all(isinstance(x, dict) for x in base + override)):
        return [deep_merge(a, b) for a, b in zip(base, override)]
    return copy.deepcopy(override)


def resolve_material(raw: dict, bv_cap: Optional[float] = None) -> MaterialModel:
    """Material dict, optionally naming a preset whose entries the remaining keys override."""
    from .presets import PRESET_NAME, nacl_material_dict

    raw = dict(raw)
    name = raw.get("preset")
    if name is not None:
        if name != PRESET_NAME:
            raise ValueError(f"unknown preset {name!r}; available: {PRESET_NAME!r}")
        raw = deep_merge(nacl_material_dict(), raw)
    if bv_cap is not None:
        for s in raw.get("species", []):
            for params in s.get("butler_volmer", {}).values():
                params["cap"] = bv_cap
    return MaterialModel.model_validate(raw)


class CellConfig(_Strict):
    schema_version: Literal[1] = SCHEMA_VERSION
    geometry: Geometry
    material: dict[str, Any]
    solver: SolverBlock
    certificate: CertificateBlock = CertificateBlock()
    output: OutputBlock = OutputBlock()

    @field_validator("material")
    @classmethod
    def _material_resolves(cls, v):
        resolve_material(v)
        return v

    def material_model(self) -> MaterialModel:
        return resolve_material(self.material, self.solver.bv_cap)

    def mesh(self) -> Mesh:
        return self.geometry.build()

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True)


def _format_errors(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = list(err["loc"])
        if len(loc) > 1 and loc[0] == "geometry" and loc[1] in (1, 2):
            del loc[1]   # discriminator value of the geometry union
        path = ".".join(str(p) for p in loc) or "<root>"
        lines.append(f"{path}: {err['msg']}")
    return "; ".join(lines)


def parse_config(data: dict) -> CellConfig:
    try:
        return CellConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc)) from exc


def load_config(path) -> CellConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return parse_config(data)


def set_dotted(data: dict, key: str, value: Any) -> dict:
    """Copy of ``data`` with the dotted ``key`` set (list items addressed by index)."""
    out = copy.deepcopy(data)
    parts = key.split(".")
    node = out
    for part, nxt in zip(parts[:-1], parts[1:]):
        if isinstance(node, list):
            node = node[int(part)]
        elif part in node:
            node = node[part]
        elif nxt.isdigit():
            raise KeyError(f"{key}: no list at {part!r}")
        else:
            node = node.setdefault(part, {})
    last = parts[-1]
    if isinstance(node, list):
        node[int(last)] = value
    else:
        node[last] = value
    return out

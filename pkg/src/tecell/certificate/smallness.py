"""Smallness conditions and invariant-set radii."""
from __future__ import annotations

from typing import Optional

from pydantic import BaseModel

from ..errors import IncompleteModelError
from ..geometry import Mesh
from ..materials import HypothesisBounds, MaterialModel
from .constants import (DataNorms, EmbeddingConstants, elliptic_constants, make_factors,
                        species_constants, thermal_constants)
from .norms import apply_overrides, data_norms

THERMAL_CONDITION = "B0 < 1"


class Condition(BaseModel):
    name: str
    value: Optional[float]      # left-hand side, compared strictly against 1
    margin: Optional[float]     # 1 - value
    holds: bool


class SpeciesReport(BaseModel):
    name: str
    G: float
    X: float
    Y: float
    Qcal: float
    Q: float
    A0: float
    A: float
    B_i: Optional[float]        # undefined when B0 >= 1
    dufour: float
    data_constant: float
    slope: Optional[float]      # P_i'(r)
    radius: Optional[float]
    radius_residual: Optional[float]


class CertificateReport(BaseModel):
    certified: bool
    reason: Optional[str]
    A_sharp: float
    B_sharp: float
    B0: float
    B: float
    H_sharp: float
    data_constant: float        # C in P(0) = C + B sum_j D'_j R_j
    species: list[SpeciesReport]
    conditions: list[Condition]
    margin: float               # 1 - B0
    min_margin: Optional[float]
    R: Optional[float]
    R_residual: Optional[float]
    norms: dict
    symbolic: Optional[dict] = None


def recurrence(Bs: list[float], dufour: list[float]):
    """Slopes s_i = P_i'(r) and the condition values of the radii recurrence.

    s_1 = 1 - B_1 D'_1 and, for i >= 2,
    value_i = B_i D'_i (1 - sum_{j<i} B_j / s_j),  s_i = 1 - value_i.
    Evaluation stops at the first slope that is not positive.
    """
    values, slopes = [], []
    acc = 0.0
    for B_i, d_i in zip(Bs, dufour):
        v = B_i * d_i * (1.0 - acc)
        s = 1.0 - v
        values.append(v)
        slopes.append(s)
        if not s > 0:
            break
        acc += B_i / s
    return values, slopes


def _norms_dict(n: DataNorms) -> dict:
    from dataclasses import asdict
    return asdict(n)


def check_smallness(model: MaterialModel, ec: EmbeddingConstants, mesh: Optional[Mesh] = None, *,
                    norms: Optional[DataNorms] = None, norm_overrides: Optional[dict] = None,
                    bounds: Optional[HypothesisBounds] = None, symbolic: bool = False) -> CertificateReport:
    """Evaluate every constant, check the smallness conditions and, if they hold, the radii."""
    b = bounds if bounds is not None else model.bounds()
    n = ec.n if ec.n is not None else (mesh.dimension if mesh is not None else None)
    volume = ec.volume if ec.volume is not None else (mesh.volume if mesh is not None else None)
    if n is None or volume is None:
        raise IncompleteModelError("space dimension and |Omega| need a mesh or explicit values")
    if norms is None:
        norms = data_norms(mesh, model, ec.p, ec.T) if mesh is not None else DataNorms(
            species=tuple())
    norms = apply_overrides(norms, norm_overrides)
    ell = b.exponent
    f = make_factors(ec, ell, n, volume)

    A_s, B_s = elliptic_constants(b, f, norms)
    thermal = thermal_constants(b, f, A_s, B_s, norms)
    sp = [species_constants(b, i, f, A_s, B_s, norms) for i in range(len(b.species))]
    dufour = [sb.dufour for sb in b.species]
    names = [s.name for s in model.species] if len(model.species) == len(b.species) else \
        [f"species{i}" for i in range(len(b.species))]

    B0, B = float(thermal.B0), float(thermal.B)
    conditions = [Condition(name=THERMAL_CONDITION, value=B0, margin=1.0 - B0, holds=B0 < 1.0)]
    Bs: list[Optional[float]] = [None] * len(sp)
    slopes: list[Optional[float]] = [None] * len(sp)
    if B0 < 1.0:
        Bs = [c.A0 * B / (1.0 - B0) + c.A for c in sp]
        values, s_vals = recurrence(Bs, dufour)
        for i in range(len(sp)):
            label = "B1 D'1 < 1" if i == 0 else f"recurrence i={i + 1}"
            if i < len(values):
                conditions.append(Condition(name=label, value=values[i], margin=1.0 - values[i],
                                            holds=values[i] < 1.0))
                slopes[i] = s_vals[i]
            else:
                conditions.append(Condition(name=label, value=None, margin=None, holds=False))
    else:
        for i in range(len(sp)):
            label = "B1 D'1 < 1" if i == 0 else f"recurrence i={i + 1}"
            conditions.append(Condition(name=label, value=None, margin=None, holds=False))

    certified = all(c.holds for c in conditions)
    failed = next((c.name for c in conditions if not c.holds), None)
    margins = [c.margin for c in conditions if c.margin is not None]

    radii: list[Optional[float]] = [None] * len(sp)
    radius_res: list[Optional[float]] = [None] * len(sp)
    R = R_res = None
    C = float(thermal.const)
    if certified:
        for i, c in enumerate(sp):
            P0 = c.const + c.A0 * C / (1.0 - B0)
            radii[i] = P0 / slopes[i]
            radius_res[i] = abs(slopes[i] * radii[i] - P0) / max(abs(P0), 1e-300)
        P0 = C + B * sum(d * r for d, r in zip(dufour, radii))
        R = P0 / (1.0 - B0)
        R_res = abs((1.0 - B0) * R - P0) / max(abs(P0), 1e-300)

    sym = None
    if symbolic:
        fs = make_factors(ec, ell, n, volume, symbolic=True)
        A_sym, B_sym = elliptic_constants(b, fs, norms)
        th = thermal_constants(b, fs, A_sym, B_sym, norms)
        sym = {"B0": str(th.B0.expand()), "B": str(th.B.expand())}
        for i, name in enumerate(names):
            c = species_constants(b, i, fs, A_sym, B_sym, norms)
            sym[f"A0[{name}]"] = str(c.A0.expand())
            sym[f"A[{name}]"] = str(c.A.expand())

    return CertificateReport(
        certified=certified, reason=None if certified else failed,
        A_sharp=A_s, B_sharp=B_s, B0=B0, B=B, H_sharp=float(thermal.H_sharp), data_constant=C,
        species=[SpeciesReport(name=names[i], G=c.G, X=c.X, Y=c.Y, Qcal=c.Qcal, Q=c.Q,
                               A0=c.A0, A=c.A, B_i=Bs[i], dufour=dufour[i],
                               data_constant=c.const, slope=slopes[i], radius=radii[i],
                               radius_residual=radius_res[i]) for i, c in enumerate(sp)],
        conditions=conditions, margin=1.0 - B0, min_margin=min(margins) if margins else None,
        R=R, R_residual=R_res, norms=_norms_dict(norms), symbolic=sym)

"""Transport and boundary coefficients with their declared bounds.

Every coefficient is a *law* of position and temperature: constant,
piecewise constant in the first coordinate, polynomial in temperature, or a
linearly interpolated temperature table.  Each coefficient carries the
global bounds the existence theory needs; :func:`validate_hypotheses`
samples the laws and checks them against those bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, model_validator

from .errors import DomainError, IncompleteModelError

FARADAY = 9.6485e4          # C mol^-1
GAS_CONSTANT = 8.314        # J mol^-1 K^-1
STEFAN_BOLTZMANN = 5.67e-8  # W m^-2 K^-4


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


# ---------------------------------------------------------------- laws

class ConstantLaw(_Frozen):
    kind: Literal["constant"] = "constant"
    value: float

    def evaluate(self, x, theta):
        return np.full(np.shape(theta), self.value, dtype=float)

    def extremes(self):
        return self.value, self.value


class PiecewiseLaw(_Frozen):
    """Piecewise constant along one coordinate: ``values[k]`` on [breaks[k-1], breaks[k])."""
    kind: Literal["piecewise"] = "piecewise"
    breaks: list[float]
    values: list[float]
    axis: int = 0

    @model_validator(mode="after")
    def _check(self):
        if len(self.values) != len(self.breaks) + 1:
            raise ValueError("piecewise law needs len(values) == len(breaks) + 1")
        if sorted(self.breaks) != list(self.breaks):
            raise ValueError("piecewise breaks must be increasing")
        return self

    def evaluate(self, x, theta):
        if x is None:
            raise DomainError("piecewise law needs positions")
        k = np.searchsorted(self.breaks, np.asarray(x)[..., self.axis], side="right")
        return np.broadcast_to(np.asarray(self.values)[k], np.shape(theta)).astype(float)

    def extremes(self):
        return min(self.values), max(self.values)


class PolynomialLaw(_Frozen):
    """sum_k coeffs[k] * (theta - theta_ref)**k."""
    kind: Literal["polynomial"] = "polynomial"
    coeffs: list[float]
    theta_ref: float = 0.0

    def evaluate(self, x, theta):
        t = np.asarray(theta, dtype=float) - self.theta_ref
        return np.polynomial.polynomial.polyval(t, self.coeffs)

    def extremes(self):
        return None


class TableLaw(_Frozen):
    """Linear interpolation in temperature, constant beyond the table ends."""
    kind: Literal["table"] = "table"
    theta: list[float]
    values: list[float]

    @model_validator(mode="after")
    def _check(self):
        if len(self.theta) != len(self.values) or len(self.theta) < 1:
            raise ValueError("table law needs matching, non-empty theta/values")
        if sorted(self.theta) != list(self.theta):
            raise ValueError("table temperatures must be increasing")
        return self

    def evaluate(self, x, theta):
        return np.interp(np.asarray(theta, dtype=float), self.theta, self.values)

    def extremes(self):
        return min(self.values), max(self.values)


def _coerce_law(v):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return {"kind": "constant", "value": float(v)}
    return v


Law = Annotated[
    Union[ConstantLaw, PiecewiseLaw, PolynomialLaw, TableLaw],
    Field(discriminator="kind"),
    BeforeValidator(_coerce_law),
]


def linear_law(theta_lo: float, value_lo: float, theta_hi: float, value_hi: float) -> TableLaw:
    return TableLaw(theta=[theta_lo, theta_hi], values=[value_lo, value_hi])


# ---------------------------------------------------------------- model blocks

class PhysicalConstants(_Frozen):
    density: float = Field(gt=0)          # kg m^-3
    heat_capacity: float = Field(gt=0)    # J kg^-1 K^-1

    @property
    def faraday(self) -> float:
        return FARADAY

    @property
    def gas_constant(self) -> float:
        return GAS_CONSTANT

    @property
    def stefan_boltzmann(self) -> float:
        return STEFAN_BOLTZMANN

    @property
    def rho_cp(self) -> float:
        return self.density * self.heat_capacity


class ConductivityBlock(_Frozen):
    law: Law
    min: float = Field(gt=0)
    max: float = Field(gt=0)


class SeebeckBlock(_Frozen):
    law: Law = ConstantLaw(value=0.0)
    max: float = Field(default=0.0, ge=0)


class PeltierBlock(_Frozen):
    """Peltier coefficient; ``kelvin=True`` imposes Pi = alpha * theta."""
    law: Optional[Law] = None
    kelvin: bool = False
    max: Optional[float] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _check(self):
        if self.law is None and not self.kelvin:
            raise ValueError("peltier needs a law or kelvin=true")
        return self


class ThermalConductivityBlock(_Frozen):
    """K(x, theta) = law(x, theta) * anisotropy (identity when omitted)."""
    law: Law
    anisotropy: Optional[list[list[float]]] = None
    min: float = Field(gt=0)
    max: float = Field(gt=0)


class RadiationBlock(_Frozen):
    """Wall radiation: h_R = scale * emissivity, gamma = scale * absorptivity * |theta_w|^(l-2) theta_w."""
    exponent: float = Field(default=5.0, ge=2)
    emissivity: Law = ConstantLaw(value=0.0)
    emissivity_min: float = Field(default=0.0, ge=0)
    emissivity_max: float = Field(default=0.0, ge=0)
    absorptivity: Optional[Law] = None  # None: Kirchhoff, absorptivity = emissivity
    absorptivity_max: Optional[float] = None
    wall_temperature: float = 0.0
    scale: float = STEFAN_BOLTZMANN


class CoolingBlock(_Frozen):
    law: Law = ConstantLaw(value=0.0)
    max: float = Field(default=0.0, ge=0)
    theta_anode: float = 0.0
    theta_cathode: float = 0.0


class SurfaceCurrent(_Frozen):
    """Prescribed normal current g = -j.n on each electrode [A m^-2]."""
    anode: float = 0.0
    cathode: float = 0.0


class ButlerVolmerParams(_Frozen):
    j0: float = Field(ge=0)           # exchange current density, A m^-2
    beta: float = Field(gt=0, lt=1)
    electrons: int = 1                # s_l
    phi_eq: float = 0.0               # V
    cap: float = Field(default=30.0, gt=0)
    stoich: float = 1.0               # sign/stoichiometric factor of this species

    def envelope(self) -> float:
        """sup |g| of the truncated law."""
        b, c = self.beta, self.cap
        up = math.exp(b * c) - math.exp(-(1 - b) * c)
        down = math.exp((1 - b) * c) - math.exp(-b * c)
        return abs(self.stoich) * self.j0 * max(up, down)


class SpeciesSpec(_Frozen):
    name: str
    valence: int
    diffusion: Law
    diffusion_min: float = Field(gt=0)
    diffusion_max: float = Field(gt=0)   # raw m^2 s^-1; the F|z| factor is applied in d_sharp
    soret: Law = ConstantLaw(value=0.0)
    soret_max: float = Field(default=0.0, ge=0)
    dufour: Law = ConstantLaw(value=0.0)
    dufour_max: float = Field(default=0.0, ge=0)
    transference: Law = ConstantLaw(value=0.0)
    transference_max: Optional[float] = Field(default=None, ge=0)
    initial_concentration: Law = ConstantLaw(value=0.0)
    concentration_max: Optional[float] = None
    butler_volmer: dict[Literal["anode", "cathode"], ButlerVolmerParams] = {}
    growth_bound: float = Field(default=0.0, ge=0)   # g_i^#
    flux_envelope: Optional[float] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _check(self):
        if self.valence == 0:
            raise ValueError(f"species {self.name!r}: valence must be non-zero")
        return self

    @property
    def d_sharp(self) -> float:
        return FARADAY * abs(self.valence) * self.diffusion_max

    def reference_concentration(self) -> float:
        if self.concentration_max is not None:
            return self.concentration_max
        ext = self.initial_concentration.extremes()
        if ext is None:
            raise IncompleteModelError(f"species {self.name!r}: set concentration_max")
        return ext[1]

    def gamma_envelope(self) -> float:
        if self.flux_envelope is not None:
            return self.flux_envelope
        return max((bv.envelope() for bv in self.butler_volmer.values()), default=0.0)


@dataclass
class CoefficientSet:
    """Coefficients at N points.  Species arrays are (I, N); ``conductivity`` is (N, d, d)."""
    sigma: np.ndarray
    seebeck: np.ndarray
    peltier: np.ndarray
    conductivity: np.ndarray
    diffusion: np.ndarray
    soret: np.ndarray
    dufour: np.ndarray
    transference: np.ndarray
    valence: np.ndarray
    faraday: float = FARADAY
    gas_constant: float = GAS_CONSTANT
    clamped: int = 0


@dataclass(frozen=True)
class SpeciesBounds:
    d_min: float            # (D_i)_#
    d_sharp: float          # D_i^#  (includes F|z_i|)
    soret: float            # S_i^#
    dufour: float           # (D_i')^#
    transference: float     # t_i^#
    growth: float = 0.0     # g_i^#


@dataclass(frozen=True)
class HypothesisBounds:
    """The scalar bounds entering the a priori constants."""
    sigma_min: float
    sigma_max: float
    seebeck: float
    peltier: float
    k_min: float
    k_max: float
    b_min: float
    b_max: float
    hc_max: float
    rho_cp: float
    exponent: float
    species: tuple[SpeciesBounds, ...] = field(default_factory=tuple)


class MaterialModel(_Frozen):
    preset: Optional[str] = None
    constants: PhysicalConstants
    theta_range: Optional[tuple[float, float]] = None   # admissible temperatures, K
    conductivity: ConductivityBlock
    seebeck: SeebeckBlock = SeebeckBlock()
    peltier: PeltierBlock = PeltierBlock(law=ConstantLaw(value=0.0), max=0.0)
    thermal_conductivity: ThermalConductivityBlock
    radiation: RadiationBlock = RadiationBlock()
    cooling: CoolingBlock = CoolingBlock()
    surface_current: SurfaceCurrent = SurfaceCurrent()
    initial_temperature: Law
    species: list[SpeciesSpec] = []

    @model_validator(mode="after")
    def _check(self):
        if self.theta_range is not None and not 0 < self.theta_range[0] < self.theta_range[1]:
            raise ValueError("theta_range must satisfy 0 < lo < hi")
        names = [s.name for s in self.species]
        if len(set(names)) != len(names):
            raise ValueError("species names must be unique")
        return self

    # -- pointwise laws -------------------------------------------------

    def clamp(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.theta_range is None:
            return theta, 0
        lo, hi = self.theta_range
        out = (theta < lo) | (theta > hi)
        return np.clip(theta, lo, hi), int(np.count_nonzero(out))

    def sigma(self, x, theta):
        return self.conductivity.law.evaluate(x, self.clamp(theta)[0])

    def alpha(self, x, theta):
        return self.seebeck.law.evaluate(x, self.clamp(theta)[0])

    def pi(self, x, theta):
        th = self.clamp(theta)[0]
        if self.peltier.kelvin:
            return self.seebeck.law.evaluate(x, th) * th
        return self.peltier.law.evaluate(x, th)

    def conductivity_tensor(self, x, theta, dim: int):
        k = self.thermal_conductivity.law.evaluate(x, self.clamp(theta)[0])
        aniso = self.thermal_conductivity.anisotropy
        A = np.eye(dim) if aniso is None else np.asarray(aniso, dtype=float)
        if A.shape != (dim, dim):
            raise DomainError(f"anisotropy must be {dim}x{dim}")
        return k[..., None, None] * A

    def h_radiation(self, x, theta):
        return self.radiation.scale * self.radiation.emissivity.evaluate(x, self.clamp(theta)[0])

    def gamma_wall(self, x, theta):
        rad = self.radiation
        th = self.clamp(theta)[0]
        absorb = rad.absorptivity if rad.absorptivity is not None else rad.emissivity
        tw = rad.wall_temperature
        return rad.scale * absorb.evaluate(x, th) * abs(tw) ** (rad.exponent - 2) * tw

    def h_cooling(self, x, theta):
        return self.cooling.law.evaluate(x, self.clamp(theta)[0])

    def evaluate(self, x, theta, conc=None, dim: Optional[int] = None) -> CoefficientSet:
        """Coefficients at positions ``x`` (N, d) and temperatures ``theta`` (N,)."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        th, clamped = self.clamp(theta)
        if dim is None:
            dim = 1 if x is None else np.asarray(x).shape[-1]
        sp = self.species

        def stack(getter):
            if not sp:
                return np.zeros((0, th.size))
            return np.array([getter(s).evaluate(x, th) for s in sp])

        return CoefficientSet(
            sigma=self.conductivity.law.evaluate(x, th),
            seebeck=self.seebeck.law.evaluate(x, th),
            peltier=self.pi(x, th),
            conductivity=self.conductivity_tensor(x, th, dim),
            diffusion=stack(lambda s: s.diffusion),
            soret=stack(lambda s: s.soret),
            dufour=stack(lambda s: s.dufour),
            transference=stack(lambda s: s.transference),
            valence=np.array([s.valence for s in sp], dtype=float),
            clamped=clamped,
        )

    # -- declared bounds ------------------------------------------------

    def theta_max(self) -> float:
        if self.theta_range is None:
            raise IncompleteModelError("theta_range is required to derive Kelvin bounds")
        return self.theta_range[1]

    def theta_min(self) -> float:
        if self.theta_range is not None:
            return self.theta_range[0]
        ext = self.initial_temperature.extremes()
        if ext is None:
            raise IncompleteModelError("theta_range is required to derive transference bounds")
        return ext[0]

    def peltier_bound(self) -> float:
        if self.peltier.max is not None:
            return self.peltier.max
        if self.peltier.kelvin:
            return self.seebeck.max * self.theta_max()
        raise IncompleteModelError("peltier.max is missing")

    def transference_bound(self, s: SpeciesSpec) -> float:
        """t_i^# = D_i^# c_i / (R theta_min sigma_#), with D_i^# already carrying F|z_i|."""
        if s.transference_max is not None:
            return s.transference_max
        return (s.d_sharp * s.reference_concentration()
                / (GAS_CONSTANT * self.theta_min() * self.conductivity.min))

    def bounds(self) -> HypothesisBounds:
        rad = self.radiation
        return HypothesisBounds(
            sigma_min=self.conductivity.min,
            sigma_max=self.conductivity.max,
            seebeck=self.seebeck.max,
            peltier=self.peltier_bound(),
            k_min=self.thermal_conductivity.min,
            k_max=self.thermal_conductivity.max,
            b_min=rad.scale * rad.emissivity_min,
            b_max=rad.scale * rad.emissivity_max,
            hc_max=self.cooling.max,
            rho_cp=self.constants.rho_cp,
            exponent=rad.exponent,
            species=tuple(
                SpeciesBounds(d_min=s.diffusion_min, d_sharp=s.d_sharp, soret=s.soret_max,
                              dufour=s.dufour_max, transference=self.transference_bound(s),
                              growth=s.growth_bound)
                for s in self.species),
        )

    def gamma_wall_envelope(self) -> float:
        """gamma_w: sup |gamma| on the wall."""
        rad = self.radiation
        a_max = rad.absorptivity_max if rad.absorptivity is not None else rad.emissivity_max
        if a_max is None:
            ext = rad.absorptivity.extremes()
            a_max = max(abs(v) for v in ext) if ext else 0.0
        return rad.scale * a_max * abs(rad.wall_temperature) ** (rad.exponent - 1)


def evaluate_coefficients(model: MaterialModel, x, theta, conc=None) -> CoefficientSet:
    return model.evaluate(x, theta, conc)


def nernst_einstein_values(valence, diffusion, theta, conc, sigma,
                           faraday=FARADAY, gas_constant=GAS_CONSTANT):
    """Mobility u = z D F / (R theta) and transference t = F z u c / sigma."""
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0):
        raise DomainError("temperature must be positive")
    u = valence * diffusion * faraday / (gas_constant * theta)
    t = faraday * valence * u * conc / sigma
    return u, t


def nernst_einstein(model: MaterialModel, species: int, theta, conc, x=None):
    """Mobility [m^2 V^-1 s^-1] and transference number of one species."""
    s = model.species[species]
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0):
        raise DomainError("temperature must be positive")
    D = s.diffusion.evaluate(x, model.clamp(theta)[0])
    return nernst_einstein_values(s.valence, D, theta, conc, model.sigma(x, theta))


# ---------------------------------------------------------------- validation

@dataclass
class Violation:
    hypothesis: str
    inequality: str
    witness: dict


@dataclass
class ValidationReport:
    violations: list[Violation]
    checks: int

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.ok:
            return f"all {self.checks} checks passed"
        return "\n".join(f"[{v.hypothesis}] {v.inequality} at {v.witness}" for v in self.violations)


def validate_hypotheses(model: MaterialModel, sample_count: int = 25, mesh=None,
                        rtol: float = 1e-12) -> ValidationReport:
    """Sample every law on a grid of (x, theta, c) and check the declared bounds."""
    report = ValidationReport([], 0)
    n = max(int(sample_count), 2)
    lo, hi = model.theta_range if model.theta_range is not None else (200.0, 2000.0)
    thetas = np.linspace(lo, hi, n)
    if mesh is not None:
        idx = np.unique(np.linspace(0, mesh.n_nodes - 1, min(n, mesh.n_nodes)).astype(int))
        xs = mesh.nodes[idx]
        dim = mesh.dimension
    else:
        aniso = model.thermal_conductivity.anisotropy
        dim = 1 if aniso is None else len(aniso)
        xs = np.zeros((n, dim))
        xs[:, 0] = np.linspace(-0.5, 1.5, n)
    X = np.repeat(xs, len(thetas), axis=0)
    TH = np.tile(thetas, len(xs))

    def check(name, hyp, values, ok_mask):
        report.checks += 1
        bad = np.flatnonzero(~ok_mask)
        if bad.size:
            k = bad[0]
            report.violations.append(Violation(hyp, name, {
                "x": X[k % len(X)].tolist(), "theta": float(TH[k % len(TH)]),
                "value": float(np.ravel(values)[k])}))

    def le(a, b):
        return a <= b + rtol * np.maximum(abs(b), 1e-300)

    b = model.bounds()
    sig = model.sigma(X, TH)
    check("sigma_min <= sigma", "H1", sig, le(b.sigma_min, sig))
    check("sigma <= sigma_max", "H1", sig, le(sig, b.sigma_max))
    alpha = model.alpha(X, TH)
    check("|alpha| <= alpha^#", "H1", alpha, le(np.abs(alpha), b.seebeck))
    pi = model.pi(X, TH)
    check("|Pi| <= Pi^#", "H1", pi, le(np.abs(pi), b.peltier))
    if model.peltier.kelvin:
        check("Pi = alpha theta", "Kelvin", pi, np.isclose(pi, alpha * np.clip(TH, lo, hi), rtol=1e-12))
    K = model.conductivity_tensor(X, TH, dim)
    lam = np.linalg.eigvalsh(0.5 * (K + np.swapaxes(K, -1, -2)))[:, 0]
    check("xi.K xi >= k_# |xi|^2", "H2", lam, le(b.k_min, lam))
    kabs = np.abs(K).max(axis=(1, 2))
    check("|K_jl| <= k^#", "H2", kabs, le(kabs, b.k_max))
    hr = model.h_radiation(X, TH)
    check("b_# <= h_R", "H3", hr, le(b.b_min, hr))
    check("h_R <= b^#", "H3", hr, le(hr, b.b_max))
    gw = model.gamma_wall(X, TH)
    check("|gamma| <= gamma_w", "H6", gw, le(np.abs(gw), model.gamma_wall_envelope()))
    hc = model.h_cooling(X, TH)
    check("0 <= h_C <= h_C^#", "H6", hc, (hc >= 0) & le(hc, b.hc_max))

    for s, sb in zip(model.species, b.species):
        tag = f"[{s.name}] "
        D = s.diffusion.evaluate(X, model.clamp(TH)[0])
        check(tag + "D >= (D)_#", "H1", D, le(sb.d_min, D))
        check(tag + "F|z|D <= D^#", "H1", D, le(FARADAY * abs(s.valence) * D, sb.d_sharp))
        cmax = s.reference_concentration()
        for c in np.linspace(0.0, cmax, 5):
            S = s.soret.evaluate(X, model.clamp(TH)[0])
            check(tag + f"|c S| <= S^# (c={c:g})", "H1", S, le(np.abs(c * S), sb.soret))
            Dp = s.dufour.evaluate(X, model.clamp(TH)[0])
            val = GAS_CONSTANT * TH ** 2 * np.abs(Dp)
            check(tag + "R theta^2 |D'| <= (D')^#", "H1", val, le(val, sb.dufour))
        t = s.transference.evaluate(X, TH)
        check(tag + "0 <= t <= F|z| t^#", "H4", t,
              (t >= 0) & le(t, FARADAY * abs(s.valence) * sb.transference))
        env = s.gamma_envelope()
        for electrode, bv in s.butler_volmer.items():
            phis = np.linspace(-10.0, 10.0, n)
            for th in thetas:
                g = butler_volmer_value(bv, th, phis, FARADAY, GAS_CONSTANT)
                check(tag + f"|g_{electrode}| <= gamma_i + g^#(|theta|+|phi|)", "H7", g,
                      le(np.abs(g), env + sb.growth * (abs(th) + np.abs(phis))))

    meas = {"anode": 1.0, "cathode": 1.0}
    if mesh is not None:
        from .geometry import boundary_measure
        meas = {k: boundary_measure(mesh, k) for k in meas}
    sc = model.surface_current
    net = sc.anode * meas["anode"] + sc.cathode * meas["cathode"]
    scale = abs(sc.anode) * meas["anode"] + abs(sc.cathode) * meas["cathode"]
    report.checks += 1
    if abs(net) > 1e-8 * max(scale, 1e-300):
        report.violations.append(Violation("H5", "int_Gamma g ds = 0", {"net_current": net}))
    return report


def butler_volmer_value(params: ButlerVolmerParams, theta, phi,
                        faraday=FARADAY, gas_constant=GAS_CONSTANT):
    """Truncated Butler-Volmer current, times the species' stoichiometric factor."""
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0):
        raise DomainError("temperature must be positive")
    eta = np.asarray(phi, dtype=float) - params.phi_eq
    a = np.clip(params.electrons * faraday * eta / (gas_constant * theta), -params.cap, params.cap)
    b = params.beta
    # exp(b a) - exp(-(1-b) a) written without cancellation near a = 0
    return params.stoich * params.j0 * np.exp(-(1.0 - b) * a) * np.expm1(a)

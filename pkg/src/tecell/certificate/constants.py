"""Explicit a priori constants of the existence argument.

The formulas are written once and evaluated either with floats or, for the
regression against published prefactors, with sympy symbols standing for the
unknown analysis constants (C, M1, M2) and the three time factors

    sq = sqrt(1 + T e^T),   rl = (1 + T e^T)^(1/l),   pg = (T e^((p-1)T))^(1/p).

Keeping the time factors as separate atoms means no power of a symbol is
ever taken, so every constant stays a polynomial in the symbols.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import DomainError, IncompleteModelError
from ..materials import HypothesisBounds


class EmbeddingConstants(BaseModel):
    """Analysis constants the existence theory leaves unquantified (default 1)."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    K_tr2: float = Field(default=1.0, gt=0)     # trace constant W^{1,2n/(n+1)} -> L^2(Gamma)
    K_trp: float = Field(default=1.0, gt=0)     # trace constant W^{1,pn/(n+p-1)} -> L^p(Gamma)
    P2: float = Field(default=1.0, gt=0)        # Poincare constants
    Pp: float = Field(default=1.0, gt=0)
    C: float = Field(default=1.0, gt=0)         # parabolic gradient (regularity) constant
    M1: float = Field(default=1.0, gt=0)        # elliptic regularity constants
    M2: float = Field(default=1.0, gt=0)
    M3: float = Field(default=1.0, gt=0)
    K: float = Field(default=1.0, gt=0)         # elliptic trace constant
    delta: float = Field(default=0.1, gt=0)
    upsilon: float = Field(default=2.0, gt=1)
    kappa: float = Field(default=2.0, gt=1)
    p: float = 2.0
    n: Optional[int] = None          # space dimension; defaults to the mesh dimension
    volume: Optional[float] = Field(default=None, gt=0)   # |Omega|; defaults to the mesh volume
    T: float = Field(default=1.0, ge=0)

    @model_validator(mode="after")
    def _window(self):
        if self.n is not None and self.n not in (1, 2, 3):
            raise ValueError("n must be 1, 2 or 3")
        if not 2.0 <= self.p <= 2.0 + self.delta:
            raise ValueError(f"p = {self.p} outside [2, 2 + delta] = [2, {2 + self.delta}]")
        if not self.p < 2.0 + 1.0 / (self.kappa - 1.0):
            raise ValueError("p must be below 2 + 1/(kappa - 1)")
        if self.n is not None and not self.delta < 2.0 / (self.n * (self.upsilon - 1.0)):
            raise ValueError("delta must be below 2 / (n (upsilon - 1))")
        return self


def half_minus_inverse(p: float) -> float:
    """Exponent 1/2 - 1/p, exactly 0 at p = 2."""
    return 0.0 if p == 2 else 0.5 - 1.0 / p


def exact_pow(base: float, exponent: float) -> float:
    """base**exponent with a zero exponent giving exactly 1."""
    return 1.0 if exponent == 0 else float(base) ** exponent


@dataclass(frozen=True)
class SpeciesNorms:
    gamma_2: float = 0.0        # |gamma_i|_{2, Gamma x ]0,T[}
    gamma_p: float = 0.0        # |gamma_i|_{p, Gamma x ]0,T[}
    gamma_pprime: float = 0.0   # |gamma_i|_{p', Gamma x ]0,T[}
    c0_2: float = 0.0           # |c_{0,i}|_{2, Omega}
    c0_p: float = 0.0


@dataclass(frozen=True)
class DataNorms:
    """Norms of the problem data entering the constants."""
    g_2: float = 0.0            # |g|_{2, Gamma}
    g_p: float = 0.0            # |g|_{p, Gamma}
    theta0_2: float = 0.0
    theta0_p: float = 0.0
    gw_lprime: float = 0.0      # |gamma_w|_{l', Sigma_T}^{l'}
    gw_p: float = 0.0           # |gamma_w|_{p, Sigma_T}
    gw_int: float = 0.0         # int_{Sigma_T} |gamma_w|^{(l+p-2)/(l-1)}
    ge_2: float = 0.0           # |gamma_e|_{2, Gamma x ]0,T[}
    ge_p: float = 0.0
    ge_pprime: float = 0.0
    species: tuple[SpeciesNorms, ...] = field(default_factory=tuple)


@dataclass
class Factors:
    """Scalars shared by every formula; symbolic entries are sympy atoms."""
    C: Any
    M1: Any
    M2: Any
    sq: Any      # sqrt(1 + T e^T)
    rl: Any      # (1 + T e^T)^(1/l)
    pg: Any      # (T e^((p-1)T))^(1/p)
    M3: float
    K: float
    K2: float
    Kp: float
    P2: float
    Pp: float
    p: float
    n: int
    volume: float
    T: float
    ell: float

    @property
    def pprime(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def vol_half(self) -> float:          # |Omega|^{1/2 - 1/p}
        return exact_pow(self.volume, half_minus_inverse(self.p))

    @property
    def q_half(self) -> float:            # |Q_T|^{1/2 - 1/p}
        return exact_pow(self.volume * self.T, half_minus_inverse(self.p))

    @property
    def vol_trace(self) -> float:         # |Omega|^{1 - 1/p}
        return self.volume ** (1.0 - 1.0 / self.p)


SYMBOL_NAMES = ("C", "M1", "M2", "sq", "rl", "pg")


def make_factors(ec: EmbeddingConstants, ell: float, n: int, volume: float,
                 symbolic: bool = False) -> Factors:
    T, p = ec.T, ec.p
    eT = T * math.exp(T)
    if symbolic:
        import sympy as sp
        C, M1, M2, sq, rl, pg = sp.symbols(" ".join(SYMBOL_NAMES), positive=True)
    else:
        C, M1, M2 = ec.C, ec.M1, ec.M2
        sq, rl = math.sqrt(1 + eT), (1 + eT) ** (1 / ell)
        pg = (T * math.exp((p - 1) * T)) ** (1 / p)
    return Factors(C=C, M1=M1, M2=M2, sq=sq, rl=rl, pg=pg, M3=ec.M3, K=ec.K, K2=ec.K_tr2,
                   Kp=ec.K_trp, P2=ec.P2, Pp=ec.Pp, p=p, n=n, volume=volume, T=T, ell=ell)


def _z(a, d, e, sq) -> Any:
    return a * sq + e * math.sqrt(1 + d)


def time_sqrt(T: float) -> float:
    return math.sqrt(1 + T * math.exp(T))


def z_factor(a: float, d: float, e: float, T: float) -> float:
    """Z(a, d, e) = a sqrt(1 + T e^T) + e sqrt(1 + d)."""
    if min(a, d, e) < 0:
        raise DomainError("Z(a, d, e) needs non-negative arguments")
    return _z(a, d, e, time_sqrt(T))


# ---------------------------------------------------------------- elliptic

def elliptic_constants(b: HypothesisBounds, f: Factors, norms: DataNorms):
    """(A#, B#) bounding |grad phi|_{p,Q_T} <= B# + A# (sigma# alpha# R + sum D_j# R_j)."""
    s = b.sigma_min
    if not s > 0:
        raise IncompleteModelError("sigma_# must be positive")
    A = (f.M1 * f.vol_half + f.M2 * math.sqrt(1 + s)) / s
    B = (f.T ** (1 / f.p) * (f.M1 * f.K * norms.g_2
                             + f.M3 * math.sqrt(2 + 2 ** (-1 / f.n) * s) * norms.g_p) / s)
    return A, B


def potential_majorant(b: HypothesisBounds, grad_theta: float, grad_c) -> float:
    """sigma# alpha# |grad theta| + sum_j D_j# |grad c_j|."""
    return b.sigma_max * b.seebeck * grad_theta + sum(
        sb.d_sharp * g for sb, g in zip(b.species, grad_c))


# ---------------------------------------------------------------- species

@dataclass
class SpeciesConstants:
    G: Any      # script G_i#
    X: Any
    Y: Any
    Qcal: Any   # script Q_i
    Q: Any      # Q_i#
    A0: Any     # script A_i^0
    A: Any      # script A_i
    const: Any  # data part of the bound on |Psi_i|_{p} + |grad Psi_i|_{p}


def species_constants(b: HypothesisBounds, i: int, f: Factors, A_s, B_s,
                      norms: DataNorms) -> SpeciesConstants:
    sb = b.species[i]
    sn = norms.species[i] if i < len(norms.species) else SpeciesNorms()
    D, t, g, S = sb.d_min, sb.transference, sb.growth, sb.soret
    p, n, vol = f.p, f.n, f.volume
    sig_lo, sig_hi, alpha = b.sigma_min, b.sigma_max, b.seebeck
    trace_vol = vol ** (1 / n)
    qh = f.q_half

    G = f.K2 * (f.sq * math.sqrt((2 + D) * trace_vol) * sn.gamma_2 + math.sqrt(1 + D) * sn.gamma_p)
    X = f.sq * (t * sig_hi + g * math.sqrt(2 + D) * vol ** ((1 + 1 / n) / 2) * f.K2 ** 2 * f.P2)
    Y = math.sqrt(1 + D) * (t * sig_hi + g * f.K2 * f.Kp * f.vol_trace * f.Pp)
    Qcal = f.K2 * g * (math.sqrt(1 + D) * f.Kp * f.vol_trace
                       + f.sq * math.sqrt((2 + D) * trace_vol) * f.K2 * f.vol_trace
                       * exact_pow(f.T, half_minus_inverse(p)))
    Q = ((p ** 2 * (p - 1) ** (p - 2) / (2 * D)) ** (1 / (p - 1)) + p - 1) ** (1 / p) \
        * f.K2 ** (2 / p) * vol ** (1 / (p * n))
    root = math.sqrt((p - 1) / D)
    CD = f.C / D

    A0 = (f.pg * (root * (S + A_s * t * sig_hi ** 2 * alpha)
                  + g * Q * f.Kp * f.vol_trace * (1 + f.Pp * A_s * sig_hi * alpha))
          + CD * (S * _z(qh, D, 1.0, f.sq) + Qcal
                  + (X * qh / sig_lo + Y * A_s) * sig_hi * alpha))
    A = (CD * (X * qh / sig_lo + Y * A_s)
         + A_s * f.pg * (root * t * sig_hi + g * Q * f.Kp * f.vol_trace * f.Pp))
    const = (f.pg * (sn.c0_p + Q * sn.gamma_pprime
                     + (root * t * sig_hi + g * f.Kp * f.vol_trace * f.Pp) * B_s)
             + CD * (math.sqrt(D) * f.sq * sn.c0_2 + G + Y * B_s
                     + X * math.sqrt(f.T) * f.K * norms.g_2 / sig_lo))
    return SpeciesConstants(G=G, X=X, Y=Y, Qcal=Qcal, Q=Q, A0=A0, A=A, const=const)


# ---------------------------------------------------------------- thermal

@dataclass
class ThermalConstants:
    B0: Any
    B: Any
    H_sharp: float
    const: Any    # C, the data part of P(0)


def h_sharp(b: HypothesisBounds, f: Factors, norms: DataNorms) -> Any:
    k, rc, ell = b.k_min, b.rho_cp, f.ell
    rad = (math.sqrt(2 * (ell - 1) / (ell * b.b_min ** (1 / (ell - 1)))) * math.sqrt(norms.gw_lprime)
           if norms.gw_lprime > 0 else 0.0)
    return (math.sqrt(1 + k / rc) * f.K2 * (norms.gw_p + norms.ge_p)
            + math.sqrt(k) * f.sq * (rad + math.sqrt(2 + k) * f.K2 * f.volume ** (1 / (2 * f.n)) * norms.ge_2))


def h_zero(b: HypothesisBounds, f: Factors, norms: DataNorms, a: float, bvec) -> float:
    """H_0(a, b): bound functional of the auxiliary temperature."""
    k, rc, ell, p = b.k_min, b.rho_cp, f.ell, f.p
    drive = b.sigma_max * b.peltier * a + sum(sb.dufour * bj for sb, bj in zip(b.species, bvec))
    out = norms.theta0_p ** p + rc ** (-p / 2) * ((p - 1) / k) ** (p / 2) * drive ** p
    if norms.gw_int > 0:
        out += rc ** -1 * p * (ell - 1) / ((ell + p - 2) * b.b_min ** ((p - 1) / (ell - 1))) * norms.gw_int
    pp = f.pprime
    out += (rc ** -pp * ((p ** 2 * (p - 1) ** (p - 2) / (2 * k / rc)) ** (1 / (p - 1)) + p - 1)
            * f.K2 ** (2 / (p - 1)) * f.volume ** (1 / ((p - 1) * f.n)) * norms.ge_pprime ** pp)
    return out


def thermal_constants(b: HypothesisBounds, f: Factors, A_s, B_s, norms: DataNorms) -> ThermalConstants:
    k, rc, ell = b.k_min, b.rho_cp, f.ell
    sig_lo, sig_hi, alpha, Pi = b.sigma_min, b.sigma_max, b.seebeck, b.peltier
    qh = f.q_half
    # without a radiation lower bound the boundary-norm term is dropped
    rad = f.rl * (b.b_min * k) ** (-1 / ell) if b.b_min > 0 else 0.0
    bracket = f.C * f.sq / k + rad
    lead = f.C * math.sqrt(1 + k / rc) / k
    B0 = Pi * alpha * sig_hi ** 2 / sig_lo * (lead * sig_lo * A_s + bracket * qh)
    B = lead * (1 + Pi * sig_hi * A_s) + bracket * (1 + Pi * sig_hi / sig_lo) * qh

    Hs = h_sharp(b, f, norms)
    const = 0.0
    if b.b_min > 0:
        inner = rc * norms.theta0_2 ** 2 + (
            2 * (ell - 1) / (ell * b.b_min ** (1 / (ell - 1))) * norms.gw_lprime
            + (2 / k + 1 / rc) * f.K2 ** 2 * f.volume ** (1 / f.n) * norms.ge_2 ** 2)
        const = f.rl * b.b_min ** (-1 / ell) * (
            inner ** (1 / ell)
            + Pi * sig_hi / (k ** (1 / ell) * sig_lo) * f.T ** (1 - 1 / f.p) * f.K * norms.g_2)
    const = const + f.C / k * (
        math.sqrt(rc * k) * f.sq * norms.theta0_2 + Hs
        + Pi * sig_hi * _z(math.sqrt(f.T) * f.K * norms.g_2 / sig_lo, k / rc, B_s, f.sq))
    return ThermalConstants(B0=B0, B=B, H_sharp=Hs, const=const)


# ---------------------------------------------------------------- linear parabolic bounds

@dataclass(frozen=True)
class APrioriData:
    """Data norms at exponent p; ``at_two`` holds the same norms at p = 2 when p > 2."""
    u0_p: float = 0.0          # |u_0|_{p, Omega}
    f_p: float = 0.0           # |f|_{p, Q_T}, volumetric flux datum
    fb_p: float = 0.0          # |f|_{p, Gamma x ]0,T[}, boundary datum
    fb_pprime: float = 0.0     # |f|_{p', Gamma x ]0,T[}
    H_int: float = 0.0         # int_{Sigma_T} |H|^{(l+p-2)/(l-1)}
    H_p: float = 0.0           # |H|_{p, Sigma_T}
    H_pprime: float = 0.0      # |H|_{p', Sigma_T}
    at_two: Optional["APrioriData"] = None


@dataclass(frozen=True)
class APrioriBounds:
    H: float                   # bound functional at exponent p
    sup_bound: float           # ess sup_t |u|_p^p
    boundary_bound: float      # |u|_{l+p-2, Sigma_T}^{l+p-2}
    gradient_bound: float      # |grad u|_{p, Q_T}


def bound_functional(data: APrioriData, k: float, b: float, p: float, ell: float,
                     K2: float, volume: float, n: int) -> float:
    """H(k, b, p); with b = 0 the radiation-free variant H(k, p)."""
    pp = p / (p - 1)
    out = data.u0_p ** p + ((p - 1) / k) ** (p / 2) * data.f_p ** p
    tail = (p - 1) * ((p ** 2 / (2 * k * (p - 1))) ** (1 / (p - 1)) + 1) \
        * K2 ** (2 / (p - 1)) * volume ** (1 / ((p - 1) * n))
    if b > 0:
        out += p * (ell - 1) / ((ell + p - 2) * b ** ((p - 1) / (ell - 1))) * data.H_int
        out += tail * data.fb_pprime ** pp
    else:
        if data.fb_pprime != 0 or data.fb_p != 0:
            raise DomainError("the radiation-free bound needs a vanishing boundary datum f")
        out += tail * data.H_pprime ** pp
    return out


def a_priori_bounds(data: APrioriData, k: float, b: float, ec: EmbeddingConstants, ell: float,
                    n: int, volume: float) -> APrioriBounds:
    """Sup, boundary and gradient bounds of the linear parabolic problem with radiation."""
    p, T = ec.p, ec.T
    H = bound_functional(data, k, b, p, ell, ec.K_tr2, volume, n)
    two = data.at_two if data.at_two is not None else data
    if p != 2 and data.at_two is None:
        raise DomainError("p > 2 needs the data norms at p = 2 in `at_two`")
    H2 = bound_functional(two, k, b, 2.0, ell, ec.K_tr2, volume, n)
    growth = math.exp((p - 1) * T)
    sup_bound = H * growth
    if b > 0:
        boundary = H * (1 + (p - 1) * T * growth) / b
    else:
        boundary = math.inf if H > 0 else 0.0
    grad = ec.C / k * (math.sqrt(k * H2 * (1 + T * math.exp(T)))
                       + math.sqrt(1 + k) * (data.f_p + ec.K_tr2 * (data.fb_p + data.H_p)))
    return APrioriBounds(H=H, sup_bound=sup_bound, boundary_bound=boundary, gradient_bound=grad)

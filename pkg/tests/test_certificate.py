import math
from dataclasses import replace

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from tecell.certificate import (APrioriData, DataNorms, EmbeddingConstants, a_priori_bounds,
                                check_smallness, elliptic_constants, make_factors, nacl_regression,
                                species_constants, thermal_constants, z_factor)
from tecell.certificate.norms import data_norms
from tecell.certificate.regression import coefficient
from tecell.certificate.smallness import THERMAL_CONDITION, recurrence
from tecell.errors import DomainError
from tecell.geometry import build_interval_mesh
from tecell.materials import HypothesisBounds, SpeciesBounds

from .conftest import simple_model


def bounds(**kw):
    base = dict(sigma_min=3.0, sigma_max=3.0, seebeck=0.0, peltier=0.0, k_min=0.5, k_max=0.6,
                b_min=1e-8, b_max=2e-8, hc_max=0.0, rho_cp=1.8e6, exponent=5.0,
                species=(SpeciesBounds(d_min=1e-8, d_sharp=1e-3, soret=0.0, dufour=0.0,
                                       transference=0.0),))
    base.update(kw)
    return HypothesisBounds(**base)


def factors(ec=None, n=1, volume=1.0, symbolic=False, ell=5.0):
    return make_factors(ec or EmbeddingConstants(), ell, n, volume, symbolic=symbolic)


# ---------------------------------------------------------------- Z factor and embedding constants

def test_z_factor_examples():
    assert z_factor(0.0, 7.0, 0.0, 1.0) == 0.0
    assert z_factor(2.0, 3.0, 1.5, 0.0) == pytest.approx(2.0 + 1.5 * 2.0, rel=1e-15)
    # oracle: sqrt(1 + e) + 2 sqrt(4)
    assert z_factor(1.0, 3.0, 2.0, 1.0) == pytest.approx(math.sqrt(1 + math.e) + 4.0, rel=1e-15)
    assert z_factor(1.0, 3.0, 2.0, 1.0) == pytest.approx(5.9283, abs=1e-4)
    with pytest.raises(DomainError):
        z_factor(-1.0, 0.0, 0.0, 1.0)


def test_exponent_window_enforced():
    with pytest.raises(ValueError):
        EmbeddingConstants(p=1.5)
    with pytest.raises(ValueError):
        EmbeddingConstants(p=2.5, delta=0.1)


def test_unit_exponents_at_p_two():
    f = factors(EmbeddingConstants(T=3.0), n=3, volume=1.5e-3)
    assert f.vol_half == 1.0 and f.q_half == 1.0


# ---------------------------------------------------------------- elliptic constants

def test_elliptic_constant_arithmetic():
    # oracle: (M1 + M2 sqrt(1 + 3)) / 3 = 1
    A, B = elliptic_constants(bounds(), factors(), DataNorms())
    assert A == pytest.approx(1.0, rel=1e-15)
    assert B == 0.0


@settings(max_examples=30, deadline=None)
@given(s=st.floats(0.1, 1e3), M1=st.floats(0.1, 10), M3=st.floats(0.1, 10), T=st.floats(0, 5))
def test_no_current_means_no_data_term(s, M1, M3, T):
    ec = EmbeddingConstants(M1=M1, M3=M3, T=T)
    _, B = elliptic_constants(bounds(sigma_min=s, sigma_max=s), factors(ec), DataNorms())
    assert B == 0.0


def test_preset_elliptic_constant_structure(nacl):
    model, _ = nacl
    A, _ = elliptic_constants(model.bounds(), factors(symbolic=True, n=3, volume=1.5e-3), DataNorms())
    scaled = sp.expand(A * 359.7)
    assert coefficient(scaled, "M1") == pytest.approx(1.0, rel=1e-12)
    assert coefficient(scaled, "M2") == pytest.approx(math.sqrt(360.7), rel=1e-12)
    assert coefficient(scaled, "M2") == pytest.approx(18.99, abs=0.01)


# ---------------------------------------------------------------- species and thermal constants

def test_species_constants_without_growth_or_transference():
    b = bounds()
    f = factors()
    A_s, B_s = elliptic_constants(b, f, DataNorms())
    c = species_constants(b, 0, f, A_s, B_s, DataNorms())
    assert c.X == 0.0 and c.Y == 0.0 and c.G == 0.0


def test_no_peltier_means_no_thermal_smallness_term():
    b = bounds(seebeck=7e-5)
    f = factors()
    A_s, B_s = elliptic_constants(b, f, DataNorms())
    assert thermal_constants(b, f, A_s, B_s, DataNorms()).B0 == 0.0


def test_radiation_factor_of_preset(nacl):
    model, _ = nacl
    b = model.bounds()
    # oracle: (b_# k_#)^(-1/5) with b_# = 5.67e-8 * 0.2, k_# = 0.5
    value = (5.67e-8 * 0.2 * 0.5) ** (-1 / 5)
    f = factors(symbolic=True, n=3, volume=1.5e-3)
    A_s, B_s = elliptic_constants(b, f, DataNorms())
    th = thermal_constants(b, f, A_s, B_s, DataNorms())
    B = sp.expand(th.B)
    ratio = coefficient(B, "rl") / (1 + b.peltier * b.sigma_max / b.sigma_min)
    assert ratio == pytest.approx(value, rel=1e-12)
    assert value == pytest.approx(44.643, rel=5e-3)


KEYS = ("peltier", "seebeck", "sigma_max", "T", "C", "M1", "M2")


@settings(max_examples=40, deadline=None)
@given(key=st.sampled_from(KEYS), base=st.floats(0.1, 2.0), bump=st.floats(1e-3, 1.0))
def test_thermal_smallness_value_is_monotone(key, base, bump):
    def B0(value):
        kw = {"peltier": 0.08, "seebeck": 7e-5, "sigma_max": 398.0}
        ec_kw = {"T": 1.0, "C": 1.0, "M1": 1.0, "M2": 1.0}
        if key in kw:
            kw[key] = kw[key] * value
        else:
            ec_kw[key] = ec_kw[key] * value
        b = bounds(sigma_min=359.7, **kw)
        f = factors(EmbeddingConstants(**ec_kw), n=3, volume=1.5e-3)
        A_s, B_s = elliptic_constants(b, f, DataNorms())
        return thermal_constants(b, f, A_s, B_s, DataNorms()).B0
    lo, hi = B0(base), B0(base + bump)
    assert hi >= lo * (1 - 1e-14)


# ---------------------------------------------------------------- smallness checks

def decoupled_mesh_model():
    model = simple_model(radiation={"emissivity": 0.2, "emissivity_min": 0.2, "emissivity_max": 0.2})
    return build_interval_mesh(0.13, 16, "anode", "wall"), model


def test_decoupled_model_is_certified():
    mesh, model = decoupled_mesh_model()
    rep = check_smallness(model, EmbeddingConstants(), mesh)
    assert rep.certified and rep.reason is None
    assert rep.B0 == 0.0 and rep.margin == 1.0
    assert rep.R > 0 and rep.R_residual <= 1e-10
    for s in rep.species:
        assert s.radius > 0 and s.radius_residual <= 1e-10


def test_inflated_peltier_bound_fails_thermal_condition(nacl):
    model, cfg = nacl
    b = model.bounds()
    rep = check_smallness(model, cfg.certificate.embedding(), cfg.mesh(),
                          bounds=replace(b, peltier=b.peltier * 1e3))
    assert not rep.certified
    assert rep.reason == THERMAL_CONDITION
    assert rep.B0 >= 1.0 and rep.conditions[0].margin < 0
    assert all(s.B_i is None for s in rep.species)
    assert rep.R is None


def test_preset_is_certified_with_consistent_flags(nacl):
    model, cfg = nacl
    rep = check_smallness(model, cfg.certificate.embedding(), cfg.mesh())
    assert rep.certified
    for c in rep.conditions:
        assert c.holds == (c.value < 1.0)
        assert c.margin == pytest.approx(1.0 - c.value)
    assert rep.min_margin == min(c.margin for c in rep.conditions)


def test_second_recurrence_condition_matches_display():
    # oracle: the i = 2 condition B2 < (1 - B1 d) / (d (1 - B1 (1 + d))), evaluated exactly
    b1s, b2s, ds = sp.symbols("B1 B2 d", positive=True)
    display = b2s < (1 - b1s * ds) / (ds * (1 - b1s * (1 + ds)))
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 100:
        d = rng.uniform(0.01, 5.0)
        b1 = rng.uniform(0.0, 1.0 / (1.0 + d))    # keeps the display's denominator positive
        b2 = rng.uniform(0.0, 20.0)
        values, slopes = recurrence([b1, b2], [d, d])
        expected = bool(display.subs({b1s: sp.Rational(b1), b2s: sp.Rational(b2), ds: sp.Rational(d)}))
        assert (values[1] < 1.0) == expected
        checked += 1


def test_second_recurrence_condition_equal_bounds():
    # oracle: b d (1 - b / (1 - b d)) for B1 = B2 = b, D'1 = D'2 = d
    for b, d in [(0.1, 0.5), (0.4, 1.2), (2.0, 0.3)]:
        values, _ = recurrence([b, b], [d, d])
        assert values[1] == pytest.approx(b * d * (1 - b / (1 - b * d)), rel=1e-14)


def test_recurrence_stops_at_first_nonpositive_slope():
    values, slopes = recurrence([3.0, 1.0, 1.0], [0.5, 0.5, 0.5])
    assert len(values) == 1 and slopes[0] < 0


def test_norm_overrides_reach_the_data_constant():
    mesh, model = decoupled_mesh_model()
    ec = EmbeddingConstants()
    base = check_smallness(model, ec, mesh)
    bigger = check_smallness(model, ec, mesh, norm_overrides={"theta0_2": 1e3 * base.norms["theta0_2"]})
    assert bigger.data_constant > base.data_constant


def test_data_norms_of_preset(nacl):
    model, cfg = nacl
    n = data_norms(cfg.mesh(), model, 2.0, 1.0)
    # g = +-1e4 on the two end points of the interval
    assert n.g_2 == pytest.approx(math.sqrt(2) * 1e4, rel=1e-12)
    assert n.theta0_2 == pytest.approx(1100.0 * math.sqrt(0.13), rel=1e-12)


# ---------------------------------------------------------------- linear parabolic bounds

def test_a_priori_bounds_vanish_for_zero_data():
    out = a_priori_bounds(APrioriData(), 1.0, 1e-8, EmbeddingConstants(), 5.0, 1, 1.0)
    assert out.H == 0.0 and out.sup_bound == 0.0 and out.boundary_bound == 0.0
    assert out.gradient_bound == 0.0


def test_a_priori_functional_single_datum():
    # oracle: ((p - 1)/k)^(p/2) |f|_p^p = 1 for k = 1, p = 2, |f| = 1
    out = a_priori_bounds(APrioriData(f_p=1.0), 1.0, 1e-8, EmbeddingConstants(), 5.0, 1, 1.0)
    assert out.H == pytest.approx(1.0, rel=1e-15)


def test_radiation_free_variant():
    data = APrioriData(u0_p=2.0, H_int=5.0)
    with_rad = a_priori_bounds(data, 1.0, 1e-2, EmbeddingConstants(), 5.0, 1, 1.0)
    without = a_priori_bounds(data, 1.0, 0.0, EmbeddingConstants(), 5.0, 1, 1.0)
    assert without.H == pytest.approx(4.0) and with_rad.H > without.H
    with pytest.raises(DomainError):
        a_priori_bounds(APrioriData(fb_p=1.0), 1.0, 0.0, EmbeddingConstants(), 5.0, 1, 1.0)


def test_a_priori_bounds_need_p_two_norms_above_two():
    with pytest.raises(DomainError):
        a_priori_bounds(APrioriData(f_p=1.0), 1.0, 1e-8, EmbeddingConstants(p=2.05), 5.0, 1, 1.0)
    out = a_priori_bounds(APrioriData(f_p=1.0, at_two=APrioriData(f_p=1.0)), 1.0, 1e-8,
                          EmbeddingConstants(p=2.05), 5.0, 1, 1.0)
    assert out.H > 0 and math.isfinite(out.gradient_bound)


# ---------------------------------------------------------------- published prefactors

@pytest.fixture(scope="module")
def table():
    return nacl_regression()


def test_regression_table_size(table):
    assert len(table.rows) >= 15


def test_regression_structural_rows(table):
    assert table.row("sqrt(1+sigma_#)", "C*M2 / C*M1 in B0").within
    assert table.row("(b_# k_#)^(-1/l)", "rl in B0 / prefactor").within
    assert table.row("|Omega|^(1/2-1/p)", "-").computed == 1.0
    assert table.row("|Q_T|^(1/2-1/p)", "-").computed == 1.0
    assert table.row("1/(D')^#", "-").computed == 6.9281e5


def test_regression_assembled_prefactors(table):
    assert table.row("B0 prefactor", "C*M1 / 2").deviation <= 0.15
    assert table.row("B", "rl").deviation <= 0.02


def test_regression_script_a_rows(table):
    for m in ("C*sq", "C*M1", "C*M2", "pg*M1", "pg*M2"):
        assert table.row("A", m).within, m

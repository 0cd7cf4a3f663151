import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from tecell.materials import (FARADAY, GAS_CONSTANT, ButlerVolmerParams, ConstantLaw,
                              MaterialModel, PiecewiseLaw, PolynomialLaw, TableLaw,
                              butler_volmer_value, linear_law, nernst_einstein,
                              nernst_einstein_values, validate_hypotheses)
from tecell.presets import C0, cell_standard_potential

from .conftest import simple_material, simple_model


# ---------------------------------------------------------------- laws

def test_law_kinds_evaluate():
    x = np.zeros((3, 1))
    th = np.array([1000.0, 1100.0, 1200.0])
    assert np.all(ConstantLaw(value=2.0).evaluate(x, th) == 2.0)
    np.testing.assert_allclose(PolynomialLaw(coeffs=[1.0, 2.0], theta_ref=1000.0).evaluate(x, th),
                               [1.0, 201.0, 401.0])
    np.testing.assert_allclose(linear_law(1000.0, 1.0, 1200.0, 3.0).evaluate(x, th), [1.0, 2.0, 3.0])
    pw = PiecewiseLaw(breaks=[0.5], values=[1.0, 2.0])
    np.testing.assert_allclose(pw.evaluate(np.array([[0.2], [0.8]]), np.ones(2)), [1.0, 2.0])


def test_table_law_rejects_unsorted_abscissae():
    with pytest.raises(ValidationError):
        TableLaw(theta=[2.0, 1.0], values=[0.0, 1.0])


def test_bare_number_becomes_constant_law():
    m = simple_model()
    assert isinstance(m.conductivity.law, ConstantLaw)


# ---------------------------------------------------------------- coefficient evaluation

def test_preset_conductivity_range_at_operating_temperature(nacl):
    model, _ = nacl
    sig = model.sigma(np.zeros((1, 1)), np.array([1100.0]))
    assert 359.7 <= sig[0] <= 398.0


def test_constant_model_is_position_and_temperature_independent():
    m = simple_model()
    rng = np.random.default_rng(0)
    x = rng.uniform(-1, 1, (20, 2))
    th = rng.uniform(1000, 1300, 20)
    c = m.evaluate(x, th, dim=2)
    assert np.all(c.sigma == 380.0)
    assert np.all(c.diffusion == 1e-8)


def test_preset_thermal_conductivity_quadratic_form(nacl):
    model, _ = nacl
    rng = np.random.default_rng(1)
    xi = rng.normal(size=(100, 2))
    th = rng.uniform(1080, 1250, 100)
    K = model.conductivity_tensor(np.zeros((100, 2)), th, 2)
    ratio = np.einsum("ni,nij,nj->n", xi, K, xi) / np.einsum("ni,ni->n", xi, xi)
    assert ratio.min() >= 0.5 - 1e-14 and ratio.max() <= 0.6 + 1e-14


def test_kelvin_relation(nacl):
    model, _ = nacl
    th = np.linspace(1080, 1250, 7)
    np.testing.assert_allclose(model.pi(None, th), model.alpha(None, th) * th, rtol=1e-15)


def test_clamping_counts_out_of_range_temperatures(nacl):
    model, _ = nacl
    clipped, n = model.clamp(np.array([1000.0, 1100.0, 1300.0]))
    assert n == 2
    np.testing.assert_array_equal(clipped, [1080.0, 1100.0, 1250.0])


# ---------------------------------------------------------------- Nernst-Einstein

def test_nernst_einstein_mobility():
    # oracle: u = z D F / (R theta)
    u, _ = nernst_einstein_values(1, 12e-9, 1073.15, C0, 359.7)
    assert u == pytest.approx(12e-9 * 9.6485e4 / (8.314 * 1073.15), rel=1e-14)
    assert u == pytest.approx(1.298e-7, rel=1e-3)


def test_nernst_einstein_transference():
    # oracle: t = F^2 z^2 D c / (R theta sigma)
    _, t = nernst_einstein_values(1, 12e-9, 1073.15, C0, 359.7)
    assert t == pytest.approx(9.6485e4 ** 2 * 12e-9 * C0 / (8.314 * 1073.15 * 359.7), rel=1e-14)
    assert t == pytest.approx(0.893, abs=5e-4)


def test_transference_vanishes_without_ions():
    _, t = nernst_einstein_values(1, 12e-9, 1073.15, 0.0, 359.7)
    assert t == 0.0


def test_nernst_einstein_model_form(nacl):
    model, _ = nacl
    u, t = nernst_einstein(model, 0, np.array([1100.0]), np.array([C0]))
    assert u[0] > 0 and 0 < t[0] < 1


@settings(max_examples=50, deadline=None)
@given(z=st.sampled_from([-2, -1, 1, 2]), D=st.floats(1e-10, 1e-7), th=st.floats(300, 2000),
       c=st.floats(0, 1e5), sig=st.floats(1, 1e3))
def test_transference_is_even_in_valence(z, D, th, c, sig):
    u1, t1 = nernst_einstein_values(z, D, th, c, sig)
    u2, t2 = nernst_einstein_values(-z, D, th, c, sig)
    assert u1 == -u2 and t1 == pytest.approx(t2, rel=1e-15) and t1 >= 0


# ---------------------------------------------------------------- hypothesis validation

def test_preset_satisfies_every_hypothesis(nacl):
    model, cfg = nacl
    report = validate_hypotheses(model, mesh=cfg.mesh())
    assert report.ok, report.summary()
    assert report.checks > 50


def test_vanishing_conductivity_is_reported():
    m = simple_model(conductivity={"law": 0.0, "min": 359.7, "max": 398.0})
    report = validate_hypotheses(m)
    assert any(v.inequality == "sigma_min <= sigma" for v in report.violations)


def test_net_surface_current_is_reported():
    m = simple_model(surface_current={"anode": 1e4, "cathode": 1e4})
    report = validate_hypotheses(m)
    assert any(v.hypothesis == "H5" for v in report.violations)


def test_butler_volmer_growth_violation_reported():
    mat = simple_material()
    mat["species"][0]["butler_volmer"] = {"cathode": {"j0": 1e4, "beta": 0.5, "electrons": 2}}
    mat["species"][0]["flux_envelope"] = 1.0
    report = validate_hypotheses(MaterialModel.model_validate(mat))
    assert any(v.hypothesis == "H7" for v in report.violations)


# ---------------------------------------------------------------- preset values

def test_preset_initial_concentration(nacl):
    model, cfg = nacl
    x = cfg.mesh().nodes
    for s in model.species:
        assert np.all(s.initial_concentration.evaluate(x, np.full(len(x), 1100.0)) == 2.5667e4)


def test_preset_cell_potential():
    assert cell_standard_potential() == pytest.approx(-4.07, abs=1e-12)


def test_preset_soret_bound(nacl):
    model, _ = nacl
    na = model.bounds().species[0]
    assert na.soret == pytest.approx(1.2e-12 * 2.5667e4, rel=1e-14)
    assert na.soret == pytest.approx(3.08e-8, rel=1e-3)


def test_preset_bounds(nacl):
    model, _ = nacl
    b = model.bounds()
    assert (b.sigma_min, b.k_min, b.exponent) == (359.7, 0.5, 5.0)
    assert b.b_min == pytest.approx(5.67e-8 * 0.2, rel=1e-15)
    assert 1.0 / b.species[0].dufour == pytest.approx(6.9281e5, rel=1e-15)


# ---------------------------------------------------------------- Butler-Volmer

def test_butler_volmer_zero_overpotential():
    p = ButlerVolmerParams(j0=1e4, beta=0.3, electrons=1, phi_eq=0.2)
    assert butler_volmer_value(p, 1100.0, 0.2) == 0.0


def test_butler_volmer_numeric_example():
    p = ButlerVolmerParams(j0=1e4, beta=0.5, electrons=2)
    expected = 2e4 * np.sinh(FARADAY * 0.1 / (GAS_CONSTANT * 1073.15))
    assert butler_volmer_value(p, 1073.15, 0.1) == pytest.approx(expected, rel=1e-14)
    assert butler_volmer_value(p, 1073.15, 0.1) == pytest.approx(2.610e4, rel=1e-3)


def test_butler_volmer_cap_bounds_the_value():
    p = ButlerVolmerParams(j0=1.0, beta=0.5, electrons=2, cap=5.0)
    g = butler_volmer_value(p, 1000.0, np.array([-100.0, 100.0]))
    assert np.all(np.abs(g) <= p.envelope() * (1 + 1e-15))

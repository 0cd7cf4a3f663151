import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tecell import fem
from tecell.errors import DomainError
from tecell.geometry import build_interval_mesh, build_rectangle_mesh
from tecell.materials import FARADAY, GAS_CONSTANT, ButlerVolmerParams, MaterialModel
from tecell.species import boundary_source, butler_volmer_flux, step_concentration, total_amount

from .conftest import simple_model

SIDES = {"left": "anode", "right": "cathode", "bottom": "wall", "top": "outer"}


# ---------------------------------------------------------------- Butler-Volmer

def test_flux_vanishes_at_equilibrium():
    p = ButlerVolmerParams(j0=1e4, beta=0.5, electrons=2, phi_eq=-1.0)
    assert butler_volmer_flux(p, 1100.0, -1.0) == 0.0


def test_symmetric_law_reduces_to_sinh():
    p = ButlerVolmerParams(j0=1e4, beta=0.5, electrons=2)
    eta = np.linspace(-0.5, 0.5, 1000)
    expected = 2e4 * np.sinh(FARADAY * eta / (GAS_CONSTANT * 1073.15))
    got = butler_volmer_flux(p, 1073.15, eta)
    assert np.max(np.abs(got - expected) / np.abs(expected)) <= 1e-14


def test_overpotential_example():
    p = ButlerVolmerParams(j0=1e4, beta=0.5, electrons=2)
    assert float(butler_volmer_flux(p, 1073.15, 0.1)) == pytest.approx(2.610e4, rel=1e-3)


@settings(max_examples=50, deadline=None)
@given(eta=st.floats(-1.0, 1.0), th=st.floats(300, 2000), j0=st.floats(1e-3, 1e5))
def test_symmetric_law_is_odd(eta, th, j0):
    p = ButlerVolmerParams(j0=j0, beta=0.5, electrons=2)
    assert butler_volmer_flux(p, th, eta) == pytest.approx(-butler_volmer_flux(p, th, -eta),
                                                           rel=1e-13, abs=1e-300)


@settings(max_examples=50, deadline=None)
@given(a=st.floats(-0.5, 0.5), b=st.floats(-0.5, 0.5), beta=st.floats(0.05, 0.95))
def test_law_is_increasing_in_overpotential(a, b, beta):
    p = ButlerVolmerParams(j0=1.0, beta=beta, electrons=1)
    ga, gb = butler_volmer_flux(p, 1100.0, a), butler_volmer_flux(p, 1100.0, b)
    assert (ga - gb) * (a - b) >= 0


def test_boundary_source_only_on_reacting_electrode(nacl):
    model, cfg = nacl
    mesh = cfg.mesh()
    phi = np.linspace(2.0, -2.0, mesh.n_nodes)
    src = boundary_source(mesh, model, 0, np.full(mesh.n_nodes, 1100.0), phi)
    assert np.count_nonzero(src) == 1 and src[-1] != 0.0   # Na+ reacts at the cathode


# ---------------------------------------------------------------- implicit step

def test_uniform_state_is_steady():
    model = simple_model()
    mesh = build_rectangle_mesh(1.0, 1.0, 5, 5, SIDES)
    c = np.full(mesh.n_nodes, 100.0)
    out = step_concentration(mesh, model, 0, c, np.full(mesh.n_nodes, 1100.0),
                             np.zeros(mesh.n_nodes), 10.0)
    np.testing.assert_allclose(out, c, rtol=1e-14)


def test_cosine_mode_decay_factor():
    # oracle: the lumped P1 operator has cos(pi x / L) as exact eigenvector with
    # eigenvalue 4 D sin^2(pi h / 2L) / h^2, so one step multiplies it by 1/(1 + dt lambda)
    D, L, n, dt = 1e-8, 0.13, 40, 5.0
    model = simple_model(species=[{"diffusion": D, "diffusion_min": D, "diffusion_max": D}])
    mesh = build_interval_mesh(L, n)
    x = mesh.nodes[:, 0]
    mode = np.cos(np.pi * x / L)
    c = 100.0 + mode
    out = step_concentration(mesh, model, 0, c, np.full(mesh.n_nodes, 1100.0),
                             np.zeros(mesh.n_nodes), dt)
    h = L / n
    lam = 4 * D * np.sin(np.pi * h / (2 * L)) ** 2 / h ** 2
    np.testing.assert_allclose(out - 100.0, mode / (1 + dt * lam), rtol=1e-9, atol=1e-12)


def conserving_preset():
    from tecell.presets import nacl_material_dict
    d = nacl_material_dict()
    for s in d["species"]:
        s["butler_volmer"] = {}
    return MaterialModel.model_validate(d)


def test_mass_conserved_without_boundary_reactions():
    model = conserving_preset()
    mesh = build_rectangle_mesh(0.13, 0.13, 8, 8, SIDES)
    rng = np.random.default_rng(3)
    theta = 1100.0 + 20.0 * rng.random(mesh.n_nodes)
    phi = rng.normal(size=mesh.n_nodes)
    c = 2.5667e4 * (1.0 + 0.05 * rng.random(mesh.n_nodes))
    m0 = total_amount(mesh, c)
    for _ in range(100):
        prev = total_amount(mesh, c)
        c = step_concentration(mesh, model, 0, c, theta, phi, 1.0)
        assert abs(total_amount(mesh, c) - prev) <= 1e-12 * abs(prev)
    assert abs(total_amount(mesh, c) - m0) <= 1e-10 * abs(m0)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), dt=st.floats(0.01, 100.0))
def test_pure_diffusion_does_not_increase_l2_norm(seed, dt):
    model = simple_model()
    mesh = build_interval_mesh(0.1, 20)
    c = np.random.default_rng(seed).random(mesh.n_nodes)
    out = step_concentration(mesh, model, 0, c, np.full(mesh.n_nodes, 1100.0),
                             np.zeros(mesh.n_nodes), dt)
    assert fem.l2_norm(mesh, out) <= fem.l2_norm(mesh, c) * (1 + 1e-14)
    assert out.min() >= c.min() - 1e-12 and out.max() <= c.max() + 1e-12


def test_cathode_reaction_removes_cations(nacl):
    model, cfg = nacl
    mesh = cfg.mesh()
    c = np.full(mesh.n_nodes, 2.5667e4)
    # cathode well below equilibrium: reduction consumes Na+
    phi = np.full(mesh.n_nodes, -5.0)
    out = step_concentration(mesh, model, 0, c, np.full(mesh.n_nodes, 1100.0), phi, 1.0)
    assert total_amount(mesh, out) < total_amount(mesh, c)


def test_nonpositive_step_rejected():
    model = simple_model()
    mesh = build_interval_mesh(1.0, 4)
    z = np.zeros(mesh.n_nodes)
    with pytest.raises(DomainError):
        step_concentration(mesh, model, 0, z, z + 1100.0, z, 0.0)

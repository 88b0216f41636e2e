import json

import pytest

import spinchain as sc


def test_presets_and_roundtrip():
    h = sc.make_preset("ising_zz", 3)
    assert h.d == 2 and h.N == 3 and h.boundary == "open"
    doc = sc.serialize_hamiltonian(h)
    h2 = sc.parse_hamiltonian(doc)
    assert sc.serialize_hamiltonian(h2) == doc


def test_classical_solver():
    h = sc.make_preset("ising_zz", 3)
    energy, config = sc.solve_classical(h)
    assert energy == pytest.approx(-2.0)
    assert config == [0, 1, 0]  # antiferromagnetic Z x Z favours alternation


def test_mean_field_and_exact():
    h = sc.make_preset("tfim:g=1", 4)
    exact, gap = sc.exact_diagonalize(h)
    assert gap > 0
    mf = sc.solve_mean_field(h, delta=0.5)
    assert mf["energy"] >= exact - 1e-9
    assert mf["net_epsilon"] == pytest.approx(0.5 / 8)


def test_mps_solver_with_override_nets():
    h = sc.make_preset("tfim:g=1", 4)
    exact, _ = sc.exact_diagonalize(h)
    sol = sc.solve_mps(h, bond_dim=2, eps_rho=0.5, eps_a=1.5)
    assert sol["energy"] >= exact - 1e-9
    doc = json.loads(sol["document"])
    assert "tensors" in doc


def test_als_baseline():
    h = sc.make_preset("tfim:g=1", 4)
    exact, _ = sc.exact_diagonalize(h)
    als = sc.als_baseline(h, bond_dim=4, restarts=3, sweeps=60, seed=2)
    assert als["energy"] == pytest.approx(exact, abs=1e-6)


def test_cost_report():
    r = sc.estimate_cost(10, 2, 1, 1.0)
    assert r["mean_field_count"].startswith("1.6")
    assert r["mean_field_log10"] == pytest.approx(18.2041199826559)


def test_validation_errors_surface():
    with pytest.raises(sc.SchemaError):
        sc.parse_hamiltonian("not json")
    with pytest.raises(sc.SchemaError):
        sc.make_preset("nosuch", 4)

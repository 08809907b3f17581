import math

import numpy as np
import pytest
from scipy.linalg import expm, logm

import adialab

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def random_state(dim, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def test_pauli_words_follow_site_order():
    assert np.allclose(adialab.pauli("ZZ"), np.kron(Z, Z))
    assert np.allclose(adialab.pauli("XZ"), np.kron(X, Z))


def test_local_hamiltonian_matches_kron_sum():
    h = adialab.local_hamiltonian(adialab.ising_chain(1.0, 0.0, 0.7), 3)
    eye = np.eye(2)
    expected = (
        np.kron(np.kron(Z, Z), eye)
        + np.kron(eye, np.kron(Z, Z))
        + 0.7 * (np.kron(np.kron(X, eye), eye) + np.kron(np.kron(eye, X), eye) + np.kron(eye, np.kron(eye, X)))
    )
    assert np.allclose(h, expected, atol=1e-14)


@pytest.mark.parametrize("sites", [2, 5, 8])
def test_free_ising_pressure_matches_closed_form(sites):
    beta = 0.8
    expected = (math.log(2.0) + (sites - 1) * math.log(2.0 * math.cosh(beta))) / sites
    assert adialab.pressure(adialab.ising_chain(1.0), sites, beta) == pytest.approx(expected, abs=1e-12)


def test_gibbs_and_entropies_match_dense_formulas():
    rng = np.random.default_rng(3)
    h = adialab.local_hamiltonian(adialab.ising_chain(1.0, 0.2, 0.5), 3)
    rho, log_z = adialab.gibbs(h, 0.7)
    w = expm(-0.7 * h)
    assert log_z == pytest.approx(math.log(np.trace(w).real), abs=1e-12)
    assert np.allclose(rho, w / np.trace(w), atol=1e-12)

    nu = random_state(8, rng)
    assert adialab.entropy(nu) == pytest.approx(-np.trace(nu @ logm(nu)).real, abs=1e-9)
    expected = np.trace(nu @ (logm(nu) - logm(rho))).real
    assert adialab.relative_entropy(nu, rho) == pytest.approx(expected, abs=1e-9)
    # Full trace norm, so Pinsker reads d^2 <= 2 S.
    d = adialab.trace_distance(nu, rho)
    assert d == pytest.approx(np.abs(np.linalg.eigvalsh(nu - rho)).sum(), abs=1e-12)
    assert d * d <= 2.0 * expected + 1e-12


def test_constant_model_propagator_is_a_matrix_exponential():
    T, sigma, tau = 3.0, 0.2, 0.9
    h = Z + 0.5 * X
    u = adialab.propagate("two-level-constant", T, sigma, tau, adaptive=True, tolerance=1e-12)
    assert np.allclose(u, expm(-1j * T * (tau - sigma) * h), atol=1e-10)


def test_kato_distance_shrinks_with_T():
    out = adialab.kato_scan("two-level-gapped", [10.0, 100.0], tau_points=21)
    assert out["d"][1] < out["d"][0]
    assert out["min_gap"] > 0.0


def test_variational_value_never_exceeds_pressure():
    r = adialab.variational_scan(adialab.ising_chain(1.0, 0.0, 0.5), 3, 1.0)
    assert r["value"] <= r["pressure"] + 1e-12


def test_validation_errors_become_value_errors():
    with pytest.raises(ValueError):
        adialab.pressure(adialab.ising_chain(1.0), 0)
    with pytest.raises(ValueError):
        adialab.propagate("no-such-model", 1.0)
    assert issubclass(adialab.ValidationError, ValueError)


def test_run_writes_csv_and_rejects_unknown_keys(tmp_path):
    good = tmp_path / "kato.yaml"
    good.write_text("experiment: kato\nmodel: two-level-gapped\nT: [5, 10]\ntau: {points: 11}\n")
    out = adialab.run(good, tmp_path / "out")
    assert out["exit_code"] == 0, out["message"]
    assert len(out["outputs"]) == 1
    assert (tmp_path / "out" / "manifest.jsonl").exists()

    bad = tmp_path / "bad.yaml"
    bad.write_text("experiment: kato\nmodel: two-level-gapped\nT: [5]\nbogus: 1\n")
    assert adialab.run(bad, tmp_path / "bad")["exit_code"] == 2


def test_experiment_listing_names_every_kind():
    listing = adialab.list_experiments()
    for kind in ["pressure", "kato", "many-body", "dichotomy"]:
        assert kind in listing

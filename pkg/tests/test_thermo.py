"""Gibbs states, beta/energy inversion, maximum entropy, second-law
bookkeeping, and erasure-cost reports."""

import math

import numpy as np
import pytest
from helpers import dense

import gptkit as g
from gptkit.channels import Channel
from gptkit.errors import (
    EnergyOutOfRange,
    InvalidTemperature,
    NotInvertible,
    NotReversible,
)
from gptkit.sampling import random_state, trial_rng


def _qubit_h():
    return g.Hamiltonian.from_energies(g.make_quantum(2), [0.0, 1.0])


def test_gibbs_at_zero_beta_is_invariant():
    h = g.Hamiltonian.from_energies(g.make_quantum(3), [0.0, 0.4, 1.1])
    rho = g.gibbs_state(h, 0.0)
    chi = g.invariant_state(h.system)
    assert np.max(np.abs(dense(rho) - dense(chi))) < 1e-14


def test_gibbs_limits():
    h = _qubit_h()
    ground = g.gibbs_state(h, math.inf)
    assert abs(ground.blocks[0][0, 0] - 1.0) < 1e-14
    top = g.gibbs_state(h, -math.inf)
    assert abs(top.blocks[0][1, 1] - 1.0) < 1e-14
    degenerate = g.Hamiltonian.from_energies(g.make_quantum(3), [0.0, 0.0, 1.0])
    rho = g.gibbs_state(degenerate, math.inf)
    assert np.allclose(np.diag(rho.blocks[0]).real, [0.5, 0.5, 0.0])


def test_gibbs_qubit_closed_form():
    h = _qubit_h()
    rho = g.gibbs_state(h, 1.0)
    w = math.exp(-1.0)
    z = 1.0 + w
    assert abs(rho.blocks[0][0, 0].real - 1.0 / z) < 1e-14
    assert abs(rho.blocks[0][1, 1].real - w / z) < 1e-14


def test_gibbs_respects_nondiagonal_hamiltonians():
    rng = trial_rng(80, 0)
    q = g.make_quantum(3)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    h = g.Hamiltonian.from_observable(g.Observable(q, [m + m.conj().T]))
    rho = g.gibbs_state(h, 0.7)
    d = dense(rho)
    hd = dense(h.observable)
    # commutes with H and has Boltzmann spectrum
    assert np.max(np.abs(d @ hd - hd @ d)) < 1e-12
    w = np.exp(-0.7 * np.array(h.energies))
    assert np.allclose(
        np.sort(np.linalg.eigvalsh(d)), np.sort(w / w.sum()), atol=1e-12
    )


def test_energy_of_beta_endpoints_and_uniform():
    h = _qubit_h()
    assert abs(g.energy_of_beta(h, 0.0) - 0.5) < 1e-14
    assert g.energy_of_beta(h, math.inf) == 0.0
    assert g.energy_of_beta(h, -math.inf) == 1.0


def test_beta_of_energy_closed_form():
    h = _qubit_h()
    beta = g.beta_of_energy(h, 0.25)
    assert abs(beta - math.log(3.0)) < 1e-8
    assert abs(g.beta_of_energy(h, 0.5)) < 1e-8


def test_beta_energy_roundtrip():
    rng = trial_rng(81, 0)
    for t in range(200):
        dim = int(rng.integers(2, 6))
        energies = np.sort(rng.uniform(0.0, 2.0, dim))
        if energies[-1] - energies[0] < 0.1:
            energies[-1] += 0.5
        h = g.Hamiltonian.from_energies(g.make_quantum(dim), energies)
        beta = float(rng.uniform(-4.0, 4.0))
        back = g.beta_of_energy(h, g.energy_of_beta(h, beta))
        assert abs(back - beta) < 1e-8


def test_beta_of_energy_errors():
    h = _qubit_h()
    with pytest.raises(EnergyOutOfRange):
        g.beta_of_energy(h, 1.5)
    with pytest.raises(EnergyOutOfRange):
        g.beta_of_energy(h, 0.0)  # boundary is excluded
    flat = g.Hamiltonian.from_energies(g.make_quantum(2), [1.0, 1.0])
    with pytest.raises(NotInvertible):
        g.beta_of_energy(flat, 1.0)


def test_gibbs_entropy_identity():
    rng = trial_rng(82, 0)
    for _ in range(50):
        dim = int(rng.integers(2, 6))
        energies = np.sort(rng.uniform(0.0, 2.0, dim))
        energies[-1] = energies[0] + max(energies[-1] - energies[0], 0.2)
        h = g.Hamiltonian.from_energies(g.make_quantum(dim), energies)
        beta = float(rng.uniform(-3.0, 3.0))
        s = g.shannon_vn(g.gibbs_state(h, beta), base=math.e)
        identity = beta * g.energy_of_beta(h, beta) + g.log_partition(h, beta)
        assert abs(s - identity) < 1e-10


def test_max_entropy_check():
    h = g.Hamiltonian.from_energies(g.make_quantum(3), [0.0, 0.5, 1.0])
    report = g.max_entropy_check(h, 0.4, trials=60, seed=5)
    assert report["max_entropy_violation"] <= 1e-9
    assert report["max_gap_mismatch"] <= 1e-9
    # the Gibbs state itself has zero gap
    beta = report["beta"]
    gibbs = g.gibbs_state(h, beta)
    assert abs(g.kl_divergence(gibbs, gibbs)) < 1e-10


def test_second_law_identity_and_swap():
    q = g.make_quantum(2)
    rng = trial_rng(83, 0)
    rho_s = random_state(q, rng)
    rho_s = g.State(q, [b / rho_s.trace for b in rho_s.blocks])
    rho_e = random_state(q, rng)
    rho_e = g.State(q, [b / rho_e.trace for b in rho_e.blocks])
    comp = g.compose(q, q)
    ident = Channel.identity(comp)
    report = g.second_law_lemma_check(rho_s, rho_e, ident)
    assert abs(report["gap"]) < 1e-10
    swap = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            swap[j * 2 + i, i * 2 + j] = 1.0
    report = g.second_law_lemma_check(
        rho_s, rho_e, Channel(comp, comp, (swap,), tag="reversible")
    )
    assert abs(report["gap"]) < 1e-10


def test_second_law_random_trials():
    q2, q3 = g.make_quantum(2), g.make_quantum(3)
    comp = g.compose(q2, q3)
    for t in range(30):
        rng = trial_rng(84, t)
        rho_s = random_state(q2, rng)
        rho_s = g.State(q2, [b / rho_s.trace for b in rho_s.blocks])
        rho_e = random_state(q3, rng)
        rho_e = g.State(q3, [b / rho_e.trace for b in rho_e.blocks])
        u = g.random_reversible(comp, rng)
        report = g.second_law_lemma_check(rho_s, rho_e, u)
        assert report["gap"] >= -1e-9
        assert report["gap_mismatch"] <= 1e-9


def test_second_law_requires_reversible():
    q = g.make_quantum(2)
    comp = g.compose(q, q)
    k0 = np.kron(np.diag([1.0, 0.0]), np.eye(2))
    k1 = np.kron(np.diag([0.0, 1.0]), np.eye(2))
    chan = Channel(comp, comp, (k0, k1))
    chi = g.invariant_state(q)
    with pytest.raises(NotReversible):
        g.second_law_lemma_check(chi, chi, chan)


def test_landauer_identity_interaction():
    q = g.make_quantum(2)
    env = g.make_quantum(4)
    comp = g.compose(q, env)
    h = g.Hamiltonian.from_energies(env, [0.0, 0.2, 0.5, 1.0])
    rng = trial_rng(85, 0)
    rho_s = random_state(q, rng)
    rho_s = g.State(q, [b / rho_s.trace for b in rho_s.blocks])
    report = g.landauer_report(rho_s, h, 2.0, Channel.identity(comp))
    for key in ("lhs", "entropy_drop", "mutual_info", "divergence"):
        assert abs(report[key]) < 1e-12
    assert report["residual"] < 1e-12


def test_landauer_local_commuting_unitaries():
    q = g.make_quantum(2)
    env = g.make_quantum(4)
    comp = g.compose(q, env)
    h = g.Hamiltonian.from_energies(env, [0.0, 0.2, 0.5, 1.0])
    rng = trial_rng(86, 0)
    u_s = g.random_reversible(q, rng).kraus[0]
    phases = np.exp(-1j * rng.uniform(0, 2 * np.pi, 4))
    u_e = np.diag(phases)  # commutes with the diagonal environment energy
    u = Channel(comp, comp, (np.kron(u_s, u_e),), tag="reversible")
    rho_s = random_state(q, rng)
    rho_s = g.State(q, [b / rho_s.trace for b in rho_s.blocks])
    report = g.landauer_report(rho_s, h, 1.3, u)
    assert abs(report["lhs"]) < 1e-12
    assert abs(report["mutual_info"]) < 1e-10
    assert abs(report["divergence"]) < 1e-10
    assert abs(report["entropy_drop"]) < 1e-10


def test_landauer_random_trials():
    q = g.make_quantum(2)
    env = g.make_quantum(4)
    comp = g.compose(q, env)
    for t in range(30):
        rng = trial_rng(87, t)
        energies = rng.uniform(0.0, 1.0, 4)
        energies[0], energies[-1] = 0.0, 1.0
        h = g.Hamiltonian.from_energies(env, energies)
        beta = float(rng.uniform(0.1, 5.0))
        u = g.random_reversible(comp, rng)
        rho_s = random_state(q, rng)
        rho_s = g.State(q, [b / rho_s.trace for b in rho_s.blocks])
        report = g.landauer_report(rho_s, h, beta, u)
        assert report["residual"] <= 1e-8
        assert report["mutual_info"] >= -1e-9
        assert report["divergence"] >= -1e-9
        assert report["bound_slack"] >= -1e-8


def test_landauer_rejects_bad_beta():
    q = g.make_quantum(2)
    env = g.make_quantum(2)
    comp = g.compose(q, env)
    h = g.Hamiltonian.from_energies(env, [0.0, 1.0])
    chi = g.invariant_state(q)
    with pytest.raises(InvalidTemperature):
        g.landauer_report(chi, h, math.inf, Channel.identity(comp))
    with pytest.raises(InvalidTemperature):
        g.landauer_report(chi, h, 0.0, Channel.identity(comp))


def test_entropy_triangle_inequality():
    rng = trial_rng(88, 0)
    for comp in [
        g.compose(g.make_quantum(2), g.make_quantum(3)),
        g.compose(g.make_classical(2), g.make_coherent(2)),
    ]:
        for _ in range(30):
            rho = random_state(comp, rng)
            rho = g.State(comp, [b / rho.trace for b in rho.blocks])
            s_a = g.shannon_vn(g.marginal(rho, "A"))
            s_b = g.shannon_vn(g.marginal(rho, "B"))
            s_ab = g.shannon_vn(rho)
            assert s_ab <= s_a + s_b + 1e-9
            assert s_ab >= abs(s_a - s_b) - 1e-9


def test_thermo_config_validation():
    with pytest.raises(InvalidTemperature):
        g.ThermoConfig(k_b=-1.0)

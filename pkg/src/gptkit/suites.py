"""Theorem-indexed verification suites.

Each constructive result maps to one named, seeded, randomized suite
producing a pass/fail report with residual statistics.  Suites are
deterministic given ``(name, theory, trials, seed)``: per-trial generators
are derived from the master seed by a counter, so trials are
order-independent and safe to parallelize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import io as gio
from .channels import (
    apply,
    naimark,
    distinguishability_protocol,
    minimally_disturbing,
    random_rare,
    random_reversible,
)
from .entropy import (
    majorization_slack,
    kl_divergence,
    monotone,
    mutual_information,
    renyi_function,
    shannon_function,
    shannon_vn,
    spectrum,
)
from .errors import Unsupported, UnknownSuite
from .sampling import (
    random_effect,
    random_observation_test,
    random_pure_state,
    random_pure_test,
    random_state,
    trial_rng,
)
from .sectors import (
    SystemDescriptor,
    compose,
    describe,
    make_classical,
    make_coherent,
    make_quantum,
)
from .spectral import diagonalize, max_eigenpair, maximal_set, schmidt, transition_matrix
from .statespace import (
    Effect,
    State,
    _tensor_blocks,
    embed_dense,
    invariant_state,
    marginal,
    pair,
    purify,
    tensor,
)
from .thermo import Hamiltonian, landauer_report, second_law_lemma_check


def default_theories() -> list[SystemDescriptor]:
    """The grid exercised by ``verify --all``."""
    out = [make_quantum(d) for d in range(2, 9)]
    out += [make_quantum(d, "real") for d in range(2, 5)]
    out += [make_classical(d) for d in range(2, 9)]
    out.append(compose(make_classical(2), make_coherent(2)))
    out.append(compose(make_classical(3), make_coherent(3)))
    return out


def bipartite_arena(theory: SystemDescriptor) -> SystemDescriptor:
    """A composite on which bipartite suites run for the given theory."""
    if theory.factors is not None:
        return theory
    if theory.kind == "quantum":
        return compose(theory, make_quantum(theory.total_dim, theory.field))
    return compose(theory, make_coherent(theory.total_dim, theory.field))


def _dense_spectrum(rho: State) -> np.ndarray:
    """Independent oracle: eigenvalues of the full embedded matrix."""
    return np.sort(np.linalg.eigvalsh(embed_dense(rho)))[::-1]


def _state_inputs(**states):
    return lambda: {k: gio.state_to_json(v) for k, v in states.items()}


# ---------------------------------------------------------------------------
# trial bodies: each returns (residual, inputs_fn)
# ---------------------------------------------------------------------------

def _trial_probability_balance(theory, rng):
    arena = bipartite_arena(theory)
    psi = random_pure_state(arena, rng).as_state()
    rho_a = marginal(psi, "A")
    rho_b = marginal(psi, "B")
    p_a, alpha = max_eigenpair(rho_a)
    p_b, _ = max_eigenpair(rho_b)
    residual = abs(p_a - p_b)
    if p_a < 1.0 - 1e-9:
        proj = alpha.as_state()
        sigma = State(
            rho_a.system,
            [
                (x - p_a * y) / (1.0 - p_a)
                for x, y in zip(rho_a.blocks, proj.blocks)
            ],
        )
        residual = max(residual, pair(alpha.as_effect(), sigma))
    return residual, _state_inputs(psi=psi)


def _trial_diagonalization(theory, rng):
    rho = random_state(theory, rng)
    diag = diagonalize(rho)
    oracle = _dense_spectrum(rho)
    gap = float(np.max(np.abs(np.asarray(diag.eigenvalues) - oracle)))
    recon = diag.reconstruct()
    frob = float(np.linalg.norm(embed_dense(recon) - embed_dense(rho)))
    return max(gap, frob), _state_inputs(rho=rho)


def _trial_schmidt(theory, rng):
    arena = bipartite_arena(theory)
    psi = random_pure_state(arena, rng).as_state()
    sd = schmidt(psi)
    residual = 0.0
    for i in range(sd.rank):
        for j in range(sd.rank):
            blocks = _tensor_blocks(
                arena, sd.left[i].as_effect(), sd.right[j].as_effect()
            )
            got = pair(Effect(arena, blocks), psi)
            want = sd.probabilities[i] if i == j else 0.0
            residual = max(residual, abs(got - want))
    spec_a = spectrum(marginal(psi, "A"))
    spec_b = spectrum(marginal(psi, "B"))
    n = max(len(spec_a), len(spec_b))
    spec_a = np.pad(spec_a, (0, n - len(spec_a)))
    spec_b = np.pad(spec_b, (0, n - len(spec_b)))
    residual = max(residual, float(np.max(np.abs(spec_a - spec_b))))
    return residual, _state_inputs(psi=psi)


def _degenerate_state(theory, rng) -> State:
    d = theory.total_dim
    groups = int(rng.integers(1, d + 1))
    cuts = sorted(rng.choice(np.arange(1, d), size=groups - 1, replace=False)) if groups > 1 else []
    sizes = np.diff([0, *cuts, d])
    values = np.array([2.0 ** (-k) for k in range(groups)])
    weights = values / float(np.dot(sizes, values))
    vectors = maximal_set(theory, rng=rng)
    blocks = [
        np.zeros((len(s), len(s)), dtype=theory.dtype) for s in theory.sectors
    ]
    idx = 0
    for g, size in enumerate(sizes):
        for _ in range(int(size)):
            v = vectors[idx]
            blocks[v.sector] = blocks[v.sector] + weights[g] * np.outer(
                v.amplitudes, v.amplitudes.conj()
            )
            idx += 1
    return State(theory, blocks)


def _trial_uniqueness(theory, rng):
    rho = _degenerate_state(theory, rng)
    rng_a = np.random.default_rng(rng.integers(2**63))
    rng_b = np.random.default_rng(rng.integers(2**63))
    da = diagonalize(rho, rng=rng_a)
    db = diagonalize(rho, rng=rng_b)
    if len(da.grouped) != len(db.grouped):
        return 1.0, _state_inputs(rho=rho)
    residual = 0.0
    for (la, pa), (lb, pb) in zip(da.grouped, db.grouped):
        residual = max(residual, abs(la - lb))
        residual = max(
            residual, float(np.linalg.norm(embed_dense(pa) - embed_dense(pb)))
        )
    return residual, _state_inputs(rho=rho)


def _trial_majorization(theory, rng):
    sigma = random_state(theory, rng)
    r = random_rare(theory, rng, members=int(rng.integers(2, 5)))
    rho = apply(r, sigma)
    p = spectrum(rho)
    q = spectrum(sigma)
    residual = max(majorization_slack(q, p), abs(p.sum() - q.sum()))
    return residual, _state_inputs(sigma=sigma)


def _trial_monotone_equality(theory, rng):
    rho = random_state(theory, rng)
    psi_seed = int(rng.integers(2**31))
    residual = 0.0
    for f in (shannon_function(), renyi_function(2.0)):
        m_f = monotone(f, rho)
        test = random_pure_test(theory, rng)
        q = np.array([pair(e, rho) for e in test])
        residual = max(residual, max(0.0, m_f - f(q)))
        psi, partner = purify(rho)
        rho_b = marginal(psi, "B")
        prep = random_pure_test(partner, np.random.default_rng(psi_seed))
        weights = np.array([pair(e, rho_b) for e in prep])
        residual = max(residual, max(0.0, m_f - f(weights)))
        eigen_probs = np.array(
            [pair(a.as_effect(), rho) for a in diagonalize(rho).eigenstates]
        )
        residual = max(residual, abs(f(eigen_probs) - m_f))
    return residual, _state_inputs(rho=rho)


def _trial_double_stochasticity(theory, rng):
    s1 = maximal_set(theory, rng=rng)
    s2 = maximal_set(theory, rng=rng)
    t = transition_matrix(s1, s2)
    residual = max(
        float(np.max(np.abs(t.row_sums() - 1.0))),
        float(np.max(np.abs(t.column_sums() - 1.0))),
        max(0.0, -float(t.entries.min())),
    )
    return residual, (lambda: {})


def _trial_klein(theory, rng):
    rho = random_state(theory, rng)
    if rng.random() < 0.1:
        sigma = rho
    else:
        sigma = random_state(theory, rng)
    div = kl_divergence(rho, sigma)
    if math.isinf(div):
        return 0.0, _state_inputs(rho=rho, sigma=sigma)
    residual = max(0.0, -div)
    if sigma is rho:
        residual = max(residual, abs(div))
    return residual, _state_inputs(rho=rho, sigma=sigma)


def _trial_minimal_disturbance(theory, rng):
    d = theory.total_dim
    vectors = maximal_set(theory, rng=rng)
    k = int(rng.integers(1, d)) if d > 1 else 1
    weights = rng.dirichlet(np.ones(k))
    blocks = [np.zeros((len(s), len(s)), dtype=theory.dtype) for s in theory.sectors]
    proj = [np.zeros((len(s), len(s)), dtype=theory.dtype) for s in theory.sectors]
    for i in range(k):
        v = vectors[i]
        outer = np.outer(v.amplitudes, v.amplitudes.conj())
        blocks[v.sector] = blocks[v.sector] + weights[i] * outer
        proj[v.sector] = proj[v.sector] + outer
    rho = State(theory, blocks)
    c = float(rng.uniform(0.0, 0.7))
    eye = [np.eye(len(s), dtype=theory.dtype) for s in theory.sectors]
    a = Effect(theory, [p + c * (i - p) for p, i in zip(proj, eye)])
    t = minimally_disturbing(a, rho)
    # another state supported inside supp(rho)
    w2 = rng.dirichlet(np.ones(k))
    blocks2 = [np.zeros((len(s), len(s)), dtype=theory.dtype) for s in theory.sectors]
    for i in range(k):
        v = vectors[i]
        blocks2[v.sector] = blocks2[v.sector] + w2[i] * np.outer(
            v.amplitudes, v.amplitudes.conj()
        )
    sigma = State(theory, blocks2)
    residual = 0.0
    for probe_in in (rho, sigma):
        kept = apply(t, probe_in)
        residual = max(
            residual,
            float(np.linalg.norm(embed_dense(kept) - embed_dense(probe_in))),
        )
    probe = random_state(theory, rng)
    excess = apply(t, probe).trace - pair(a, probe)
    residual = max(residual, max(0.0, excess - 1e-12))
    return residual, _state_inputs(rho=rho, probe=probe)


def _trial_invariant_spectrum(theory, rng):
    chi = invariant_state(theory)
    diag = diagonalize(chi)
    d = theory.total_dim
    residual = float(np.max(np.abs(np.asarray(diag.eigenvalues) - 1.0 / d)))
    return residual, (lambda: {})


def _trial_naimark(theory, rng):
    if theory.kind != "quantum":
        raise Unsupported("projective dilation suite needs a quantum theory")
    outcomes = int(rng.integers(2, 5))
    test = random_observation_test(theory, rng, outcomes)
    ancilla, phi0, projections = naimark(test)
    kraus = [p.kraus[0] for p in projections]
    residual = 0.0
    for i, ki in enumerate(kraus):
        for j, kj in enumerate(kraus):
            want = ki if i == j else np.zeros_like(ki)
            residual = max(residual, float(np.max(np.abs(ki @ kj - want))))
    d = theory.total_dim
    n = len(test)
    e0 = np.zeros((n, 1), dtype=ancilla.dtype)
    e0[0, 0] = 1.0
    inject = np.kron(np.eye(d, dtype=ancilla.dtype), e0)
    for ki, a in zip(kraus, test):
        reproduced = inject.conj().T @ ki.conj().T @ ki @ inject
        residual = max(
            residual, float(np.max(np.abs(reproduced - a.blocks[0])))
        )
    return residual, (lambda: {"effects": [gio.effect_to_json(a) for a in test]})


def _trial_measurement_majorization(theory, rng):
    rho = random_state(theory, rng)
    test = random_pure_test(theory, rng)
    q = np.array([pair(e, rho) for e in test])
    p = spectrum(rho)
    p = np.pad(p, (0, max(0, len(q) - len(p))))
    residual = majorization_slack(p, q)
    return residual, _state_inputs(rho=rho)


def _trial_subadditivity(theory, rng):
    arena = bipartite_arena(theory)
    if rng.random() < 0.2:
        fa, fb = arena.factors
        rho = tensor(random_state(fa, rng), random_state(fb, rng))
        residual = abs(mutual_information(rho))
        return residual, _state_inputs(rho=rho)
    rho = random_state(arena, rng)
    s_a = shannon_vn(marginal(rho, "A"))
    s_b = shannon_vn(marginal(rho, "B"))
    s_ab = shannon_vn(rho)
    residual = max(0.0, s_ab - s_a - s_b)
    residual = max(residual, max(0.0, abs(s_a - s_b) - s_ab))
    return residual, _state_inputs(rho=rho)


def _landauer_arena(theory):
    if theory.kind == "quantum":
        env = make_quantum(4, theory.field)
        return compose(theory, env), env
    arena = bipartite_arena(theory)
    return arena, arena.factors[1]


def _trial_landauer(theory, rng):
    system = theory if theory.factors is None else theory.factors[0]
    arena, env = _landauer_arena(system)
    energies = rng.uniform(0.0, 1.0, env.total_dim)
    energies[0], energies[-1] = 0.0, 1.0  # keep the range non-degenerate
    h_e = Hamiltonian.from_energies(env, energies)
    beta = float(rng.uniform(0.1, 5.0))
    u = random_reversible(arena, rng)
    rho_s = random_state(system, rng)
    report = landauer_report(rho_s, h_e, beta, u)
    residual = max(
        report["residual"],
        max(0.0, -report["mutual_info"]),
        max(0.0, -report["divergence"]),
        max(0.0, -report["bound_slack"]),
    )
    return residual, _state_inputs(rho_s=rho_s)


def _trial_second_law(theory, rng):
    arena = bipartite_arena(theory)
    fa, fb = arena.factors
    rho_s = random_state(fa, rng)
    rho_e = random_state(fb, rng)
    u = random_reversible(arena, rng)
    report = second_law_lemma_check(rho_s, rho_e, u)
    residual = max(max(0.0, -report["gap"]), report["gap_mismatch"])
    return residual, _state_inputs(rho_s=rho_s, rho_e=rho_e)


def _trial_distinguishability(theory, rng):
    d = theory.total_dim
    vectors = maximal_set(theory, rng=rng)
    n = int(rng.integers(2, min(d, 4) + 1)) if d > 1 else 1
    cuts = (
        sorted(rng.choice(np.arange(1, d), size=n - 1, replace=False))
        if n > 1
        else []
    )
    groups = np.split(np.arange(d), cuts)
    states, effects = [], []
    eye = [np.eye(len(s), dtype=theory.dtype) for s in theory.sectors]
    projs = []
    for g in groups:
        blocks = [np.zeros((len(s), len(s)), dtype=theory.dtype) for s in theory.sectors]
        for i in g:
            v = vectors[int(i)]
            blocks[v.sector] = blocks[v.sector] + np.outer(
                v.amplitudes, v.amplitudes.conj()
            )
        projs.append(blocks)
    for gi, g in enumerate(groups):
        weights = rng.dirichlet(np.ones(len(g)))
        blocks = [np.zeros((len(s), len(s)), dtype=theory.dtype) for s in theory.sectors]
        for w, i in zip(weights, g):
            v = vectors[int(i)]
            blocks[v.sector] = blocks[v.sector] + w * np.outer(
                v.amplitudes, v.amplitudes.conj()
            )
        states.append(State(theory, blocks))
        eff = [p.copy() for p in projs[gi]]
        for gj in range(gi):
            c = float(rng.uniform(0.0, 1.0))
            eff = [e + c * p for e, p in zip(eff, projs[gj])]
        effects.append(Effect(theory, eff))
    test = distinguishability_protocol(states, effects)
    residual = 0.0
    for i, e in enumerate(test):
        for j, rho in enumerate(states):
            want = 1.0 if i == j else 0.0
            residual = max(residual, abs(pair(e, rho) - want))
    return residual, _state_inputs(**{f"rho_{i}": s for i, s in enumerate(states)})


# ---------------------------------------------------------------------------
# registry and runner
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SuiteSpec:
    name: str
    theorem: str
    default_tol: float
    runner: object
    quantum_only: bool = False

    def applies(self, theory: SystemDescriptor) -> bool:
        return theory.kind == "quantum" if self.quantum_only else True


SUITES: dict[str, SuiteSpec] = {
    s.name: s
    for s in [
        SuiteSpec(
            "thm1-probability-balance",
            "both marginals of a pure bipartite state share the maximum eigenvalue",
            1e-10,
            _trial_probability_balance,
        ),
        SuiteSpec(
            "thm3-diagonalization",
            "constructive peel-off diagonalization matches a dense eigensolver",
            1e-9,
            _trial_diagonalization,
        ),
        SuiteSpec(
            "thm4-schmidt",
            "Schmidt decomposition: correlated sharp tests, equal marginal spectra",
            1e-9,
            _trial_schmidt,
        ),
        SuiteSpec(
            "thm5-uniqueness",
            "degeneracy-grouped diagonalization is unique",
            1e-8,
            _trial_uniqueness,
        ),
        SuiteSpec(
            "thm6-majorization",
            "random-reversible mixing majorizes the spectrum",
            1e-9,
            _trial_majorization,
        ),
        SuiteSpec(
            "thm7-monotone-equality",
            "measurement and preparation monotones meet the spectral monotone",
            1e-9,
            _trial_monotone_equality,
        ),
        SuiteSpec(
            "lemma2-double-stochasticity",
            "transition matrices between maximal sets are doubly stochastic",
            1e-9,
            _trial_double_stochasticity,
        ),
        SuiteSpec(
            "lemma3-klein",
            "divergence is non-negative and faithful",
            1e-11,
            _trial_klein,
        ),
        SuiteSpec(
            "prop13-minimal-disturbance",
            "minimally disturbing transformation of a certain effect",
            1e-9,
            _trial_minimal_disturbance,
        ),
        SuiteSpec(
            "prop14-invariant-spectrum",
            "invariant state has flat spectrum 1/d",
            1e-12,
            _trial_invariant_spectrum,
        ),
        SuiteSpec(
            "prop19-naimark",
            "observation-tests dilate to orthogonal pure transformations",
            1e-9,
            _trial_naimark,
            quantum_only=True,
        ),
        SuiteSpec(
            "prop26-measurement-majorization",
            "pure-test statistics are majorized by the padded spectrum",
            1e-9,
            _trial_measurement_majorization,
        ),
        SuiteSpec(
            "prop27-subadditivity",
            "subadditivity, triangle inequality, and product equality",
            1e-9,
            _trial_subadditivity,
        ),
        SuiteSpec(
            "landauer-equality",
            "erasure-cost equality and lower bound",
            1e-8,
            _trial_landauer,
        ),
        SuiteSpec(
            "second-law-lemma",
            "entropy sum never decreases under reversible interaction",
            1e-9,
            _trial_second_law,
        ),
        SuiteSpec(
            "appendix-b-distinguishability",
            "sequential distinguishability protocol achieves delta_ij",
            1e-9,
            _trial_distinguishability,
        ),
    ]
}


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    theorem: str
    theory: str
    trials: int
    seed: int
    tolerance: float
    max_residual: float
    passed: bool
    failures: tuple[dict, ...]

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "theorem": self.theorem,
            "theory": self.theory,
            "trials": self.trials,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "max_residual": self.max_residual,
            "pass": self.passed,
            "failures": list(self.failures),
        }


def run_suite(
    name: str,
    theory: SystemDescriptor,
    trials: int,
    seed: int,
    tol: float | None = None,
) -> SuiteReport:
    """Run one named suite; deterministic given (name, theory, trials, seed)."""
    spec = SUITES.get(name)
    if spec is None:
        raise UnknownSuite(f"unknown suite {name!r}")
    if tol is None:
        tol = spec.default_tol
    max_residual = 0.0
    failures = []
    for t in range(trials):
        rng = trial_rng(seed, t)
        residual, inputs_fn = spec.runner(theory, rng)
        max_residual = max(max_residual, residual)
        if residual > tol:
            failures.append(
                {
                    "trial": t,
                    "seed": [int(seed), t],
                    "residual": residual,
                    "inputs": inputs_fn(),
                }
            )
    return SuiteReport(
        suite=name,
        theorem=spec.theorem,
        theory=describe(theory),
        trials=trials,
        seed=seed,
        tolerance=tol,
        max_residual=max_residual,
        passed=max_residual <= tol,
        failures=tuple(failures),
    )

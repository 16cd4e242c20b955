"""Gibbs states, the maximum-entropy principle, the second-law lemma, and
the erasure-cost (Landauer) accounting.

All internal formulas use natural logarithms and beta = 1/(k_B T); every
report carries an explicit ``log_base`` field.  The Gibbs state of an
observable H is

    rho_beta = sum_i e^{-beta E_i} / Z  phi_i,     Z = sum_i e^{-beta E_i},

with E(beta) = <H>_{rho_beta} = -d ln Z / d beta strictly decreasing, and
S(rho_beta) = beta E(beta) + ln Z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import Channel, apply
from .entropy import kl_divergence, shannon_vn
from .errors import (
    EnergyOutOfRange,
    InvalidTemperature,
    NotInvertible,
    NotReversible,
)
from .sectors import SystemDescriptor
from .spectral import diagonalize
from .statespace import Observable, PureVector, State, marginal, pair, tensor

BETA_CAP_LIMIT = 2.0**20


@dataclass(frozen=True)
class ThermoConfig:
    """Unit conventions: k_B and the (fixed) natural-log convention."""

    k_b: float = 1.0
    log_base: float = math.e

    def __post_init__(self):
        if self.k_b <= 0:
            raise InvalidTemperature("k_B must be positive")


@dataclass(frozen=True)
class Hamiltonian:
    """An observable with cached, globally sorted eigendata."""

    observable: Observable
    energies: tuple[float, ...]
    eigenstates: tuple[PureVector, ...]

    @classmethod
    def from_observable(cls, h: Observable) -> "Hamiltonian":
        from .spectral import _signed_spectrum

        values, vectors = _signed_spectrum(h)
        order = np.argsort(values, kind="stable")
        return cls(
            observable=h,
            energies=tuple(values[i] for i in order),
            eigenstates=tuple(vectors[i] for i in order),
        )

    @classmethod
    def from_energies(cls, system: SystemDescriptor, energies) -> "Hamiltonian":
        """Diagonal Hamiltonian in the canonical basis."""
        energies = np.asarray(energies, dtype=float)
        blocks = []
        for sec in system.sectors:
            blocks.append(np.diag(energies[list(sec)]).astype(system.dtype))
        return cls.from_observable(Observable(system, blocks))

    @property
    def system(self) -> SystemDescriptor:
        return self.observable.system

    @property
    def e_min(self) -> float:
        return self.energies[0]

    @property
    def e_max(self) -> float:
        return self.energies[-1]

    @property
    def non_degenerate_range(self) -> bool:
        return self.e_max > self.e_min


def _boltzmann_weights(h: Hamiltonian, beta: float) -> np.ndarray:
    e = np.asarray(h.energies)
    if math.isinf(beta):
        edge = h.e_min if beta > 0 else h.e_max
        hits = np.abs(e - edge) <= 1e-12 * max(1.0, abs(edge))
        return hits.astype(float) / hits.sum()
    shift = h.e_min if beta >= 0 else h.e_max
    w = np.exp(-beta * (e - shift))
    return w / w.sum()


def gibbs_state(h: Hamiltonian, beta: float) -> State:
    """The Gibbs state e^{-beta H^dag} / Z; beta = +/-inf selects the
    uniform mixture over the ground/top eigenspace."""
    weights = _boltzmann_weights(h, beta)
    system = h.system
    blocks = [
        np.zeros((len(s), len(s)), dtype=system.dtype) for s in system.sectors
    ]
    for w, phi in zip(weights, h.eigenstates):
        blocks[phi.sector] = blocks[phi.sector] + w * np.outer(
            phi.amplitudes, phi.amplitudes.conj()
        )
    return State(system, blocks)


def log_partition(h: Hamiltonian, beta: float) -> float:
    """ln Z(beta), computed with a max-shift for overflow safety."""
    if math.isinf(beta):
        raise InvalidTemperature("ln Z diverges at infinite beta")
    e = np.asarray(h.energies)
    shift = h.e_min if beta >= 0 else h.e_max
    return float(np.log(np.sum(np.exp(-beta * (e - shift)))) - beta * shift)


def energy_of_beta(h: Hamiltonian, beta: float) -> float:
    """E(beta) = <H>_{rho_beta}, strictly decreasing in beta."""
    if math.isinf(beta):
        return h.e_min if beta > 0 else h.e_max
    weights = _boltzmann_weights(h, beta)
    return float(np.dot(weights, h.energies))


def beta_of_energy(h: Hamiltonian, energy: float) -> float:
    """Invert E(beta) by bisection with bracket expansion.

    The initial cap is 64 / (E_max - E_min); it doubles until the bracket
    holds or exceeds 2^20 (then the energy is numerically out of range).
    """
    if not h.non_degenerate_range:
        raise NotInvertible("fully degenerate H has constant E(beta)")
    span = h.e_max - h.e_min
    if not (h.e_min < energy < h.e_max):
        raise EnergyOutOfRange(
            f"E = {energy} outside ({h.e_min}, {h.e_max})"
        )
    cap = 64.0 / span
    while energy_of_beta(h, cap) > energy or energy_of_beta(h, -cap) < energy:
        cap *= 2.0
        if cap > BETA_CAP_LIMIT:
            raise EnergyOutOfRange("bracketing failed below the beta cap")
    lo, hi = -cap, cap  # E decreasing: E(lo) >= energy >= E(hi)
    mid = 0.0
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        val = energy_of_beta(h, mid)
        # the energy criterion alone leaves beta loose where E(beta) is
        # flat; keep halving until the bracket pins beta as well
        if abs(val - energy) <= 1e-10 * span and hi - lo <= 1e-9:
            return mid
        if val > energy:
            lo = mid
        else:
            hi = mid
    return mid


# ---------------------------------------------------------------------------
# maximum-entropy principle
# ---------------------------------------------------------------------------

def _constrained_state(h: Hamiltonian, energy: float, rng) -> State:
    """Random state with <H> = energy: straddle, then bisect the mixture."""
    from .sampling import random_state

    span = h.e_max - h.e_min
    lo = random_state(h.system, rng)
    hi = random_state(h.system, rng)
    if pair(h.observable, lo) > pair(h.observable, hi):
        lo, hi = hi, lo
    if pair(h.observable, lo) > energy:
        lo = h.eigenstates[0].as_state()  # ground state pulls below
    if pair(h.observable, hi) < energy:
        hi = h.eigenstates[-1].as_state()
    a, b = 0.0, 1.0  # weight of hi
    blocks = None
    for _ in range(80):
        w = 0.5 * (a + b)
        blocks = [
            (1 - w) * x + w * y for x, y in zip(lo.blocks, hi.blocks)
        ]
        val = sum(
            float(np.sum(hb.conj() * sb).real)
            for hb, sb in zip(h.observable.blocks, blocks)
        )
        if abs(val - energy) <= 1e-13 * max(span, 1.0):
            break
        if val < energy:
            a = w
        else:
            b = w
    return State(h.system, blocks)


def max_entropy_check(
    h: Hamiltonian, energy: float, trials: int, seed: int
) -> dict:
    """Verify the Gibbs state maximizes entropy at fixed <H> = E.

    Samples random states constrained to the target energy and reports the
    worst entropy excess plus the worst mismatch between the entropy gap
    S(rho_beta) - S(rho) and the divergence S(rho || rho_beta).
    """
    from .sampling import trial_rng

    beta = beta_of_energy(h, energy)
    gibbs = gibbs_state(h, beta)
    s_gibbs = shannon_vn(gibbs, base=math.e)
    worst_violation = 0.0
    worst_mismatch = 0.0
    for t in range(trials):
        rng = trial_rng(seed, t)
        rho = _constrained_state(h, energy, rng)
        s_rho = shannon_vn(rho, base=math.e)
        gap = s_gibbs - s_rho
        div = kl_divergence(rho, gibbs)
        worst_violation = max(worst_violation, s_rho - s_gibbs)
        worst_mismatch = max(worst_mismatch, abs(gap - div))
    return {
        "beta": beta,
        "target_energy": energy,
        "gibbs_entropy": s_gibbs,
        "max_entropy_violation": worst_violation,
        "max_gap_mismatch": worst_mismatch,
        "trials": trials,
        "seed": seed,
        "log_base": "e",
    }


# ---------------------------------------------------------------------------
# second law lemma and erasure cost
# ---------------------------------------------------------------------------

def second_law_lemma_check(rho_s: State, rho_e: State, u: Channel) -> dict:
    """Entropy bookkeeping for a reversible system-environment interaction.

    Checks S(rho'_S) + S(rho'_E) >= S(rho_S) + S(rho_E), with the gap equal
    to the mutual information of the final state.
    """
    if u.tag != "reversible":
        raise NotReversible("the interaction must be reversible")
    joint = tensor(rho_s, rho_e)
    if joint.system != u.input_system:
        raise NotReversible("interaction acts on a different composite")
    final = apply(u, joint)
    s_before = shannon_vn(rho_s, math.e) + shannon_vn(rho_e, math.e)
    s_after = shannon_vn(marginal(final, "A"), math.e) + shannon_vn(
        marginal(final, "B"), math.e
    )
    from .entropy import mutual_information

    info = mutual_information(final, base=math.e)
    return {
        "entropy_sum_before": s_before,
        "entropy_sum_after": s_after,
        "gap": s_after - s_before,
        "mutual_information": info,
        "gap_mismatch": abs((s_after - s_before) - info),
        "log_base": "e",
    }


def landauer_report(
    rho_s: State,
    h_e: Hamiltonian,
    beta: float,
    u: Channel,
    config: ThermoConfig = ThermoConfig(),
) -> dict:
    """Itemized erasure-cost balance for one reversible interaction.

    With the environment prepared in the Gibbs state at inverse
    temperature beta, the energy gained by the environment equals

        k_B T [ S(rho_S) - S(rho'_S) + I(S:E)_{rho'} + S(rho'_E || rho_beta) ],

    and dropping the two non-negative terms yields the lower bound
    ``lhs >= k_B T [S(rho_S) - S(rho'_S)]``.
    """
    if not math.isfinite(beta) or beta == 0.0:
        raise InvalidTemperature("beta must be finite and nonzero")
    rho_e = gibbs_state(h_e, beta)
    joint = tensor(rho_s, rho_e)
    if joint.system != u.input_system:
        raise NotReversible("interaction acts on a different composite")
    if u.tag != "reversible":
        raise NotReversible("the interaction must be reversible")
    final = apply(u, joint)
    rho_s_out = marginal(final, "A")
    rho_e_out = marginal(final, "B")

    from .entropy import mutual_information

    kbt = 1.0 / beta  # k_B T; temperature enters all formulas through beta
    lhs = pair(h_e.observable, rho_e_out) - pair(h_e.observable, rho_e)
    entropy_drop = shannon_vn(rho_s, math.e) - shannon_vn(rho_s_out, math.e)
    info = mutual_information(final, base=math.e)
    divergence = kl_divergence(rho_e_out, rho_e)
    rhs = kbt * (entropy_drop + info + divergence)
    return {
        "lhs": lhs,
        "entropy_drop": entropy_drop,
        "mutual_info": info,
        "divergence": divergence,
        "rhs": rhs,
        "residual": abs(lhs - rhs),
        "bound_slack": lhs - kbt * entropy_drop,
        "beta": beta,
        "k_b": config.k_b,
        "log_base": "e",
    }

"""Seeded random generators for states, effects, tests, and trial inputs.

Everything takes an explicit ``numpy.random.Generator`` so trial batches
stay reproducible and order-independent: suites derive one generator per
trial from ``default_rng((master_seed, trial_index))``.
"""

from __future__ import annotations

import numpy as np

from .channels import random_reversible
from .sectors import SystemDescriptor
from .spectral import maximal_set
from .statespace import Effect, PureVector, State


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-derived per-trial generator; independent of trial order."""
    return np.random.default_rng((int(seed), int(trial)))


def _ginibre(rng, size: int, field: str):
    if field == "complex":
        return rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
    return rng.normal(size=(size, size))


def random_state(system: SystemDescriptor, rng, rank: int | None = None) -> State:
    """Random normalized state: Wishart blocks with Dirichlet sector weights."""
    weights = rng.dirichlet(np.ones(len(system.sectors)))
    blocks = []
    for w, sec in zip(weights, system.sectors):
        size = len(sec)
        g = _ginibre(rng, size, system.field)
        if rank is not None and rank < size:
            g[:, rank:] = 0.0
        block = g @ g.conj().T
        tr = np.trace(block).real
        blocks.append(block * (w / tr) if tr > 0 else block)
    return State(system, blocks)


def random_pure_state(system: SystemDescriptor, rng) -> PureVector:
    """Haar unit vector inside a uniformly chosen sector."""
    sector = int(rng.integers(len(system.sectors)))
    size = len(system.sectors[sector])
    if system.field == "complex":
        v = rng.normal(size=size) + 1j * rng.normal(size=size)
    else:
        v = rng.normal(size=size)
    return PureVector(system, sector, v / np.linalg.norm(v))


def random_effect(system: SystemDescriptor, rng) -> Effect:
    """Random effect: scaled Wishart blocks squashed into [0, 1]."""
    blocks = []
    for sec in system.sectors:
        size = len(sec)
        g = _ginibre(rng, size, system.field)
        block = g @ g.conj().T
        top = np.linalg.eigvalsh(block)[-1]
        scale = rng.uniform(0.2, 1.0) / top if top > 0 else 0.0
        blocks.append(block * scale)
    return Effect(system, blocks)


def random_observation_test(system: SystemDescriptor, rng, outcomes: int) -> list[Effect]:
    """Random test summing to u: a_i = S^{-1/2} G_i S^{-1/2}."""
    n = system.total_dim
    raw = []
    for _ in range(outcomes):
        dense = np.zeros((n, n), dtype=system.dtype)
        for sec in system.sectors:
            g = _ginibre(rng, len(sec), system.field)
            dense[np.ix_(sec, sec)] = g @ g.conj().T
        raw.append(dense)
    total = sum(raw)
    w, v = np.linalg.eigh(total)
    inv_root = (v * (1.0 / np.sqrt(w))) @ v.conj().T
    effects = []
    for dense in raw:
        mat = inv_root @ dense @ inv_root
        blocks = [mat[np.ix_(sec, sec)] for sec in system.sectors]
        effects.append(Effect(system, blocks))
    return effects


def random_pure_test(system: SystemDescriptor, rng) -> list[Effect]:
    """Random pure observation-test.

    Rotates the canonical sharp test by a random reversible channel and,
    half the time, refines outcomes into pairs ``(lambda a, (1-lambda) a)``
    so tests with more than d outcomes of the ``lambda alpha^dagger`` form
    are exercised as well.
    """
    vectors = maximal_set(system, rng=rng)
    effects: list[Effect] = []
    refine = rng.random() < 0.5
    for vec in vectors:
        e = vec.as_effect()
        if refine and rng.random() < 0.5:
            lam = float(rng.uniform(0.05, 0.95))
            effects.append(Effect(system, [lam * b for b in e.blocks]))
            effects.append(Effect(system, [(1.0 - lam) * b for b in e.blocks]))
        else:
            effects.append(e)
    return effects


def random_doubly_stochastic(rng, dim: int, terms: int = 6) -> np.ndarray:
    """Birkhoff sample: convex mixture of permutation matrices."""
    weights = rng.dirichlet(np.ones(terms))
    out = np.zeros((dim, dim))
    for w in weights:
        perm = rng.permutation(dim)
        out[np.arange(dim), perm] += w
    return out

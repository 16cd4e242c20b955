"""Spectral machinery: maximum eigenpairs, constructive diagonalization,
dagger duality, Schmidt decomposition, maximal sets, and functional calculus.

The central routine is :func:`diagonalize`, which implements the peel-off
procedure: repeatedly extract a maximum eigenpair ``(p*, alpha)`` of the
current state, deflate

    rho_{i+1} = (rho_i - p*_i alpha_i) / (1 - p*_i),

and record ``p_i = p*_i prod_{j<i} (1 - p*_j)``, stopping once ``p* = 1``
or the residual trace falls below 1e-12.  The output lists eigenvalues in
non-increasing order together with the perfectly distinguishable pure
eigenstates, plus the degeneracy-grouped form ``(lambda_k, Pi_k)`` that is
unique for every state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    IncompatibleSystems,
    InvalidState,
    NotMaximal,
    NotPure,
    ZeroState,
)
from .sectors import SystemDescriptor
from .statespace import (
    Effect,
    Observable,
    PureVector,
    State,
    canonical_phase,
    deterministic_effect,
    marginal,
    pair,
    pure_vector_from_dense,
    vector_of_pure_state,
)

RESIDUAL_TRACE_TOL = 1e-12
TERMINAL_EIGENVALUE = 1.0 - 1e-12
DEGENERACY_TOL = 1e-10
GROUP_TOL = 1e-8
RANK_TOL = 1e-12


@dataclass(frozen=True)
class Diagonalization:
    """Eigenvalues with eigenstates, plus the degeneracy-grouped form."""

    system: SystemDescriptor
    eigenvalues: tuple[float, ...]
    eigenstates: tuple[PureVector, ...]
    grouped: tuple[tuple[float, Observable], ...]

    def reconstruct(self) -> State:
        blocks = [
            np.zeros((len(s), len(s)), dtype=self.system.dtype)
            for s in self.system.sectors
        ]
        for p, alpha in zip(self.eigenvalues, self.eigenstates):
            blocks[alpha.sector] = blocks[alpha.sector] + p * np.outer(
                alpha.amplitudes, alpha.amplitudes.conj()
            )
        return State(self.system, blocks)


class _SectorWork:
    """Mutable per-sector view of the residual state during peel-off."""

    def __init__(self, system: SystemDescriptor, blocks):
        self.system = system
        self.mats = [np.array(b) for b in blocks]
        self.eigs: list[tuple[np.ndarray, np.ndarray] | None] = [None] * len(self.mats)

    def refresh(self, s: int):
        mat = self.mats[s]
        if mat.shape[0] == 0:
            self.eigs[s] = (np.zeros(0), np.zeros((0, 0)))
            return
        w, v = np.linalg.eigh(mat)
        if w[0] < -1e-9:
            raise InvalidState(f"residual eigenvalue {w[0]:.3e} below tolerance")
        if w[0] < 0.0:
            w = np.clip(w, 0.0, None)
            self.mats[s] = (v * w) @ v.conj().T
        self.eigs[s] = (w, v)

    def top(self):
        """Largest eigenvalue with its (sector, index); caches eigh output."""
        best = (-np.inf, -1, -1)
        for s in range(len(self.mats)):
            if self.eigs[s] is None:
                self.refresh(s)
            w, _ = self.eigs[s]
            if len(w) and w[-1] > best[0]:
                best = (float(w[-1]), s, len(w) - 1)
        return best

    def pick_vector(self, p_star, rng):
        """Deterministic tie-break: lowest-indexed sector holding the
        maximum, then the eigensolver's own vector; with a generator, a
        Haar-random vector inside that sector's degenerate top eigenspace."""
        scale = max(abs(p_star), 1.0)
        candidates = []
        for s in range(len(self.mats)):
            w, v = self.eigs[s]
            hits = [k for k in range(len(w)) if w[k] >= p_star - DEGENERACY_TOL * scale]
            if hits:
                candidates.append((s, hits))
        if rng is None:
            s, hits = candidates[0]
            _, v = self.eigs[s]
            return s, canonical_phase(v[:, hits[-1]].copy())
        s, hits = candidates[rng.integers(len(candidates))]
        _, v = self.eigs[s]
        basis = v[:, hits]
        if np.iscomplexobj(basis):
            coeff = rng.normal(size=len(hits)) + 1j * rng.normal(size=len(hits))
        else:
            coeff = rng.normal(size=len(hits))
        vec = basis @ coeff
        return s, canonical_phase(vec / np.linalg.norm(vec))

    def deflate(self, s: int, p_star: float, vec: np.ndarray):
        self.mats[s] = self.mats[s] - p_star * np.outer(vec, vec.conj())
        if p_star < 1.0:
            factor = 1.0 / (1.0 - p_star)
            for t in range(len(self.mats)):
                self.mats[t] = self.mats[t] * factor
                if t != s and self.eigs[t] is not None:
                    w, v = self.eigs[t]
                    self.eigs[t] = (w * factor, v)
        self.eigs[s] = None


def max_eigenpair(rho: State, rng=None) -> tuple[float, PureVector]:
    """Largest block eigenvalue across sectors with a confined eigenvector.

    Satisfies ``pair(alpha.as_effect(), rho) = p*``.  With ``rng`` the
    eigenvector is randomized inside the degenerate top eigenspace.
    """
    if rho.trace <= RESIDUAL_TRACE_TOL:
        raise ZeroState("zero state has no maximum eigenvalue")
    work = _SectorWork(rho.system, rho.blocks)
    p_star, _, _ = work.top()
    sector, vec = work.pick_vector(p_star, rng)
    return p_star, PureVector(rho.system, sector, vec)


def _complete_orthonormal(system: SystemDescriptor, taken):
    """Per-sector orthonormal complements of the already-extracted vectors."""
    from scipy.linalg import null_space

    extras = []
    for s, sec in enumerate(system.sectors):
        size = len(sec)
        vecs = [v for (sect, v) in taken if sect == s]
        if len(vecs) >= size:
            continue
        if vecs:
            basis = null_space(np.array(vecs).conj(), rcond=1e-10)
        else:
            basis = np.eye(size, dtype=system.dtype)
        for k in range(basis.shape[1]):
            col = basis[:, k].astype(system.dtype)
            extras.append((s, canonical_phase(col / np.linalg.norm(col))))
    return extras


def diagonalize(rho: State, rng=None, group_tol: float = GROUP_TOL) -> Diagonalization:
    """Peel-off diagonalization of a state.

    Subnormalized states are rescaled to unit trace, diagonalized, and the
    eigenvalues scaled back.  ``rng`` randomizes tie-breaking inside
    degenerate eigenspaces (the grouped output is invariant under it).
    """
    trace = rho.trace
    if trace <= RESIDUAL_TRACE_TOL:
        raise ZeroState("cannot diagonalize the zero state")
    system = rho.system
    d = system.total_dim
    work = _SectorWork(system, [b / trace for b in rho.blocks])
    eigenvalues: list[float] = []
    vectors: list[tuple[int, np.ndarray]] = []
    remaining = 1.0
    for _ in range(d):
        if remaining < RESIDUAL_TRACE_TOL:
            break
        p_star, _, _ = work.top()
        if p_star <= 0.0:
            break
        sector, vec = work.pick_vector(p_star, rng)
        if p_star >= TERMINAL_EIGENVALUE:
            eigenvalues.append(remaining)
            vectors.append((sector, vec))
            remaining = 0.0
            break
        eigenvalues.append(p_star * remaining)
        vectors.append((sector, vec))
        remaining *= 1.0 - p_star
        work.deflate(sector, p_star, vec)
    vectors.extend(_complete_orthonormal(system, vectors))
    eigenvalues.extend([0.0] * (d - len(eigenvalues)))

    order = np.argsort([-p for p in eigenvalues], kind="stable")
    eigenvalues = [eigenvalues[i] * trace for i in order]
    vectors = [vectors[i] for i in order]
    states = tuple(PureVector(system, s, v) for s, v in vectors)

    grouped = []
    start = 0
    for k in range(1, d + 1):
        if k == d or eigenvalues[start] - eigenvalues[k] > group_tol:
            blocks = [
                np.zeros((len(s), len(s)), dtype=system.dtype)
                for s in system.sectors
            ]
            for j in range(start, k):
                sct, v = vectors[j]
                blocks[sct] = blocks[sct] + np.outer(v, v.conj())
            lam = float(np.mean(eigenvalues[start:k]))
            grouped.append((lam, Observable(system, blocks)))
            start = k
    return Diagonalization(system, tuple(eigenvalues), states, tuple(grouped))


# ---------------------------------------------------------------------------
# dagger duality
# ---------------------------------------------------------------------------

def dagger(x: PureVector) -> PureVector:
    """The bijection between normalized pure states and pure effects.

    In every supported model the two roles are carried by the same sector
    vector, so the map is an involution on the representation; use
    :meth:`PureVector.as_state` / :meth:`PureVector.as_effect` to pick the
    role explicitly.
    """
    return x


def diagonalize_vector(xi) -> tuple[tuple[float, ...], tuple[PureVector, ...]]:
    """Signed eigendecomposition of a state-space vector, sorted descending."""
    return _signed_spectrum(xi)


def diagonalize_observable(x: Observable):
    """Signed eigendecomposition of an observable, sorted descending."""
    return _signed_spectrum(x)


def _signed_spectrum(x):
    system = x.system
    values: list[float] = []
    vectors: list[PureVector] = []
    for s, block in enumerate(x.blocks):
        if block.shape[0] == 0:
            continue
        w, v = np.linalg.eigh(block)
        for k in range(len(w)):
            values.append(float(w[k]))
            vectors.append(PureVector(system, s, canonical_phase(v[:, k].copy())))
    order = np.argsort([-v for v in values], kind="stable")
    return (
        tuple(values[i] for i in order),
        tuple(vectors[i] for i in order),
    )


def dagger_extend(x) -> Observable:
    """Extend the dagger linearly through the diagonalization.

    ``sum x_i alpha_i  ->  sum x_i alpha_i^dagger``; the output carries the
    spectrally reconstructed blocks, identical (up to float error) to the
    input blocks since the dagger acts as the identity on Hermitian blocks.
    """
    values, vectors = _signed_spectrum(x)
    system = x.system
    blocks = [
        np.zeros((len(s), len(s)), dtype=system.dtype) for s in system.sectors
    ]
    for val, vec in zip(values, vectors):
        blocks[vec.sector] = blocks[vec.sector] + val * np.outer(
            vec.amplitudes, vec.amplitudes.conj()
        )
    return Observable(system, blocks)


# ---------------------------------------------------------------------------
# Schmidt decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchmidtDecomposition:
    """Biorthogonal decomposition of a pure bipartite state.

    The daggers of ``left`` / ``right`` (completed to maximal sets) form
    the two perfectly correlated pure sharp tests; ``probabilities`` are
    the shared marginal eigenvalues, sorted descending and all positive.
    """

    probabilities: tuple[float, ...]
    left: tuple[PureVector, ...]
    right: tuple[PureVector, ...]
    rank: int


def schmidt(psi: State, rng=None) -> SchmidtDecomposition:
    """Operational Schmidt decomposition of a normalized pure state on a
    composite: ``(a_i (x) b_j | psi) = p_i delta_ij`` for ``i, j <= rank``,
    and both marginals diagonalize with the same spectrum."""
    if psi.purity_defect() > 1e-9:
        raise NotPure("schmidt needs a pure state")
    if not psi.is_normalized:
        raise NotPure("schmidt needs a normalized state")
    desc = psi.system
    vec = vector_of_pure_state(psi).dense()
    fa, fb = desc.factors if desc.factors else (None, None)
    if fa is None:
        from .errors import NotAComposite

        raise NotAComposite("schmidt needs a composite system")
    m = vec.reshape(fa.total_dim, fb.total_dim)
    diag = diagonalize(marginal(psi, "A"), rng=rng)
    probs = [p for p in diag.eigenvalues if p > RANK_TOL]
    rank = len(probs)
    left = diag.eigenstates[:rank]
    right = []
    for i in range(rank):
        cond = m.T @ left[i].dense().conj()
        right.append(pure_vector_from_dense(fb, cond / np.linalg.norm(cond)))
    return SchmidtDecomposition(tuple(probs), tuple(left), tuple(right), rank)


# ---------------------------------------------------------------------------
# maximal sets, transition matrices, pure sharp measurements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransitionMatrix:
    """Overlap table T_ij = (alpha_i^dagger | alpha'_j) of two maximal sets."""

    entries: np.ndarray

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def column_sums(self) -> np.ndarray:
        return self.entries.sum(axis=0)


def maximal_set(system: SystemDescriptor, rng=None) -> list[PureVector]:
    """A maximal set of d perfectly distinguishable pure states.

    The canonical set is the basis ordered by (sector, internal index); a
    generator rotates it by a random reversible channel.
    """
    vectors = []
    for s, sec in enumerate(system.sectors):
        for k in range(len(sec)):
            amp = np.zeros(len(sec), dtype=system.dtype)
            amp[k] = 1.0
            vectors.append(PureVector(system, s, amp))
    if rng is None:
        return vectors
    from .channels import random_reversible

    u = random_reversible(system, rng).kraus[0]
    return [
        pure_vector_from_dense(system, u @ v.dense()) for v in vectors
    ]


def _check_maximal(vectors, system, tol=1e-8):
    if len(vectors) != system.total_dim:
        raise NotMaximal(
            f"{len(vectors)} states given, {system.total_dim} required"
        )
    for v in vectors:
        if v.system != system:
            raise IncompatibleSystems("maximal set spans different systems")
    mat = np.array([v.dense() for v in vectors])
    gram = np.abs(mat.conj() @ mat.T)
    if np.max(np.abs(gram - np.eye(len(vectors)))) > tol:
        raise NotMaximal("states are not perfectly distinguishable")


def transition_matrix(set1, set2) -> TransitionMatrix:
    """Doubly stochastic overlap matrix of two maximal sets.

    ``T_ij = pair(alpha_i^dagger, alpha'_j)``, which for sector-confined
    unit vectors is the squared overlap (zero across different sectors).
    """
    if not set1 or not set2:
        raise NotMaximal("empty set")
    system = set1[0].system
    _check_maximal(set1, system)
    _check_maximal(set2, system)
    left = np.array([a.dense() for a in set1])
    right = np.array([b.dense() for b in set2])
    t = np.abs(left.conj() @ right.T) ** 2
    return TransitionMatrix(t)


def pure_sharp_measurement(vectors) -> list[Effect]:
    """The observation-test {alpha_i^dagger} of a maximal set.

    The effects are pure, normalized, sum to the deterministic effect, and
    perfectly distinguish the set.
    """
    if not vectors:
        raise NotMaximal("empty set")
    system = vectors[0].system
    _check_maximal(vectors, system)
    effects = [v.as_effect() for v in vectors]
    total = [sum(e.blocks[s] for e in effects) for s in range(len(system.sectors))]
    u = deterministic_effect(system)
    dev = max(
        float(np.max(np.abs(t - ub))) if ub.size else 0.0
        for t, ub in zip(total, u.blocks)
    )
    if dev > 1e-10:
        raise NotMaximal(f"effects sum deviates from u by {dev:.3e}")
    return effects


# ---------------------------------------------------------------------------
# functional calculus
# ---------------------------------------------------------------------------

def functional_calculus(x: Observable, f) -> Observable:
    """Apply ``f`` to the spectrum: f(X) = sum f(x_i) alpha_i^dagger."""
    system = x.system
    blocks = []
    for block in x.blocks:
        if block.shape[0] == 0:
            blocks.append(block)
            continue
        w, v = np.linalg.eigh(block)
        try:
            fw = np.array([float(f(val)) for val in w])
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise DomainError(f"function undefined on the spectrum: {exc}")
        if not np.all(np.isfinite(fw)):
            raise DomainError("function not finite on the spectrum")
        blocks.append((v * fw) @ v.conj().T)
    return Observable(system, blocks)


def surprisal(rho: State, base: float = 2.0) -> Observable:
    """The surprisal observable -log rho^dagger, restricted to the support.

    Zero eigenvalues contribute value 0 under the ``0 log 0 = 0``
    convention, so ``pair(surprisal(rho), rho)`` is the entropy of the
    spectrum of rho in the chosen base.
    """
    if rho.trace <= RESIDUAL_TRACE_TOL:
        raise ZeroState("surprisal of the zero state")
    ln_base = math.log(base)
    system = rho.system
    blocks = []
    for block in rho.blocks:
        if block.shape[0] == 0:
            blocks.append(block)
            continue
        w, v = np.linalg.eigh(block)
        vals = np.where(w > RANK_TOL, w, 1.0)
        fw = -np.log(vals) / ln_base
        fw = np.where(w > RANK_TOL, fw, 0.0)
        blocks.append((v * fw) @ v.conj().T)
    return Observable(system, blocks)

"""States, effects, observables, pairing, marginals, and purification.

All operator-valued objects are stored sector-wise: one Hermitian block per
sector, never as a full ``n x n`` matrix.  This makes block-diagonal
validity (the defining constraint of the sector theories) hold by
construction.  Pairing an effect or observable ``a`` with a state ``rho``
gives the scalar

    (a|rho) = sum_sectors Tr(a_s rho_s),

which is a probability in ``[0, 1]`` whenever ``a`` is an effect and
``rho`` is normalized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    IncompatibleSystems,
    InvalidEffect,
    InvalidObservable,
    InvalidState,
    NotAComposite,
    NotCopurifications,
    NotNormalized,
    NotPure,
    UnsupportedComposite,
)
from .sectors import SystemDescriptor, compose, purifying_partner

# Eigenvalues of a state block may dip this far below zero before the
# state is rejected; anything in (-PSD_TOL, 0) is clipped to 0.
PSD_TOL = 1e-10
# Effect block eigenvalues must lie in [0, 1] within this tolerance.
EFFECT_TOL = 1e-12
HERMITICITY_TOL = 1e-12
NORMALIZATION_TOL = 1e-9
# Residual mass allowed outside the target blocks when carving a dense
# matrix back into sector-wise storage.
OFFBLOCK_TOL = 1e-10


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr)
    out.setflags(write=False)
    return out


def _check_hermitian(block: np.ndarray, tol: float) -> np.ndarray:
    if block.ndim != 2 or block.shape[0] != block.shape[1]:
        raise InvalidState("blocks must be square matrices")
    dev = np.max(np.abs(block - block.conj().T)) if block.size else 0.0
    if dev > tol:
        raise InvalidState(f"block not Hermitian (residual {dev:.2e})")
    return (block + block.conj().T) / 2.0


def _coerce_blocks(system: SystemDescriptor, blocks) -> tuple[np.ndarray, ...]:
    blocks = list(blocks)
    if len(blocks) != len(system.sectors):
        raise InvalidState("one block per sector required")
    out = []
    for sec, block in zip(system.sectors, blocks):
        b = np.asarray(block, dtype=system.dtype)
        if b.shape != (len(sec), len(sec)):
            raise InvalidState(
                f"block shape {b.shape} does not match sector size {len(sec)}"
            )
        out.append(b)
    return tuple(out)


class _Blockwise:
    """Shared storage/validation for sector-wise Hermitian operators."""

    system: SystemDescriptor
    blocks: tuple[np.ndarray, ...]

    def __init__(self, system: SystemDescriptor, blocks):
        self.system = system
        self.blocks = tuple(
            _freeze(self._validate(_check_hermitian(b, HERMITICITY_TOL)))
            for b in _coerce_blocks(system, blocks)
        )

    def _validate(self, block: np.ndarray) -> np.ndarray:
        return block

    @property
    def trace(self) -> float:
        return float(sum(np.trace(b).real for b in self.blocks))

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and self.system == other.system
            and all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks))
        )

    def __repr__(self):
        return f"{type(self).__name__}(system={self.system!r}, trace={self.trace:.6g})"


class State(_Blockwise):
    """A (possibly subnormalized) state: PSD blocks with total trace <= 1.

    Eigenvalues in ``(-1e-10, 0)`` are clipped to zero at construction;
    anything more negative raises ``invalid-state``.
    """

    def _validate(self, block: np.ndarray) -> np.ndarray:
        if block.shape[0] == 0:
            return block
        w, v = np.linalg.eigh(block)
        if w[0] < -PSD_TOL:
            raise InvalidState(f"negative eigenvalue {w[0]:.3e}")
        if w[0] < 0.0:
            w = np.clip(w, 0.0, None)
            block = (v * w) @ v.conj().T
            block = (block + block.conj().T) / 2.0
        return block

    def __init__(self, system, blocks):
        raw_trace = float(
            sum(np.trace(b).real for b in _coerce_blocks(system, blocks))
        )
        if raw_trace > 1.0 + 1e-12:
            raise InvalidState(f"trace {raw_trace} exceeds 1")
        super().__init__(system, blocks)

    @property
    def is_normalized(self) -> bool:
        return abs(self.trace - 1.0) <= NORMALIZATION_TOL

    def purity_defect(self) -> float:
        """0 for pure states; the second-largest eigenvalue plus any mass
        spread over more than one block otherwise."""
        sector_traces = [float(np.trace(b).real) for b in self.blocks]
        main = int(np.argmax(sector_traces))
        defect = sum(t for i, t in enumerate(sector_traces) if i != main)
        block = self.blocks[main]
        if block.shape[0] > 1:
            w = np.linalg.eigvalsh(block)
            defect += float(np.sum(w[:-1]))
        return defect

    @property
    def is_pure(self) -> bool:
        return self.purity_defect() <= 1e-9


class Effect(_Blockwise):
    """An effect: Hermitian blocks with eigenvalues in [0, 1]."""

    def _validate(self, block: np.ndarray) -> np.ndarray:
        if block.shape[0] == 0:
            return block
        w, v = np.linalg.eigh(block)
        if w[0] < -EFFECT_TOL or w[-1] > 1.0 + EFFECT_TOL:
            raise InvalidEffect(
                f"effect eigenvalues [{w[0]:.3e}, {w[-1]:.3e}] outside [0, 1]"
            )
        if w[0] < 0.0 or w[-1] > 1.0:
            w = np.clip(w, 0.0, 1.0)
            block = (v * w) @ v.conj().T
            block = (block + block.conj().T) / 2.0
        return block


class Observable(_Blockwise):
    """A real-valued observable: Hermitian blocks, unbounded spectrum."""

    def _validate(self, block: np.ndarray) -> np.ndarray:
        if not np.all(np.isfinite(block)):
            raise InvalidObservable("non-finite entries")
        return block


@dataclass(frozen=True)
class PureVector:
    """A unit vector confined to a single sector.

    The same vector doubles as a pure state (rank-one projector in its
    sector) and, through the dagger bijection, as the unique pure effect
    certifying it.
    """

    system: SystemDescriptor
    sector: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=self.system.dtype)
        if amp.ndim != 1 or amp.shape[0] != len(self.system.sectors[self.sector]):
            raise InvalidState("amplitude length must match sector size")
        norm = float(np.linalg.norm(amp))
        if abs(norm - 1.0) > 1e-12:
            raise InvalidState(f"pure vector norm {norm} != 1")
        object.__setattr__(self, "amplitudes", _freeze(amp))

    def _projector_blocks(self):
        blocks = []
        for s, sec in enumerate(self.system.sectors):
            if s == self.sector:
                blocks.append(np.outer(self.amplitudes, self.amplitudes.conj()))
            else:
                blocks.append(np.zeros((len(sec), len(sec)), dtype=self.system.dtype))
        return blocks

    def as_state(self) -> State:
        return State(self.system, self._projector_blocks())

    def as_effect(self) -> Effect:
        return Effect(self.system, self._projector_blocks())

    def dense(self) -> np.ndarray:
        """The vector embedded over the full canonical basis."""
        out = np.zeros(self.system.total_dim, dtype=self.system.dtype)
        out[list(self.system.sectors[self.sector])] = self.amplitudes
        return out

    def __eq__(self, other):
        return (
            isinstance(other, PureVector)
            and self.system == other.system
            and self.sector == other.sector
            and np.array_equal(self.amplitudes, other.amplitudes)
        )


def canonical_phase(vec: np.ndarray) -> np.ndarray:
    """Fix the global phase so the largest-magnitude entry is real positive."""
    j = int(np.argmax(np.abs(vec)))
    pivot = vec[j]
    if abs(pivot) == 0.0:
        return vec
    if np.iscomplexobj(vec):
        return vec * (pivot.conjugate() / abs(pivot))
    return vec if pivot > 0 else -vec


def pure_vector_from_dense(system: SystemDescriptor, vec: np.ndarray,
                           tol: float = 1e-9) -> PureVector:
    """Interpret a full-basis vector as a PureVector; it must be confined
    to a single sector up to ``tol``."""
    vec = np.asarray(vec, dtype=system.dtype)
    weights = [float(np.linalg.norm(vec[list(sec)])) for sec in system.sectors]
    sector = int(np.argmax(weights))
    leak = sum(w**2 for i, w in enumerate(weights) if i != sector)
    if leak > tol**2:
        raise InvalidState("vector not confined to one sector")
    amp = vec[list(system.sectors[sector])]
    amp = amp / np.linalg.norm(amp)
    return PureVector(system, sector, canonical_phase(amp))


def vector_of_pure_state(rho: State, tol: float = 1e-9) -> PureVector:
    """Extract the defining unit vector of a pure state."""
    if rho.purity_defect() > tol:
        raise NotPure("state is not pure")
    sector = int(np.argmax([np.trace(b).real for b in rho.blocks]))
    block = rho.blocks[sector]
    w, v = np.linalg.eigh(block)
    vec = canonical_phase(v[:, -1])
    return PureVector(rho.system, sector, vec)


# ---------------------------------------------------------------------------
# pairing, deterministic effect, invariant state
# ---------------------------------------------------------------------------

def _as_state(x) -> State:
    return x.as_state() if isinstance(x, PureVector) else x


def _as_functional(x):
    return x.as_effect() if isinstance(x, PureVector) else x


def pair(a, rho) -> float:
    """The scalar (a|rho) = sum_s Tr(a_s rho_s).

    Accepts effects, observables, or pure vectors (interpreted through the
    dagger) on the left and states or pure vectors on the right.
    """
    a = _as_functional(a)
    rho = _as_state(rho)
    if a.system != rho.system:
        raise IncompatibleSystems("effect and state live on different systems")
    total = 0.0
    for ab, rb in zip(a.blocks, rho.blocks):
        total += float(np.sum(ab.conj() * rb).real)
    return total


def deterministic_effect(system: SystemDescriptor) -> Effect:
    """The unique effect u with (u|rho) = trace(rho) for every state."""
    return Effect(system, [np.eye(len(s), dtype=system.dtype) for s in system.sectors])


def invariant_state(system: SystemDescriptor) -> State:
    """The unique state fixed by all reversible channels: identity / n."""
    n = system.total_dim
    return State(
        system,
        [np.eye(len(s), dtype=system.dtype) / n for s in system.sectors],
    )


def uniform_spectrum_observable(system: SystemDescriptor, value: float) -> Observable:
    return Observable(
        system, [value * np.eye(len(s), dtype=system.dtype) for s in system.sectors]
    )


# ---------------------------------------------------------------------------
# dense embedding helpers (internal bookkeeping; states stay sector-wise)
# ---------------------------------------------------------------------------

def embed_dense(x) -> np.ndarray:
    """Embed a block-wise operator into the full n x n canonical basis."""
    x = _as_state(x) if isinstance(x, PureVector) else x
    n = x.system.total_dim
    out = np.zeros((n, n), dtype=x.system.dtype)
    for sec, block in zip(x.system.sectors, x.blocks):
        out[np.ix_(sec, sec)] = block
    return out


def carve_blocks(system: SystemDescriptor, dense: np.ndarray,
                 tol: float = OFFBLOCK_TOL):
    """Carve a dense matrix into sector blocks, checking off-block residue."""
    blocks = []
    mask = np.zeros_like(dense, dtype=bool)
    for sec in system.sectors:
        blocks.append(dense[np.ix_(sec, sec)])
        mask[np.ix_(sec, sec)] = True
    residue = float(np.max(np.abs(dense[~mask]))) if not mask.all() else 0.0
    if residue > tol:
        raise InvalidState(f"off-block residue {residue:.3e} exceeds {tol:.1e}")
    return blocks


# ---------------------------------------------------------------------------
# tensor products and marginals
# ---------------------------------------------------------------------------

def _tensor_blocks(comp: SystemDescriptor, xa, xb):
    da = embed_dense(xa)
    db = embed_dense(xb)
    nb = xb.system.total_dim
    blocks = []
    for sec in comp.sectors:
        idx = np.asarray(sec)
        ii, jj = idx // nb, idx % nb
        blocks.append(da[np.ix_(ii, ii)] * db[np.ix_(jj, jj)])
    return blocks


def tensor(rho: State, sigma: State) -> State:
    """Product state on compose(A, B), re-indexed into the composite sectors."""
    comp = compose(rho.system, sigma.system)
    return State(comp, _tensor_blocks(comp, _as_state(rho), _as_state(sigma)))


def tensor_effect(a: Effect, b: Effect) -> Effect:
    comp = compose(a.system, b.system)
    return Effect(comp, _tensor_blocks(comp, _as_functional(a), _as_functional(b)))


def tensor_observable(a: Observable, b: Observable) -> Observable:
    comp = compose(a.system, b.system)
    return Observable(comp, _tensor_blocks(comp, a, b))


def tensor_pure(alpha: PureVector, beta: PureVector) -> PureVector:
    """Product of pure vectors; lands in a single composite sector."""
    comp = compose(alpha.system, beta.system)
    vec = np.kron(alpha.dense(), beta.dense())
    return pure_vector_from_dense(comp, vec)


def marginal(rho: State, keep: str = "A") -> State:
    """Partial trace of a composite state onto factor ``keep`` in {A, B}.

    Works through the composite's basis pairing ``g = i * n_B + j``; the
    result is always block-diagonal in the kept factor's sectors.
    """
    desc = _as_state(rho).system
    rho = _as_state(rho)
    if desc.factors is None:
        raise NotAComposite("marginal needs a composite system")
    if keep not in ("A", "B"):
        raise NotAComposite("keep must be 'A' or 'B'")
    fa, fb = desc.factors
    kept = fa if keep == "A" else fb
    nb = fb.total_dim
    acc = np.zeros((kept.total_dim, kept.total_dim), dtype=desc.dtype)
    for sec, block in zip(desc.sectors, rho.blocks):
        idx = np.asarray(sec)
        ii, jj = idx // nb, idx % nb
        own, other = (ii, jj) if keep == "A" else (jj, ii)
        match = other[:, None] == other[None, :]
        xs, ys = np.nonzero(match)
        np.add.at(acc, (own[xs], own[ys]), block[xs, ys])
    return State(kept, carve_blocks(kept, acc))


# ---------------------------------------------------------------------------
# purification
# ---------------------------------------------------------------------------

def purify(rho: State) -> tuple[State, SystemDescriptor]:
    """Return a pure state on ``compose(A, partner)`` whose marginal is rho.

    Weights come from the per-sector eigendecomposition; the pairing
    vector sum_k sqrt(w_k) |e_k> (x) |e_k~> sits inside the offset-0
    sector of the composite (trivially so for quantum systems).
    """
    rho = _as_state(rho)
    if not rho.is_normalized:
        raise NotNormalized(f"trace {rho.trace} != 1")
    system = rho.system
    partner, comp = purifying_partner(system)
    npart = partner.total_dim
    vec = np.zeros(comp.total_dim, dtype=comp.dtype)
    if system.kind == "quantum":
        w, v = np.linalg.eigh(rho.blocks[0])
        for k in range(len(w)):
            if w[k] <= 0.0:
                continue
            vec += np.sqrt(w[k]) * np.kron(v[:, k], v[:, k])
    else:
        for s, block in enumerate(rho.blocks):
            w, v = np.linalg.eigh(block)
            src = np.asarray(system.sectors[s])
            tgt = np.asarray(partner.sectors[s])
            for k in range(len(w)):
                if w[k] <= 0.0:
                    continue
                term = np.zeros_like(vec)
                # e_k (x) copy of e_k in the partner's mirror sector
                for x, i in enumerate(src):
                    for y, j in enumerate(tgt):
                        term[i * npart + j] = v[x, k] * v[y, k]
                vec += np.sqrt(w[k]) * term
    psi = pure_vector_from_dense(comp, vec / np.linalg.norm(vec))
    return psi.as_state(), partner


def _sector_matrix(psi: State):
    """Matrix form M of a pure bipartite vector: psi = sum M_ij |i>|j>."""
    desc = psi.system
    if desc.factors is None:
        raise NotAComposite("expected a state on a composite system")
    vec = vector_of_pure_state(psi).dense()
    na = desc.factors[0].total_dim
    nb = desc.factors[1].total_dim
    return vec.reshape(na, nb)


def purifications_equivalent(
    psi: State, psi_prime: State, tol: float = 1e-8
):
    """Decide whether two purifications differ by a reversible channel on B.

    Returns ``(True, witness)`` with a block-structure-preserving
    reversible channel V on the purifying factor such that
    ``(I (x) V) psi ~ psi_prime`` within ``tol``, or ``(False, None)``.
    The witness is found by per-sector least-squares isometry matching
    plus an optimal assignment over equal-size sector permutations.
    """
    from scipy.optimize import linear_sum_assignment

    from .channels import Channel  # local import to avoid a cycle

    psi = _as_state(psi)
    psi_prime = _as_state(psi_prime)
    if psi.system != psi_prime.system:
        raise IncompatibleSystems("purifications on different composites")
    if psi.purity_defect() > 1e-8 or psi_prime.purity_defect() > 1e-8:
        raise NotPure("both inputs must be pure")
    ra = marginal(psi, "A")
    rb = marginal(psi_prime, "A")
    dev = max(
        float(np.max(np.abs(x - y))) if x.size else 0.0
        for x, y in zip(ra.blocks, rb.blocks)
    )
    if dev > 1e-8:
        raise NotCopurifications(f"marginals differ by {dev:.3e}")

    desc_b = psi.system.factors[1]
    m = _sector_matrix(psi)
    mp = _sector_matrix(psi_prime)
    cols = [list(sec) for sec in desc_b.sectors]
    nsec = len(cols)
    big = 1e9
    cost = np.full((nsec, nsec), big)
    rotations: dict[tuple[int, int], np.ndarray] = {}
    for s in range(nsec):
        ms = m[:, cols[s]]
        for t in range(nsec):
            if len(cols[s]) != len(cols[t]):
                continue
            mt = mp[:, cols[t]]
            c = ms.conj().T @ mt
            u, sv, wh = np.linalg.svd(c)
            rot = u @ wh  # optimal V^T for this pairing (Procrustes)
            res = np.linalg.norm(ms @ rot - mt) ** 2
            cost[s, t] = res
            rotations[(s, t)] = rot
    rows, assign = linear_sum_assignment(cost)
    total = float(cost[rows, assign].sum())
    if not np.isfinite(total) or total >= big:
        return False, None
    if np.sqrt(max(total, 0.0)) > tol:
        return False, None
    nb = desc_b.total_dim
    v = np.zeros((nb, nb), dtype=desc_b.dtype)
    for s, t in zip(rows, assign):
        v[np.ix_(cols[t], cols[s])] = rotations[(s, t)].T
    witness = Channel.reversible(desc_b, v)
    return True, witness

"""Channels: reversible, random-reversible mixtures, minimally disturbing
transformations, projective dilation of measurements, and the sequential
distinguishability protocol.

A channel is a completely positive trace-non-increasing map given by Kraus
operators compatible with the sector structure: every sector-diagonal
input is sent to a sector-diagonal output.  Reversible channels are single
unitary Kraus operators built from per-sector unitaries composed with
permutations of equal-dimension sectors; for the cbit/cobit composite this
family contains the bit-flip/phase form of the local operations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EffectNotCertain,
    IncompatibleSystems,
    InvalidDistribution,
    InvalidState,
    NotATest,
    NotReversible,
    TriangularityFailed,
    Unsupported,
)
from .sectors import SystemDescriptor, compose, make_quantum
from .statespace import (
    Effect,
    PureVector,
    State,
    carve_blocks,
    deterministic_effect,
    embed_dense,
    invariant_state,
    pair,
)

COMPLETENESS_TOL = 1e-10
BLOCK_PRESERVATION_TOL = 1e-10
UNITARITY_TOL = 1e-10


def _sector_coupling_ok(kraus, system_in, system_out, tol):
    """Exact block-preservation check.

    Sector-diagonal inputs map to sector-diagonal outputs iff, for every
    input sector s and every pair of distinct output sectors (t, t'),
    sum_k K_k[t, s] (x) conj(K_k[t', s]) vanishes entry-wise.
    """
    secs_in = [list(s) for s in system_in.sectors]
    secs_out = [list(s) for s in system_out.sectors]
    for s in secs_in:
        for a in range(len(secs_out)):
            for b in range(a + 1, len(secs_out)):
                tensor = None
                for k in kraus:
                    ka = k[np.ix_(secs_out[a], s)]
                    kb = k[np.ix_(secs_out[b], s)]
                    term = np.einsum("ra,qb->raqb", ka, kb.conj())
                    tensor = term if tensor is None else tensor + term
                if tensor is not None and tensor.size:
                    if float(np.max(np.abs(tensor))) > tol:
                        return False
    return True


@dataclass(frozen=True)
class Channel:
    """A block-compatible CP trace-non-increasing map.

    ``tag`` is one of ``reversible``, ``rare``, ``general``; RaRe channels
    also carry their ``(probability, reversible)`` decomposition.
    """

    input_system: SystemDescriptor
    output_system: SystemDescriptor
    kraus: tuple[np.ndarray, ...]
    tag: str = "general"
    rare_terms: tuple[tuple[float, "Channel"], ...] | None = None

    def __post_init__(self):
        kraus = tuple(
            np.asarray(k, dtype=np.result_type(self.input_system.dtype, k.dtype))
            for k in self.kraus
        )
        n_in = self.input_system.total_dim
        n_out = self.output_system.total_dim
        for k in kraus:
            if k.shape != (n_out, n_in):
                raise InvalidState(f"Kraus shape {k.shape} != ({n_out}, {n_in})")
        object.__setattr__(self, "kraus", kraus)
        total = sum(k.conj().T @ k for k in kraus)
        w = np.linalg.eigvalsh(total)
        if w[-1] > 1.0 + COMPLETENESS_TOL:
            raise InvalidState(f"completeness violated: max eig {w[-1]:.12f}")
        if not _sector_coupling_ok(
            kraus, self.input_system, self.output_system, BLOCK_PRESERVATION_TOL
        ):
            raise InvalidState("Kraus operators break the sector structure")
        if self.tag == "reversible":
            if len(kraus) != 1:
                raise NotReversible("reversible channels have one Kraus operator")
            u = kraus[0]
            if n_in != n_out:
                raise NotReversible("reversible channels are endomorphic")
            dev = np.max(np.abs(u.conj().T @ u - np.eye(n_in)))
            if dev > UNITARITY_TOL:
                raise NotReversible(f"not unitary (residual {dev:.3e})")
            _sector_permutation(u, self.input_system, self.output_system)

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, system: SystemDescriptor) -> "Channel":
        return cls.reversible(system, np.eye(system.total_dim, dtype=system.dtype))

    @classmethod
    def reversible(cls, system: SystemDescriptor, unitary) -> "Channel":
        return cls(system, system, (np.asarray(unitary),), tag="reversible")

    @property
    def is_trace_preserving(self) -> bool:
        total = sum(k.conj().T @ k for k in self.kraus)
        return bool(
            np.max(np.abs(total - np.eye(self.input_system.total_dim)))
            <= COMPLETENESS_TOL
        )

    def then(self, other: "Channel") -> "Channel":
        """Sequential composition: ``other`` after ``self``."""
        if other.input_system != self.output_system:
            raise IncompatibleSystems("composition systems do not match")
        kraus = tuple(k2 @ k1 for k2 in other.kraus for k1 in self.kraus)
        tag = (
            "reversible"
            if self.tag == "reversible" and other.tag == "reversible"
            else "general"
        )
        return Channel(self.input_system, other.output_system, kraus, tag=tag)

    def inverse(self) -> "Channel":
        if self.tag != "reversible":
            raise NotReversible("only reversible channels invert")
        return Channel.reversible(self.input_system, self.kraus[0].conj().T)


def _sector_permutation(u, system_in, system_out):
    """Derive the sector permutation a reversible Kraus operator induces.

    Each input sector must land inside exactly one output sector of equal
    dimension, and the assignment must be a bijection.
    """
    assign = {}
    for s, sec in enumerate(system_in.sectors):
        cols = u[:, list(sec)]
        weights = [
            float(np.linalg.norm(cols[list(t), :])) for t in system_out.sectors
        ]
        target = int(np.argmax(weights))
        leak = sum(w**2 for i, w in enumerate(weights) if i != target)
        if leak > UNITARITY_TOL:
            raise NotReversible("sector support split across output sectors")
        if len(system_out.sectors[target]) != len(sec):
            raise NotReversible("sector mapped to different dimension")
        if target in assign.values():
            raise NotReversible("two sectors mapped to the same output sector")
        assign[s] = target
    return assign


def apply(channel: Channel, rho: State) -> State:
    """Evaluate sum_k K rho K^dagger, re-validated as a State."""
    if rho.system != channel.input_system:
        raise IncompatibleSystems("state system does not match channel input")
    dense = embed_dense(rho)
    out = np.zeros(
        (channel.output_system.total_dim,) * 2,
        dtype=np.result_type(dense.dtype, channel.kraus[0].dtype),
    )
    for k in channel.kraus:
        out += k @ dense @ k.conj().T
    out = (out + out.conj().T) / 2.0
    if channel.output_system.field == "real":
        out = out.real
    return State(channel.output_system, carve_blocks(channel.output_system, out))


# ---------------------------------------------------------------------------
# random reversible and RaRe channels
# ---------------------------------------------------------------------------

def _haar_unitary(dim: int, rng, field: str):
    """QR of a Ginibre matrix with the diagonal phase fix."""
    if dim == 0:
        return np.zeros((0, 0))
    if field == "complex":
        z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
        z /= np.sqrt(2.0)
    else:
        z = rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    ph = d / np.abs(d)
    return q * ph


def random_reversible(system: SystemDescriptor, rng=None, seed=None) -> Channel:
    """Haar-random per-sector unitaries (orthogonal for the real field),
    composed, with probability 1/2, with a uniformly random permutation of
    equal-dimension sectors."""
    if rng is None:
        rng = np.random.default_rng(seed)
    n = system.total_dim
    u = np.zeros((n, n), dtype=system.dtype)
    perm = list(range(len(system.sectors)))
    if len(system.sectors) > 1 and rng.random() < 0.5:
        by_size: dict[int, list[int]] = {}
        for s, sec in enumerate(system.sectors):
            by_size.setdefault(len(sec), []).append(s)
        for group in by_size.values():
            shuffled = [group[i] for i in rng.permutation(len(group))]
            for src, dst in zip(group, shuffled):
                perm[src] = dst
    for s, sec in enumerate(system.sectors):
        block = _haar_unitary(len(sec), rng, system.field)
        tgt = system.sectors[perm[s]]
        u[np.ix_(tgt, sec)] = block
    return Channel.reversible(system, u)


def rare_channel(pairs) -> Channel:
    """Random mixture of reversible channels: R = sum_i p_i U_i."""
    pairs = list(pairs)
    if not pairs:
        raise InvalidDistribution("empty mixture")
    probs = np.array([p for p, _ in pairs], dtype=float)
    if np.any(probs < 0.0):
        raise InvalidDistribution("negative probability")
    if abs(probs.sum() - 1.0) > 1e-12:
        raise InvalidDistribution(f"probabilities sum to {probs.sum()}")
    system = pairs[0][1].input_system
    for _, u in pairs:
        if u.tag != "reversible":
            raise NotReversible("RaRe members must be reversible")
        if u.input_system != system:
            raise IncompatibleSystems("RaRe members on different systems")
    kraus = tuple(np.sqrt(p) * u.kraus[0] for p, u in pairs if p > 0.0)
    return Channel(
        system,
        system,
        kraus,
        tag="rare",
        rare_terms=tuple((float(p), u) for p, u in pairs),
    )


def random_rare(system: SystemDescriptor, rng, members: int = 3) -> Channel:
    """Convenience sampler: Dirichlet mixture of random reversibles."""
    probs = rng.dirichlet(np.ones(members))
    return rare_channel(
        [(float(p), random_reversible(system, rng)) for p in probs]
    )


def is_doubly_stochastic(channel: Channel, tol: float = 1e-10) -> bool:
    """True iff the channel is trace-preserving and fixes the invariant state."""
    if channel.input_system != channel.output_system:
        raise IncompatibleSystems("doubly stochastic channels are endomorphic")
    if not channel.is_trace_preserving:
        return False
    chi = invariant_state(channel.input_system)
    out = apply(channel, chi)
    dev = max(
        float(np.max(np.abs(a - b))) if a.size else 0.0
        for a, b in zip(out.blocks, chi.blocks)
    )
    return dev <= tol


# ---------------------------------------------------------------------------
# minimally disturbing transformations
# ---------------------------------------------------------------------------

def _sqrt_effect_blocks(effect: Effect):
    out = []
    for block in effect.blocks:
        if block.shape[0] == 0:
            out.append(block)
            continue
        w, v = np.linalg.eigh(block)
        w = np.clip(w, 0.0, None)
        out.append((v * np.sqrt(w)) @ v.conj().T)
    return out


def minimally_disturbing(a: Effect, rho: State) -> Channel:
    """The pure transformation T with T =_rho I and (u|T|sigma) <= (a|sigma).

    Requires (a|rho) = 1; the single Kraus operator is the principal
    square root of the effect, taken block by block.
    """
    if a.system != rho.system:
        raise IncompatibleSystems("effect and state on different systems")
    p = pair(a, rho)
    if abs(p - 1.0) > 1e-10:
        raise EffectNotCertain(f"(a|rho) = {p}, expected 1")
    system = a.system
    kraus = np.zeros((system.total_dim,) * 2, dtype=system.dtype)
    for sec, block in zip(system.sectors, _sqrt_effect_blocks(a)):
        kraus[np.ix_(sec, sec)] = block
    return Channel(system, system, (kraus,), tag="general")


# ---------------------------------------------------------------------------
# projective dilation of a measurement (quantum systems)
# ---------------------------------------------------------------------------

def naimark(test) -> tuple[SystemDescriptor, PureVector, list[Channel]]:
    """Dilate an observation-test on a quantum system to projective form.

    Builds the isometry ``V|psi> = sum_i sqrt(a_i)|psi> (x) |i>`` on the
    system tensored with an ancilla of one dimension per outcome, completes
    it to a unitary U, and returns the pure transformations

        Pi_i = U^dagger (I (x) |i><i|) U

    which satisfy ``Pi_i Pi_j = delta_ij Pi_i`` and reproduce the original
    effects when the ancilla starts in the reference state.
    """
    test = list(test)
    if not test:
        raise NotATest("empty test")
    system = test[0].system
    if system.kind != "quantum":
        raise Unsupported("projective dilation implemented for quantum systems")
    for e in test:
        if e.system != system:
            raise IncompatibleSystems("effects on different systems")
    d = system.total_dim
    total = sum(e.blocks[0] for e in test)
    if np.max(np.abs(total - np.eye(d))) > 1e-10:
        raise NotATest("effects do not sum to the deterministic effect")
    n = len(test)
    ancilla = make_quantum(n, system.field)
    comp = compose(system, ancilla)

    roots = [_sqrt_effect_blocks(e)[0] for e in test]
    v = np.zeros((d * n, d), dtype=comp.dtype)
    for i, root in enumerate(roots):
        e_i = np.zeros((n, 1), dtype=comp.dtype)
        e_i[i, 0] = 1.0
        v += np.kron(root, e_i)
    # complete the isometry to a unitary: columns (k, 0) carry V, the rest
    # an orthonormal completion of its column space
    q, _ = np.linalg.qr(
        np.concatenate([v, np.eye(d * n, dtype=comp.dtype)], axis=1)
    )
    completion = q[:, d:]
    u = np.zeros((d * n, d * n), dtype=comp.dtype)
    col = 0
    for k in range(d):
        u[:, k * n] = v[:, k]
    for k in range(d):
        for j in range(1, n):
            u[:, k * n + j] = completion[:, col]
            col += 1
    projections = []
    for i in range(n):
        p_i = np.zeros((n, n), dtype=comp.dtype)
        p_i[i, i] = 1.0
        k_i = u.conj().T @ np.kron(np.eye(d, dtype=comp.dtype), p_i) @ u
        projections.append(Channel(comp, comp, (k_i,), tag="general"))
    phi0 = PureVector(
        ancilla, 0, np.eye(n, dtype=ancilla.dtype)[:, 0]
    )
    return ancilla, phi0, projections


# ---------------------------------------------------------------------------
# sequential distinguishability protocol
# ---------------------------------------------------------------------------

def distinguishability_protocol(states, effects) -> list[Effect]:
    """Build the observation-test {t_1, ..., t_{n-1}, u - sum t_k} that
    perfectly distinguishes a triangular family of states.

    Requires ``(a_i|rho_j) = 0`` for ``j > i`` and ``(a_i|rho_i) = 1`` for
    ``i < n``.  The composed effects fold the square roots of the
    complements per sector:

        t_i = sqrt(u - a_1) ... sqrt(u - a_{i-1}) a_i sqrt(u - a_{i-1}) ... sqrt(u - a_1)
    """
    states = list(states)
    effects = list(effects)
    n = len(states)
    if n == 0:
        raise NotATest("no states to distinguish")
    system = states[0].system
    if n == 1:
        return [deterministic_effect(system)]
    if len(effects) < n - 1:
        raise NotATest(f"need at least {n - 1} effects for {n} states")
    for i, a in enumerate(effects[: n - 1]):
        hit = pair(a, states[i])
        if abs(hit - 1.0) > 1e-10:
            raise TriangularityFailed(
                f"(a_{i}|rho_{i}) = {hit}, expected 1"
            )
        for j in range(i + 1, n):
            miss = pair(a, states[j])
            if miss > 1e-10:
                raise TriangularityFailed(
                    f"(a_{i}|rho_{j}) = {miss:.3e} for j > i"
                )
    u = deterministic_effect(system)
    prefix = [np.eye(len(sec), dtype=system.dtype) for sec in system.sectors]
    test: list[Effect] = []
    for i in range(n - 1):
        a = effects[i]
        t_blocks = [
            m @ ab @ m.conj().T for m, ab in zip(prefix, a.blocks)
        ]
        test.append(Effect(system, t_blocks))
        comp = Effect(system, [ub - ab for ub, ab in zip(u.blocks, a.blocks)])
        roots = _sqrt_effect_blocks(comp)
        prefix = [m @ r for m, r in zip(prefix, roots)]
    last = [
        ub - sum(t.blocks[s] for t in test)
        for s, ub in enumerate(u.blocks)
    ]
    test.append(Effect(system, last))
    return test

"""Independent oracles used across the test suite.

These deliberately re-derive everything from the raw sector data with
plain dense-matrix numpy calls, so they share no code path with the
block-wise implementations they check.
"""

import numpy as np

import gptkit as g


def dense(x) -> np.ndarray:
    """Full-matrix embedding rebuilt from sectors + blocks."""
    n = x.system.total_dim
    out = np.zeros((n, n), dtype=complex)
    for sec, block in zip(x.system.sectors, x.blocks):
        for a, i in enumerate(sec):
            for b, j in enumerate(sec):
                out[i, j] = block[a, b]
    return out


def dense_spectrum(rho) -> np.ndarray:
    return np.sort(np.linalg.eigvalsh(dense(rho)))[::-1]


def dense_partial_trace(rho, keep: str) -> np.ndarray:
    fa, fb = rho.system.factors
    na, nb = fa.total_dim, fb.total_dim
    full = dense(rho).reshape(na, nb, na, nb)
    if keep == "A":
        return np.einsum("ijkj->ik", full)
    return np.einsum("ijil->jl", full)


def dense_relative_entropy(rho, sigma, base=np.e) -> float:
    """Tr rho (log rho - log sigma) from full-matrix eigendecompositions."""
    dr, ds = dense(rho), dense(sigma)
    wr, vr = np.linalg.eigh(dr)
    ws, vs = np.linalg.eigh(ds)
    wr = np.clip(wr, 0.0, None)
    ws = np.clip(ws, 0.0, None)
    total = sum(p * np.log(p) for p in wr if p > 1e-14)
    overlap = np.abs(vr.conj().T @ vs) ** 2
    for i, p in enumerate(wr):
        if p <= 1e-14:
            continue
        for j, q in enumerate(ws):
            if overlap[i, j] < 1e-16:
                continue
            if q <= 1e-12:
                return float("inf")
            total -= p * overlap[i, j] * np.log(q)
    return float(total / np.log(base))


def module_theories():
    """Small spread of theory kinds used by fast module-level tests."""
    return [
        g.make_quantum(2),
        g.make_quantum(4),
        g.make_quantum(3, "real"),
        g.make_classical(3),
        g.make_coherent(3),
        g.compose(g.make_classical(2), g.make_coherent(2)),
        g.compose(g.make_classical(3), g.make_coherent(3)),
    ]


def bell_state():
    comp = g.compose(g.make_quantum(2), g.make_quantum(2))
    from gptkit.statespace import pure_vector_from_dense

    vec = np.zeros(4, dtype=complex)
    vec[0] = vec[3] = 1.0 / np.sqrt(2.0)
    return pure_vector_from_dense(comp, vec).as_state()

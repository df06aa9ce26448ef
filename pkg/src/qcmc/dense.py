"""Dense-matrix utilities for small registers (n <= 12).

Everything here scales as 4^n or worse and exists for exact reference
values: propagators via Hermitian eigendecomposition, and the complete
Pauli-basis decomposition of an operator. The sampling and circuit paths
never touch these except where a formula is defined through them.
"""

from __future__ import annotations

import numpy as np

from .pauli import PauliString, PauliSum, _SINGLE_QUBIT

_DENSE_CAP = 12


def _check_size(n: int) -> None:
    if n > _DENSE_CAP:
        raise ValueError(f"dense matrices capped at {_DENSE_CAP} qubits, got n={n}")


def propagator(h_matrix: np.ndarray, t: float) -> np.ndarray:
    """e^{-i t H} for Hermitian H, via eigendecomposition."""
    w, v = np.linalg.eigh(h_matrix)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def pauli_decompose(m: np.ndarray, tol: float = 1e-13) -> PauliSum:
    """Expand a 2^n x 2^n matrix over canonical Pauli strings.

    Returns the PauliSum with coefficients 2^{-n} Tr[sigma m], computed by a
    per-qubit basis transform in O(n 4^n) rather than 8^n explicit traces.
    """
    dim = m.shape[0]
    n = dim.bit_length() - 1
    if 2**n != dim or m.shape != (dim, dim):
        raise ValueError(f"expected square 2^n matrix, got shape {m.shape}")
    _check_size(n)

    kinds = ["I", "X", "Y", "Z"]
    xz = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
    # Tr[sigma m] = sum_{r,c} sigma^T[r,c] m[r,c], factorized per qubit
    probes = np.stack([_SINGLE_QUBIT[k].T * 0.5 for k in kinds])

    t = m.reshape((2,) * (2 * n))
    for a in range(n):
        # contract row/column axes of qubit a (always leading after prior steps)
        t = np.tensordot(probes, t, axes=([1, 2], [0, n - a]))
        # tensordot prepends the Pauli axis; rotate it to the back
        t = np.moveaxis(t, 0, -1)
    # axes are now (k_0, ..., k_{n-1}); C-order flattening puts qubit 0 first
    coeffs = t.reshape(4**n)

    out = PauliSum(n)
    for flat, c in enumerate(coeffs):
        if abs(c) <= tol:
            continue
        x = z = 0
        rem = flat
        for a in range(n - 1, -1, -1):
            xa, za = xz[kinds[rem % 4]]
            x |= xa << a
            z |= za << a
            rem //= 4
        out.add(complex(c), PauliString(n, x, z, 0))
    return out


def transition_amplitude(
    h_matrix: np.ndarray,
    o_matrix: np.ndarray,
    psi_i: np.ndarray,
    psi_f: np.ndarray,
    t: float,
) -> complex:
    """Exact <psi_f| e^{iHt} O e^{-iHt} |psi_i> by dense evolution."""
    u = propagator(h_matrix, t)
    return complex(psi_f.conj() @ (u.conj().T @ (o_matrix @ (u @ psi_i))))

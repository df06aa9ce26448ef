"""Product states of single-qubit amplitudes.

Covers computational basis states and the |+>/|-> occupation states of the
Fermi-Hubbard encoding. Pauli expectation brackets factorize per qubit, so
amplitudes of Pauli products between two product states cost O(n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import BasisState, PauliString

_SQ = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),
    (1, 1): np.array([[0, -1j], [1j, 0]], dtype=complex),
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class ProductState:
    """n-qubit state given as a tuple of normalized 2-vectors, qubit 1 first."""

    factors: tuple[tuple[complex, complex], ...]

    @property
    def n(self) -> int:
        return len(self.factors)

    @classmethod
    def from_basis(cls, s: BasisState) -> "ProductState":
        return cls(
            tuple(((0j, 1 + 0j) if s.bit(a) else (1 + 0j, 0j)) for a in range(1, s.n + 1))
        )

    @classmethod
    def from_bitstring(cls, bits: str) -> "ProductState":
        return cls.from_basis(BasisState.from_string(bits))

    def to_vector(self) -> np.ndarray:
        v = np.array([1.0 + 0j])
        for f in self.factors:
            v = np.kron(v, np.asarray(f, dtype=complex))
        return v

    def factor_matrices(self) -> list[np.ndarray]:
        return [np.asarray(f, dtype=complex).reshape(2, 1) for f in self.factors]


def plus_minus_state(n: int, plus_qubits: list[int]) -> ProductState:
    """|+> on the listed 1-based qubits, |-> elsewhere."""
    s = 1 / np.sqrt(2)
    factors = []
    for a in range(1, n + 1):
        factors.append((s + 0j, s + 0j) if a in plus_qubits else (s + 0j, -s + 0j))
    return ProductState(tuple(factors))


def pauli_bracket(bra: ProductState, p: PauliString, ket: ProductState) -> complex:
    """Exact <bra| p |ket> using the per-qubit factorization."""
    if bra.n != p.n or ket.n != p.n:
        raise ValueError("qubit count mismatch")
    amp = p.phase
    for a in range(p.n):
        m = _SQ[(p.x >> a) & 1, (p.z >> a) & 1]
        b = np.asarray(bra.factors[a])
        k = np.asarray(ket.factors[a])
        amp *= b.conj() @ m @ k
        if amp == 0:
            return 0j
    return complex(amp)

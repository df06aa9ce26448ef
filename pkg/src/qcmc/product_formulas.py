"""Lie-Trotter-Suzuki product formulas as explicit rotation sequences.

A :class:`RotationSequence` lists (axis, angle) factors in matrix order:
``[f_1, ..., f_k]`` means the operator ``exp(-i a_1 P_1) ... exp(-i a_k P_k)``
with ``f_1`` the leftmost factor, i.e. factors are applied to a state from
the end of the list backwards. The symmetric formulas S_2m are assembled
from the recursion operator K_2m so that callers can also place K_2m(dt)
and K_2m(-dt)^dag on either side of a correction operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonians import Hamiltonian
from .pauli import PauliString


@dataclass(frozen=True)
class RotationSequence:
    """Product of Pauli-axis rotations prod_k exp(-i angle_k axis_k)."""

    factors: tuple[tuple[PauliString, float], ...]

    def __len__(self) -> int:
        return len(self.factors)

    def adjoint(self) -> "RotationSequence":
        return RotationSequence(
            tuple((p, -a) for p, a in reversed(self.factors))
        )

    def __mul__(self, other: "RotationSequence") -> "RotationSequence":
        """Matrix product: self's factors to the left of other's."""
        return RotationSequence(self.factors + other.factors)

    def applied_order(self):
        """Factors in the order they hit a state (rightmost first)."""
        return reversed(self.factors)

    def to_matrix(self, n: int | None = None) -> np.ndarray:
        if not self.factors:
            if n is None:
                raise ValueError("empty sequence needs an explicit qubit count")
            return np.eye(2**n, dtype=complex)
        n = self.factors[0][0].n
        m = np.eye(2**n, dtype=complex)
        for p, a in self.factors:
            rot = np.cos(a) * np.eye(2**n) - 1j * np.sin(a) * p.to_matrix()
            m = m @ rot
        return m


@dataclass(frozen=True)
class SuzukiConstants:
    """Recursion constants of the order-2m formula with branching r."""

    m: int
    r: int
    p: float  # p_{r,m}
    lam: float  # backward-evolution weight entering the C_T exponent


def suzuki_p(m: int, r: int) -> float:
    # exponent 1/(2m-1) cancels the order-(2m-1) error of the inner formula:
    # 2r p^{2m-1} + (1-2rp)^{2m-1} = 0
    return 1.0 / (2 * r - (2 * r) ** (1.0 / (2 * m - 1)))


def suzuki_constants(m: int, r: int = 1) -> SuzukiConstants:
    if m < 1 or r < 1:
        raise ValueError("m and r must be >= 1")
    if m == 1:
        lam = 2.0
    else:
        prod = 1.0
        for k in range(2, m + 1):
            prod *= 4 * r * suzuki_p(k, r) - 1
        lam = 1.0 + prod
    return SuzukiConstants(m, r, suzuki_p(m, r), lam)


def lambda_factor(order: int, r: int = 1) -> float:
    """Taylor-weight multiplier of Table-row order: 1, 2, 2, recursion."""
    if order == 0:
        return 1.0
    if order in (1, 2):
        return 2.0
    if order % 2:
        raise ValueError(f"order must be 0, 1 or even, got {order}")
    return suzuki_constants(order // 2, r).lam


def first_order_sequence(h: Hamiltonian, dt: float) -> RotationSequence:
    """S_1(dt) = exp(-i h_M s_M dt) ... exp(-i h_1 s_1 dt)."""
    return RotationSequence(
        tuple((p, hj * dt) for hj, p in reversed(h.terms))
    )


def k2m_sequence(h: Hamiltonian, dt: float, m: int, r: int = 1) -> RotationSequence:
    """Recursion operator K_2m; K_2 is a half-step first-order product."""
    if m == 1:
        return first_order_sequence(h, dt / 2)
    p = suzuki_p(m, r)
    inner = s2m_sequence(h, p * dt, m - 1, r)
    seq = k2m_sequence(h, (1 - 2 * r * p) * dt, m - 1, r)
    for _ in range(r):
        seq = seq * inner
    return seq


def s2m_sequence(h: Hamiltonian, dt: float, m: int, r: int = 1) -> RotationSequence:
    """S_2m(dt) = K_2m(-dt)^dag K_2m(dt)."""
    k = k2m_sequence(h, dt, m, r)
    return k2m_sequence(h, -dt, m, r).adjoint() * k


def higher_order_sequence(
    h: Hamiltonian, dt: float, m: int, r: int = 1
) -> RotationSequence:
    if m < 1:
        raise ValueError("m must be >= 1")
    return s2m_sequence(h, dt, m, r)


def sequence_for_order(h: Hamiltonian, dt: float, order: int, r: int = 1) -> RotationSequence:
    """Product formula S_l; order 0 is the empty product (identity)."""
    if order == 0:
        return RotationSequence(())
    if order == 1:
        return first_order_sequence(h, dt)
    if order % 2:
        raise ValueError(f"order must be 0, 1 or even, got {order}")
    return s2m_sequence(h, dt, order // 2, r)

"""Exact Pauli-string algebra on packed bit strings.

An n-qubit Pauli operator is encoded by two n-bit integers ``x`` and ``z``
plus a phase exponent, with qubit ``a`` (0-based) stored in bit ``a``:

    P = i^phase_exp * prod_a  i^{x_a z_a} X_a^{x_a} Z_a^{z_a}

so that per qubit (x, z) = (0,0), (1,0), (0,1), (1,1) are I, X, Z, Y.
A Pauli with ``phase_exp == 0`` is called canonical; canonical Paulis are
Hermitian and square to the identity. All phases are tracked as integer
powers of i, never as floats, so products and basis-state applications are
exact.

Text literals read left to right starting at qubit 1, e.g. ``"XIZY"`` puts
X on qubit 1 and Y on qubit 4; an optional prefix ``+``, ``-``, ``+i`` or
``-i`` encodes the phase. Matrices returned by :func:`to_matrix` use the
same ordering (qubit 1 is the most significant tensor factor).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

_PHASES = (1 + 0j, 1j, -1 + 0j, -1j)
_PREFIXES = {"": 0, "+": 0, "+i": 1, "-": 2, "-i": 3}
_PREFIX_OF_EXP = {0: "", 1: "+i", 2: "-", 3: "-i"}
_CHAR_XZ = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_XZ_CHAR = {v: k for k, v in _CHAR_XZ.items()}

_SINGLE_QUBIT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class PauliError(ValueError):
    """Raised on malformed Pauli literals or dimension mismatches."""


@dataclass(frozen=True, slots=True)
class PauliString:
    """Immutable n-qubit Pauli operator with an exact power-of-i phase."""

    n: int
    x: int
    z: int
    phase_exp: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise PauliError(f"qubit count must be >= 1, got {self.n}")
        mask = (1 << self.n) - 1
        object.__setattr__(self, "x", self.x & mask)
        object.__setattr__(self, "z", self.z & mask)
        object.__setattr__(self, "phase_exp", self.phase_exp & 3)

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0, 0)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse a literal like ``"-iXIZY"`` (inverse of :meth:`label`)."""
        body = label.lstrip("+-i")
        prefix = label[: len(label) - len(body)]
        if prefix not in _PREFIXES:
            raise PauliError(f"bad phase prefix in {label!r}")
        if not body:
            raise PauliError(f"empty Pauli body in {label!r}")
        x = z = 0
        for a, ch in enumerate(body):
            if ch not in _CHAR_XZ:
                raise PauliError(f"bad Pauli character {ch!r} in {label!r}")
            xa, za = _CHAR_XZ[ch]
            x |= xa << a
            z |= za << a
        return cls(len(body), x, z, _PREFIXES[prefix])

    @classmethod
    def single(cls, n: int, qubit: int, kind: str) -> "PauliString":
        """Single-qubit X/Y/Z on 1-based ``qubit`` of an n-qubit register."""
        if not 1 <= qubit <= n:
            raise PauliError(f"qubit {qubit} outside 1..{n}")
        xa, za = _CHAR_XZ[kind]
        a = qubit - 1
        return cls(n, xa << a, za << a, 0)

    # -- inspection ----------------------------------------------------

    def label(self) -> str:
        body = "".join(
            _XZ_CHAR[(self.x >> a) & 1, (self.z >> a) & 1] for a in range(self.n)
        )
        return _PREFIX_OF_EXP[self.phase_exp] + body

    @property
    def phase(self) -> complex:
        return _PHASES[self.phase_exp]

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def is_canonical(self) -> bool:
        return self.phase_exp == 0

    def canonical(self) -> "PauliString":
        """Same operator with the phase stripped (phase_exp forced to 0)."""
        if self.phase_exp == 0:
            return self
        return PauliString(self.n, self.x, self.z, 0)

    def x_string(self) -> tuple[int, ...]:
        """The x bit string; all zeros for Z-type operators and identity."""
        return tuple((self.x >> a) & 1 for a in range(self.n))

    def support(self) -> tuple[int, ...]:
        """1-based qubits on which the operator acts nontrivially."""
        mask = self.x | self.z
        return tuple(a + 1 for a in range(self.n) if (mask >> a) & 1)

    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def commutes_with(self, other: "PauliString") -> bool:
        if self.n != other.n:
            raise PauliError("qubit count mismatch")
        return ((self.x & other.z).bit_count() + (self.z & other.x).bit_count()) % 2 == 0

    def __repr__(self):
        return f"PauliString({self.label()!r})"

    # -- algebra -------------------------------------------------------

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def adjoint(self) -> "PauliString":
        # canonical part is Hermitian; only the phase conjugates
        return PauliString(self.n, self.x, self.z, -self.phase_exp)

    def to_matrix(self) -> np.ndarray:
        return to_matrix(self)


def multiply(p: PauliString, q: PauliString) -> PauliString:
    """Exact product ``p @ q``; the phase stays an integer power of i."""
    if p.n != q.n:
        raise PauliError(f"qubit count mismatch: {p.n} != {q.n}")
    x3 = p.x ^ q.x
    z3 = p.z ^ q.z
    exp = (
        p.phase_exp
        + q.phase_exp
        + (p.x & p.z).bit_count()
        + (q.x & q.z).bit_count()
        + 2 * (p.z & q.x).bit_count()
        - (x3 & z3).bit_count()
    )
    return PauliString(p.n, x3, z3, exp & 3)


def multiply_all(paulis: Iterable[PauliString]) -> PauliString:
    """Left-to-right product of a sequence of Pauli operators."""
    result = None
    for p in paulis:
        result = p if result is None else multiply(result, p)
    if result is None:
        raise PauliError("empty product")
    return result


@dataclass(frozen=True, slots=True)
class BasisState:
    """Computational basis state |mu_1 ... mu_n> with bit a-1 of ``bits``
    holding mu_a."""

    n: int
    bits: int

    def __post_init__(self):
        if self.n < 1:
            raise PauliError(f"qubit count must be >= 1, got {self.n}")
        object.__setattr__(self, "bits", self.bits & ((1 << self.n) - 1))

    @classmethod
    def from_string(cls, s: str) -> "BasisState":
        """Parse e.g. ``"010101"``, leftmost character = qubit 1."""
        bits = 0
        for a, ch in enumerate(s):
            if ch not in "01":
                raise PauliError(f"bad basis-state character {ch!r}")
            bits |= int(ch) << a
        return cls(len(s), bits)

    def bit(self, qubit: int) -> int:
        return (self.bits >> (qubit - 1)) & 1

    def to_string(self) -> str:
        return "".join(str(self.bit(a)) for a in range(1, self.n + 1))

    def index(self) -> int:
        """Statevector index with qubit 1 as the most significant bit."""
        return int(self.to_string(), 2)

    def to_vector(self) -> np.ndarray:
        v = np.zeros(2**self.n, dtype=complex)
        v[self.index()] = 1.0
        return v

    def __repr__(self):
        return f"BasisState({self.to_string()!r})"


def apply_to_basis(p: PauliString, s: BasisState) -> tuple[complex, BasisState]:
    """Apply ``p`` to a basis state: returns (unit phase, flipped state)."""
    if p.n != s.n:
        raise PauliError(f"qubit count mismatch: {p.n} != {s.n}")
    exp = p.phase_exp + (p.x & p.z).bit_count() + 2 * (p.z & s.bits).bit_count()
    return _PHASES[exp & 3], BasisState(s.n, s.bits ^ p.x)


def to_matrix(p: PauliString) -> np.ndarray:
    """Dense 2^n x 2^n matrix including the phase. Test/oracle use, n <= 12."""
    if p.n > 12:
        raise PauliError(f"n={p.n} too large for dense representation")
    m = np.array([[_PHASES[p.phase_exp]]], dtype=complex)
    for a in range(p.n):
        ch = _XZ_CHAR[(p.x >> a) & 1, (p.z >> a) & 1]
        m = np.kron(m, _SINGLE_QUBIT[ch])
    return m


@dataclass
class PauliSum:
    """Linear combination of canonical Pauli strings.

    Keys are always canonical (phase folded into the complex coefficient);
    zero coefficients are removed by :meth:`prune`.
    """

    n: int
    terms: dict[PauliString, complex] = field(default_factory=dict)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[complex, PauliString]]) -> "PauliSum":
        out = cls(n)
        for coeff, p in pairs:
            out.add(coeff, p)
        return out

    def add(self, coeff: complex, p: PauliString) -> None:
        """Accumulate ``coeff * p``, canonicalizing the key."""
        if p.n != self.n:
            raise PauliError(f"qubit count mismatch: {p.n} != {self.n}")
        if p.phase_exp:
            coeff = coeff * _PHASES[p.phase_exp]
            p = p.canonical()
        self.terms[p] = self.terms.get(p, 0j) + coeff

    def prune(self, tol: float = 0.0) -> "PauliSum":
        """Drop entries with |coeff| <= tol (in place); returns self."""
        self.terms = {p: c for p, c in self.terms.items() if abs(c) > tol}
        return self

    def copy(self) -> "PauliSum":
        return PauliSum(self.n, dict(self.terms))

    def __iter__(self) -> Iterator[tuple[PauliString, complex]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __getitem__(self, p: PauliString) -> complex:
        return self.terms.get(p.canonical(), 0j) * _PHASES[p.phase_exp]

    def __add__(self, other: "PauliSum") -> "PauliSum":
        out = self.copy()
        for p, c in other:
            out.add(c, p)
        return out

    def scaled(self, factor: complex) -> "PauliSum":
        return PauliSum(self.n, {p: c * factor for p, c in self.terms.items()})

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        out = PauliSum(self.n)
        for p, cp in self.terms.items():
            for q, cq in other.terms.items():
                out.add(cp * cq, multiply(p, q))
        return out

    def adjoint(self) -> "PauliSum":
        # keys are canonical, hence Hermitian; conjugate coefficients
        return PauliSum(self.n, {p: c.conjugate() for p, c in self.terms.items()})

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c in self.terms.values())

    def norm_l1(self) -> float:
        return sum(abs(c) for c in self.terms.values())

    def to_matrix(self) -> np.ndarray:
        m = np.zeros((2**self.n, 2**self.n), dtype=complex)
        for p, c in self.terms.items():
            m += c * to_matrix(p)
        return m

"""Hamiltonian container and benchmark model builders.

A Hamiltonian is a list of real-weighted canonical Pauli strings. Two
lattice models are built in: the spinful Fermi-Hubbard chain mapped to
qubits (spin-up of site i on qubit 2i-1, spin-down on qubit 2i, X-string
parity convention) and the open-chain XXX Heisenberg model with a uniform
Z field. The Fermi-Hubbard encoding keeps the uniform on-site shift -U/2*N
folded in, which leaves the dynamics of fixed-particle-number initial
states unchanged; with this convention every term carries a distinct x bit
string on a bipartite lattice, so basis-state paths never interfere at
short times.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .pauli import PauliString


class HamiltonianError(ValueError):
    """Raised on invalid Hamiltonian terms or lattice specifications."""


@dataclass(frozen=True)
class Hamiltonian:
    """Sum of real-weighted, pairwise-distinct, non-identity Pauli terms."""

    n: int
    terms: tuple[tuple[float, PauliString], ...]

    def __post_init__(self):
        seen = set()
        for h, p in self.terms:
            if p.n != self.n:
                raise HamiltonianError(f"term {p.label()} has n={p.n}, expected {self.n}")
            if not p.is_canonical:
                raise HamiltonianError(f"term {p.label()} is not canonical")
            if p.is_identity:
                raise HamiltonianError(
                    "identity term rejected: it only contributes a global phase"
                )
            if h == 0 or h != h.real:
                raise HamiltonianError(f"coefficient {h!r} must be real and nonzero")
            if p in seen:
                raise HamiltonianError(f"duplicate term {p.label()}")
            seen.add(p)
        if not self.terms:
            raise HamiltonianError("empty Hamiltonian")

    @classmethod
    def from_pairs(cls, pairs) -> "Hamiltonian":
        pairs = tuple((float(h), p) for h, p in pairs)
        return cls(pairs[0][1].n, pairs)

    @property
    def h_tot(self) -> float:
        return sum(abs(h) for h, _ in self.terms)

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    def coefficients(self) -> tuple[float, ...]:
        return tuple(h for h, _ in self.terms)

    def paulis(self) -> tuple[PauliString, ...]:
        return tuple(p for _, p in self.terms)

    def to_matrix(self):
        import numpy as np

        m = np.zeros((2**self.n, 2**self.n), dtype=complex)
        for h, p in self.terms:
            m += h * p.to_matrix()
        return m

    # -- file format ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "terms": [{"coeff": h, "pauli": p.label()} for h, p in self.terms],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Hamiltonian":
        terms = tuple(
            (float(t["coeff"]), PauliString.from_label(t["pauli"])) for t in d["terms"]
        )
        return cls(int(d["n"]), terms)

    def save(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=1)

    @classmethod
    def load(cls, path) -> "Hamiltonian":
        with open(path) as f:
            return cls.from_dict(json.load(f))


@dataclass(frozen=True)
class LatticeSpec:
    """Lattice parameters for the built-in models.

    ``coupling`` is the uniform nearest-neighbour J; ``coupling_table``
    overrides it with explicit (i, j, J_ij) bonds (1-based sites, i < j).
    """

    model: str  # "fermi-hubbard" | "heisenberg"
    sites: int
    coupling: float = 0.0
    interaction: float = 0.0  # U, Fermi-Hubbard only
    field: float = 0.0  # h, Heisenberg only
    coupling_table: tuple[tuple[int, int, float], ...] | None = None

    def __post_init__(self):
        if self.sites < 1:
            raise HamiltonianError("site count must be >= 1")

    def bonds(self) -> list[tuple[int, int, float]]:
        if self.coupling_table is not None:
            out = []
            for i, j, jij in self.coupling_table:
                if not (1 <= i < j <= self.sites):
                    raise HamiltonianError(f"bad bond ({i},{j})")
                out.append((i, j, float(jij)))
            return out
        return [(i, i + 1, self.coupling) for i in range(1, self.sites)]


def _x_padded_string(n: int, a: int, b: int, ends: str) -> PauliString:
    """``ends`` on qubits a and b with X on every qubit strictly between."""
    x = z = 0
    xa, za = {"Y": (1, 1), "Z": (0, 1)}[ends]
    for q in (a, b):
        x |= xa << (q - 1)
        z |= za << (q - 1)
    for l in range(a + 1, b):
        x |= 1 << (l - 1)
    return PauliString(n, x, z, 0)


def build_fermi_hubbard(spec: LatticeSpec, require_bipartite: bool = True) -> Hamiltonian:
    """Qubit encoding of the Fermi-Hubbard model on 2*sites qubits.

    Hopping bond (i, j) maps to -J_ij/2 times the Y- and Z-ended X-padded
    strings for each spin species; the on-site interaction maps to
    U/4 * X_{2i-1} X_{2i}. With ``require_bipartite`` the builder rejects
    bonds between same-parity sites, which would break the distinct-x-string
    (interference-free) guarantee.
    """
    n = 2 * spec.sites
    pairs: list[tuple[float, PauliString]] = []
    for i, j, jij in spec.bonds():
        if jij == 0.0:
            continue
        if require_bipartite and (i + j) % 2 == 0:
            raise HamiltonianError(
                f"bond ({i},{j}) couples same-parity sites; not bipartite"
            )
        for a, b in ((2 * i - 1, 2 * j - 1), (2 * i, 2 * j)):
            pairs.append((-jij / 2, _x_padded_string(n, a, b, "Y")))
            pairs.append((-jij / 2, _x_padded_string(n, a, b, "Z")))
    if spec.interaction != 0.0:
        for i in range(1, spec.sites + 1):
            x = (1 << (2 * i - 2)) | (1 << (2 * i - 1))
            pairs.append((spec.interaction / 4, PauliString(n, x, 0, 0)))
    return Hamiltonian(n, tuple(pairs))


def build_heisenberg(spec: LatticeSpec) -> Hamiltonian:
    """Open-chain model -J sum(XX + YY + ZZ) - h sum(Z)."""
    n = spec.sites
    pairs: list[tuple[float, PauliString]] = []
    for i, j, jij in spec.bonds():
        if jij == 0.0:
            continue
        for kind in ("X", "Y", "Z"):
            xa, za = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}[kind]
            x = (xa << (i - 1)) | (xa << (j - 1))
            z = (za << (i - 1)) | (za << (j - 1))
            pairs.append((-jij, PauliString(n, x, z, 0)))
    if spec.field != 0.0:
        for i in range(1, n + 1):
            pairs.append((-spec.field, PauliString(n, 0, 1 << (i - 1), 0)))
    return Hamiltonian(n, tuple(pairs))


def build_model(spec: LatticeSpec, **kwargs) -> Hamiltonian:
    if spec.model == "fermi-hubbard":
        return build_fermi_hubbard(spec, **kwargs)
    if spec.model == "heisenberg":
        return build_heisenberg(spec)
    raise HamiltonianError(f"unknown model {spec.model!r}")


def has_short_time_interference(h: Hamiltonian) -> bool:
    """True iff two of {identity} + terms share an x bit string.

    Sharing an x string means two evolution branches can land on the same
    basis state after one short time step.
    """
    seen = {0}  # identity
    for _, p in h.terms:
        if p.x in seen:
            return True
        seen.add(p.x)
    return False


# -- Fermi-Hubbard helper states --------------------------------------------


def hubbard_mode_qubit(site: int, spin: str) -> int:
    """1-based qubit index of (site, spin), spin in {"up", "down"}."""
    if spin == "up":
        return 2 * site - 1
    if spin == "down":
        return 2 * site
    raise HamiltonianError(f"spin must be 'up' or 'down', got {spin!r}")


def hubbard_occupation_qubits(
    n_sites: int, occupied: list[tuple[int, str]]
) -> tuple[int, list[int]]:
    """Qubit register size and occupied-qubit list for a Fock state.

    In this encoding the mode occupation is (1 + X_a)/2, so occupied modes
    sit in |+> and empty modes in |->; the returned list feeds
    :func:`qcmc.states.plus_minus_state`. Creation-operator ordering only
    affects a global phase, which cancels in any transition amplitude with
    matching bra and ket.
    """
    n = 2 * n_sites
    qubits = []
    for site, spin in occupied:
        q = hubbard_mode_qubit(site, spin)
        if not 1 <= q <= n:
            raise HamiltonianError(f"mode ({site},{spin}) outside lattice")
        if q in qubits:
            raise HamiltonianError(f"mode ({site},{spin}) doubly occupied")
        qubits.append(q)
    return n, sorted(qubits)

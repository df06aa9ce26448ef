"""Monte Carlo sample generation for summation formulas.

One time step draws a correction operator W and a phase theta so that the
weighted draws reconstruct the one-step propagator: identity and leading
Pauli/rotation terms are drawn from the combined expansion, while the
high-order tail is drawn by rejection from factorized Poisson counts
(possible because unconditioned Poisson draws weight every raw Taylor term
by |coefficient|, and rejecting low total orders renormalizes within the
tail). A full trace is 2N one-step draws, forward then backward, with the
backward phases subtracted.

All phases here are exact multiples of pi/2: Hamiltonian coefficients are
real, so term coefficients are (+/-i)^k times a sign.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .hamiltonians import Hamiltonian
from .pauli import PauliString, multiply
from .summation import CustomRotationFormula, FormulaSpec

_REJECTION_CEILING = 10**6
_HALF_PI = math.pi / 2


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class CorrectionOp:
    """Identity, a canonical Pauli, or a rotation exp(-i sign phi axis)."""

    kind: str  # "identity" | "pauli" | "rotation"
    pauli: PauliString | None = None
    sign: int = 0
    phi: float = 0.0

    @classmethod
    def identity(cls) -> "CorrectionOp":
        return cls("identity")

    @classmethod
    def from_pauli(cls, p: PauliString) -> "CorrectionOp":
        if not p.is_canonical:
            raise SamplingError(f"correction Pauli must be canonical: {p.label()}")
        return cls("pauli", pauli=p)

    @classmethod
    def rotation(cls, sign: int, phi: float, axis: PauliString) -> "CorrectionOp":
        if not 0.0 < phi < _HALF_PI:
            raise SamplingError(f"rotation angle {phi} outside (0, pi/2)")
        if not axis.is_canonical:
            raise SamplingError("rotation axis must be canonical")
        return cls("rotation", pauli=axis, sign=sign, phi=phi)

    def adjoint(self) -> "CorrectionOp":
        if self.kind == "rotation":
            return CorrectionOp("rotation", self.pauli, -self.sign, self.phi)
        return self  # identity and canonical Paulis are Hermitian

    def to_matrix(self, n: int) -> np.ndarray:
        if self.kind == "identity":
            return np.eye(2**n, dtype=complex)
        if self.kind == "pauli":
            return self.pauli.to_matrix()
        ang = self.sign * self.phi
        return np.cos(ang) * np.eye(2**n) - 1j * np.sin(ang) * self.pauli.to_matrix()

    def literal(self) -> str:
        if self.kind == "identity":
            return "I"
        if self.kind == "pauli":
            return f"P:{self.pauli.label()}"
        return f"R:{self.sign:+d}:{self.phi:.12g}:{self.pauli.label()}"


@dataclass(frozen=True)
class SampleTrace:
    """One Monte Carlo draw: W_1..W_N then W'_1..W'_N, plus the phase."""

    ops: tuple[CorrectionOp, ...]
    theta: float

    @property
    def n_steps(self) -> int:
        return len(self.ops) // 2

    def forward(self) -> tuple[CorrectionOp, ...]:
        return self.ops[: self.n_steps]

    def backward(self) -> tuple[CorrectionOp, ...]:
        return self.ops[self.n_steps:]


@dataclass(frozen=True)
class SamplerConfig:
    formula: FormulaSpec | CustomRotationFormula
    n_steps: int
    seed: int = 0

    def __post_init__(self):
        if self.n_steps < 0:
            raise SamplingError("n_steps must be >= 0")


def poisson(x: float, rng: np.random.Generator) -> int:
    """Draw k with probability e^{-x} x^k / k!."""
    if x < 0:
        raise SamplingError(f"Poisson rate must be >= 0, got {x}")
    return int(rng.poisson(x))


def _phase_from_exp(sign: int, exp: int) -> float:
    """arg(sign * i^exp) as an exact multiple of pi/2."""
    if sign < 0:
        exp += 2
    return (0.0, _HALF_PI, math.pi, -_HALF_PI)[exp & 3]


def sample_high_order_term(
    h: Hamiltonian, dt: float, order: int, rng: np.random.Generator
) -> tuple[PauliString, float]:
    w, theta, _ = _sample_high_order_term(h, dt, order, rng)
    return w, theta


def _sample_high_order_term(h, dt, order, rng):
    """Rejection draw from the tail; also reports the iteration count."""
    threshold = 2 * order + 2
    x = h.h_tot * dt
    m = h.num_terms
    coeffs = np.array([hj for hj, _ in h.terms])
    if order == 0:
        side_rates = None
    elif order == 1:
        side_rates = np.abs(coeffs) * dt
    else:
        side_rates = np.abs(coeffs) * dt / 2
    two_sided = order == 2

    iters = 0
    while True:
        iters += 1
        if iters > _REJECTION_CEILING:
            raise SamplingError(
                "tail rejection exceeded iteration ceiling; the tail branch "
                "probability is too small to be sampled this way"
            )
        k = poisson(x, rng)
        ks = rng.poisson(side_rates) if side_rates is not None else None
        ks2 = rng.poisson(side_rates) if two_sided else None
        total = k + (int(ks.sum()) if ks is not None else 0)
        total += int(ks2.sum()) if ks2 is not None else 0
        if total >= threshold:
            break

    probs = np.abs(coeffs) / h.h_tot
    js = rng.choice(m, size=k, p=probs) if k else np.array([], dtype=int)

    # product sigma_M^{k'_M} .. sigma_1^{k'_1} sigma_{j_k} .. sigma_{j_1}
    #         sigma_1^{k_1} .. sigma_M^{k_M}
    prod = PauliString.identity(h.n)
    if two_sided:
        for j in range(m - 1, -1, -1):
            if ks2[j] % 2:
                prod = multiply(prod, h.terms[j][1])
    for a in range(k - 1, -1, -1):
        prod = multiply(prod, h.terms[int(js[a])][1])
    if ks is not None:
        for j in range(m):
            if ks[j] % 2:
                prod = multiply(prod, h.terms[j][1])

    # theta = arg(zeta * prod_a (-i h_{j_a}) * prod_j (i h_j)^{k_j + k'_j})
    exp = prod.phase_exp  # zeta = i^exp
    sign = 1
    for a in range(k):
        exp += 3  # -i
        if coeffs[int(js[a])] < 0:
            sign = -sign
    if ks is not None:
        for j in range(m):
            kj = int(ks[j]) + (int(ks2[j]) if two_sided else 0)
            exp += kj
            if coeffs[j] < 0 and kj % 2:
                sign = -sign
    return prod.canonical(), _phase_from_exp(sign, exp), iters


def sam_gen_one_step(
    formula: FormulaSpec | CustomRotationFormula,
    h: Hamiltonian,
    rng: np.random.Generator,
) -> tuple[CorrectionOp, float]:
    """Draw (W, theta) for one time step of the prepared formula."""
    if isinstance(formula, CustomRotationFormula):
        return _custom_one_step(formula, rng)
    if formula.mode != "instance":
        raise SamplingError(
            "sampling weights must match the actual expansion; prepare the "
            "formula in instance mode (bound mode is for analysis only)"
        )
    u = rng.random() * formula.c_a
    if u < formula.c_a - formula.c_t:
        return _leading_one_step(formula, rng)
    w, theta = sample_high_order_term(h, formula.dt, formula.order, rng)
    if w.is_identity:
        return CorrectionOp.identity(), theta
    return CorrectionOp.from_pauli(w), theta


def _leading_one_step(formula: FormulaSpec, rng):
    if formula.flavor == "poe":
        u = rng.random() * (1.0 + formula.c_l)
        if u < 1.0 or not formula.leading.terms:
            return CorrectionOp.identity(), 0.0
        idx = _weighted_index(formula.cum_alpha, u - 1.0)
        alpha, tau = formula.leading.terms[idx]
        # arg(-i alpha): -pi/2 for positive alpha, +pi/2 for negative
        theta = -_HALF_PI if alpha > 0 else _HALF_PI
        if tau.is_identity:
            return CorrectionOp.identity(), theta
        return CorrectionOp.from_pauli(tau), theta
    # rotation flavor: identity only in the degenerate C_L = 0 case
    if not formula.rotation.terms:
        return CorrectionOp.identity(), 0.0
    idx = _weighted_index(formula.cum_alpha, rng.random() * formula.cum_alpha[-1])
    _, sign, tau = formula.rotation.terms[idx]
    return CorrectionOp.rotation(sign, formula.phi, tau), 0.0


def _custom_one_step(formula: CustomRotationFormula, rng):
    if formula.degenerate:
        return CorrectionOp.identity(), 0.0
    u = rng.random() * formula.weight
    idx = _weighted_index(formula.cum_weights, u)
    if idx < len(formula.pauli_terms):
        a, p = formula.pauli_terms[idx]
        theta = 0.0 if a > 0 else math.pi
        if p.is_identity:
            return CorrectionOp.identity(), theta
        return CorrectionOp.from_pauli(p), theta
    _, sign, p = formula.rotation_terms[idx - len(formula.pauli_terms)]
    return CorrectionOp.rotation(sign, formula.phi, p), 0.0


def _weighted_index(cum_weights: tuple[float, ...], u: float) -> int:
    idx = bisect_right(cum_weights, u)
    return min(idx, len(cum_weights) - 1)


def sam_gen(cfg: SamplerConfig, h: Hamiltonian, rng: np.random.Generator) -> SampleTrace:
    """Generate one trace: 2N one-step draws with accumulated phase."""
    forward = []
    backward = []
    theta = 0.0
    for _ in range(cfg.n_steps):
        w, th = sam_gen_one_step(cfg.formula, h, rng)
        wp, thp = sam_gen_one_step(cfg.formula, h, rng)
        forward.append(w)
        backward.append(wp)
        theta += th - thp
    return SampleTrace(tuple(forward + backward), theta)


def step_weight(formula: FormulaSpec | CustomRotationFormula) -> float:
    """One-step l1 weight: the scale factor is weight^(2N) for N steps."""
    if isinstance(formula, CustomRotationFormula):
        return formula.weight
    return formula.c_a


def format_trace(index: int, trace: SampleTrace) -> str:
    ops = " ".join(op.literal() for op in trace.ops)
    return f"{index}\t{trace.theta:.12g}\t{ops}"

"""Exact summation formulas for the time evolution operator.

One engine serves all supported orders: the correction operator

    V_0 = e^{-iH dt}
    V_1 = e^{-iH dt} * e^{+i h_1 s_1 dt} ... e^{+i h_M s_M dt}
    V_2 = S_1(-dt/2) * e^{-iH dt} * S_1(dt/2)^dag

is expanded symbolically as a polynomial in dt with Pauli-sum coefficients,
like terms combined order by order. Orders l+1 .. 2l+1 form the Hermitian
leading part L (all real weights); the rest is the high-order tail, whose
total weight has the closed form C_T = sum_{k>2l+1} (lambda x)^k / k! with
x = h_tot*dt. A formula is either a Pauli-operator expansion (weights
1, |alpha_u|, tail) or a leading-order-rotation form where 1 - iL is
rewritten as sum_u beta_u exp(-i sgn(alpha_u) phi tau_u), shrinking the
total weight from 1 + C_L to sqrt(1 + C_L^2).

For small registers there is also the exact single-step expansion of V_1
over the complete Pauli basis, and its rotation-form rewrite, which is an
exact finite formula with no tail at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dense import pauli_decompose, propagator
from .hamiltonians import Hamiltonian
from .pauli import PauliString, PauliSum
from .product_formulas import (
    RotationSequence,
    first_order_sequence,
    lambda_factor,
)

_TERM_CEILING = 200_000


class ExpansionError(RuntimeError):
    """Raised when a symbolic expansion exceeds the term ceiling."""


# -- operator-valued polynomials in dt ---------------------------------------


def _poly_multiply(a: dict[int, PauliSum], b: dict[int, PauliSum], k_max: int,
                   n: int) -> dict[int, PauliSum]:
    out: dict[int, PauliSum] = {}
    for ka, sa in a.items():
        for kb, sb in b.items():
            k = ka + kb
            if k > k_max:
                continue
            prod = sa @ sb
            if k in out:
                for p, c in prod:
                    out[k].add(c, p)
            else:
                out[k] = prod
    for k, s in out.items():
        scale = max(1.0, s.norm_l1())
        s.prune(1e-14 * scale)
        if len(s) > _TERM_CEILING:
            raise ExpansionError(
                f"order-{k} expansion exceeded {_TERM_CEILING} terms"
            )
    return out


def _exp_single_pauli(coef: complex, p: PauliString, k_max: int) -> dict[int, PauliSum]:
    """exp(coef * p * dt) as an order dict; p^k alternates identity and p."""
    n = p.n
    ident = PauliString.identity(n)
    out = {}
    c = 1.0 + 0j
    for k in range(k_max + 1):
        s = PauliSum(n)
        s.add(c, ident if k % 2 == 0 else p)
        out[k] = s
        c = c * coef / (k + 1)
    return out


def _exp_hamiltonian(h: Hamiltonian, k_max: int) -> dict[int, PauliSum]:
    """exp(-i H dt) as an order dict via iterated Pauli-sum powers."""
    n = h.n
    hs = PauliSum.from_pairs(n, [(hj, p) for hj, p in h.terms])
    out = {}
    power = PauliSum(n)
    power.add(1.0, PauliString.identity(n))
    c = 1.0 + 0j
    for k in range(k_max + 1):
        out[k] = power.scaled(c)
        if k < k_max:
            power = power @ hs
            power.prune(1e-14 * max(1.0, power.norm_l1()))
            if len(power) > _TERM_CEILING:
                raise ExpansionError(f"H^{k+1} exceeded {_TERM_CEILING} terms")
        c = c * (-1j) / (k + 1)
    return out


@lru_cache(maxsize=32)
def correction_expansion(h: Hamiltonian, order: int, k_max: int) -> tuple:
    """V_order by total power of dt; cached, coefficients dt-free.

    Returns a tuple of (k, PauliSum) pairs sorted by k.
    """
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order}")
    if k_max < 2 * order + 2:
        raise ValueError(f"k_max must be >= {2 * order + 2}")
    n = h.n
    factors: list[dict[int, PauliSum]] = []
    if order == 2:
        # S_1(-dt/2) has factors exp(+i h_j s_j dt/2), j = M .. 1
        for hj, p in reversed(h.terms):
            factors.append(_exp_single_pauli(0.5j * hj, p, k_max))
    factors.append(_exp_hamiltonian(h, k_max))
    if order == 1:
        for hj, p in h.terms:
            factors.append(_exp_single_pauli(1j * hj, p, k_max))
    elif order == 2:
        # S_1(dt/2)^dag has factors exp(+i h_j s_j dt/2), j = 1 .. M
        for hj, p in h.terms:
            factors.append(_exp_single_pauli(0.5j * hj, p, k_max))

    poly = factors[0]
    for f in factors[1:]:
        poly = _poly_multiply(poly, f, k_max, n)
    return tuple(sorted((k, s) for k, s in poly.items()))


@dataclass(frozen=True)
class LeadingOrderExpansion:
    """Hermitian leading part L = sum_u alpha_u tau_u, like terms combined."""

    n: int
    terms: tuple[tuple[float, PauliString], ...]

    @property
    def c_l(self) -> float:
        return sum(abs(a) for a, _ in self.terms)

    def to_pauli_sum(self) -> PauliSum:
        return PauliSum.from_pairs(self.n, [(a, p) for a, p in self.terms])


def taylor_correction_series(
    h: Hamiltonian, dt: float, order: int, k_max: int | None = None
) -> tuple[LeadingOrderExpansion, PauliSum]:
    """Leading expansion L (orders order+1 .. 2*order+1) and high-order tail.

    The tail Pauli sum collects orders 2*order+2 .. k_max with dt substituted;
    it exists for cross-checks only, the sampler never materializes it.
    """
    if k_max is None:
        k_max = 2 * order + 4
    by_order = dict(correction_expansion(h, order, k_max))
    scale_tol = 1e-10

    # order 0 must be exactly the identity, orders 1..order must cancel
    ident = PauliString.identity(h.n)
    s0 = by_order.get(0)
    assert s0 is not None and abs(s0[ident] - 1) < 1e-12 and len(s0.copy().prune(1e-12)) == 1
    for k in range(1, order + 1):
        residual = by_order.get(k)
        if residual is not None:
            norm = residual.norm_l1()
            limit = scale_tol * max(1.0, h.h_tot**k / math.factorial(k))
            if norm > limit:
                raise ExpansionError(
                    f"order-{k} terms of V_{order} fail to cancel (l1 {norm:.2e})"
                )

    leading = PauliSum(h.n)
    for k in range(order + 1, 2 * order + 2):
        if k not in by_order:
            continue
        for p, c in by_order[k]:
            # V = 1 - iL + T, so L picks up i * coefficient
            leading.add(1j * c * dt**k, p)
    lead_terms = []
    for p, c in sorted(leading, key=lambda item: (item[0].x, item[0].z)):
        if abs(c.imag) > scale_tol * max(1.0, abs(c)):
            raise ExpansionError(f"leading term {p.label()} not Hermitian: {c}")
        if abs(c.real) > 1e-14 * max(1.0, leading.norm_l1()):
            lead_terms.append((c.real, p))

    tail = PauliSum(h.n)
    for k in range(2 * order + 2, k_max + 1):
        if k not in by_order:
            continue
        for p, c in by_order[k]:
            tail.add(c * dt**k, p)
    tail.prune(0.0)
    return LeadingOrderExpansion(h.n, tuple(lead_terms)), tail


# -- normalization factors (Table of closed forms) ---------------------------


def _exp_tail(y: float, k_from: int) -> float:
    """sum_{k >= k_from} y^k / k!, summed forward to avoid cancellation."""
    term = y**k_from / math.factorial(k_from)
    total = 0.0
    k = k_from
    while True:
        total += term
        k += 1
        term *= y / k
        if abs(term) < 1e-30 * max(total, 1e-300) or k > 1000:
            return total


def closed_form_c_l(order: int, x: float, lam: float | None = None,
                    simplified: bool = False) -> float:
    """Bound-based leading-order weight as a function of x = h_tot*dt."""
    if order == 0:
        return x
    if order == 1:
        head = 0.5 * x**2 if simplified else 0.5 * (2 * x) ** 2
        return head + (2 * x) ** 3 / 6
    if order == 2:
        head = x**3 / 18 if simplified else (2 * x) ** 3 / 6
        return head + (2 * x) ** 5 / 120
    if order % 2:
        raise ValueError(f"unsupported order {order}")
    m = order // 2
    lam = lambda_factor(order) if lam is None else lam
    return sum((lam * x) ** (2 * k + 1) / math.factorial(2 * k + 1)
               for k in range(m, 2 * m + 1))


@dataclass(frozen=True)
class NormalizationFactors:
    c_l: float
    c_t: float
    c_a: float
    lam: float
    x: float


def normalization_factors(
    flavor: str,
    order: int,
    h_tot: float,
    dt: float,
    r: int = 1,
    instance_c_l: float | None = None,
    simplified: bool = False,
) -> NormalizationFactors:
    """Per-step weights: C_L, tail C_T, and total C_A for one formula step.

    ``instance_c_l`` substitutes the combined |alpha| sum of a concrete
    leading expansion for the closed-form bound.
    """
    if flavor not in ("poe", "lor"):
        raise ValueError(f"flavor must be 'poe' or 'lor', got {flavor!r}")
    x = h_tot * dt
    lam = lambda_factor(order, r)
    c_t = _exp_tail(lam * x, 2 * order + 2)
    c_l = instance_c_l if instance_c_l is not None else closed_form_c_l(
        order, x, lam, simplified
    )
    if flavor == "poe":
        c_a = 1.0 + c_l + c_t
    else:
        c_a = math.sqrt(1.0 + c_l * c_l) + c_t
    return NormalizationFactors(c_l, c_t, c_a, lam, x)


# -- rotation form of the leading part ---------------------------------------


@dataclass(frozen=True)
class RotationFormula:
    """1 - iL rewritten as sum_u beta_u exp(-i sign_u phi tau_u)."""

    phi: float
    terms: tuple[tuple[float, int, PauliString], ...]  # (beta_u, sign_u, tau_u)

    @property
    def total_weight(self) -> float:
        return sum(b for b, _, _ in self.terms) if self.terms else 1.0

    def to_matrix(self, n: int) -> np.ndarray:
        if not self.terms:
            return np.eye(2**n, dtype=complex)
        m = np.zeros((2**n, 2**n), dtype=complex)
        for beta, sign, tau in self.terms:
            ang = sign * self.phi
            m += beta * (
                np.cos(ang) * np.eye(2**n) - 1j * np.sin(ang) * tau.to_matrix()
            )
        return m


def to_rotation_form(leading: LeadingOrderExpansion) -> RotationFormula:
    """phi = arctan(C_L), beta_u = |alpha_u| / sin(phi); exact rewrite.

    C_L = 0 degenerates to the empty rotation list (bare identity, weight 1).
    """
    c_l = leading.c_l
    if c_l == 0.0:
        return RotationFormula(0.0, ())
    phi = math.atan(c_l)
    s = math.sin(phi)
    terms = tuple(
        (abs(a) / s, 1 if a >= 0 else -1, p) for a, p in leading.terms
    )
    return RotationFormula(phi, terms)


# -- prepared formulas for the sampler ---------------------------------------


@dataclass(frozen=True)
class FormulaSpec:
    """Everything one sampling step needs, with instance-based weights."""

    flavor: str  # "poe" | "lor"
    order: int
    dt: float
    leading: LeadingOrderExpansion
    rotation: RotationFormula
    c_l: float
    c_t: float
    c_a: float
    phi: float
    lam: float
    mode: str  # "instance" | "bound"
    k_left: RotationSequence | None
    k_right: RotationSequence | None
    cum_alpha: tuple[float, ...] = ()  # running sums of |alpha_u| for draws

    @property
    def n(self) -> int:
        return self.leading.n

    def to_dict(self) -> dict:
        return {
            "flavor": self.flavor,
            "order": self.order,
            "dt": self.dt,
            "c_l": self.c_l,
            "c_t": self.c_t,
            "c_a": self.c_a,
            "phi": self.phi,
            "lambda": self.lam,
            "mode": self.mode,
            "leading_terms": [
                {"alpha": a, "pauli": p.label()} for a, p in self.leading.terms
            ],
        }


def prepare_formula(
    h: Hamiltonian,
    flavor: str,
    order: int,
    dt: float,
    mode: str = "instance",
) -> FormulaSpec:
    """Expand the correction operator and freeze one step of the formula."""
    leading, _ = taylor_correction_series(h, dt, order, k_max=2 * order + 2)
    instance_c_l = leading.c_l if mode == "instance" else None
    f = normalization_factors(flavor, order, h.h_tot, dt, instance_c_l=instance_c_l)
    rotation = to_rotation_form(leading)
    if order == 0:
        k_left, k_right = None, None
    elif order == 1:
        k_left, k_right = None, first_order_sequence(h, dt)
    else:
        k_left = first_order_sequence(h, -dt / 2).adjoint()
        k_right = first_order_sequence(h, dt / 2)
    cum = []
    acc = 0.0
    for a, _ in leading.terms:
        acc += abs(a)
        cum.append(acc)
    return FormulaSpec(
        flavor=flavor,
        order=order,
        dt=dt,
        leading=leading,
        rotation=rotation,
        c_l=f.c_l,
        c_t=f.c_t,
        c_a=f.c_a,
        phi=rotation.phi,
        lam=f.lam,
        mode=mode,
        k_left=k_left,
        k_right=k_right,
        cum_alpha=tuple(cum),
    )


# -- exact single-step expansion (small registers) ---------------------------


def exact_correction_expansion(h: Hamiltonian, dt: float) -> PauliSum:
    """Complete Pauli expansion of V_1 = e^{-iH dt} S_1(dt)^dag.

    Coefficients are a_sigma - i b_sigma = 2^{-n} Tr[sigma V_1]; the identity
    coefficient is real and positive for the step sizes of interest.
    """
    u = propagator(h.to_matrix(), dt)
    s1 = first_order_sequence(h, dt).to_matrix(h.n)
    v1 = u @ s1.conj().T
    expansion = pauli_decompose(v1, tol=1e-13)
    ident = PauliString.identity(h.n)
    c1 = expansion[ident]
    if abs(c1.imag) > 1e-10 or c1.real <= 0:
        raise ExpansionError(f"identity coefficient {c1} not real positive")
    return expansion


@dataclass(frozen=True)
class CustomRotationFormula:
    """Exact finite formula e^{-iH dt} = sum(P-terms + rotations) * S_1(dt).

    ``pauli_terms`` carries the real parts a_sigma of the non-identity
    coefficients; ``rotation_terms`` absorbs the identity plus all imaginary
    parts as rotations with common angle phi. ``weight`` is the one-step
    l1 weight; the formula has no high-order tail.
    """

    n: int
    dt: float
    pauli_terms: tuple[tuple[float, PauliString], ...]
    rotation_terms: tuple[tuple[float, int, PauliString], ...]
    phi: float
    a_identity: float
    weight: float
    degenerate: bool
    k_right: RotationSequence
    cum_weights: tuple[float, ...] = ()  # Pauli terms first, then rotations

    def to_dict(self) -> dict:
        return {
            "kind": "custom-lor",
            "dt": self.dt,
            "weight": self.weight,
            "phi": self.phi,
            "a_identity": self.a_identity,
            "degenerate": self.degenerate,
            "pauli_terms": [
                {"a": a, "pauli": p.label()} for a, p in self.pauli_terms
            ],
            "rotation_terms": [
                {"beta": b, "sign": s, "pauli": p.label()}
                for b, s, p in self.rotation_terms
            ],
        }


def custom_lor_formula(
    h: Hamiltonian, dt: float, expansion: PauliSum | None = None,
    tol: float = 1e-12,
) -> CustomRotationFormula:
    """Rotation-form rewrite of the exact V_1 expansion.

    With all imaginary parts b_sigma = 0 and no real non-identity parts the
    formula degenerates to the bare product formula with weight 1 (flagged,
    not an error).
    """
    if expansion is None:
        expansion = exact_correction_expansion(h, dt)
    ident = PauliString.identity(h.n)
    a1 = expansion[ident].real
    paulis = []
    b_parts = []
    for p, c in expansion:
        if p == ident:
            continue
        if abs(c.real) > tol:
            paulis.append((c.real, p))
        if abs(c.imag) > tol:
            # coefficient convention a - i b, so b = -Im(c)
            b_parts.append((-c.imag, p))
    k_right = first_order_sequence(h, dt)

    def _cum(ws):
        out, acc = [], 0.0
        for w in ws:
            acc += w
            out.append(acc)
        return tuple(out)

    if not b_parts:
        degenerate = not paulis
        if paulis:
            paulis.append((a1, ident))
        weight = sum(abs(a) for a, _ in paulis) if paulis else 1.0
        return CustomRotationFormula(
            h.n, dt, tuple(paulis), (), 0.0, a1, weight, degenerate, k_right,
            _cum(abs(a) for a, _ in paulis),
        )
    sum_b = sum(abs(b) for b, _ in b_parts)
    phi = math.atan(sum_b / a1)
    s = math.sin(phi)
    rotations = tuple(
        (abs(b) / s, 1 if b >= 0 else -1, p) for b, p in b_parts
    )
    weight = sum(abs(a) for a, _ in paulis) + sum(b for b, _, _ in rotations)
    cum = _cum([abs(a) for a, _ in paulis] + [b for b, _, _ in rotations])
    return CustomRotationFormula(
        h.n, dt, tuple(paulis), rotations, phi, a1, weight, False, k_right, cum
    )

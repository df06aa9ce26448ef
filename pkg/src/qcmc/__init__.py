"""Monte Carlo simulation of real-time quantum dynamics.

The package samples summation formulas of the time evolution operator,
evaluates per-sample transition amplitudes with an ancilla-based statevector
circuit simulator (or a pure Pauli-propagation engine), applies
quasi-probability and postselection error mitigation, and predicts the
variance growth rate of the whole pipeline.
"""

from .pauli import BasisState, PauliString, PauliSum

__all__ = ["BasisState", "PauliString", "PauliSum"]
__version__ = "0.1.0"

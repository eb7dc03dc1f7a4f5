"""Dissipative ground-state preparation for electronic-structure Hamiltonians.

Simulates Lindblad dynamics whose jump operators are spectrally filtered
ladder-operator couplings, at three levels: analytic quasi-free
Hartree-Fock dynamics of the one-particle reduced density matrix, full
density-matrix propagation on determinant bases, and quantum-jump
Monte-Carlo trajectory unraveling.
"""

__version__ = "0.1.0"

from . import basis, filters, integrals, jumps, lindblad, quasifree, trajectory  # noqa: F401

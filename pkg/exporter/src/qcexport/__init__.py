"""Quantum-chemistry fixture exporter: integrals, RHF, and FCI references."""

__version__ = "0.1.0"

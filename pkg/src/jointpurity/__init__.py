"""Simulator for direct purity measurement of polarization qubits by
two-copy singlet projection at a beamsplitter."""

from .quantum import DensityMatrix, Ket, fidelity, purity, singlet_projection, tensor

__version__ = "0.1.0"

__all__ = ["DensityMatrix", "Ket", "fidelity", "purity", "singlet_projection", "tensor"]

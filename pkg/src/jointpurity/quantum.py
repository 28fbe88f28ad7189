"""Small dense density-matrix algebra for polarization qubits.

Basis ordering is (H, V) = (|0>, |1>) for one photon and
(|00>, |01>, |10>, |11>) for two.  Circular polarization follows
|R> = (|H> - i|V>)/sqrt(2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

ATOL = 1e-10


def _as_complex_array(values) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Ket:
    """Normalized pure state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _as_complex_array(self.amplitudes)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("ket amplitudes must be a non-empty 1-d sequence")
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        amps = _as_complex_array(amps / norm)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def inner(self, other: "Ket") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __repr__(self) -> str:
        return f"Ket({np.array2string(self.amplitudes, precision=4)})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix.

    Construction validates all three properties and raises ``ValueError``
    otherwise; use :func:`nearest_physical` to repair a noisy estimate first.
    """

    entries: np.ndarray

    def __post_init__(self):
        rho = _as_complex_array(self.entries)
        check_physical(rho)
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def maximally_mixed(cls, dim: int = 2) -> "DensityMatrix":
        return cls(np.eye(dim) / dim)

    @classmethod
    def mixture(cls, states: Sequence["Ket | DensityMatrix"],
                weights: Sequence[float] | None = None) -> "DensityMatrix":
        """Convex combination of kets and/or density matrices (equal weights by default)."""
        if not states:
            raise ValueError("mixture needs at least one state")
        if weights is None:
            weights = [1.0 / len(states)] * len(states)
        if len(weights) != len(states):
            raise ValueError("weights and states differ in length")
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or abs(w.sum() - 1.0) > ATOL:
            raise ValueError("mixture weights must be non-negative and sum to 1")
        total = sum(
            wi * (s.projector().entries if isinstance(s, Ket) else s.entries)
            for wi, s in zip(w, states)
        )
        return cls(total)

    def __getitem__(self, idx):
        return self.entries[idx]

    def __repr__(self) -> str:
        return f"DensityMatrix({np.array2string(self.entries, precision=4)})"


def check_physical(rho: np.ndarray, atol: float = ATOL) -> None:
    """Raise ``ValueError`` unless ``rho`` is a valid density matrix."""
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if not np.allclose(rho, rho.conj().T, rtol=0, atol=atol):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > atol:
        raise ValueError(f"density matrix trace is {tr.real:.12g}, expected 1")
    if rho.shape[0] == 2:
        # trace is 1 already, so PSD <=> det >= 0
        det = (rho[0, 0] * rho[1, 1] - rho[0, 1] * rho[1, 0]).real
        ok = det >= -atol and rho[0, 0].real >= -atol and rho[1, 1].real >= -atol
    else:
        ok = np.linalg.eigvalsh(rho).min() >= -atol
    if not ok:
        raise ValueError("density matrix is not positive semidefinite")


def is_physical(rho: np.ndarray, atol: float = ATOL) -> bool:
    try:
        check_physical(np.asarray(rho, dtype=np.complex128), atol)
    except ValueError:
        return False
    return True


def _entries(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.entries
    return DensityMatrix(rho).entries


def purity(rho) -> float:
    """Tr(rho^2)."""
    m = _entries(rho)
    # Tr(rho rho) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(m) ** 2))


def fidelity(rho, phi: Ket) -> float:
    """Overlap <phi|rho|phi> with a pure target state."""
    m = _entries(rho)
    if phi.dim != m.shape[0]:
        raise ValueError(f"dimension mismatch: ket {phi.dim}, matrix {m.shape[0]}")
    return float(np.vdot(phi.amplitudes, m @ phi.amplitudes).real)


def tensor(a, b) -> DensityMatrix:
    return DensityMatrix(np.kron(_entries(a), _entries(b)))


def overlap_trace(a, b) -> float:
    """Tr(rho_a rho_b)."""
    return float(np.trace(_entries(a) @ _entries(b)).real)


H = Ket([1, 0])
V = Ket([0, 1])
D = PLUS = Ket([1, 1])
A = MINUS = Ket([1, -1])
R = Ket([1, -1j])
L = Ket([1, 1j])
PSI_MINUS = Ket([0, 1, -1, 0])
PSI_PLUS = Ket([0, 1, 1, 0])

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def singlet_projection(joint) -> float:
    """Weight <psi-|joint|psi-> of a two-qubit state on the singlet."""
    m = _entries(joint)
    if m.shape != (4, 4):
        raise ValueError(f"singlet projection needs a 4x4 matrix, got {m.shape}")
    psi = PSI_MINUS.amplitudes
    return float(np.vdot(psi, m @ psi).real)


def conjugate(rho, unitary: np.ndarray) -> DensityMatrix:
    u = np.asarray(unitary, dtype=np.complex128)
    return DensityMatrix(u @ _entries(rho) @ u.conj().T)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Random mixed state from the (Hilbert-Schmidt) Ginibre ensemble."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return DensityMatrix((rho + rho.conj().T) / 2)

"""Single-photon polarimetry and linear-inversion state reconstruction.

Six projectors are measured: H, V, D = (H+V)/sqrt2, A = (H-V)/sqrt2,
R = (H-iV)/sqrt2 and L = (H+iV)/sqrt2.  The Stokes vector is read off
conjugate pairs and mapped to

    rho = (I + s1 Z + s2 X + s3 Y') / 2,   Y' = [[0, i], [-i, 0]]

so that |R> sits at s3 = +1.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from . import quantum as q
from .quantum import DensityMatrix, Ket

LABELS = ("H", "V", "D", "A", "R", "L")
PROJECTORS: dict[str, Ket] = {"H": q.H, "V": q.V, "D": q.D, "A": q.A, "R": q.R, "L": q.L}
PAIRS = (("H", "V"), ("D", "A"), ("R", "L"))

Y_PRIME = -q.PAULI_Y
STOKES_BASIS = (q.PAULI_Z, q.PAULI_X, Y_PRIME)


class ReconstructionError(ValueError):
    pass


@dataclass
class CountRecord:
    """Counts per projector setting.

    ``variance`` holds the Poisson variance of each entry once the raw counts
    are gone (after background subtraction); for raw records it is ``None``
    and the counts themselves are the variances.
    """

    counts: dict[str, float]
    background_per_setting: float = 0.0
    n_per_setting: int = 0
    variance: dict[str, float] | None = None

    def __post_init__(self):
        missing = set(LABELS) - set(self.counts)
        if missing:
            raise ValueError(f"count record missing settings {sorted(missing)}")
        self.counts = {k: self.counts[k] for k in LABELS}

    def variances(self) -> dict[str, float]:
        if self.variance is not None:
            return dict(self.variance)
        return {k: max(float(v), 0.0) for k, v in self.counts.items()}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "counts", "background"])
        for k in LABELS:
            c = self.counts[k]
            w.writerow([k, int(c) if float(c).is_integer() else repr(float(c)),
                        repr(float(self.background_per_setting))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, n_per_setting: int = 0) -> "CountRecord":
        rows = list(csv.DictReader(io.StringIO(text)))
        counts = {r["label"]: float(r["counts"]) for r in rows}
        bg = {float(r["background"]) for r in rows}
        if len(bg) != 1:
            raise ValueError("background must be the same for every setting")
        return cls(counts, bg.pop(), n_per_setting)


@dataclass
class TomographyResult:
    rho_linear: np.ndarray
    rho_physical: DensityMatrix
    purity_linear: float
    purity_physical: float
    stokes: tuple[float, float, float]
    purity_std_error: float = 0.0

    def to_dict(self) -> dict:
        def mat(m):
            m = np.asarray(m)
            return {"real": m.real.tolist(), "imag": m.imag.tolist()}

        return {
            "rho_linear": mat(self.rho_linear),
            "rho_physical": mat(self.rho_physical.entries),
            "purity_linear": self.purity_linear,
            "purity_physical": self.purity_physical,
            "purity_std_error": self.purity_std_error,
            "stokes": list(self.stokes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def born_probabilities(rho) -> dict[str, float]:
    return {k: q.fidelity(rho, PROJECTORS[k]) for k in LABELS}


def expected_counts(rho, n_per_setting: int, background_rate: float = 0.0) -> CountRecord:
    """Noiseless record holding the Poisson means."""
    probs = born_probabilities(rho)
    return CountRecord({k: n_per_setting * p + background_rate for k, p in probs.items()},
                       background_rate, n_per_setting)


def simulate_counts(rho, n_per_setting: int, background_rate: float, seed) -> CountRecord:
    if n_per_setting < 1:
        raise ValueError("n_per_setting must be at least 1")
    if background_rate < 0:
        raise ValueError("background rate must be non-negative")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    means = expected_counts(rho, n_per_setting, background_rate).counts
    lam = np.array([max(means[k], 0.0) for k in LABELS])
    draws = rng.poisson(lam)
    return CountRecord({k: int(c) for k, c in zip(LABELS, draws)}, background_rate, n_per_setting)


def subtract_background(record: CountRecord) -> CountRecord:
    """Remove the per-setting background; negative results are kept."""
    b = record.background_per_setting
    return CountRecord({k: v - b for k, v in record.counts.items()}, 0.0,
                       record.n_per_setting, variance=record.variances())


def nearest_physical(m: np.ndarray) -> DensityMatrix:
    """Clip negative eigenvalues to zero and renormalize."""
    m = np.asarray(m, dtype=np.complex128)
    m = (m + m.conj().T) / 2
    vals, vecs = np.linalg.eigh(m)
    vals = np.clip(vals, 0.0, None)
    if vals.sum() <= 0:
        raise ReconstructionError("matrix has no positive eigenvalue")
    vals = vals / vals.sum()
    out = (vecs * vals) @ vecs.conj().T
    return DensityMatrix((out + out.conj().T) / 2)


def stokes_to_matrix(s) -> np.ndarray:
    rho = np.eye(2, dtype=np.complex128) / 2
    for sk, sig in zip(s, STOKES_BASIS):
        rho = rho + sk * sig / 2
    return rho


def reconstruct(record: CountRecord) -> TomographyResult:
    """Linear inversion of a background-subtracted record.

    The purity error uses Gaussian propagation of the Poisson count
    variances through P = (1 + |s|^2) / 2, keeping the second-order term
    that dominates near the maximally mixed state.
    """
    n, var = record.counts, record.variances()
    s, s_var = [], []
    for a, b in PAIRS:
        tot = n[a] + n[b]
        if tot <= 0:
            raise ReconstructionError(f"non-positive total counts for {a}/{b}: {tot}")
        s.append((n[a] - n[b]) / tot)
        s_var.append(4.0 * (n[b] ** 2 * var[a] + n[a] ** 2 * var[b]) / tot ** 4)
    rho_lin = stokes_to_matrix(s)
    p_lin = float(np.sum(np.abs(rho_lin) ** 2))
    rho_phys = nearest_physical(rho_lin)
    p_var = sum(sk ** 2 * vk + vk ** 2 / 2 for sk, vk in zip(s, s_var))
    return TomographyResult(rho_lin, rho_phys, p_lin, q.purity(rho_phys),
                            tuple(float(x) for x in s), float(np.sqrt(p_var)))


def measure(rho, n_per_setting: int, background_rate: float, seed) -> TomographyResult:
    """Simulate counts, subtract background, reconstruct."""
    return reconstruct(subtract_background(simulate_counts(rho, n_per_setting, background_rate, seed)))

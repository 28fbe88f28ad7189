"""Two-photon interference at a 50/50 beamsplitter.

For a product input |a>|b> the coincidence probability is
``(1 - v |<a|b>|^2) / 2`` where the overlap runs over polarization *and*
arrival time, and ``v`` lumps every imperfection of the beamsplitter and
alignment into one visibility factor.  Arrival-time wavepackets overlap as
``exp(-dt^2 / (2 tau_c^2))``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .prep import (Correlation, PairRecipe, Pol, PhotonState, draw_phases, propagate,
                   time_overlap)

BASELINE_PROB = 0.5
DEFAULT_VISIBILITY = 0.90
DEFAULT_COHERENCE_TIME = 0.22  # ps, ~10 nm bandwidth at 810 nm
DEFAULT_QUARTZ_DELAY = 0.6  # ps, 20 mm of quartz


@dataclass(frozen=True)
class InterferometerModel:
    visibility: float = DEFAULT_VISIBILITY
    coherence_time: float = DEFAULT_COHERENCE_TIME

    def __post_init__(self):
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError(f"visibility must be in [0, 1], got {self.visibility}")
        if not self.coherence_time > 0:
            raise ValueError(f"coherence time must be positive, got {self.coherence_time}")


def overlap(a: PhotonState, b: PhotonState, coherence_time: float) -> complex:
    total = 0j
    for ca in a.components:
        for cb in b.components:
            if ca.pol == cb.pol:
                total += (np.conj(ca.amplitude) * cb.amplitude
                          * time_overlap(ca.time - cb.time, coherence_time))
    return complex(total)


def coincidence_prob(a: PhotonState, b: PhotonState, model: InterferometerModel) -> float:
    o = overlap(a, b, model.coherence_time)
    return 0.5 * (1.0 - model.visibility * abs(o) ** 2)


@dataclass(frozen=True)
class ScanPoint:
    delay: float
    expected_prob: float
    counts: int | None = None


@dataclass
class ScanResult:
    points: list[ScanPoint]
    pairs_per_point: int = 0
    baseline_prob: float = BASELINE_PROB

    @property
    def delays(self) -> np.ndarray:
        return np.array([p.delay for p in self.points])

    @property
    def expected(self) -> np.ndarray:
        return np.array([p.expected_prob for p in self.points])

    @property
    def counts(self) -> np.ndarray:
        return np.array([-1 if p.counts is None else p.counts for p in self.points])

    def empirical_baseline(self) -> float:
        """Mean coincidence fraction of the two outermost scan points."""
        ends = (self.points[0], self.points[-1])
        if self.pairs_per_point and all(p.counts is not None for p in ends):
            return sum(p.counts for p in ends) / (2.0 * self.pairs_per_point)
        return sum(p.expected_prob for p in ends) / 2.0

    def visibility(self, baseline: float | None = None) -> np.ndarray:
        """Dip depth 1 - P(delay) / baseline of the expected curve."""
        base = self.baseline_prob if baseline is None else baseline
        return 1.0 - self.expected / base

    def local_minima(self) -> list[int]:
        """Indices of strict local minima of the expected curve."""
        p = self.expected
        return [i for i in range(1, len(p) - 1) if p[i] < p[i - 1] and p[i] < p[i + 1]]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["delay_ps", "expected_prob", "counts", "pairs"])
        for p in self.points:
            w.writerow([repr(float(p.delay)), repr(float(p.expected_prob)),
                        "" if p.counts is None else int(p.counts), self.pairs_per_point])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ScanResult":
        rows = list(csv.DictReader(io.StringIO(text)))
        points = [ScanPoint(float(r["delay_ps"]), float(r["expected_prob"]),
                            int(r["counts"]) if r["counts"] else None) for r in rows]
        pairs = int(rows[0]["pairs"]) if rows else 0
        return cls(points, pairs)


def _kernel(keys_a, keys_b, delay: float, coherence_time: float) -> np.ndarray:
    """K[i, j] = [pol_i == pol_j] g(t_i + delay - t_j) with arm a shifted by delay."""
    pa = np.array([p == Pol.H for p, _ in keys_a])
    pb = np.array([p == Pol.H for p, _ in keys_b])
    ta = np.array([t for _, t in keys_a]) + delay
    tb = np.array([t for _, t in keys_b])
    same = pa[:, None] == pb[None, :]
    return same * time_overlap(ta[:, None] - tb[None, :], coherence_time)


def _grid(recipe: PairRecipe, quad_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Product quadrature grid over all random slots of one arm."""
    k = recipe.slots
    phis, w = recipe.phase_dist.nodes(quad_points)
    if k == 0:
        return np.zeros((1, 0)), np.ones(1)
    grid = np.array(np.meshgrid(*([phis] * k), indexing="ij")).reshape(k, -1).T
    weights = np.prod(np.array(np.meshgrid(*([w] * k), indexing="ij")).reshape(k, -1), axis=0)
    return grid, weights


def expected_scan(recipe: PairRecipe, delays: Sequence[float], model: InterferometerModel,
                  quad_points: int = 256) -> ScanResult:
    """Ensemble-averaged coincidence probability at each path delay.

    Discrete phase distributions are summed exactly; a uniform interval uses
    ``quad_points``-node Gauss-Legendre quadrature per random slot.
    """
    grid, w = _grid(recipe, quad_points)
    keys_a, amp_a = propagate(recipe.arm_a, grid)
    keys_b, amp_b = propagate(recipe.arm_b, grid)
    points = []
    for d in delays:
        k = _kernel(keys_a, keys_b, float(d), model.coherence_time)
        if recipe.correlation is Correlation.CORRELATED:
            o2 = np.abs(np.einsum("ni,ij,nj->n", amp_a.conj(), k, amp_b)) ** 2
            mean_o2 = float(w @ o2)
        else:
            o2 = np.abs(amp_a.conj() @ k @ amp_b.T) ** 2
            mean_o2 = float(w @ o2 @ w)
        points.append(ScanPoint(float(d), 0.5 * (1.0 - model.visibility * mean_o2)))
    return ScanResult(points, 0)


def pair_probabilities(recipe: PairRecipe, delay: float, model: InterferometerModel,
                       rng: np.random.Generator, n_pairs: int) -> np.ndarray:
    """Per-pair coincidence probabilities for ``n_pairs`` freshly sampled pairs."""
    pa, pb = draw_phases(recipe, rng, n_pairs)
    keys_a, amp_a = propagate(recipe.arm_a, pa)
    keys_b, amp_b = propagate(recipe.arm_b, pb)
    k = _kernel(keys_a, keys_b, delay, model.coherence_time)
    o = np.einsum("ni,ij,nj->n", amp_a.conj(), k, amp_b)
    return 0.5 * (1.0 - model.visibility * np.abs(o) ** 2)


def simulate_scan(recipe: PairRecipe, delays: Sequence[float], model: InterferometerModel,
                  n_pairs: int, seed: int, quad_points: int = 256) -> ScanResult:
    """Monte Carlo coincidence counts, ``n_pairs`` pairs per delay.

    Point ``i`` draws from ``default_rng(seed + i)`` so points are
    independent and can be computed in any order.
    """
    if n_pairs < 1:
        raise ValueError("need at least one pair per point")
    exp = expected_scan(recipe, delays, model, quad_points)
    points = []
    for i, (d, ep) in enumerate(zip(delays, exp.points)):
        rng = np.random.default_rng(seed + i)
        p = pair_probabilities(recipe, float(d), model, rng, n_pairs)
        hits = int(np.count_nonzero(rng.random(n_pairs) < p))
        points.append(ScanPoint(float(d), ep.expected_prob, hits))
    return ScanResult(points, n_pairs)


def scan_grid(halfwidth: float, step: float) -> np.ndarray:
    """Symmetric grid ``k * step`` for |k * step| <= halfwidth (0 included)."""
    n = int(np.floor(halfwidth / step + 1e-9))
    return np.arange(-n, n + 1) * step

"""Purity from HOM coincidence counts.

The dip-to-baseline ratio ``r = C_dip / C_base`` obeys
``r = 1 - v Tr(rho_a rho_b)`` in the beamsplitter model, so the default
(``physical``) estimate is ``P = (1 - r) / v``.  The ``paper-literal`` mode
instead treats ``r / 2`` as the measured singlet weight and removes the
white-noise part of ``0.1 I + 0.9 |psi-><psi-|`` generalized to any ``v``:
``s = (r/2 - (1 - v)) / v`` and ``P = 1 - 2 s``.  The two modes agree at
``v = 1``.  Estimates are never clamped to [0.5, 1].
"""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .hom import InterferometerModel, expected_scan, simulate_scan
from .prep import PairRecipe

BASELINE_DELAY_FACTOR = 20.0  # baseline measured at 20 coherence times


class EstimatorMode(str, enum.Enum):
    PHYSICAL = "physical"
    PAPER_LITERAL = "paper-literal"


@dataclass(frozen=True)
class PurityEstimate:
    value: float
    std_error: float
    n: int
    mode: EstimatorMode
    ratio: float = float("nan")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        return d

    def to_json(self) -> str:
        d = self.to_dict()
        return json.dumps({k: d[k] for k in ("value", "std_error", "n", "mode")}, sort_keys=True)


def ratio_to_purity(r, v: float, mode: EstimatorMode = EstimatorMode.PHYSICAL):
    mode = EstimatorMode(mode)
    if mode is EstimatorMode.PHYSICAL:
        return (1.0 - r) / v
    s = (np.asarray(r) / 2.0 - (1.0 - v)) / v
    return 1.0 - 2.0 * s


def estimate_direct(c_dip: int, c_base: int, v: float,
                    mode: EstimatorMode = EstimatorMode.PHYSICAL,
                    n_pairs: int | None = None, visibility_error: float = 0.0) -> PurityEstimate:
    """Purity estimate from dip and baseline coincidence counts.

    With ``n_pairs`` the counts are treated as binomial out of ``n_pairs``
    trials each, otherwise as Poisson.  ``visibility_error`` optionally
    folds an uncertainty on the calibrated visibility into the error.
    """
    if c_base <= 0:
        raise ValueError("baseline counts must be positive")
    if not 0.0 < v <= 1.0:
        raise ValueError(f"visibility must be in (0, 1], got {v}")
    mode = EstimatorMode(mode)
    r = c_dip / c_base
    value = float(ratio_to_purity(r, v, mode))

    def var(c):
        if n_pairs:
            p = c / n_pairs
            return n_pairs * p * (1.0 - p)
        return float(c)

    rel2 = var(c_base) / c_base ** 2 + (var(c_dip) / c_dip ** 2 if c_dip > 0 else 0.0)
    var_r = r ** 2 * rel2
    # both modes have dP/dr = -1/v
    var_p = var_r / v ** 2
    if visibility_error:
        if mode is EstimatorMode.PHYSICAL:
            dp_dv = -value / v
        else:
            dp_dv = (r - 2.0) / v ** 2
        var_p += (dp_dv * visibility_error) ** 2
    n = int(n_pairs) if n_pairs else int(c_base)
    return PurityEstimate(value, float(np.sqrt(var_p)), n, mode, float(r))


def baseline_delay(model: InterferometerModel) -> float:
    return BASELINE_DELAY_FACTOR * model.coherence_time


def estimate_from_recipe(recipe: PairRecipe, model: InterferometerModel, n_pairs: int, seed: int,
                         mode: EstimatorMode = EstimatorMode.PHYSICAL,
                         base_delay: float | None = None) -> PurityEstimate:
    """Simulate dip (zero delay) and baseline counts and estimate the purity."""
    if n_pairs < 100:
        raise ValueError("need at least 100 pairs per point")
    base = baseline_delay(model) if base_delay is None else base_delay
    scan = simulate_scan(recipe, [0.0, base], model, n_pairs, seed)
    c_dip, c_base = scan.points[0].counts, scan.points[1].counts
    return estimate_direct(c_dip, c_base, model.visibility, mode, n_pairs=n_pairs)


def expected_estimate(recipe: PairRecipe, model: InterferometerModel,
                      mode: EstimatorMode = EstimatorMode.PHYSICAL,
                      base_delay: float | None = None) -> float:
    """Large-N limit of :func:`estimate_from_recipe`."""
    base = baseline_delay(model) if base_delay is None else base_delay
    scan = expected_scan(recipe, [0.0, base], model)
    r = scan.points[0].expected_prob / scan.points[1].expected_prob
    return float(ratio_to_purity(r, model.visibility, mode))


@dataclass(frozen=True)
class ShotNoiseRow:
    n: int
    rms_error: float
    fraction_unphysical: float
    fraction_above_one: float
    fraction_below_half: float
    mean: float


def shot_noise_study(recipe: PairRecipe, model: InterferometerModel, n_list: Sequence[int],
                     trials: int, seed: int,
                     mode: EstimatorMode = EstimatorMode.PHYSICAL) -> list[ShotNoiseRow]:
    """Spread of repeated purity estimates versus pair count.

    Errors are taken around the analytic large-N value.  Trial ``t`` at the
    ``j``-th pair count uses seed ``seed + 2 * (j * trials + t)`` (each
    estimate consumes two consecutive seeds).
    """
    if trials < 30:
        raise ValueError("need at least 30 trials per pair count")
    truth = expected_estimate(recipe, model, mode)
    rows = []
    for j, n in enumerate(n_list):
        vals = np.array([
            estimate_from_recipe(recipe, model, int(n), seed + 2 * (j * trials + t), mode).value
            for t in range(trials)
        ])
        above, below = vals > 1.0, vals < 0.5
        rows.append(ShotNoiseRow(
            int(n),
            float(np.sqrt(np.mean((vals - truth) ** 2))),
            float(np.mean(above | below)),
            float(np.mean(above)),
            float(np.mean(below)),
            float(vals.mean()),
        ))
    return rows


def loglog_slope(rows: Sequence[ShotNoiseRow]) -> float:
    x = np.log([r.n for r in rows])
    y = np.log([r.rms_error for r in rows])
    return float(np.polyfit(x, y, 1)[0])

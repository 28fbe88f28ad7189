"""Named reproduction scenarios.

Each scenario maps a :class:`ScenarioConfig` to a JSON-ready result dict
plus a set of CSV/JSON artifacts.  All randomness derives from
``config.seed``: sub-task ``k`` of a scenario uses ``seed + 10 * k`` for its
coincidence simulation (which itself consumes ``+0, +1, ...`` per scan
point) and ``seed + 10 * k + 5`` for tomography.  Delay scans and
shot-noise studies consume one seed per point or trial, so they start from
the sub-task seed times 10**3 or 10**6 to stay clear of the others.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict
from pathlib import Path
from typing import Callable

import numpy as np

from . import brun, quantum as q, tomography as tomo
from .config import ScenarioConfig
from .estimator import (EstimatorMode, estimate_from_recipe, expected_estimate, loglog_slope,
                        shot_noise_study)
from .hom import InterferometerModel, ScanResult, expected_scan, scan_grid, simulate_scan
from .prep import (MIXED_STATES, TABLE1_STATES, TABLE1_THEORY, Correlation,
                   ensemble_density_matrix, get_preparation, quartz_recipe)

Artifacts = dict[str, str]


def _model(cfg: ScenarioConfig) -> InterferometerModel:
    return InterferometerModel(cfg.visibility, cfg.coherence_time_ps)


def _mode(cfg: ScenarioConfig) -> EstimatorMode:
    return EstimatorMode(cfg.mode)


def _sub_seed(cfg: ScenarioConfig, k: int, tomo_offset: bool = False) -> int:
    return cfg.seed + 10 * k + (5 if tomo_offset else 0)


def _tomography(cfg: ScenarioConfig, rho, k: int) -> tuple[tomo.CountRecord, tomo.TomographyResult]:
    raw = tomo.simulate_counts(rho, cfg.tomo_n_per_setting, cfg.tomo_background,
                               _sub_seed(cfg, k, tomo_offset=True))
    return raw, tomo.reconstruct(tomo.subtract_background(raw))


def _tomo_summary(res: tomo.TomographyResult) -> dict:
    return {"value": res.purity_physical, "std_error": res.purity_std_error,
            "purity_linear": res.purity_linear}


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def table1(cfg: ScenarioConfig) -> tuple[dict, Artifacts]:
    model, mode = _model(cfg), _mode(cfg)
    states, rows = [], []
    for k, prep in enumerate(TABLE1_STATES):
        direct = estimate_from_recipe(prep.recipe(), model, cfg.pairs, _sub_seed(cfg, k), mode)
        _, res = _tomography(cfg, prep.density_matrix(), k)
        theory = TABLE1_THEORY[prep.name]
        states.append({
            "state": prep.name,
            "label": prep.label,
            "direct": direct.to_dict(),
            "tomographic": _tomo_summary(res),
            "theoretical": theory,
        })
        rows.append((prep.name, direct.value, direct.std_error, res.purity_physical,
                     res.purity_std_error, theory))
    text = _csv(["state", "direct", "direct_err", "tomographic", "tomographic_err", "theoretical"],
                rows)
    return {"states": states}, {"table1.csv": text}


def fig2(cfg: ScenarioConfig) -> tuple[dict, Artifacts]:
    out, files = {}, {}
    for k, prep in enumerate(TABLE1_STATES):
        raw, res = _tomography(cfg, prep.density_matrix(), k)
        out[prep.name] = res.to_dict()
        files[f"fig2_{prep.name}_counts.csv"] = raw.to_csv()
    files["fig2_density_matrices.json"] = json.dumps(out, sort_keys=True, indent=2) + "\n"
    return {"density_matrices": out}, files


def _scan_summary(scan: ScanResult, mc: ScanResult, cfg: ScenarioConfig) -> dict:
    mins = scan.local_minima()
    vis = scan.visibility()
    n = mc.pairs_per_point
    mc_frac = mc.counts / n
    base = mc.empirical_baseline() if cfg.baseline == "empirical" else scan.baseline_prob
    return {
        "minima": [{
            "delay_ps": float(scan.delays[i]),
            "expected_prob": float(scan.expected[i]),
            "visibility": float(vis[i]),
            "implied_purity": float(vis[i] / cfg.visibility),
            "mc_prob": float(mc_frac[i]),
            "mc_std_error": float(np.sqrt(mc_frac[i] * (1 - mc_frac[i]) / n)),
            "mc_visibility": float(1 - mc_frac[i] / base),
        } for i in mins],
        "prob_at_zero": float(scan.expected[np.argmin(np.abs(scan.delays))]),
        "empirical_baseline": mc.empirical_baseline(),
        "analytic_baseline": scan.baseline_prob,
        "baseline_mode": cfg.baseline,
    }


def _scan(cfg: ScenarioConfig, recipe, halfwidth: float, k: int) -> tuple[ScanResult, ScanResult]:
    model = _model(cfg)
    delays = scan_grid(halfwidth, cfg.step)
    mc = simulate_scan(recipe, delays, model, cfg.scan_pairs, _sub_seed(cfg, k) * 1000)
    return expected_scan(recipe, delays, model), mc


def fig3a(cfg: ScenarioConfig) -> tuple[dict, Artifacts]:
    recipe = get_preparation("mix_pm").recipe()
    scan, mc = _scan(cfg, recipe, 10 * cfg.coherence_time_ps, 0)
    return _scan_summary(scan, mc, cfg), {"fig3a_scan.csv": mc.to_csv()}


def fig3b(cfg: ScenarioConfig) -> tuple[dict, Artifacts]:
    tau = cfg.quartz_delay_ps
    recipe = quartz_recipe(tau, aligned=False)
    scan, mc = _scan(cfg, recipe, 2 * tau + 10 * cfg.coherence_time_ps, 0)
    summary = _scan_summary(scan, mc, cfg)
    summary["quartz_delay_ps"] = tau
    return summary, {"fig3b_scan.csv": mc.to_csv()}


def correlated_lc(cfg: ScenarioConfig) -> tuple[dict, Artifacts]:
    model, mode = _model(cfg), _mode(cfg)
    states, rows = [], []
    for k, prep in enumerate(MIXED_STATES):
        corr = estimate_from_recipe(prep.recipe(Correlation.CORRELATED), model, cfg.pairs,
                                    _sub_seed(cfg, 2 * k), mode)
        indep = estimate_from_recipe(prep.recipe(Correlation.INDEPENDENT), model, cfg.pairs,
                                     _sub_seed(cfg, 2 * k + 1), mode)
        _, res = _tomography(cfg, prep.density_matrix(), 2 * k)
        theory = TABLE1_THEORY[prep.name]
        states.append({"state": prep.name, "direct_correlated": corr.to_dict(),
                       "direct_independent": indep.to_dict(), "tomographic": _tomo_summary(res),
                       "theoretical": theory})
        rows.append((prep.name, corr.value, corr.std_error, indep.value, indep.std_error,
                     res.purity_physical, res.purity_std_error, theory))
    text = _csv(["state", "direct_correlated", "direct_correlated_err", "direct_independent",
                 "direct_independent_err", "tomographic", "tomographic_err", "theoretical"], rows)
    return {"states": states}, {"correlated_lc.csv": text}


def correlated_quartz(cfg: ScenarioConfig) -> tuple[dict, Artifacts]:
    model, mode = _model(cfg), _mode(cfg)
    tau = cfg.quartz_delay_ps
    aligned = quartz_recipe(tau, aligned=True)
    direct = estimate_from_recipe(aligned, model, cfg.pairs, _sub_seed(cfg, 0), mode)
    rho = ensemble_density_matrix(aligned.arm_a, coherence_time=cfg.coherence_time_ps)
    _, res = _tomography(cfg, rho, 0)
    scan, mc = _scan(cfg, aligned, 2 * tau + 10 * cfg.coherence_time_ps, 1)
    summary = {
        "direct": direct.to_dict(),
        "tomographic": _tomo_summary(res),
        "theoretical_polarization_purity": q.purity(rho),
        "scan": _scan_summary(scan, mc, cfg),
        "quartz_delay_ps": tau,
    }
    return summary, {"correlated_quartz_scan.csv": mc.to_csv()}


def shot_noise(cfg: ScenarioConfig) -> tuple[dict, Artifacts]:
    model, mode = _model(cfg), _mode(cfg)
    out, rows = {}, []
    for k, name in enumerate(("plus", "mix_pmr")):
        recipe = get_preparation(name).recipe()
        study = shot_noise_study(recipe, model, cfg.shot_noise_n, cfg.shot_noise_trials,
                                 _sub_seed(cfg, k) * 1_000_000, mode)
        out[name] = {
            "truth": expected_estimate(recipe, model, mode),
            "slope": loglog_slope(study),
            "rows": [asdict(r) for r in study],
        }
        rows += [(name, r.n, r.rms_error, r.fraction_unphysical, r.fraction_above_one,
                  r.fraction_below_half, r.mean) for r in study]
    text = _csv(["state", "pairs", "rms_error", "fraction_unphysical", "fraction_above_one",
                 "fraction_below_half", "mean"], rows)
    return out, {"shot_noise.csv": text}


def brun_verify(cfg: ScenarioConfig) -> tuple[dict, Artifacts]:
    rng = np.random.default_rng(cfg.seed)
    states = [q.random_density_matrix(2, rng) for _ in range(cfg.brun_samples)]
    report = {}
    for name, poly in (("purity", brun.purity_functional()),
                       ("moment3", brun.moment_functional(3)),
                       ("moment4", brun.moment_functional(4))):
        obs = brun.build_observable(poly)
        err = max(abs(obs.expectation(r) - brun.evaluate(poly, r)) for r in states)
        report[name] = {"max_abs_error": float(err), "hermitian": obs.is_hermitian()}
    obs = brun.build_observable(brun.purity_functional()).matrix
    target = np.eye(4) - 2 * q.PSI_MINUS.projector().entries
    report["purity_observable_max_entry_error"] = float(np.abs(obs - target).max())
    report["purity_observable_eigenvalues"] = [float(x) for x in np.linalg.eigvalsh(obs)]
    return report, {}


SCENARIOS: dict[str, Callable[[ScenarioConfig], tuple[dict, Artifacts]]] = {
    "table1": table1,
    "fig2": fig2,
    "fig3a": fig3a,
    "fig3b": fig3b,
    "correlated-lc": correlated_lc,
    "correlated-quartz": correlated_quartz,
    "shot-noise": shot_noise,
    "brun-verify": brun_verify,
}


def run_scenario(cfg: ScenarioConfig) -> tuple[dict, Artifacts]:
    """Run one scenario and return its summary entry and artifacts."""
    fn = SCENARIOS[cfg.scenario]
    results, files = fn(cfg.validate())
    entry = {"name": cfg.scenario, "seed": cfg.seed, "config": cfg.echo(), "results": results,
             "files": sorted(files)}
    return entry, files


def emit_report(results: list[dict], path: str | Path) -> Path:
    """Write the summary JSON with sorted keys so reruns are byte-identical."""
    path = Path(path)
    text = json.dumps({"scenarios": results}, sort_keys=True, indent=2, allow_nan=False) + "\n"
    path.write_text(text, encoding="utf-8", newline="\n")
    return path


def write_artifacts(files: Artifacts, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8", newline="\n")

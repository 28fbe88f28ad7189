"""Scenario configuration read from INI files.

Keys in ``[defaults]`` apply to every scenario; a section named after a
scenario (e.g. ``[fig3b]``) overrides them for that scenario only.

Recognized keys::

    seed                 integer, 0 <= seed < 2**63
    pairs                pairs per point for direct purity estimates
    scan_pairs           pairs per point for delay scans
    visibility           beamsplitter visibility, 0 < v <= 1
    coherence_time_ps    wavepacket coherence time, > 0
    quartz_delay_ps      birefringent group delay of each crystal, > 0
    scan_step_ps         scan grid step (default coherence_time_ps / 10)
    tomo_n_per_setting   photons per tomography setting, >= 1
    tomo_background      expected background counts per setting, >= 0
    mode                 physical | paper-literal
    baseline             analytic | empirical (scan visibilities against 1/2
                         or against the mean of the two outermost scan points)
    shot_noise_n         comma-separated pair counts
    shot_noise_trials    repetitions per pair count, >= 30
    brun_samples         random states in the Brun oracle check
    out_dir              output directory
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .estimator import EstimatorMode


BASELINE_MODES = ("analytic", "empirical")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str = "table1"
    seed: int = 20070101
    pairs: int = 100_000
    scan_pairs: int = 10_000
    visibility: float = 0.90
    coherence_time_ps: float = 0.22
    quartz_delay_ps: float = 0.6
    scan_step_ps: float | None = None
    tomo_n_per_setting: int = 10_000
    tomo_background: float = 5.0
    mode: str = EstimatorMode.PHYSICAL.value
    baseline: str = "analytic"
    shot_noise_n: tuple[int, ...] = (1_000, 10_000, 100_000)
    shot_noise_trials: int = 100
    brun_samples: int = 100
    out_dir: str = "results"

    @property
    def step(self) -> float:
        return self.coherence_time_ps / 10 if self.scan_step_ps is None else self.scan_step_ps

    def validate(self) -> "ScenarioConfig":
        checks = [
            (0 <= self.seed < 2 ** 63, "seed must be in [0, 2**63)"),
            (self.pairs >= 100, "pairs must be >= 100"),
            (self.scan_pairs >= 1, "scan_pairs must be >= 1"),
            (0 < self.visibility <= 1, "visibility must be in (0, 1]"),
            (self.coherence_time_ps > 0, "coherence_time_ps must be > 0"),
            (self.quartz_delay_ps > 0, "quartz_delay_ps must be > 0"),
            (self.step > 0, "scan_step_ps must be > 0"),
            (self.tomo_n_per_setting >= 1, "tomo_n_per_setting must be >= 1"),
            (self.tomo_background >= 0, "tomo_background must be >= 0"),
            (self.mode in {m.value for m in EstimatorMode}, f"unknown mode {self.mode!r}"),
            (self.baseline in BASELINE_MODES, f"unknown baseline {self.baseline!r}"),
            (len(self.shot_noise_n) >= 2 and min(self.shot_noise_n) >= 100,
             "shot_noise_n needs >= 2 entries, each >= 100"),
            (self.shot_noise_trials >= 30, "shot_noise_trials must be >= 30"),
            (self.brun_samples >= 1, "brun_samples must be >= 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        return self

    def echo(self) -> dict:
        # the output location does not affect results, so reruns elsewhere stay byte-identical
        d = asdict(self)
        del d["out_dir"]
        d["shot_noise_n"] = list(self.shot_noise_n)
        d["scan_step_ps"] = self.step
        return d


_FIELDS = {f.name: f for f in fields(ScenarioConfig)}


def _coerce(key: str, raw: str):
    default = getattr(ScenarioConfig, key)
    try:
        if key == "shot_noise_n":
            return tuple(int(x) for x in raw.replace(" ", "").split(",") if x)
        if key == "scan_step_ps":
            return None if raw.strip().lower() in ("", "none", "auto") else float(raw)
        if isinstance(default, bool):
            raise ConfigError(f"unsupported boolean key {key}")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def _apply(cfg: ScenarioConfig, items) -> ScenarioConfig:
    updates = {}
    for key, raw in items:
        if key not in _FIELDS or key == "scenario":
            raise ConfigError(f"unknown config key {key!r}")
        updates[key] = _coerce(key, raw)
    return replace(cfg, **updates)


def load_config(path: str | Path | None, scenario: str) -> ScenarioConfig:
    """Resolve the configuration for one scenario (defaults if ``path`` is None)."""
    cfg = ScenarioConfig(scenario=scenario)
    if path is None:
        return cfg
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__")
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if parser.has_section("defaults"):
        cfg = _apply(cfg, parser.items("defaults"))
    if parser.has_section(scenario):
        cfg = _apply(cfg, parser.items(scenario))
    return cfg

"""Seeded Monte Carlo engine: trials across SNR grids, aggregation, CSV.

Seed splitting rule: every random stream derives from
``numpy.random.SeedSequence((master_seed, snr_index, trial_index), spawn_key=(role,))``
with role 0 for the channel draw, 1 for the estimation-based design and 2
for the perfect-CSI design. Trials therefore never share streams, results
are independent of execution order, and adding or removing modes does not
shift any other mode's randomness.
"""

from __future__ import annotations

import configparser
import dataclasses
import functools
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .beamdesign import DesignConfig, iterate_design
from .channel import frequency_channel, sample_paths
from .codebook import build_codebook, build_dictionary
from .metrics import full_digital_bound, spectral_efficiency

__all__ = [
    "MODES",
    "ConfigError",
    "TrialError",
    "ScenarioConfig",
    "TrialOutcome",
    "CellRecord",
    "SweepResult",
    "load_config",
    "parse_config_text",
    "apply_overrides",
    "config_to_dict",
    "run_trial",
    "run_sweep",
    "emit_csv",
]

MODES = ("cs_estimated", "perfect_csi", "full_digital")
HYBRID_MODES = ("cs_estimated", "perfect_csi")
RECOVERY_CHOICES = ("somp", "omp_per_column")
REVERSE_REG_CHOICES = ("noise_var", "unit")

CSV_HEADER = "snr_db,mode,mean_rate_bps_hz,std_err,trials"


class ConfigError(ValueError):
    """Raised when a scenario configuration violates its invariants."""


class TrialError(RuntimeError):
    """A trial failed; the message carries the trial context."""


def _default_measurements(num_paths: int, grid_size: int) -> int:
    return int(math.ceil(2.0 * num_paths * math.log2(grid_size)))


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulation scenario; field names match the config-file keys."""

    N_t: int = 16
    N_r: int = 16
    N_RF: int = 2
    N_s: int = 2
    N: int = 16
    N_cp: int = 8
    L: int = 3
    codebook_size: int = 64
    dictionary_resolution: float = 2.8125
    M_r: int | None = None
    M_t: int | None = None
    rolloff: float = 0.8
    snr_grid_dB: tuple[float, ...] = (-15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0)
    trials: int = 200
    max_iterations: int = 4
    mode: tuple[str, ...] = MODES
    recovery: str = "somp"
    reverse_reg: str = "noise_var"
    seed: int = 1
    train_snr_dB: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "snr_grid_dB",
                           tuple(float(s) for s in self.snr_grid_dB))
        mode = (self.mode,) if isinstance(self.mode, str) else tuple(self.mode)
        object.__setattr__(self, "mode", mode)
        if self.M_r is None and self.grid_size > 1:
            object.__setattr__(self, "M_r",
                               _default_measurements(self.L, self.grid_size))
        if self.M_t is None and self.grid_size > 1:
            object.__setattr__(self, "M_t",
                               _default_measurements(self.L, self.grid_size))

    @property
    def grid_size(self) -> int:
        return int(round(180.0 / self.dictionary_resolution))

    def validate(self) -> None:
        """Check every invariant; raises ConfigError citing the constraint."""
        counts = {"N_t": self.N_t, "N_r": self.N_r, "N_RF": self.N_RF,
                  "N_s": self.N_s, "N": self.N, "N_cp": self.N_cp, "L": self.L,
                  "codebook_size": self.codebook_size, "M_r": self.M_r,
                  "M_t": self.M_t, "trials": self.trials,
                  "max_iterations": self.max_iterations}
        for name, value in counts.items():
            if value is None or value < 1:
                raise ConfigError(f"{name} must be a positive integer (got {value})")
        if self.N_RF > min(self.N_t, self.N_r):
            raise ConfigError(
                f"N_RF must satisfy N_RF <= min(N_t, N_r) "
                f"(got N_RF={self.N_RF}, N_t={self.N_t}, N_r={self.N_r})")
        if not self.mode:
            raise ConfigError("mode must list at least one mode")
        for m in self.mode:
            if m not in MODES:
                raise ConfigError(f"mode {m!r} is not one of {MODES}")
        if len(set(self.mode)) != len(self.mode):
            raise ConfigError("mode entries must be unique")
        if any(m in HYBRID_MODES for m in self.mode) and self.N_s != self.N_RF:
            raise ConfigError(
                f"N_s must equal N_RF unless mode is only full_digital "
                f"(got N_s={self.N_s}, N_RF={self.N_RF})")
        if self.N_s > min(self.N_t, self.N_r):
            raise ConfigError(
                f"N_s must satisfy N_s <= min(N_t, N_r) (got N_s={self.N_s})")
        if not 0.0 <= self.rolloff <= 1.0:
            raise ConfigError(f"rolloff must lie in [0, 1] (got {self.rolloff})")
        grid = 180.0 / self.dictionary_resolution
        if self.dictionary_resolution <= 0.0 or abs(grid - round(grid)) > 1e-9:
            raise ConfigError(
                f"dictionary_resolution must divide 180 degrees "
                f"(got {self.dictionary_resolution})")
        if self.L > self.grid_size:
            raise ConfigError(
                f"L must not exceed the dictionary grid size "
                f"(L={self.L}, grid={self.grid_size})")
        if self.M_r < self.L or self.M_t < self.L:
            raise ConfigError(
                f"M_r and M_t must be >= L so recovery can reach sparsity L "
                f"(M_r={self.M_r}, M_t={self.M_t}, L={self.L})")
        if not self.snr_grid_dB:
            raise ConfigError("snr_grid_dB must not be empty")
        if len(set(self.snr_grid_dB)) != len(self.snr_grid_dB):
            raise ConfigError("snr_grid_dB entries must be unique")
        if self.recovery not in RECOVERY_CHOICES:
            raise ConfigError(f"recovery must be one of {RECOVERY_CHOICES}")
        if self.reverse_reg not in REVERSE_REG_CHOICES:
            raise ConfigError(f"reverse_reg must be one of {REVERSE_REG_CHOICES}")
        if self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")


# ---------------------------------------------------------------------------
# config file parsing
# ---------------------------------------------------------------------------

def _parse_int(text: str) -> int:
    return int(text.strip())

def _parse_float(text: str) -> float:
    return float(text.strip())

def _parse_float_list(text: str) -> tuple[float, ...]:
    parts = [p for chunk in text.split(",") for p in chunk.split()]
    if not parts:
        raise ValueError("empty list")
    return tuple(float(p) for p in parts)

def _parse_mode(text: str) -> tuple[str, ...]:
    text = text.strip()
    if text.lower() == "all":
        return MODES
    parts = [p.strip() for chunk in text.split(",") for p in chunk.split()]
    return tuple(p for p in parts if p)

def _parse_str(text: str) -> str:
    return text.strip()


_FIELD_PARSERS = {
    "N_t": _parse_int, "N_r": _parse_int, "N_RF": _parse_int, "N_s": _parse_int,
    "N": _parse_int, "N_cp": _parse_int, "L": _parse_int,
    "codebook_size": _parse_int, "M_r": _parse_int, "M_t": _parse_int,
    "trials": _parse_int, "max_iterations": _parse_int, "seed": _parse_int,
    "dictionary_resolution": _parse_float, "rolloff": _parse_float,
    "train_snr_dB": _parse_float,
    "snr_grid_dB": _parse_float_list,
    "mode": _parse_mode,
    "recovery": _parse_str, "reverse_reg": _parse_str,
}


def parse_config_text(text: str) -> ScenarioConfig:
    """Parse ``key = value`` lines grouped in arbitrary sections.

    Keys must be ScenarioConfig field names; sections only organize the file.
    Unknown or duplicated keys are rejected before any computation.
    """
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keys are case sensitive
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file: {exc}") from exc
    kwargs = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            if key not in _FIELD_PARSERS:
                raise ConfigError(f"unknown config key {key!r} in section [{section}]")
            if key in kwargs:
                raise ConfigError(f"config key {key!r} appears more than once")
            try:
                kwargs[key] = _FIELD_PARSERS[key](value)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {value!r} ({exc})") from exc
    return ScenarioConfig(**kwargs)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text)


def apply_overrides(config: ScenarioConfig, overrides) -> ScenarioConfig:
    """Apply ``key=value`` override strings; unknown keys are rejected."""
    updates = {}
    for item in overrides:
        key, sep, value = str(item).partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        if key not in _FIELD_PARSERS:
            raise ConfigError(f"unknown override key {key!r}")
        try:
            updates[key] = _FIELD_PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {value!r} ({exc})") from exc
    return dataclasses.replace(config, **updates)


def config_to_dict(config: ScenarioConfig) -> dict:
    out = dataclasses.asdict(config)
    out["snr_grid_dB"] = list(config.snr_grid_dB)
    out["mode"] = list(config.mode)
    return out


# ---------------------------------------------------------------------------
# trials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrialOutcome:
    """Per-mode results of one trial on a shared channel realization."""

    rates: dict  # mode -> mean rate, bits/s/Hz
    iterations: dict  # hybrid mode -> trace length
    converged: dict  # hybrid mode -> bool
    traces: dict  # hybrid mode -> tuple of (combiner indices, precoder indices)


@functools.lru_cache(maxsize=8)
def _resources(n_t, n_r, codebook_size, resolution):
    return (build_codebook(n_t, codebook_size),
            build_codebook(n_r, codebook_size),
            build_dictionary(n_t, resolution),
            build_dictionary(n_r, resolution))


def _seed_for(config: ScenarioConfig, snr_index: int, trial_index: int,
              role: int) -> np.random.SeedSequence:
    return np.random.SeedSequence((config.seed, snr_index, trial_index),
                                  spawn_key=(role,))


def _design_config(config: ScenarioConfig, train_noise_std: float,
                   perfect: bool) -> DesignConfig:
    return DesignConfig(
        num_chains=config.N_RF, num_streams=config.N_s,
        max_iterations=config.max_iterations,
        measurements_rx=config.M_r, measurements_tx=config.M_t,
        train_noise_std=0.0 if perfect else train_noise_std,
        max_sparsity=config.L, reverse_reg=config.reverse_reg,
        recovery=config.recovery, perfect_csi=perfect)


def run_trial(config: ScenarioConfig, snr_db: float, trial_index: int) -> TrialOutcome:
    """Run one seeded trial at a grid SNR and return per-mode rates.

    All configured modes share the channel realization derived from
    (seed, snr index, trial index); identical inputs give identical outputs.
    """
    config.validate()
    snr_db = float(snr_db)
    try:
        snr_index = config.snr_grid_dB.index(snr_db)
    except ValueError:
        raise ConfigError(
            f"snr_db {snr_db} is not on the configured grid {config.snr_grid_dB}")
    try:
        return _run_trial_inner(config, snr_db, snr_index, trial_index)
    except (np.linalg.LinAlgError, ValueError, FloatingPointError) as exc:
        raise TrialError(
            f"harness: trial {trial_index} at {snr_db} dB (seed {config.seed}) "
            f"failed: {exc}") from exc


def _run_trial_inner(config, snr_db, snr_index, trial_index) -> TrialOutcome:
    power = 10.0 ** (snr_db / 10.0)
    noise_var = 1.0
    train_snr = snr_db if config.train_snr_dB is None else config.train_snr_dB
    train_noise_std = math.sqrt(10.0 ** (-train_snr / 10.0))
    tx_cb, rx_cb, tx_dict, rx_dict = _resources(
        config.N_t, config.N_r, config.codebook_size, config.dictionary_resolution)
    channel_rng = np.random.default_rng(_seed_for(config, snr_index, trial_index, 0))
    paths = sample_paths(channel_rng, config.L, config.N_cp, 1.0)
    channel = frequency_channel(paths, config.N, 1.0, config.N_r, config.N_t,
                                config.rolloff)
    rates, iterations, converged, traces = {}, {}, {}, {}
    for mode in config.mode:
        if mode == "full_digital":
            report = full_digital_bound(channel, power, noise_var, config.N_s)
        else:
            perfect = mode == "perfect_csi"
            rng = np.random.default_rng(
                _seed_for(config, snr_index, trial_index, 2 if perfect else 1))
            outcome = iterate_design(
                channel, (tx_cb, rx_cb), None if perfect else (tx_dict, rx_dict),
                _design_config(config, train_noise_std, perfect), rng)
            report = spectral_efficiency(channel, outcome.beamformer, power,
                                         noise_var, config.N_s)
            iterations[mode] = len(outcome.trace)
            converged[mode] = outcome.converged
            traces[mode] = tuple((rec.combiner.indices, rec.precoder.indices)
                                 for rec in outcome.trace)
        rates[mode] = report.mean_rate
    return TrialOutcome(rates=rates, iterations=iterations, converged=converged,
                        traces=traces)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CellRecord:
    snr_db: float
    mode: str
    mean_rate: float
    std_err: float
    trials_used: int


@dataclass(frozen=True)
class SweepResult:
    records: tuple[CellRecord, ...]
    metadata: dict


def run_sweep(config: ScenarioConfig) -> SweepResult:
    """Run trials over the full (SNR, mode) grid and aggregate statistics.

    Any failing trial aborts the sweep with its context; partial results are
    never returned.
    """
    config.validate()
    samples = {(snr, mode): [] for snr in config.snr_grid_dB for mode in config.mode}
    for snr in config.snr_grid_dB:
        for trial in range(config.trials):
            outcome = run_trial(config, snr, trial)
            for mode in config.mode:
                samples[(snr, mode)].append(outcome.rates[mode])
    if config.trials == 1:
        print("warning: trials=1, standard errors are 0 by convention",
              file=sys.stderr)
    records = []
    for (snr, mode), values in samples.items():
        arr = np.asarray(values)
        if arr.size > 1:
            std_err = float(arr.std(ddof=1) / math.sqrt(arr.size))
        else:
            std_err = 0.0
        records.append(CellRecord(snr_db=float(snr), mode=mode,
                                  mean_rate=float(arr.mean()), std_err=std_err,
                                  trials_used=int(arr.size)))
    records.sort(key=lambda r: (r.mode, r.snr_db))
    metadata = {
        "artifact_version": __version__,
        "seed": config.seed,
        "config": config_to_dict(config),
        "degenerate_std_err": config.trials == 1,
    }
    return SweepResult(records=tuple(records), metadata=metadata)


def emit_csv(result: SweepResult, destination) -> None:
    """Write the sweep as CSV plus a JSON sidecar with the config echo.

    Floats are written with shortest round-trip precision; rows are sorted
    by (mode, snr_db). The sidecar lands at ``<destination>.meta.json``.
    """
    dest = Path(destination)
    lines = [CSV_HEADER]
    for rec in sorted(result.records, key=lambda r: (r.mode, r.snr_db)):
        lines.append(f"{rec.snr_db!r},{rec.mode},{rec.mean_rate!r},"
                     f"{rec.std_err!r},{rec.trials_used}")
    try:
        dest.write_text("\n".join(lines) + "\n")
        Path(str(dest) + ".meta.json").write_text(
            json.dumps(result.metadata, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise RuntimeError(f"harness: cannot write results to {dest}: {exc}") from exc

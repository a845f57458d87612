"""Frequency-selective geometric multipath channel for half-wavelength ULAs.

A realization is a small set of discrete propagation paths (complex gain,
delay, arrival/departure angle). The per-subcarrier matrices follow from
pulse-shaped delay taps combined with transmit/receive steering vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import _raised_cosine_array, freq_response

__all__ = [
    "PathSet",
    "ChannelRealization",
    "array_response",
    "steering_matrix",
    "raised_cosine",
    "sample_paths",
    "frequency_channel",
]

HALF_PI = np.pi / 2.0


def array_response(angle: float, num_elements: int) -> np.ndarray:
    """Steering vector of a half-wavelength uniform linear array.

    Element ``n`` carries phase ``exp(1j*pi*n*sin(angle))``; every entry has
    unit magnitude.
    """
    if num_elements < 1:
        raise ValueError("num_elements must be >= 1")
    if not np.isfinite(angle):
        raise ValueError("angle must be finite")
    return np.exp(1j * np.pi * np.arange(num_elements) * np.sin(angle))


def steering_matrix(angles, num_elements: int) -> np.ndarray:
    """Stack of steering vectors, one column per angle."""
    angles = np.asarray(angles, dtype=np.float64)
    if num_elements < 1:
        raise ValueError("num_elements must be >= 1")
    if not np.all(np.isfinite(angles)):
        raise ValueError("angles must be finite")
    return np.exp(1j * np.pi * np.outer(np.arange(num_elements), np.sin(angles)))


def raised_cosine(t, sample_period: float, rolloff: float):
    """Raised-cosine impulse response evaluated at time offset(s) ``t``.

    Unit peak at t=0 and zero crossings at nonzero integer multiples of the
    sample period. Continuous in t: the removable singularities for
    rolloff > 0 use the analytic limit.
    """
    if sample_period <= 0.0:
        raise ValueError("sample_period must be positive")
    if not 0.0 <= rolloff <= 1.0:
        raise ValueError("rolloff must lie in [0, 1]")
    out = _raised_cosine_array(t, float(sample_period), float(rolloff))
    if np.ndim(out) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class PathSet:
    """Discrete propagation paths: gains, delays and angles, equal length."""

    gains: np.ndarray
    delays: np.ndarray
    aoa: np.ndarray
    aod: np.ndarray

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=np.complex128)
        delays = np.asarray(self.delays, dtype=np.float64)
        aoa = np.asarray(self.aoa, dtype=np.float64)
        aod = np.asarray(self.aod, dtype=np.float64)
        n = gains.shape[0]
        if n < 1:
            raise ValueError("at least one path is required")
        for name, arr in (("delays", delays), ("aoa", aoa), ("aod", aod)):
            if arr.shape != (n,):
                raise ValueError(f"{name} must have the same length as gains")
        if np.any(delays < 0.0) or not np.all(np.isfinite(delays)):
            raise ValueError("delays must be finite and nonnegative")
        for name, arr in (("aoa", aoa), ("aod", aod)):
            if np.any(np.abs(arr) > HALF_PI + 1e-12):
                raise ValueError(f"{name} must lie in [-pi/2, pi/2]")
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "delays", delays)
        object.__setattr__(self, "aoa", aoa)
        object.__setattr__(self, "aod", aod)

    @property
    def count(self) -> int:
        return int(self.gains.shape[0])


def sample_paths(rng: np.random.Generator, num_paths: int, cp_length: int,
                 sample_period: float = 1.0) -> PathSet:
    """Draw a random path set.

    Gains are circularly-symmetric complex Gaussian with unit variance,
    delays uniform on [0, (cp_length - 1) * sample_period] so the delay
    spread stays inside the cyclic prefix, and both angle sets uniform on
    [-pi/2, pi/2]. Deterministic for a given generator state.
    """
    if num_paths < 1:
        raise ValueError("num_paths must be >= 1")
    if cp_length < 1:
        raise ValueError("cp_length must be >= 1")
    if sample_period <= 0.0:
        raise ValueError("sample_period must be positive")
    gains = (rng.standard_normal(num_paths) + 1j * rng.standard_normal(num_paths))
    gains /= np.sqrt(2.0)
    delays = rng.uniform(0.0, (cp_length - 1) * sample_period, size=num_paths)
    aoa = rng.uniform(-HALF_PI, HALF_PI, size=num_paths)
    aod = rng.uniform(-HALF_PI, HALF_PI, size=num_paths)
    return PathSet(gains=gains, delays=delays, aoa=aoa, aod=aod)


@dataclass(frozen=True)
class ChannelRealization:
    """A path set together with its per-subcarrier frequency-domain matrices."""

    paths: PathSet
    num_subcarriers: int
    freq_matrices: np.ndarray  # (num_subcarriers, num_rx, num_tx)

    def __post_init__(self):
        h = np.asarray(self.freq_matrices, dtype=np.complex128)
        if h.ndim != 3 or h.shape[0] != self.num_subcarriers:
            raise ValueError("freq_matrices must be (num_subcarriers, num_rx, num_tx)")
        object.__setattr__(self, "freq_matrices", h)

    @property
    def num_rx(self) -> int:
        return int(self.freq_matrices.shape[1])

    @property
    def num_tx(self) -> int:
        return int(self.freq_matrices.shape[2])


def frequency_channel(paths: PathSet, num_subcarriers: int, sample_period: float,
                      num_rx: int, num_tx: int, rolloff: float) -> ChannelRealization:
    """Per-subcarrier channel matrices from a path set.

    Each delay tap d in 0..num_subcarriers-1 contributes the pulse-weighted
    sum of rank-one steering outer products, rotated by the tap's DFT phase
    for every subcarrier.
    """
    if num_subcarriers < 1:
        raise ValueError("num_subcarriers must be >= 1")
    if num_rx < 1 or num_tx < 1:
        raise ValueError("antenna counts must be >= 1")
    if sample_period <= 0.0:
        raise ValueError("sample_period must be positive")
    if not 0.0 <= rolloff <= 1.0:
        raise ValueError("rolloff must lie in [0, 1]")
    h = freq_response(paths.gains, paths.delays, paths.aoa, paths.aod,
                      num_subcarriers, sample_period, num_rx, num_tx, rolloff)
    return ChannelRealization(paths=paths, num_subcarriers=int(num_subcarriers),
                              freq_matrices=h)

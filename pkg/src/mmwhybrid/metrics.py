"""Spectral-efficiency evaluation and the unconstrained digital baseline.

Rates are always evaluated on the true channel; when a design was produced
from estimates, any estimation error shows up as rate loss here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beamdesign import HybridBeamformer
from .channel import ChannelRealization

__all__ = ["RateReport", "spectral_efficiency", "full_digital_bound"]

_LN2 = np.log(2.0)


@dataclass(frozen=True)
class RateReport:
    per_subcarrier_rate: np.ndarray  # bits/s/Hz, one entry per subcarrier
    mean_rate: float

    def __post_init__(self):
        rates = np.asarray(self.per_subcarrier_rate, dtype=np.float64)
        object.__setattr__(self, "per_subcarrier_rate", rates)
        object.__setattr__(self, "mean_rate", float(self.mean_rate))


def _channel_array(channel) -> np.ndarray:
    h = channel.freq_matrices if isinstance(channel, ChannelRealization) \
        else np.asarray(channel, dtype=np.complex128)
    if h.ndim != 3:
        raise ValueError("channel must be (num_subcarriers, num_rx, num_tx)")
    return h


def spectral_efficiency(channel, beamformer: HybridBeamformer, power: float,
                        noise_var: float, num_streams: int) -> RateReport:
    """Mean log-det rate of the hybrid link over subcarriers.

    Per subcarrier the rate is log2 det(I + (P/Ns) Rn^{-1} G G^H) where G is
    the full transmit-to-output cascade through the true channel and Rn the
    combined noise covariance at the combiner output.
    """
    h = _channel_array(channel)
    if power < 0.0:
        raise ValueError("power must be >= 0")
    if noise_var <= 0.0:
        raise ValueError("noise_var must be positive")
    n = h.shape[0]
    f_rf, w_rf = beamformer.f_rf, beamformer.w_rf
    rates = np.empty(n, dtype=np.float64)
    eye = np.eye(num_streams, dtype=np.complex128)
    for k in range(n):
        w = w_rf @ beamformer.w_bb[k]
        g = np.conj(w.T) @ h[k] @ f_rf @ beamformer.f_bb[k]
        rn = noise_var * (np.conj(w.T) @ w)
        try:
            chol = np.linalg.cholesky(rn)
        except np.linalg.LinAlgError as exc:
            raise ValueError(
                f"combiner noise covariance is singular at subcarrier {k}") from exc
        whitened = np.linalg.solve(chol, g)
        m = eye + (power / num_streams) * (whitened @ np.conj(whitened.T))
        m = 0.5 * (m + np.conj(m.T))
        _, logdet = np.linalg.slogdet(m)
        rates[k] = max(float(logdet) / _LN2, 0.0)
    return RateReport(per_subcarrier_rate=rates, mean_rate=float(rates.mean()))


def full_digital_bound(channel, power: float, noise_var: float,
                       num_streams: int) -> RateReport:
    """Unconstrained-digital upper bound with equal power on the top modes."""
    h = _channel_array(channel)
    if power < 0.0:
        raise ValueError("power must be >= 0")
    if noise_var <= 0.0:
        raise ValueError("noise_var must be positive")
    if num_streams < 1 or num_streams > min(h.shape[1], h.shape[2]):
        raise ValueError("num_streams must satisfy 1 <= num_streams <= min(num_rx, num_tx)")
    sv = np.linalg.svd(h, compute_uv=False)[:, :num_streams]
    rates = np.log2(1.0 + (power / (num_streams * noise_var)) * sv ** 2).sum(axis=1)
    return RateReport(per_subcarrier_rate=rates, mean_rate=float(rates.mean()))

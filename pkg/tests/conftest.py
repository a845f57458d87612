"""Shared helpers for the test suite."""

import numpy as np
import pytest

from mmwhybrid import HybridBeamformer, ScenarioConfig, build_codebook


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def desk_config(**overrides) -> ScenarioConfig:
    """Small scenario used across harness-level tests."""
    base = dict(N_t=16, N_r=16, N_RF=2, N_s=2, N=16, N_cp=8, L=3,
                codebook_size=64, dictionary_resolution=2.8125,
                snr_grid_dB=(0.0,), trials=5, max_iterations=4, seed=7)
    base.update(overrides)
    return ScenarioConfig(**base)


def random_beamformer(rng, num_tx, num_rx, num_chains, num_streams, num_subcarriers):
    """Valid random beamformer: codebook analog columns, normalized baseband."""
    cb_t = build_codebook(num_tx, 4 * num_tx)
    cb_r = build_codebook(num_rx, 4 * num_rx)
    f_rf = cb_t.vectors[:, rng.choice(cb_t.num_beams, num_chains, replace=False)]
    w_rf = cb_r.vectors[:, rng.choice(cb_r.num_beams, num_chains, replace=False)]
    shape = (num_subcarriers, num_chains, num_streams)
    f_bb = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    w_bb = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    for k in range(num_subcarriers):
        f_bb[k] *= np.sqrt(num_streams) / np.linalg.norm(f_rf @ f_bb[k])
        w_bb[k] *= np.sqrt(num_streams) / np.linalg.norm(w_rf @ w_bb[k])
    return HybridBeamformer(f_rf=f_rf, w_rf=w_rf, f_bb=f_bb, w_bb=w_bb)


def random_channel_array(rng, num_subcarriers, num_rx, num_tx):
    shape = (num_subcarriers, num_rx, num_tx)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)

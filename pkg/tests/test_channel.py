"""Channel synthesis: steering vectors, pulse shape, path sampling, response."""

import numpy as np
import pytest

from mmwhybrid import (
    PathSet,
    array_response,
    frequency_channel,
    raised_cosine,
    sample_paths,
)


# -- independent reference implementations (kept free of package internals) --

def rc_reference(t, ts, beta):
    x = t / ts
    sinc = 1.0 if x == 0 else np.sin(np.pi * x) / (np.pi * x)
    if beta == 0:
        return sinc
    arg = 2.0 * beta * x
    if abs(abs(arg) - 1.0) < 1e-9:
        xs = 1.0 / (2.0 * beta)
        return (np.pi / 4.0) * np.sin(np.pi * xs) / (np.pi * xs)
    return sinc * np.cos(np.pi * beta * x) / (1.0 - arg * arg)


def channel_reference(paths, num_sub, ts, num_rx, num_tx, beta):
    """Straight double-loop transcription of the tap/path sum, no FFT."""
    out = np.zeros((num_sub, num_rx, num_tx), dtype=complex)
    for k in range(num_sub):
        for d in range(num_sub):
            for l in range(paths.count):
                pulse = rc_reference(d * ts - paths.delays[l], ts, beta)
                ar = np.exp(1j * np.pi * np.arange(num_rx) * np.sin(paths.aoa[l]))
                at = np.exp(1j * np.pi * np.arange(num_tx) * np.sin(paths.aod[l]))
                out[k] += (paths.gains[l] * pulse * np.outer(ar, at.conj())
                           * np.exp(-2j * np.pi * k * d / num_sub))
    return out


class TestArrayResponse:
    def test_broadside_is_all_ones(self):
        np.testing.assert_allclose(array_response(0.0, 4), np.ones(4))

    def test_endfire_alternates_sign(self):
        np.testing.assert_allclose(array_response(np.pi / 2, 4),
                                   [1, -1, 1, -1], atol=1e-12)

    def test_thirty_degrees_analytic(self):
        np.testing.assert_allclose(array_response(np.pi / 6, 2),
                                   [1, 1j], atol=1e-12)

    def test_unit_modulus(self, rng):
        for angle in rng.uniform(-np.pi / 2, np.pi / 2, size=20):
            v = array_response(angle, 16)
            np.testing.assert_allclose(np.abs(v), 1.0, atol=1e-12)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            array_response(np.nan, 4)
        with pytest.raises(ValueError):
            array_response(0.0, 0)


class TestRaisedCosine:
    def test_unit_peak(self):
        for beta in (0.0, 0.3, 0.8, 1.0):
            assert raised_cosine(0.0, 2.5, beta) == pytest.approx(1.0, abs=1e-12)

    def test_nyquist_zero_crossings(self):
        for n in (-3, -1, 1, 2, 5):
            for beta in (0.0, 0.5, 0.8):
                assert raised_cosine(n * 1.7, 1.7, beta) == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.parametrize("beta", [0.5, 0.8])
    def test_singular_point_matches_numeric_limit(self, beta):
        ts = 1.3
        t0 = ts / (2.0 * beta)
        # two-sided numeric limit, evaluated away from the guard window
        lo = raised_cosine(t0 - 1e-8 * ts, ts, beta)
        hi = raised_cosine(t0 + 1e-8 * ts, ts, beta)
        numeric = 0.5 * (lo + hi)
        value = raised_cosine(t0, ts, beta)
        assert value == pytest.approx(numeric, abs=1e-5)
        assert value == pytest.approx((np.pi / 4) * np.sinc(1.0 / (2 * beta)), abs=1e-12)

    def test_vectorized_matches_scalar(self, rng):
        ts, beta = 0.7, 0.8
        t = rng.uniform(-5, 5, size=50)
        vec = raised_cosine(t, ts, beta)
        for ti, vi in zip(t, vec):
            assert raised_cosine(ti, ts, beta) == pytest.approx(vi, rel=1e-12)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            raised_cosine(0.0, 0.0, 0.5)
        with pytest.raises(ValueError):
            raised_cosine(0.0, 1.0, 1.5)


class TestSamplePaths:
    def test_paper_scale_invariants(self):
        paths = sample_paths(np.random.default_rng(42), 6, 8, 1.0)
        assert paths.count == 6
        assert np.all(np.abs(paths.aoa) <= np.pi / 2)
        assert np.all(np.abs(paths.aod) <= np.pi / 2)
        assert np.all(paths.delays >= 0)
        assert np.all(paths.delays <= 7.0)

    def test_deterministic_given_seed(self):
        a = sample_paths(np.random.default_rng(5), 1, 8)
        b = sample_paths(np.random.default_rng(5), 1, 8)
        assert np.array_equal(a.gains, b.gains)
        assert np.array_equal(a.delays, b.delays)
        assert np.array_equal(a.aoa, b.aoa)
        assert np.array_equal(a.aod, b.aod)

    def test_gain_power_is_unit(self):
        rng = np.random.default_rng(123)
        power = np.array([np.abs(sample_paths(rng, 1, 4).gains[0]) ** 2
                          for _ in range(10_000)])
        assert abs(power.mean() - 1.0) < 0.05

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            sample_paths(np.random.default_rng(0), 0, 8)


class TestPathSet:
    def test_rejects_out_of_range_angles(self):
        with pytest.raises(ValueError):
            PathSet(gains=np.ones(1), delays=np.zeros(1),
                    aoa=np.array([2.0]), aod=np.zeros(1))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            PathSet(gains=np.ones(2), delays=np.zeros(1),
                    aoa=np.zeros(2), aod=np.zeros(2))


class TestFrequencyChannel:
    def test_single_path_zero_delay_all_ones(self):
        paths = PathSet(gains=np.array([1.0 + 0j]), delays=np.zeros(1),
                        aoa=np.zeros(1), aod=np.zeros(1))
        chan = frequency_channel(paths, 8, 1.0, 3, 4, 0.8)
        for k in range(8):
            np.testing.assert_allclose(chan.freq_matrices[k],
                                       np.ones((3, 4)), atol=1e-10)

    def test_single_path_endfire_outer_product(self):
        paths = PathSet(gains=np.array([1.0 + 0j]), delays=np.zeros(1),
                        aoa=np.array([np.pi / 2]), aod=np.zeros(1))
        chan = frequency_channel(paths, 4, 1.0, 2, 2, 0.5)
        expected = np.array([[1, 1], [-1, -1]], dtype=complex)
        for k in range(4):
            np.testing.assert_allclose(chan.freq_matrices[k], expected, atol=1e-10)

    def test_matches_double_loop_reference(self, rng):
        for _ in range(10):
            paths = sample_paths(rng, 3, 4, 1.0)
            chan = frequency_channel(paths, 8, 1.0, 4, 4, 0.8)
            ref = channel_reference(paths, 8, 1.0, 4, 4, 0.8)
            err = np.linalg.norm(chan.freq_matrices - ref) / np.linalg.norm(ref)
            assert err < 1e-12

    def test_rank_bounded_by_path_count(self, rng):
        paths = sample_paths(rng, 3, 8)
        chan = frequency_channel(paths, 8, 1.0, 8, 8, 0.8)
        sv = np.linalg.svd(chan.freq_matrices, compute_uv=False)
        assert np.all(sv[:, 3:] < 1e-9 * sv[:, 0, None])

    def test_zero_delays_give_flat_response(self, rng):
        base = sample_paths(rng, 4, 8)
        paths = PathSet(gains=base.gains, delays=np.zeros(4),
                        aoa=base.aoa, aod=base.aod)
        chan = frequency_channel(paths, 16, 1.0, 4, 4, 0.8)
        for k in range(16):
            np.testing.assert_allclose(chan.freq_matrices[k],
                                       chan.freq_matrices[0], atol=1e-10)

    def test_linear_in_gains(self, rng):
        paths = sample_paths(rng, 3, 8)
        scaled = PathSet(gains=2.5 * paths.gains, delays=paths.delays,
                         aoa=paths.aoa, aod=paths.aod)
        a = frequency_channel(paths, 8, 1.0, 4, 4, 0.8).freq_matrices
        b = frequency_channel(scaled, 8, 1.0, 4, 4, 0.8).freq_matrices
        np.testing.assert_allclose(b, 2.5 * a, atol=1e-12 * np.abs(a).max())

    def test_rejects_bad_dimensions(self, rng):
        paths = sample_paths(rng, 2, 4)
        with pytest.raises(ValueError):
            frequency_channel(paths, 8, 1.0, 0, 4, 0.8)
        with pytest.raises(ValueError):
            frequency_channel(paths, 0, 1.0, 4, 4, 0.8)

"""Beam codebooks and angle dictionaries."""

import numpy as np
import pytest

from mmwhybrid import array_response, build_codebook, build_dictionary


class TestBuildCodebook:
    def test_paper_scale_shape_and_modulus(self):
        cb = build_codebook(32, 64)
        assert cb.vectors.shape == (32, 64)
        np.testing.assert_allclose(np.abs(cb.vectors), 1.0, atol=1e-12)

    def test_single_beam_is_left_edge(self):
        cb = build_codebook(4, 1)
        np.testing.assert_allclose(cb.vectors[:, 0], [1, -1, 1, -1], atol=1e-12)
        assert cb.angles[0] == pytest.approx(-np.pi / 2)

    def test_gram_diagonal_equals_antenna_count(self):
        cb = build_codebook(7, 13)
        gram = cb.vectors.conj().T @ cb.vectors
        np.testing.assert_allclose(np.diag(gram).real, 7.0, atol=1e-12)

    def test_angles_uniform_and_increasing(self):
        cb = build_codebook(8, 16)
        steps = np.diff(cb.angles)
        np.testing.assert_allclose(steps, np.pi / 16, atol=1e-12)
        assert cb.angles[-1] < np.pi / 2

    def test_rejects_zero_beams(self):
        with pytest.raises(ValueError):
            build_codebook(8, 0)


class TestBuildDictionary:
    def test_paper_resolution_gives_64_atoms(self):
        dic = build_dictionary(32, 2.8125)
        assert dic.atoms.shape == (32, 64)

    def test_coarse_grid_contains_broadside(self):
        dic = build_dictionary(4, 90.0)
        assert dic.atoms.shape == (4, 2)
        np.testing.assert_allclose(np.rad2deg(dic.grid_angles), [-90.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(dic.atoms[:, 1], np.ones(4), atol=1e-12)

    def test_atoms_are_steering_vectors(self):
        dic = build_dictionary(6, 11.25)
        for i, angle in enumerate(dic.grid_angles):
            np.testing.assert_allclose(dic.atoms[:, i], array_response(angle, 6),
                                       atol=1e-12)

    def test_rejects_non_divisor_resolution(self):
        with pytest.raises(ValueError):
            build_dictionary(8, 7.0)

    def test_coherence_strictly_below_one(self):
        dic = build_dictionary(16, 5.625)
        gram = np.abs(dic.atoms.conj().T @ dic.atoms) / 16.0
        np.fill_diagonal(gram, 0.0)
        assert gram.max() < 1.0 - 1e-6

    def test_grid_is_uniform_in_sine(self):
        dic = build_dictionary(8, 5.625)
        sines = np.sin(dic.grid_angles)
        np.testing.assert_allclose(np.diff(sines), 2.0 / 32, atol=1e-12)
        assert sines[0] == pytest.approx(-1.0)

    def test_matched_grid_size_gives_orthogonal_atoms(self):
        dic = build_dictionary(32, 5.625)  # 32 atoms on a 32-element array
        gram = np.abs(dic.atoms.conj().T @ dic.atoms) / 32.0
        np.fill_diagonal(gram, 0.0)
        assert gram.max() < 1e-12

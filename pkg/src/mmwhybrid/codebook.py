"""Constant-modulus beam codebooks and angle dictionaries.

Both are collections of ULA steering vectors covering [-90, 90) degrees;
the beam codebook is what the analog stage selects from, the dictionary is
the sparse-representation basis for channel recovery. The codebook grid is
uniform in angle. The dictionary grid is uniform in the sine of the angle:
steering vectors depend on the angle only through its sine, so an
angle-uniform grid degenerates near endfire (adjacent atoms there have
coherence above 0.99 and a greedy solver cannot tell them apart), while the
sine-uniform grid keeps every pair of atoms distinguishable. Both grids
exclude +90 degrees because sin(+90) and sin(-90) produce the same steering
vector, which would duplicate the first column.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import HALF_PI, steering_matrix

__all__ = ["BeamCodebook", "AngleDictionary", "build_codebook", "build_dictionary"]


def _check_steering_collection(vectors: np.ndarray, angles: np.ndarray, what: str):
    if vectors.ndim != 2 or angles.ndim != 1 or vectors.shape[1] != angles.shape[0]:
        raise ValueError(f"{what}: vectors must be (num_antennas, len(angles))")
    if np.any(np.abs(np.abs(vectors) - 1.0) > 1e-12):
        raise ValueError(f"{what}: entries must have unit magnitude")
    if np.any(np.diff(angles) <= 0.0):
        raise ValueError(f"{what}: angles must be strictly increasing")
    if angles[0] < -HALF_PI - 1e-12 or angles[-1] >= HALF_PI:
        raise ValueError(f"{what}: angles must lie in [-pi/2, pi/2)")


@dataclass(frozen=True)
class BeamCodebook:
    """Candidate analog beam vectors, one steering column per grid angle."""

    vectors: np.ndarray  # (num_antennas, num_beams)
    angles: np.ndarray   # (num_beams,)

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.complex128)
        angles = np.asarray(self.angles, dtype=np.float64)
        _check_steering_collection(vectors, angles, "BeamCodebook")
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "angles", angles)

    @property
    def num_antennas(self) -> int:
        return int(self.vectors.shape[0])

    @property
    def num_beams(self) -> int:
        return int(self.vectors.shape[1])


@dataclass(frozen=True)
class AngleDictionary:
    """Steering-vector atoms used as the sparse basis for channel recovery."""

    atoms: np.ndarray        # (num_antennas, grid_size)
    grid_angles: np.ndarray  # (grid_size,)

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=np.complex128)
        grid = np.asarray(self.grid_angles, dtype=np.float64)
        _check_steering_collection(atoms, grid, "AngleDictionary")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "grid_angles", grid)

    @property
    def num_antennas(self) -> int:
        return int(self.atoms.shape[0])

    @property
    def grid_size(self) -> int:
        return int(self.atoms.shape[1])


def build_codebook(num_antennas: int, num_beams: int) -> BeamCodebook:
    """Uniform angle-grid codebook: angle i is -pi/2 + i*pi/num_beams."""
    if num_beams < 1:
        raise ValueError("num_beams must be >= 1")
    angles = -HALF_PI + np.arange(num_beams) * (np.pi / num_beams)
    return BeamCodebook(vectors=steering_matrix(angles, num_antennas), angles=angles)


def build_dictionary(num_antennas: int, resolution_deg: float) -> AngleDictionary:
    """Angle dictionary with 180/resolution atoms covering [-90, 90) degrees.

    The resolution must divide 180 so the atom count is an integer. Grid
    angles are uniform in sine, which minimizes atom coherence for a ULA
    (at grid size equal to the antenna count the atoms are orthogonal).
    """
    if resolution_deg <= 0.0:
        raise ValueError("resolution_deg must be positive")
    grid_size = 180.0 / resolution_deg
    if abs(grid_size - round(grid_size)) > 1e-9:
        raise ValueError(f"resolution {resolution_deg} deg does not divide 180")
    grid_size = int(round(grid_size))
    angles = np.arcsin(-1.0 + 2.0 * np.arange(grid_size) / grid_size)
    return AngleDictionary(atoms=steering_matrix(angles, num_antennas),
                           grid_angles=angles)

"""Training transmissions and sparse recovery of the effective channel.

The far end sweeps its analog beams one RF chain at a time while the near
end takes random four-phase projections of what it receives. Because the
effective channel is sparse in the steering-vector dictionary, a greedy
matching-pursuit solver recovers it from few measurements. The default
solver shares one support across all subcarriers and RF chains (the
physical angles are common to all of them); an independent per-column
variant is available for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import somp_greedy
from .channel import ChannelRealization

__all__ = [
    "MeasurementMatrix",
    "SparseEstimate",
    "generate_measurement_matrix",
    "simulate_training",
    "somp_recover",
    "omp_recover_columnwise",
]

_ALPHABET = np.array([1.0 + 0.0j, -1.0 + 0.0j, 1.0j, -1.0j])


@dataclass(frozen=True)
class MeasurementMatrix:
    """Random projection matrix with entries drawn from {+1, -1, +j, -j}."""

    entries: np.ndarray  # (num_measurements, num_antennas)

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.complex128)
        if entries.ndim != 2:
            raise ValueError("entries must be a 2-D matrix")
        ok = ((entries == 1.0) | (entries == -1.0)
              | (entries == 1.0j) | (entries == -1.0j))
        if not np.all(ok):
            raise ValueError("entries must come from {+1, -1, +j, -j}")
        object.__setattr__(self, "entries", entries)

    @property
    def num_measurements(self) -> int:
        return int(self.entries.shape[0])

    @property
    def num_antennas(self) -> int:
        return int(self.entries.shape[1])


def generate_measurement_matrix(rng: np.random.Generator, num_measurements: int,
                                num_antennas: int) -> MeasurementMatrix:
    """Draw i.i.d. uniform four-phase entries; deterministic given the rng."""
    if num_measurements < 1:
        raise ValueError("num_measurements must be >= 1")
    if num_antennas < 1:
        raise ValueError("num_antennas must be >= 1")
    idx = rng.integers(0, 4, size=(num_measurements, num_antennas))
    return MeasurementMatrix(entries=_ALPHABET[idx])


def _matrix_of(measurement) -> np.ndarray:
    entries = getattr(measurement, "entries", measurement)
    return np.asarray(entries, dtype=np.complex128)


def _atoms_of(dictionary) -> np.ndarray:
    atoms = getattr(dictionary, "atoms", dictionary)
    return np.asarray(atoms, dtype=np.complex128)


def simulate_training(channel, beams: np.ndarray, measurement, noise_std: float,
                      rng: np.random.Generator | None = None,
                      reverse: bool = False) -> np.ndarray:
    """Measured training signal per subcarrier.

    ``beams`` holds the far-end analog columns (transmit precoder columns in
    the forward direction, receive combiner columns in the reverse one). The
    near end observes the effective channel column per beam, corrupted by
    fresh complex Gaussian noise per subcarrier and beam, then projected by
    the measurement matrix.

    Returns (num_subcarriers, num_measurements, num_beams).
    """
    h = channel.freq_matrices if isinstance(channel, ChannelRealization) \
        else np.asarray(channel, dtype=np.complex128)
    if h.ndim != 3:
        raise ValueError("channel must provide (num_subcarriers, num_rx, num_tx) matrices")
    beams = np.asarray(beams, dtype=np.complex128)
    if beams.ndim != 2:
        raise ValueError("beams must be 2-D with one column per RF chain")
    phi = _matrix_of(measurement)
    if noise_std < 0.0:
        raise ValueError("noise_std must be >= 0")
    if reverse:
        far_dim, near_dim = h.shape[1], h.shape[2]
    else:
        far_dim, near_dim = h.shape[2], h.shape[1]
    if beams.shape[0] != far_dim:
        raise ValueError(f"beam length {beams.shape[0]} does not match the "
                         f"far-end antenna count {far_dim}")
    if phi.shape[1] != near_dim:
        raise ValueError(f"measurement width {phi.shape[1]} does not match the "
                         f"near-end antenna count {near_dim}")
    eff = np.conj(np.swapaxes(h, 1, 2)) @ beams if reverse else h @ beams
    if noise_std > 0.0:
        if rng is None:
            raise ValueError("rng is required when noise_std > 0")
        noise = rng.standard_normal(eff.shape) + 1j * rng.standard_normal(eff.shape)
        eff = eff + (noise_std / np.sqrt(2.0)) * noise
    return phi[None, :, :] @ eff


@dataclass(frozen=True)
class SparseEstimate:
    """Recovered support, sparse coefficients and effective channel.

    ``support`` lists dictionary column indices in selection order.
    ``coefficients`` is (num_subcarriers, grid_size, num_beams) with nonzero
    rows only on the support; ``effective_channel`` is the dictionary times
    the coefficients. ``residual_norms`` traces the aggregate residual,
    starting at the input norm.
    """

    support: tuple[int, ...]
    coefficients: np.ndarray
    effective_channel: np.ndarray
    residual_norms: np.ndarray

    def __post_init__(self):
        coeff = np.asarray(self.coefficients, dtype=np.complex128)
        eff = np.asarray(self.effective_channel, dtype=np.complex128)
        if coeff.ndim != 3 or eff.ndim != 3:
            raise ValueError("coefficients and effective_channel must be 3-D")
        if coeff.shape[0] != eff.shape[0] or coeff.shape[2] != eff.shape[2]:
            raise ValueError("coefficients and effective_channel disagree in shape")
        off = np.ones(coeff.shape[1], dtype=bool)
        off[list(self.support)] = False
        if np.any(coeff[:, off, :] != 0):
            raise ValueError("coefficients must vanish off the support")
        object.__setattr__(self, "support", tuple(int(i) for i in self.support))
        object.__setattr__(self, "coefficients", coeff)
        object.__setattr__(self, "effective_channel", eff)
        object.__setattr__(self, "residual_norms",
                           np.asarray(self.residual_norms, dtype=np.float64))


def _stack_columns(received: np.ndarray) -> np.ndarray:
    # (N, M, B) -> (M, N*B), columns ordered subcarrier-major
    n, m, b = received.shape
    return received.transpose(1, 0, 2).reshape(m, n * b)


def _zero_estimate(num_subcarriers, grid_size, num_antennas, num_beams):
    coeff = np.zeros((num_subcarriers, grid_size, num_beams), dtype=np.complex128)
    eff = np.zeros((num_subcarriers, num_antennas, num_beams), dtype=np.complex128)
    return SparseEstimate(support=(), coefficients=coeff, effective_channel=eff,
                          residual_norms=np.zeros(1))


def somp_recover(received, measurement, dictionary, max_sparsity: int,
                 residual_tol: float = 1e-6) -> SparseEstimate:
    """Joint recovery with one support shared across subcarriers and beams."""
    received = np.asarray(received, dtype=np.complex128)
    if received.ndim != 3:
        raise ValueError("received must be (num_subcarriers, num_measurements, num_beams)")
    phi = _matrix_of(measurement)
    atoms = _atoms_of(dictionary)
    n, m, b = received.shape
    grid_size = atoms.shape[1]
    if max_sparsity < 1 or max_sparsity > m or max_sparsity > grid_size:
        raise ValueError("max_sparsity must satisfy 1 <= max_sparsity <= "
                         "min(num_measurements, grid_size)")
    if residual_tol < 0.0:
        raise ValueError("residual_tol must be >= 0")
    sensing = phi @ atoms
    observations = _stack_columns(received)
    if not np.any(observations):
        return _zero_estimate(n, grid_size, atoms.shape[0], b)
    support, packed, resid_norms = somp_greedy(sensing, observations,
                                               max_sparsity, residual_tol)
    coeff = np.zeros((n, grid_size, b), dtype=np.complex128)
    coeff[:, support, :] = packed.reshape(len(support), n, b).transpose(1, 0, 2)
    eff = atoms[None, :, :] @ coeff
    return SparseEstimate(support=tuple(int(i) for i in support),
                          coefficients=coeff, effective_channel=eff,
                          residual_norms=resid_norms)


def omp_recover_columnwise(received, measurement, dictionary, max_sparsity: int,
                           residual_tol: float = 1e-6) -> SparseEstimate:
    """Classic pursuit run independently per (subcarrier, beam) column.

    Each column obeys the sparsity cap on its own; the reported support is
    the union over columns and may be larger than ``max_sparsity``.
    """
    received = np.asarray(received, dtype=np.complex128)
    if received.ndim != 3:
        raise ValueError("received must be (num_subcarriers, num_measurements, num_beams)")
    phi = _matrix_of(measurement)
    atoms = _atoms_of(dictionary)
    n, m, b = received.shape
    grid_size = atoms.shape[1]
    if max_sparsity < 1 or max_sparsity > m or max_sparsity > grid_size:
        raise ValueError("max_sparsity must satisfy 1 <= max_sparsity <= "
                         "min(num_measurements, grid_size)")
    sensing = phi @ atoms
    coeff = np.zeros((n, grid_size, b), dtype=np.complex128)
    union: list[int] = []
    final_sq = 0.0
    initial = np.linalg.norm(received)
    if initial == 0.0:
        return _zero_estimate(n, grid_size, atoms.shape[0], b)
    for k in range(n):
        for i in range(b):
            y = received[k, :, i:i + 1]
            if not np.any(y):
                continue
            support, packed, resid = somp_greedy(sensing, y, max_sparsity,
                                                 residual_tol)
            coeff[k, support, i] = packed[:, 0]
            final_sq += float(resid[-1]) ** 2
            for idx in support:
                if int(idx) not in union:
                    union.append(int(idx))
    eff = atoms[None, :, :] @ coeff
    return SparseEstimate(support=tuple(union), coefficients=coeff,
                          effective_channel=eff,
                          residual_norms=np.array([initial, np.sqrt(final_sq)]))

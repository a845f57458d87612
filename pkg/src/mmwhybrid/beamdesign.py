"""Analog beam selection and baseband stage for the hybrid transceiver.

The analog side approximates a regularized (MMSE-style) target: for each RF
chain in turn, the codebook column with the largest aggregate correlation
against the target column wins, and the orthonormal component of the winner
is projected out of all not-yet-served target columns so later chains avoid
the same direction. Transmitter and receiver alternate this procedure over
the reciprocal channel until the selected index sets stop changing. A final
per-subcarrier SVD of the low-dimensional effective channel yields the
baseband matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .codebook import AngleDictionary, BeamCodebook
from .sensing import (
    generate_measurement_matrix,
    omp_recover_columnwise,
    simulate_training,
    somp_recover,
)

__all__ = [
    "MmseTarget",
    "AnalogSelection",
    "DigitalSolution",
    "HybridBeamformer",
    "DesignConfig",
    "IterationRecord",
    "DesignOutcome",
    "mmse_target",
    "select_analog",
    "digital_stage",
    "iterate_design",
]

_DEGENERATE_NORM = 1e-12


@dataclass(frozen=True)
class MmseTarget:
    """Column-normalized regularized-inverse combining target per subcarrier.

    ``zero_columns`` marks columns that came out exactly zero (no usable
    signal); those are left at zero and express no beam preference.
    """

    columns: np.ndarray       # (num_subcarriers, num_antennas, num_chains)
    zero_columns: np.ndarray  # (num_subcarriers, num_chains) bool

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=np.complex128)
        if cols.ndim != 3:
            raise ValueError("columns must be (num_subcarriers, num_antennas, num_chains)")
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "zero_columns",
                           np.asarray(self.zero_columns, dtype=bool))


def mmse_target(effective_channel, reg: float) -> MmseTarget:
    """Regularized linear-MMSE direction for each RF chain and subcarrier.

    Solves (H H^H + reg I) G = H per subcarrier and normalizes each column
    of G to unit norm. Exactly zero columns are kept at zero and flagged.
    """
    h = np.asarray(effective_channel, dtype=np.complex128)
    if h.ndim != 3:
        raise ValueError("effective_channel must be (num_subcarriers, num_antennas, num_chains)")
    if reg <= 0.0:
        raise ValueError("reg must be positive")
    num_antennas = h.shape[1]
    gram = h @ np.conj(np.swapaxes(h, 1, 2))
    idx = np.arange(num_antennas)
    gram[:, idx, idx] += reg
    raw = np.linalg.solve(gram, h)
    norms = np.linalg.norm(raw, axis=1)
    zero = norms == 0.0
    cols = raw / np.where(zero, 1.0, norms)[:, None, :]
    return MmseTarget(columns=cols, zero_columns=zero)


@dataclass(frozen=True)
class AnalogSelection:
    """Result of the greedy codebook search.

    ``matrix`` stacks the chosen codebook columns, ``indices`` names them,
    ``ortho_basis`` holds the orthonormal directions used for deflation and
    ``degenerate`` flags chains whose winner was already inside the span of
    the previous ones (no new deflation applied).
    """

    matrix: np.ndarray
    indices: tuple[int, ...]
    ortho_basis: np.ndarray
    degenerate: tuple[bool, ...]


def select_analog(target: MmseTarget, codebook: BeamCodebook) -> AnalogSelection:
    """Greedy per-chain codebook selection with orthogonal deflation.

    Chain i takes the codebook column maximizing the sum over subcarriers of
    |column^H target_i| (ties go to the lowest index). Its orthonormal
    component against earlier winners is then projected out of every later
    target column.
    """
    work = target.columns.copy()
    if codebook.num_antennas != work.shape[1]:
        raise ValueError("codebook antenna count does not match the target")
    num_chains = work.shape[2]
    vectors = codebook.vectors
    basis: list[np.ndarray] = []
    chosen: list[int] = []
    columns: list[np.ndarray] = []
    degenerate: list[bool] = []
    for i in range(num_chains):
        scores = np.abs(np.conj(work[:, :, i]) @ vectors).sum(axis=0)
        best = int(np.argmax(scores))
        chosen.append(best)
        selected = vectors[:, best].copy()
        columns.append(selected)
        q = selected.astype(np.complex128)
        for prev in basis:
            q = q - prev * (np.conj(prev) @ q)
        norm = np.linalg.norm(q)
        if norm < _DEGENERATE_NORM:
            degenerate.append(True)
            continue
        degenerate.append(False)
        q /= norm
        basis.append(q)
        if i + 1 < num_chains:
            tail = work[:, :, i + 1:]
            before = np.linalg.norm(tail, axis=1)
            proj = np.einsum("a,kaj->kj", np.conj(q), tail)
            tail = tail - q[None, :, None] * proj[:, None, :]
            # columns annihilated by the projection are snapped to exact zero
            # so the later argmax resolves ties deterministically instead of
            # ranking rounding noise
            dead = np.linalg.norm(tail, axis=1) <= 1e-12 * before
            work[:, :, i + 1:] = np.where(dead[:, None, :], 0.0, tail)
    ortho = np.stack(basis, axis=1) if basis else np.zeros((work.shape[1], 0),
                                                           dtype=np.complex128)
    return AnalogSelection(matrix=np.stack(columns, axis=1),
                           indices=tuple(chosen), ortho_basis=ortho,
                           degenerate=tuple(degenerate))


@dataclass(frozen=True)
class DigitalSolution:
    f_bb: np.ndarray  # (num_subcarriers, num_chains, num_streams)
    w_bb: np.ndarray  # (num_subcarriers, num_chains, num_streams)
    zero_subcarriers: np.ndarray  # bool per subcarrier


def _fix_column_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first non-negligible entry is real positive."""
    out = vectors.copy()
    n_cols = out.shape[1]
    for c in range(n_cols):
        col = out[:, c]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size == 0:
            continue
        lead = col[nz[0]]
        out[:, c] = col * (np.conj(lead) / np.abs(lead))
    return out


def digital_stage(w_rf: np.ndarray, f_rf: np.ndarray, channel,
                  num_streams: int, precoder_applied: bool | None = None) -> DigitalSolution:
    """Per-subcarrier SVD baseband matrices with transmit-power normalization.

    ``channel`` is either the full per-subcarrier channel (the precoder is
    applied here) or an effective channel that already includes the analog
    precoder; ``precoder_applied`` forces the interpretation, otherwise it is
    inferred from the trailing dimension. The top singular vectors become the
    baseband precoder/combiner, deterministically phase-fixed, then scaled so
    the combined analog+digital Frobenius norm squared equals ``num_streams``
    on every subcarrier.
    """
    h = channel.freq_matrices if isinstance(channel, ChannelRealization) \
        else np.asarray(channel, dtype=np.complex128)
    w_rf = np.asarray(w_rf, dtype=np.complex128)
    f_rf = np.asarray(f_rf, dtype=np.complex128)
    num_chains = f_rf.shape[1]
    if w_rf.shape[1] != num_chains:
        raise ValueError("precoder and combiner must have the same number of chains")
    if num_streams < 1 or num_streams > num_chains:
        raise ValueError("num_streams must satisfy 1 <= num_streams <= num_chains")
    if precoder_applied is None:
        precoder_applied = h.shape[2] == num_chains and h.shape[2] != f_rf.shape[0]
    eff = h if precoder_applied else h @ f_rf
    if eff.shape[2] != num_chains:
        raise ValueError("channel trailing dimension does not match the RF chains")
    h_e = np.conj(w_rf.T)[None, :, :] @ eff
    n = h_e.shape[0]
    f_bb = np.empty((n, num_chains, num_streams), dtype=np.complex128)
    w_bb = np.empty_like(f_bb)
    zero = np.zeros(n, dtype=bool)
    for k in range(n):
        if not np.any(h_e[k]):
            zero[k] = True
            f_pre = np.eye(num_chains, num_streams, dtype=np.complex128)
            w_pre = np.eye(num_chains, num_streams, dtype=np.complex128)
        else:
            u, _, vh = np.linalg.svd(h_e[k])
            f_pre = _fix_column_phases(np.conj(vh.T)[:, :num_streams])
            w_pre = _fix_column_phases(u[:, :num_streams])
        f_bb[k] = f_pre * (np.sqrt(num_streams) / np.linalg.norm(f_rf @ f_pre))
        w_bb[k] = w_pre * (np.sqrt(num_streams) / np.linalg.norm(w_rf @ w_pre))
    return DigitalSolution(f_bb=f_bb, w_bb=w_bb, zero_subcarriers=zero)


@dataclass(frozen=True)
class HybridBeamformer:
    """Frequency-flat analog matrices plus per-subcarrier baseband matrices."""

    f_rf: np.ndarray  # (num_tx, num_chains)
    w_rf: np.ndarray  # (num_rx, num_chains)
    f_bb: np.ndarray  # (num_subcarriers, num_chains, num_streams)
    w_bb: np.ndarray  # (num_subcarriers, num_chains, num_streams)

    def __post_init__(self):
        for name in ("f_rf", "w_rf", "f_bb", "w_bb"):
            object.__setattr__(self, name,
                               np.asarray(getattr(self, name), dtype=np.complex128))
        self.validate()

    @property
    def num_streams(self) -> int:
        return int(self.f_bb.shape[2])

    @property
    def num_subcarriers(self) -> int:
        return int(self.f_bb.shape[0])

    def validate(self):
        for name, analog in (("f_rf", self.f_rf), ("w_rf", self.w_rf)):
            if np.any(np.abs(np.abs(analog) - 1.0) > 1e-9):
                raise ValueError(f"{name} entries must have unit magnitude")
        ns = self.num_streams
        for name, analog, digital in (("f", self.f_rf, self.f_bb),
                                      ("w", self.w_rf, self.w_bb)):
            combined = analog[None, :, :] @ digital
            sq = np.sum(np.abs(combined) ** 2, axis=(1, 2))
            if np.any(np.abs(sq - ns) > 1e-9 * max(1.0, ns)):
                raise ValueError(f"{name}-side combined norm must equal num_streams")


@dataclass(frozen=True)
class DesignConfig:
    """Knobs for one end-to-end design run."""

    num_chains: int
    num_streams: int
    max_iterations: int
    measurements_rx: int
    measurements_tx: int
    train_noise_std: float
    max_sparsity: int
    noise_var: float = 1.0
    reverse_reg: str = "noise_var"   # or "unit"
    residual_tol: float = 1e-6
    recovery: str = "somp"           # or "omp_per_column"
    perfect_csi: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.reverse_reg not in ("noise_var", "unit"):
            raise ValueError("reverse_reg must be 'noise_var' or 'unit'")
        if self.recovery not in ("somp", "omp_per_column"):
            raise ValueError("recovery must be 'somp' or 'omp_per_column'")


@dataclass(frozen=True)
class IterationRecord:
    combiner: AnalogSelection
    precoder: AnalogSelection


@dataclass(frozen=True)
class DesignOutcome:
    beamformer: HybridBeamformer
    trace: tuple[IterationRecord, ...]
    converged: bool


def _index_state(record: IterationRecord):
    # beam choices are discrete; compare as multisets so chain permutations
    # of the same beams count as a fixed point
    return (tuple(sorted(record.combiner.indices)),
            tuple(sorted(record.precoder.indices)))


def iterate_design(channel: ChannelRealization,
                   codebooks: tuple[BeamCodebook, BeamCodebook],
                   dictionaries: tuple[AngleDictionary, AngleDictionary] | None,
                   config: DesignConfig,
                   rng: np.random.Generator) -> DesignOutcome:
    """Alternate combiner/precoder selection over the reciprocal channel.

    Starting from random codebook columns as the precoder, each iteration
    estimates the forward effective channel (or uses the true one in
    perfect-CSI mode), selects the combiner, then does the same in the
    reverse direction to update the precoder. The loop stops when both
    selected index sets repeat, or at ``max_iterations``. The baseband stage
    then runs once on a fresh forward estimate taken with the final
    precoder; reusing the in-loop estimate would pair the baseband matrices
    with a one-iteration-stale (possibly permuted) analog precoder.
    """
    tx_codebook, rx_codebook = codebooks
    h = channel.freq_matrices
    num_rx, num_tx = h.shape[1], h.shape[2]
    if tx_codebook.num_antennas != num_tx or rx_codebook.num_antennas != num_rx:
        raise ValueError("codebook antenna counts do not match the channel")
    recover = somp_recover if config.recovery == "somp" else omp_recover_columnwise
    init = rng.choice(tx_codebook.num_beams, size=config.num_chains,
                      replace=tx_codebook.num_beams < config.num_chains)
    f_rf = tx_codebook.vectors[:, init].copy()
    if config.perfect_csi:
        phi_rx = phi_tx = None
        tx_dict = rx_dict = None
    else:
        if dictionaries is None:
            raise ValueError("dictionaries are required unless perfect_csi is set")
        tx_dict, rx_dict = dictionaries
        phi_rx = generate_measurement_matrix(rng, config.measurements_rx, num_rx)
        phi_tx = generate_measurement_matrix(rng, config.measurements_tx, num_tx)
    reverse_reg = config.noise_var if config.reverse_reg == "noise_var" else 1.0
    records: list[IterationRecord] = []
    converged = False
    w_rf = None

    def forward_estimate(precoder):
        if config.perfect_csi:
            return h @ precoder
        received = simulate_training(h, precoder, phi_rx,
                                     config.train_noise_std, rng)
        return recover(received, phi_rx, rx_dict, config.max_sparsity,
                       config.residual_tol).effective_channel

    for _ in range(config.max_iterations):
        forward_eff = forward_estimate(f_rf)
        w_sel = select_analog(mmse_target(forward_eff, config.noise_var), rx_codebook)
        w_rf = w_sel.matrix
        if config.perfect_csi:
            reverse_eff = np.conj(np.swapaxes(h, 1, 2)) @ w_rf
        else:
            received = simulate_training(h, w_rf, phi_tx, config.train_noise_std,
                                         rng, reverse=True)
            reverse_eff = recover(received, phi_tx, tx_dict, config.max_sparsity,
                                  config.residual_tol).effective_channel
        f_sel = select_analog(mmse_target(reverse_eff, reverse_reg), tx_codebook)
        f_rf = f_sel.matrix
        records.append(IterationRecord(combiner=w_sel, precoder=f_sel))
        if len(records) >= 2 and _index_state(records[-1]) == _index_state(records[-2]):
            converged = True
            break
    digital = digital_stage(w_rf, f_rf, forward_estimate(f_rf),
                            config.num_streams, precoder_applied=True)
    beamformer = HybridBeamformer(f_rf=f_rf, w_rf=w_rf,
                                  f_bb=digital.f_bb, w_bb=digital.w_bb)
    return DesignOutcome(beamformer=beamformer, trace=tuple(records),
                         converged=converged)

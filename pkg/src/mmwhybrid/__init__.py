"""Hybrid analog/digital beamforming simulator for wideband MIMO-OFDM links.

Channel synthesis, sparse effective-channel estimation from four-phase
training projections, iterative greedy codebook selection with orthogonal
deflation, an SVD baseband stage, rate metrics and a seeded Monte Carlo
harness with a CLI front end.
"""

__version__ = "0.1.0"

from ._kernels import active_backend
from .beamdesign import (
    AnalogSelection,
    DesignConfig,
    DesignOutcome,
    DigitalSolution,
    HybridBeamformer,
    IterationRecord,
    MmseTarget,
    digital_stage,
    iterate_design,
    mmse_target,
    select_analog,
)
from .channel import (
    ChannelRealization,
    PathSet,
    array_response,
    frequency_channel,
    raised_cosine,
    sample_paths,
    steering_matrix,
)
from .codebook import AngleDictionary, BeamCodebook, build_codebook, build_dictionary
from .harness import (
    CellRecord,
    ConfigError,
    ScenarioConfig,
    SweepResult,
    TrialError,
    TrialOutcome,
    apply_overrides,
    emit_csv,
    load_config,
    parse_config_text,
    run_sweep,
    run_trial,
)
from .metrics import RateReport, full_digital_bound, spectral_efficiency
from .sensing import (
    MeasurementMatrix,
    SparseEstimate,
    generate_measurement_matrix,
    omp_recover_columnwise,
    simulate_training,
    somp_recover,
)

__all__ = [
    "__version__",
    "active_backend",
    "AnalogSelection",
    "AngleDictionary",
    "BeamCodebook",
    "CellRecord",
    "ChannelRealization",
    "ConfigError",
    "DesignConfig",
    "DesignOutcome",
    "DigitalSolution",
    "HybridBeamformer",
    "IterationRecord",
    "MeasurementMatrix",
    "MmseTarget",
    "PathSet",
    "RateReport",
    "ScenarioConfig",
    "SparseEstimate",
    "SweepResult",
    "TrialError",
    "TrialOutcome",
    "apply_overrides",
    "array_response",
    "build_codebook",
    "build_dictionary",
    "digital_stage",
    "emit_csv",
    "frequency_channel",
    "full_digital_bound",
    "generate_measurement_matrix",
    "iterate_design",
    "load_config",
    "mmse_target",
    "omp_recover_columnwise",
    "parse_config_text",
    "raised_cosine",
    "run_sweep",
    "run_trial",
    "sample_paths",
    "select_analog",
    "simulate_training",
    "somp_recover",
    "spectral_efficiency",
    "steering_matrix",
]

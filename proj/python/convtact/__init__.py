"""n-dimensional convolution, edge gradients and time-to-contact estimation."""

from ._core import (
    DEFAULT_AUTO_THRESHOLD,
    ConfigError,
    DimensionError,
    DomainError,
    Error,
    FormatError,
    InputError,
    LookupError,
    RankError,
    ScaleError,
    ScoringError,
    ShapeError,
    bench_sweep,
    conv,
    estimate_ttc,
    gradient,
    kernel,
    read_ndt,
    read_pgm,
    score_mse,
    synth,
    ttc_sequence,
    write_ndt,
    write_pgm,
    xcorr,
)

__all__ = [name for name in dir() if not name.startswith("_")]

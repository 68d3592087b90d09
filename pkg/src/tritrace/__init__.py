"""Trace statistics of tridiagonal random matrices.

Walk-class trace kernels, ensemble samplers with deterministic per-trial
seeding, Monte Carlo checks of Gaussian-fluctuation variances/covariances,
and moderate-deviation / Cramér-rate diagnostics, plus a batch CLI.
"""

__version__ = "0.1.0"

from .circuits import (
    CircuitType,
    TridiagonalMatrix,
    count_circuits_bruteforce,
    enumerate_types,
    trace_power_direct,
    trace_power_expansion,
)
from .ensembles import EnsembleSpec, EntryLaw, EntryWindow, sample_matrix, sample_window
from .errors import (
    ConfigError,
    DegenerateRateError,
    DegenerateTargetError,
    InvalidArgumentError,
    NumericOverflowError,
    TriTraceError,
)

__all__ = [
    "CircuitType",
    "TridiagonalMatrix",
    "EnsembleSpec",
    "EntryLaw",
    "EntryWindow",
    "enumerate_types",
    "count_circuits_bruteforce",
    "trace_power_expansion",
    "trace_power_direct",
    "sample_matrix",
    "sample_window",
    "TriTraceError",
    "InvalidArgumentError",
    "NumericOverflowError",
    "DegenerateTargetError",
    "DegenerateRateError",
    "ConfigError",
    "__version__",
]

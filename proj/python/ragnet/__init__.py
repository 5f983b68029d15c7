"""Two-user random-access network with signals.

Exact slot-level simulation, closed-form stability and stable-throughput
regions, mean queue-length bounds, a truncated-chain stationary oracle, and
the numerical boundary-value solution of the symmetric system.

All functions take plain dict parameter mappings (the same JSON schemas as
the CLI parameter files) and return plain Python values.
"""

from ._core import (
    ConfigError,
    NumericError,
    classify_drift,
    queue_bounds,
    simulate,
    simulate_dominant,
    solve_riemann,
    stability_region,
    step_kernel,
    symmetric_stability,
    throughput_region,
    truncated_stationary,
    validate_params,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "NumericError",
    "classify_drift",
    "queue_bounds",
    "simulate",
    "simulate_dominant",
    "solve_riemann",
    "stability_region",
    "step_kernel",
    "symmetric_stability",
    "throughput_region",
    "truncated_stationary",
    "validate_params",
]

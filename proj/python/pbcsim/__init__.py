"""Difference equations under noisy prediction-based control.

Thin python layer over the C++ core: map registry, admissibility checks,
seeded noise streams and reproducible Monte Carlo ensembles.
"""

from ._pbcsim import (
    AssumptionError,
    ConfigError,
    ControlScheme,
    HypothesisError,
    MapModel,
    NoiseSpec,
    admissible_additive,
    admissible_multiplicative,
    blur_radius,
    contraction_rate,
    estimate_global_lipschitz,
    estimate_local_lipschitz,
    hitting_constants,
    invariant_interval,
    max_additive_noise,
    parameter_scan,
    pbc_map,
    run_experiment,
    run_trajectory,
    samples,
    step,
    verify_assumptions,
)

__all__ = [
    "AssumptionError",
    "ConfigError",
    "ControlScheme",
    "HypothesisError",
    "MapModel",
    "NoiseSpec",
    "admissible_additive",
    "admissible_multiplicative",
    "blur_radius",
    "contraction_rate",
    "estimate_global_lipschitz",
    "estimate_local_lipschitz",
    "hitting_constants",
    "invariant_interval",
    "max_additive_noise",
    "parameter_scan",
    "pbc_map",
    "run_experiment",
    "run_trajectory",
    "samples",
    "step",
    "verify_assumptions",
]

"""Gaussian-state simulator and optimizer for cascaded multiparameter phase sensing.

The package models a chain of N optical phase segments separated by N-1
partial reflectors inside a bidirectional Mach-Zehnder interferometer,
propagates Gaussian pulses through it on a time-stepped lattice, computes
the classical Fisher information of the detected light with respect to the
sensing phases, and optimizes the free design parameters (pulse phases,
squeezing angles, reference phases, reflector transmission) with a
differential-evolution search.
"""

from cascade_sensor.gaussian import (
    Direction,
    GaussianState,
    ModeLabel,
    Side,
    SiteKind,
    apply_transform,
    assert_physical,
    beamsplitter_matrix,
    coherent_state,
    displace,
    is_symplectic,
    loss_channel,
    phase_shift_matrix,
    photon_number,
    squeeze_matrix,
    symplectic_eigenvalues,
    symplectic_form,
    tensor,
    trace_out,
    vacuum_state,
)
from cascade_sensor.lattice import (
    PulseSpec,
    SensorConfig,
    SensorOutput,
    SidePolicy,
    config_from_dict,
    config_to_dict,
    run_sensor,
    single_pass_transmission,
    staggered_schedule,
)
from cascade_sensor.metrology import (
    FisherResult,
    FisherStepError,
    IndistinguishableParametersError,
    crb,
    fisher_matrix,
    quantum_advantage,
    sample_homodyne,
)
from cascade_sensor.optimize import (
    DEConfig,
    FreeParameterSpec,
    OptimizationResult,
    de_minimize,
    optimize_sensor,
)
from cascade_sensor.experiments import (
    SweepRecord,
    SweepSpec,
    fit_power_law,
    run_scaling_study,
    run_transmission_sweep,
    validate_config,
)

__version__ = "0.1.0"

__all__ = [
    "Direction",
    "GaussianState",
    "ModeLabel",
    "Side",
    "SiteKind",
    "apply_transform",
    "assert_physical",
    "beamsplitter_matrix",
    "coherent_state",
    "displace",
    "is_symplectic",
    "loss_channel",
    "phase_shift_matrix",
    "photon_number",
    "squeeze_matrix",
    "symplectic_eigenvalues",
    "symplectic_form",
    "tensor",
    "trace_out",
    "vacuum_state",
    "PulseSpec",
    "SensorConfig",
    "SensorOutput",
    "SidePolicy",
    "config_from_dict",
    "config_to_dict",
    "run_sensor",
    "single_pass_transmission",
    "staggered_schedule",
    "FisherResult",
    "FisherStepError",
    "IndistinguishableParametersError",
    "crb",
    "fisher_matrix",
    "quantum_advantage",
    "sample_homodyne",
    "DEConfig",
    "FreeParameterSpec",
    "OptimizationResult",
    "de_minimize",
    "optimize_sensor",
    "SweepRecord",
    "SweepSpec",
    "fit_power_law",
    "run_scaling_study",
    "run_transmission_sweep",
    "validate_config",
]

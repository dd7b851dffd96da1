"""
Stability package - Harmonic correction, decay energies, linearization checks and the
compatible-structure construction behind the end-to-end stability experiment.
"""
from .compatible import CompatibleResult, build_compatible_phi, integrate_class
from .correction import CorrectedPair, harmonic_correction
from .energies import EnergyReport, energies, fit_decay
from .experiment import (
    PerturbationTerm,
    StageManager,
    decay_run,
    decay_state,
    end_to_end_stability,
    flat_background,
    perturbation_field,
    single_mode_perturbation,
    symplectic_perturbation,
)
from .linearization import (
    LinearizationReport,
    VariationPair,
    constrained_variation,
    linearization_check,
    order_of_accuracy,
    unconstrained_variation,
)
from .stage_timer import StageTimer

__all__ = [
    "CompatibleResult",
    "CorrectedPair",
    "EnergyReport",
    "LinearizationReport",
    "PerturbationTerm",
    "StageManager",
    "StageTimer",
    "VariationPair",
    "build_compatible_phi",
    "constrained_variation",
    "decay_run",
    "decay_state",
    "end_to_end_stability",
    "energies",
    "fit_decay",
    "flat_background",
    "harmonic_correction",
    "integrate_class",
    "linearization_check",
    "order_of_accuracy",
    "perturbation_field",
    "single_mode_perturbation",
    "symplectic_perturbation",
    "unconstrained_variation",
]

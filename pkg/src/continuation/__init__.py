"""Fourier-Galerkin periodic problems and branch continuation from bifurcation events."""

from .galerkin import (
    GalerkinModel,
    TrigBasis,
    fourier_residual,
    loop_from_coefficients,
    loop_inner,
    loop_to_coefficients,
    real_derivative,
    real_jacobian,
    real_residual,
    trig_basis,
)
from .problem import (
    AugmentedSystem,
    Correction,
    CorrectorDivergence,
    PeriodicProblem,
    PinningError,
    augment,
    correct,
)
from .branch import (
    TERMINATIONS,
    Branch,
    BranchOrigin,
    BranchPoint,
    ContinuationSettings,
    branch_from_event,
    continue_branch,
    kernel_direction,
    origin_for_ring,
    origin_for_satellite,
    refine_truncation,
)

__all__ = [
    'GalerkinModel',
    'TrigBasis',
    'fourier_residual',
    'loop_from_coefficients',
    'loop_inner',
    'loop_to_coefficients',
    'real_derivative',
    'real_jacobian',
    'real_residual',
    'trig_basis',
    'AugmentedSystem',
    'Correction',
    'CorrectorDivergence',
    'PeriodicProblem',
    'PinningError',
    'augment',
    'correct',
    'TERMINATIONS',
    'Branch',
    'BranchOrigin',
    'BranchPoint',
    'ContinuationSettings',
    'branch_from_event',
    'continue_branch',
    'kernel_direction',
    'origin_for_ring',
    'origin_for_satellite',
    'refine_truncation',
]

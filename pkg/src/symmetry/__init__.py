"""Group actions, isotypic block decomposition and isotropy predicates."""

from .group import GroupElement, act_state, body_matrix, spatial_matrix
from .loops import FourierLoop, act_loop, loop_action_matrix, phase_rows
from .blocks import (
    BlockDecomposition,
    EquivarianceError,
    dft_block_diagonalize,
    equivariance_defect,
    isotypic_basis,
    twisted_generator,
)
from .isotropy import (
    IsotropyLabel,
    center_of_mass_defect,
    choreography_indicator,
    fixed_subspace_basis,
    fixed_subspace_projector,
    symmetry_residual,
)

__all__ = [
    'GroupElement',
    'act_state',
    'body_matrix',
    'spatial_matrix',
    'FourierLoop',
    'act_loop',
    'loop_action_matrix',
    'phase_rows',
    'BlockDecomposition',
    'EquivarianceError',
    'dft_block_diagonalize',
    'equivariance_defect',
    'isotypic_basis',
    'twisted_generator',
    'IsotropyLabel',
    'center_of_mass_defect',
    'choreography_indicator',
    'fixed_subspace_basis',
    'fixed_subspace_projector',
    'symmetry_residual',
]

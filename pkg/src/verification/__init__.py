"""Direct integration, closure and conservation checks, and the oracle suite."""

from .integrator import (
    CHECK_DT,
    CLOSURE_DT,
    IntegrationReport,
    closure_error,
    integrate,
    loop_initial_state,
    momentum_drift,
    rk4_step,
    symmetry_after_integration,
)
from .oracles import (
    ORACLE_SCHEMA,
    OracleCheck,
    block_equivalence_checks,
    dense_mode_matrix,
    equivariance_check,
    gradient_check,
    hessian_check,
    oracle_suite,
    orthogonality_checks,
    random_loops,
    satellite_event_checks,
)

__all__ = [
    'CHECK_DT',
    'CLOSURE_DT',
    'IntegrationReport',
    'closure_error',
    'integrate',
    'loop_initial_state',
    'momentum_drift',
    'rk4_step',
    'symmetry_after_integration',
    'ORACLE_SCHEMA',
    'OracleCheck',
    'block_equivalence_checks',
    'dense_mode_matrix',
    'equivariance_check',
    'gradient_check',
    'hessian_check',
    'oracle_suite',
    'orthogonality_checks',
    'random_loops',
    'satellite_event_checks',
]

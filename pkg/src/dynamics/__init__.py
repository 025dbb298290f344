"""Potentials, fields and conserved quantities for the satellite and ring n-body systems."""

from .errors import (
    DomainError,
    CollisionError,
    PreconditionError,
    SearchError,
    ClassificationError,
)
from .systems import (
    EPS_COLL,
    J,
    SatelliteSystem,
    BodySystem,
    State,
    frame_generator,
    rotation_generator,
    planar_rotation,
)
from .satellite import (
    satellite_potential,
    satellite_grad,
    satellite_hess,
    satellite_field,
    spatial_stiffness,
    satellite_from_ring,
)
from .nbody import (
    nbody_potential,
    nbody_grad,
    nbody_hess,
    nbody_field,
    nbody_acceleration_terms,
)
from .conserved import (
    potential,
    energy,
    jacobi_constant,
    angular_momentum,
    inertial_positions,
    inertial_velocities,
    linear_momentum,
)

__all__ = [
    'DomainError',
    'CollisionError',
    'PreconditionError',
    'SearchError',
    'ClassificationError',
    'EPS_COLL',
    'J',
    'SatelliteSystem',
    'BodySystem',
    'State',
    'frame_generator',
    'rotation_generator',
    'planar_rotation',
    'satellite_potential',
    'satellite_grad',
    'satellite_hess',
    'satellite_field',
    'spatial_stiffness',
    'satellite_from_ring',
    'nbody_potential',
    'nbody_grad',
    'nbody_hess',
    'nbody_field',
    'nbody_acceleration_terms',
    'potential',
    'energy',
    'jacobi_constant',
    'angular_momentum',
    'inertial_positions',
    'inertial_velocities',
    'linear_momentum',
]

"""The group Z2 x Z_n x SO(2) x S1 and its action on configurations."""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from dynamics import PreconditionError, State, planar_rotation


@dataclass(frozen=True)
class GroupElement:
    """
    Element (kappa, j, theta, phi) of the abelian symmetry group.

    kappa reflects z, j shifts ring indices (x_i -> x_{i+j}), theta rotates
    u -> exp(-J theta) u and phi shifts time (x(t) -> x(t + phi)).
    """

    kappa: bool = False
    j: int = 0
    theta: float = 0.0
    phi: float = 0.0

    def __mul__(self, other: 'GroupElement') -> 'GroupElement':
        return GroupElement(
            kappa=self.kappa != other.kappa,
            j=self.j + other.j,
            theta=self.theta + other.theta,
            phi=self.phi + other.phi,
        )

    def power(self, m: int) -> 'GroupElement':
        out = GroupElement()
        for _ in range(m):
            out = out * self
        return out


def body_matrix(g: GroupElement) -> np.ndarray:
    """3x3 action of reflection and rotation on one (u, z) triple."""
    block = np.eye(3)
    block[:2, :2] = planar_rotation(-g.theta)
    if g.kappa:
        block[2, 2] = -1.0
    return block


def spatial_matrix(g: GroupElement, bodies: int, include_center: bool = True) -> np.ndarray:
    """
    Orthogonal matrix of g on stacked coordinates.

    With one body (the satellite) the permutation part is ignored. Otherwise
    ring body i receives body i + j and the central body, when present, is
    fixed by permutations.
    """
    block = body_matrix(g)
    if bodies == 1:
        return block
    offset = 1 if include_center else 0
    n = bodies - offset
    perm = np.zeros((bodies, bodies))
    if include_center:
        perm[0, 0] = 1.0
    for i in range(n):
        perm[offset + i, offset + (i + g.j) % n] = 1.0
    return np.kron(perm, block)


def act_state(g: GroupElement, s: Union[State, np.ndarray], n: Optional[int] = None):
    """
    Apply the spatial part of g to a state or a configuration vector.

    Raises:
        PreconditionError: If the dimension does not match n ring bodies plus centre
    """
    vec = s.position if isinstance(s, State) else np.asarray(s, dtype=float)
    if len(vec) % 3:
        raise PreconditionError(f"Dimension {len(vec)} is not a multiple of 3")
    bodies = len(vec) // 3
    if n is not None and bodies not in (1, n + 1):
        raise PreconditionError(f"Dimension {len(vec)} does not match n={n}")
    mat = spatial_matrix(g, bodies)
    if isinstance(s, State):
        return State(mat @ s.position, mat @ s.velocity)
    return mat @ vec

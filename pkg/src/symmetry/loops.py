"""Truncated Fourier loops and their real trigonometric form."""

from dataclasses import dataclass

import numpy as np

from dynamics import PreconditionError
from .group import GroupElement, spatial_matrix


@dataclass(frozen=True)
class FourierLoop:
    """
    Real loop x(t) = sum_{|l| <= L} x_l exp(i l t) at frequency nu.

    coefficients[l + L] holds x_l; x_{-l} = conj(x_l) is enforced on construction.
    """

    coefficients: np.ndarray
    nu: float

    def __post_init__(self):
        coef = np.array(self.coefficients, dtype=complex)
        if coef.ndim != 2 or coef.shape[0] % 2 == 0:
            raise PreconditionError(f"Coefficients must have shape (2L+1, d), got {coef.shape}")
        L = coef.shape[0] // 2
        upper = coef[L + 1:]
        coef[:L] = np.conj(upper[::-1])
        coef[L] = coef[L].real
        coef.setflags(write=False)
        object.__setattr__(self, 'coefficients', coef)

    @property
    def L(self) -> int:
        return self.coefficients.shape[0] // 2

    @property
    def dim(self) -> int:
        return self.coefficients.shape[1]

    def mode(self, l: int) -> np.ndarray:
        return self.coefficients[l + self.L]

    def evaluate(self, t) -> np.ndarray:
        """Sample x(t) at times t, shape (len(t), d)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        l = np.arange(-self.L, self.L + 1)
        phases = np.exp(1j * np.outer(t, l))
        return (phases @ self.coefficients).real

    def derivative(self) -> 'FourierLoop':
        l = np.arange(-self.L, self.L + 1)
        return FourierLoop(1j * l[:, None] * self.coefficients, self.nu)

    def norm(self) -> float:
        """L2 norm (1/2pi int |x|^2 dt)^(1/2)."""
        return float(np.sqrt(np.sum(np.abs(self.coefficients) ** 2)))

    def to_real(self) -> np.ndarray:
        """Rows [a0, a1, b1, a2, b2, ...] with x(t) = a0 + sum a_l cos lt + b_l sin lt."""
        L = self.L
        out = np.zeros((2 * L + 1, self.dim))
        out[0] = self.coefficients[L].real
        for l in range(1, L + 1):
            out[2 * l - 1] = 2.0 * self.coefficients[L + l].real
            out[2 * l] = -2.0 * self.coefficients[L + l].imag
        return out

    @classmethod
    def from_real(cls, real: np.ndarray, nu: float) -> 'FourierLoop':
        real = np.asarray(real, dtype=float)
        L = real.shape[0] // 2
        coef = np.zeros((2 * L + 1, real.shape[1]), dtype=complex)
        coef[L] = real[0]
        for l in range(1, L + 1):
            coef[L + l] = 0.5 * (real[2 * l - 1] - 1j * real[2 * l])
        return cls(coef, nu)

    @classmethod
    def constant(cls, x: np.ndarray, L: int, nu: float) -> 'FourierLoop':
        coef = np.zeros((2 * L + 1, len(x)), dtype=complex)
        coef[L] = x
        return cls(coef, nu)


def phase_rows(L: int, phi: float) -> np.ndarray:
    """Matrix of x(t) -> x(t + phi) acting on real coefficient rows."""
    T = np.zeros((2 * L + 1, 2 * L + 1))
    T[0, 0] = 1.0
    for l in range(1, L + 1):
        c, s = np.cos(l * phi), np.sin(l * phi)
        T[2 * l - 1, 2 * l - 1] = c
        T[2 * l - 1, 2 * l] = s
        T[2 * l, 2 * l - 1] = -s
        T[2 * l, 2 * l] = c
    return T


def loop_action_matrix(g: GroupElement, L: int, d: int) -> np.ndarray:
    """Orthogonal matrix of g on flattened real coefficients (row-major, shape (2L+1)*d)."""
    return np.kron(phase_rows(L, g.phi), spatial_matrix(g, d // 3))


def act_loop(g: GroupElement, loop: FourierLoop) -> FourierLoop:
    """x_l -> rho(g) exp(i l phi) x_l."""
    S = spatial_matrix(g, loop.dim // 3)
    l = np.arange(-loop.L, loop.L + 1)
    coef = np.exp(1j * l * g.phi)[:, None] * (loop.coefficients @ S.T)
    return FourierLoop(coef, loop.nu)

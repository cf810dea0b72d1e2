"""Arithmetic of M(2) = R^2 x| SO(2) and the complexified rotation action.

A group element is ``(x, e^{i alpha})`` with law
``(x, a) . (y, b) = (x + R(a) y, a + b)``.  Points of the complexification
C^2 x C* store ``w`` in log-polar form ``w = exp(u + i theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(alpha: float) -> float:
    """Map an angle into [-pi, pi)."""
    a = math.fmod(alpha + math.pi, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    a -= math.pi
    # fmod can land exactly on +pi after the shift for inputs like -pi - eps
    return -math.pi if a >= math.pi else a


def rotation(alpha: float) -> np.ndarray:
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class GroupElement:
    """Element ``(x, e^{i alpha})`` of M(2)."""

    x: tuple[float, float] = (0.0, 0.0)
    alpha: float = 0.0

    def __post_init__(self) -> None:
        x = tuple(float(v) for v in np.asarray(self.x, dtype=float).reshape(2))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "alpha", wrap_angle(float(self.alpha)))

    @classmethod
    def identity(cls) -> GroupElement:
        return cls((0.0, 0.0), 0.0)

    def isclose(self, other: GroupElement, atol: float = 1e-12) -> bool:
        dx = math.hypot(self.x[0] - other.x[0], self.x[1] - other.x[1])
        da = abs(wrap_angle(self.alpha - other.alpha))
        return dx <= atol and da <= atol

    def __matmul__(self, other: GroupElement) -> GroupElement:
        return compose(self, other)


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    x = np.asarray(g.x) + rotation(g.alpha) @ np.asarray(h.x)
    return GroupElement(x, g.alpha + h.alpha)


def inverse(g: GroupElement) -> GroupElement:
    x = -(rotation(-g.alpha) @ np.asarray(g.x))
    return GroupElement(x, -g.alpha)


def embed_matrix(g: GroupElement) -> np.ndarray:
    """Matrix ``[[e^{i alpha}, x1 + i x2], [0, 1]]`` in GL(2, C)."""
    return np.array(
        [[complex(math.cos(g.alpha), math.sin(g.alpha)), complex(g.x[0], g.x[1])], [0.0, 1.0]],
        dtype=complex,
    )


@dataclass(frozen=True)
class ComplexGroupPoint:
    """Point ``(z, w)`` of C^2 x C* with ``w = exp(u + i theta)``.

    Storing ``log|w|`` rules out ``w = 0`` and makes the Bergman weights and
    the tube domains natural to express.
    """

    z: tuple[complex, complex] = (0j, 0j)
    u: float = 0.0
    theta: float = 0.0
    _w: complex = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        z = tuple(complex(v) for v in np.asarray(self.z, dtype=complex).reshape(2))
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "u", float(self.u))
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))
        object.__setattr__(self, "_w", complex(np.exp(complex(self.u, self.theta))))

    @classmethod
    def from_w(cls, z, w: complex) -> ComplexGroupPoint:
        w = complex(w)
        if w == 0:
            raise ValueError("w must be nonzero")
        return cls(z, math.log(abs(w)), math.atan2(w.imag, w.real))

    @classmethod
    def from_real(cls, g: GroupElement) -> ComplexGroupPoint:
        return cls((complex(g.x[0]), complex(g.x[1])), 0.0, g.alpha)

    @property
    def w(self) -> complex:
        return self._w

    @property
    def rho(self) -> float:
        return math.exp(self.u)

    @property
    def imag_z(self) -> np.ndarray:
        return np.imag(np.asarray(self.z))

    @property
    def real_z(self) -> np.ndarray:
        return np.real(np.asarray(self.z))


def complex_rotation(u: float, theta: float) -> np.ndarray:
    """Rotation matrix ``R(zeta)`` with ``zeta = theta - i u``, i.e. ``w = e^{i zeta}``."""
    zeta = complex(theta, -u)
    c, s = np.cos(zeta), np.sin(zeta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def act_complex(w: tuple[float, float], z) -> np.ndarray:
    """Action of ``w = (u, theta)`` in C* on ``z`` in C^2.

    Extends the rotation action of the circle: for ``u = 0`` this is the
    ordinary rotation by ``theta``.
    """
    u, theta = w
    return complex_rotation(u, theta) @ np.asarray(z, dtype=complex).reshape(2)

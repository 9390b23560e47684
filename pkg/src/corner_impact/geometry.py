"""Corner geometry and the coordinate representations of the disk velocity.

The disk sits at the vertex configuration of a wedge of half-angle ``alpha``
whose walls are ``k x - y = 0`` and ``k x + y = 0`` with ``k = tan(alpha)``.
Velocities are carried as Cartesian pairs ``(vx, vy)``, as wall-projection
pairs ``(xi_dot, eta_dot) = (k vx + vy, k vx - vy)``, or in polar form.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "Corner",
    "VelocityXY",
    "VelocityXiEta",
    "VelocityAngular",
    "VerticalMetric",
    "make_corner",
    "parse_angle",
    "xy_to_xieta",
    "xieta_to_xy",
    "xy_to_angular",
    "angular_to_xy",
    "wrap_angle",
    "norm2_xy",
    "norm2_xieta",
    "normalized",
]


@dataclass(frozen=True)
class Corner:
    """Wedge of half-angle ``alpha`` (radians), with slope and cosine factor.

    ``beta = (1 - k**2) / (1 + k**2)`` equals ``cos(2 alpha)``.
    Build instances through :func:`make_corner`.
    """

    alpha: float
    k: float
    beta: float


def make_corner(alpha: float) -> Corner:
    """Return the corner of half-angle `alpha`, which must lie in (0, pi/2)."""
    alpha = float(alpha)
    if not (0.0 < alpha < math.pi / 2):
        raise DomainError(f"alpha must lie in (0, pi/2), got {alpha!r}")
    k = math.tan(alpha)
    k2 = k * k
    return Corner(alpha=alpha, k=k, beta=(1.0 - k2) / (1.0 + k2))


_PI_FRACTION = re.compile(
    r"^\s*(?:(?P<num>\d+(?:\.\d*)?)\s*\*?\s*)?pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$",
    re.IGNORECASE,
)


def parse_angle(text: str) -> float:
    """Parse ``"pi/6"``, ``"3*pi/8"``, ``"pi"`` or a decimal number of radians.

    Pi fractions are evaluated as ``num * math.pi / den`` so that ``"pi/N"``
    gives exactly ``math.pi / N``.
    """
    m = _PI_FRACTION.match(text)
    if m:
        value = math.pi
        if m.group("num") is not None:
            value = float(m.group("num")) * value
        if m.group("den") is not None:
            den = float(m.group("den"))
            if den == 0.0:
                raise DomainError(f"zero denominator in angle {text!r}")
            value = value / den
        return value
    try:
        return float(text)
    except ValueError:
        raise DomainError(f"cannot parse angle {text!r}") from None


@dataclass(frozen=True)
class VelocityXY:
    """Linear velocity ``(vx, vy)`` of the disk centre, plus its spin.

    The spin is carried along untouched by every impact map.
    """

    vx: float
    vy: float
    spin: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.vx) and math.isfinite(self.vy) and math.isfinite(self.spin)):
            raise DomainError(f"velocity components must be finite, got {self!r}")


@dataclass(frozen=True)
class VelocityXiEta:
    """Velocity expressed through its wall projections ``xi_dot``, ``eta_dot``."""

    xi_dot: float
    eta_dot: float
    spin: float = 0.0


@dataclass(frozen=True)
class VelocityAngular:
    """Polar form ``(speed cos(phi), speed sin(phi))`` with phi in (-pi, pi]."""

    speed: float
    phi: float
    spin: float = 0.0


def xy_to_xieta(v: VelocityXY, c: Corner) -> VelocityXiEta:
    return VelocityXiEta(c.k * v.vx + v.vy, c.k * v.vx - v.vy, v.spin)


def xieta_to_xy(v: VelocityXiEta, c: Corner) -> VelocityXY:
    return VelocityXY((v.xi_dot + v.eta_dot) / (2.0 * c.k), (v.xi_dot - v.eta_dot) / 2.0, v.spin)


def wrap_angle(phi: float) -> float:
    """Map `phi` into the half-open interval (-pi, pi]."""
    phi = math.remainder(phi, 2.0 * math.pi)
    if phi <= -math.pi:
        phi += 2.0 * math.pi
    return phi


def xy_to_angular(v: VelocityXY) -> VelocityAngular:
    speed = norm2_xy(v)
    if speed == 0.0:
        raise DomainError("the zero velocity has no direction")
    return VelocityAngular(speed, wrap_angle(math.atan2(v.vy, v.vx)), v.spin)


def angular_to_xy(v: VelocityAngular) -> VelocityXY:
    return VelocityXY(v.speed * math.cos(v.phi), v.speed * math.sin(v.phi), v.spin)


def norm2_xy(v: VelocityXY) -> float:
    """Euclidean norm of ``(vx, vy)``; the spin is excluded."""
    return math.hypot(v.vx, v.vy)


def norm2_xieta(v: VelocityXiEta, c: Corner) -> float:
    """Euclidean norm of the Cartesian pair, evaluated from the wall projections."""
    k2 = c.k * c.k
    xi, eta = v.xi_dot, v.eta_dot
    sq = (1.0 + k2) / (4.0 * k2) * (xi * xi + eta * eta) + (1.0 - k2) / (2.0 * k2) * xi * eta
    # the quadratic form is positive semidefinite; rounding can push 0 slightly negative
    return math.sqrt(max(sq, 0.0))


def normalized(v: VelocityXY) -> VelocityXY:
    """Rescale `v` to unit Euclidean norm (spin unchanged)."""
    n = norm2_xy(v)
    if n == 0.0:
        raise DomainError("cannot normalize the zero velocity")
    return VelocityXY(v.vx / n, v.vy / n, v.spin)


@dataclass(frozen=True)
class VerticalMetric:
    """Kinetic-energy metric ``diag(m, m, A)`` on ``(vx, vy, spin)``.

    Parameters
    ----------
    m : float
        Disk mass.
    A : float
        Moment of inertia about the disk axis.
    """

    m: float = 1.0
    A: float = 1.0

    def __post_init__(self):
        if not (self.m > 0.0 and self.A > 0.0):
            raise DomainError(f"mass and inertia must be positive, got m={self.m}, A={self.A}")

    @property
    def matrix(self) -> np.ndarray:
        return np.diag([self.m, self.m, self.A])

    def gamma(self, c: Corner) -> np.ndarray:
        """Matrix of the metric in the ``(xi, eta, theta)`` coordinates."""
        k2 = c.k * c.k
        diag = self.m * (1.0 + k2) / (4.0 * k2)
        off = self.m * (1.0 - k2) / (4.0 * k2)
        return np.array([[diag, off, 0.0], [off, diag, 0.0], [0.0, 0.0, self.A]])

    def phi(self, u, w) -> float:
        """Scalar product of two ``(vx, vy, spin)`` triples."""
        u = np.asarray(u, dtype=float)
        w = np.asarray(w, dtype=float)
        return float(self.m * (u[0] * w[0] + u[1] * w[1]) + self.A * u[2] * w[2])

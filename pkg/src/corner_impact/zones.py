"""Impact zones of the velocity plane.

A velocity is in ``Z0`` (exit), ``Z1`` (impact with wall 1 only), ``Z2``
(impact with wall 2 only) or ``Z12`` (multiple impact) according to the
signs of its wall projections.  The exit side of each test is closed
(``<=``) and the impact side open (``>``).
"""
from __future__ import annotations

import enum

from .errors import DomainError
from .geometry import Corner, VelocityXiEta, VelocityXY, xy_to_xieta

__all__ = [
    "Zone",
    "zone_of",
    "classify_exact",
    "classify_thresholded",
    "classify_xy",
    "reflect_symmetry",
]


class Zone(str, enum.Enum):
    Z0 = "Z0"
    Z1 = "Z1"
    Z2 = "Z2"
    Z12 = "Z12"

    def __str__(self) -> str:
        return self.value


def zone_of(xi_dot: float, eta_dot: float, S: float = 0.0) -> Zone:
    """Zone of the projection pair with the sign tests shifted by `S`."""
    if xi_dot > S:
        return Zone.Z12 if eta_dot > S else Zone.Z2
    return Zone.Z1 if eta_dot > S else Zone.Z0


def classify_exact(v: VelocityXiEta) -> Zone:
    return zone_of(v.xi_dot, v.eta_dot)


def classify_thresholded(v: VelocityXiEta, S: float) -> Zone:
    """Classify with every comparison against zero replaced by `S` >= 0.

    Projections in ``(0, S]`` count as non-impacting, which absorbs rounding
    noise on velocities that are tangent to a wall.
    """
    if not S >= 0.0:
        raise DomainError(f"threshold S must be nonnegative, got {S!r}")
    return zone_of(v.xi_dot, v.eta_dot, S)


def classify_xy(v: VelocityXY, c: Corner) -> Zone:
    return classify_exact(xy_to_xieta(v, c))


_MIRROR = {Zone.Z0: Zone.Z0, Zone.Z1: Zone.Z2, Zone.Z2: Zone.Z1, Zone.Z12: Zone.Z12}


def reflect_symmetry(z: Zone) -> Zone:
    """Zone of ``(vx, -vy)`` given the zone of ``(vx, vy)``."""
    return _MIRROR[z]

"""Single-step impact maps ``v_n -> v_{n+1}``.

The Newtonian rule with restitution coefficient ``eps`` covers the ideal
rule as ``eps = 1``; both share one set of kernels.  The kernels
(``wall1_xy``, ``both_walls_xieta``, ...) take plain numbers and use only
arithmetic, so they also accept numpy arrays elementwise.  The dispatchers
(``step_*``) pick the branch from the exact zone of the input.

``oracle_step`` rebuilds the same map from orthogonal projections and the
kinetic-energy metric; it is kept deliberately separate from the closed
forms so that the two can check each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVelocityError, DomainError
from .geometry import (
    Corner,
    VelocityAngular,
    VelocityXiEta,
    VelocityXY,
    VerticalMetric,
    wrap_angle,
    xy_to_xieta,
)
from .zones import Zone, classify_exact, zone_of

__all__ = [
    "RestitutionMode",
    "Impulse",
    "check_eps",
    "wall1_xy",
    "wall2_xy",
    "both_walls_xy",
    "wall1_xieta",
    "wall2_xieta",
    "both_walls_xieta",
    "apply_branch_xy",
    "step_newtonian_xy",
    "step_newtonian_xieta",
    "step_ideal_xy",
    "step_ideal_xieta",
    "step_ideal_angular",
    "step",
    "impulse",
    "oracle_step",
]


def check_eps(eps: float) -> float:
    eps = float(eps)
    if not (0.0 <= eps <= 1.0):
        raise DomainError(f"restitution coefficient must lie in [0, 1], got {eps!r}")
    return eps


@dataclass(frozen=True)
class RestitutionMode:
    """Restitution law: Newtonian with coefficient `eps`; ``eps == 1`` is ideal."""

    eps: float = 1.0

    def __post_init__(self):
        check_eps(self.eps)

    @classmethod
    def ideal(cls) -> "RestitutionMode":
        return cls(1.0)

    @classmethod
    def newtonian(cls, eps: float) -> "RestitutionMode":
        return cls(eps)

    @property
    def is_ideal(self) -> bool:
        return self.eps == 1.0

    def __str__(self) -> str:
        return "Ideal" if self.is_ideal else f"Newtonian({self.eps:g})"


@dataclass(frozen=True)
class Impulse:
    """Reactive impulse per unit mass: ``v_new = v_old + I``."""

    ix: float
    iy: float


# -- Cartesian kernels -------------------------------------------------------

def _rescale(u, w):
    """Scale ``(u, w)`` by a power of two so the larger magnitude is in [0.5, 1).

    The multiple-impact map is homogeneous of degree one, and power-of-two
    scaling is exact, so this only matters where squares would under- or
    overflow.  Returns the scaled pair and the factor that undoes it.
    """
    _, e = np.frexp(np.maximum(np.abs(u), np.abs(w)))
    if np.ndim(e) == 0:
        e = int(e)
        return math.ldexp(u, -e), math.ldexp(w, -e), math.ldexp(1.0, e)
    return np.ldexp(u, -e), np.ldexp(w, -e), np.ldexp(1.0, e)


def wall1_xy(x, y, k, eps):
    """Partial reflection off wall 1 (``k x - y = 0``)."""
    k2 = k * k
    return (
        ((1.0 - eps * k2) * x + (1.0 + eps) * k * y) / (1.0 + k2),
        ((1.0 + eps) * k * x - (eps - k2) * y) / (1.0 + k2),
    )


def wall2_xy(x, y, k, eps):
    """Partial reflection off wall 2 (``k x + y = 0``)."""
    k2 = k * k
    return (
        ((1.0 - eps * k2) * x - (1.0 + eps) * k * y) / (1.0 + k2),
        (-(1.0 + eps) * k * x - (eps - k2) * y) / (1.0 + k2),
    )


def both_walls_xy(x, y, k, eps):
    """Multiple impact against both walls.

    Raises
    ------
    DegenerateVelocityError
        If ``x == y == 0``, where the map is 0/0.
    """
    x, y, back = _rescale(x, y)
    d = k**4 * x * x + y * y
    if np.any(d == 0):
        raise DegenerateVelocityError("multiple-impact map is undefined at zero velocity")
    return (
        (-eps * k**4 * x * x + (1.0 - (1.0 + eps) * k * k) * y * y) / d * x * back,
        (k * k * (k * k - (1.0 + eps)) * x * x - eps * y * y) / d * y * back,
    )


# -- wall-projection kernels ---------------------------------------------------

def wall1_xieta(xi, eta, beta, eps):
    return xi + (1.0 + eps) * beta * eta, -eps * eta


def wall2_xieta(xi, eta, beta, eps):
    return -eps * xi, eta + (1.0 + eps) * beta * xi


def both_walls_xieta(xi, eta, k, eps):
    xi, eta, back = _rescale(xi, eta)
    k2 = k * k
    s = xi * xi + eta * eta
    p = xi * eta
    den = (1.0 + k2) * s - 2.0 * (1.0 - k2) * p
    if np.any(den == 0):
        raise DegenerateVelocityError("multiple-impact map is undefined at zero velocity")
    a = (eps * (1.0 + k2) * s + 2.0 * (1.0 - k2) * p) / den
    b = (1.0 + eps) * (1.0 - k2) * s / den
    return (-a * xi + b * eta) * back, (b * xi - a * eta) * back


_XY_BRANCH = {Zone.Z1: wall1_xy, Zone.Z2: wall2_xy, Zone.Z12: both_walls_xy}


def apply_branch_xy(zone: Zone, v: VelocityXY, c: Corner, eps: float) -> VelocityXY:
    """Apply the branch for `zone` regardless of the actual zone of `v`."""
    if zone is Zone.Z0:
        return v
    x, y = _XY_BRANCH[zone](v.vx, v.vy, c.k, eps)
    return VelocityXY(x, y, v.spin)


def step_newtonian_xy(v: VelocityXY, c: Corner, eps: float) -> VelocityXY:
    eps = check_eps(eps)
    return apply_branch_xy(classify_exact(xy_to_xieta(v, c)), v, c, eps)


def step_newtonian_xieta(v: VelocityXiEta, c: Corner, eps: float) -> VelocityXiEta:
    eps = check_eps(eps)
    z = classify_exact(v)
    if z is Zone.Z0:
        return v
    if z is Zone.Z1:
        xi, eta = wall1_xieta(v.xi_dot, v.eta_dot, c.beta, eps)
    elif z is Zone.Z2:
        xi, eta = wall2_xieta(v.xi_dot, v.eta_dot, c.beta, eps)
    else:
        xi, eta = both_walls_xieta(v.xi_dot, v.eta_dot, c.k, eps)
    return VelocityXiEta(xi, eta, v.spin)


def step_ideal_xy(v: VelocityXY, c: Corner) -> VelocityXY:
    return step_newtonian_xy(v, c, 1.0)


def step_ideal_xieta(v: VelocityXiEta, c: Corner) -> VelocityXiEta:
    return step_newtonian_xieta(v, c, 1.0)


def step(v: VelocityXY, c: Corner, mode: RestitutionMode) -> VelocityXY:
    return step_newtonian_xy(v, c, mode.eps)


def step_ideal_angular(v: VelocityAngular, c: Corner) -> VelocityAngular:
    """Ideal rule acting on the direction angle; the speed is preserved.

    The zone is decided from the wall projections of ``(cos phi, sin phi)``
    so that the boundary convention matches the other representations.
    """
    if not v.speed > 0.0:
        raise DomainError(f"speed must be positive, got {v.speed!r}")
    k = c.k
    cos_phi, sin_phi = math.cos(v.phi), math.sin(v.phi)
    z = zone_of(k * cos_phi + sin_phi, k * cos_phi - sin_phi)
    if z is Zone.Z0:
        phi = v.phi
    elif z is Zone.Z1:
        phi = -v.phi + 2.0 * c.alpha
    elif z is Zone.Z2:
        phi = -v.phi - 2.0 * c.alpha
    else:
        t2 = k * k
        t4 = t2 * t2
        c2, s2 = cos_phi * cos_phi, sin_phi * sin_phi
        den = t4 * c2 + s2
        q = (t4 * c2 - s2) / den
        new_cos = -(q + 2.0 * t2 * s2 / den) * cos_phi
        new_sin = (q - 2.0 * t2 * c2 / den) * sin_phi
        phi = math.atan2(new_sin, new_cos)
    return VelocityAngular(v.speed, wrap_angle(phi), v.spin)


def impulse(v: VelocityXY, c: Corner, mode: RestitutionMode) -> Impulse:
    new = step(v, c, mode)
    return Impulse(new.vx - v.vx, new.vy - v.vy)


def oracle_step(
    v: VelocityXY,
    c: Corner,
    mode: RestitutionMode,
    metric: VerticalMetric | None = None,
) -> VelocityXY:
    """One impact step assembled from orthogonal projections under `metric`.

    Single impacts remove ``(1 + eps)`` times the orthogonal component of the
    impacted wall.  The multiple impact adds ``lam * (P1 + P2)`` with
    ``lam = -(1 + eps) * Phi(P12, P1 + P2) / Phi(P1 + P2, P1 + P2)``.
    """
    metric = metric or VerticalMetric()
    k = c.k
    k2 = k * k
    eps = mode.eps
    p = np.array([v.vx, v.vy, v.spin])
    s1 = (k * v.vx - v.vy) / (1.0 + k2)
    s2 = (k * v.vx + v.vy) / (1.0 + k2)
    perp1 = np.array([k * s1, -s1, 0.0])
    perp2 = np.array([k * s2, s2, 0.0])
    perp12 = np.array([v.vx, v.vy, 0.0])
    unit1 = np.array([k, -1.0, 0.0]) / (1.0 + k2)
    unit2 = np.array([k, 1.0, 0.0]) / (1.0 + k2)

    hits1 = metric.phi(perp1, unit1) > 0.0
    hits2 = metric.phi(perp2, unit2) > 0.0
    if hits1 and hits2:
        w = perp1 + perp2
        # lam is scale-free; an exact power-of-two rescale keeps the products representable
        e = math.frexp(max(abs(w[0]), abs(w[1])))[1]
        ws, p12s = np.ldexp(w, -e), np.ldexp(perp12, -e)
        ww = metric.phi(ws, ws)
        if ww == 0.0:
            raise DegenerateVelocityError("P1 + P2 vanishes; multiple impact undefined")
        lam = -(1.0 + eps) * metric.phi(p12s, ws) / ww
        p = p + lam * w
    elif hits1:
        p = p - (1.0 + eps) * perp1
    elif hits2:
        p = p - (1.0 + eps) * perp2
    return VelocityXY(float(p[0]), float(p[1]), v.spin)

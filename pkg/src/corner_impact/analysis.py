"""Two-step iteration matrices and convergence rates of the Newtonian rule.

Once the multiple impact (if any) has happened, a non-ideal run alternates
between wall 1 and wall 2.  Two consecutive steps act linearly on the wall
projections through ``H1`` (starting on wall 1) or ``H2`` (starting on
wall 2); ``K1``, ``K2`` are the same maps in Cartesian components.  The
spectral radius of ``H1`` is the asymptotic contraction factor per pair of
impacts.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, BoundViolation
from .geometry import VelocityXY, norm2_xy

__all__ = [
    "IterationMatrix",
    "DISC_TOL",
    "build_h1",
    "build_h2",
    "build_k1",
    "build_k2",
    "basis_matrix",
    "similarity",
    "spectral_radius",
    "rho_bound_check",
    "estimate_rate",
    "beta_of_k",
]

DISC_TOL = 1e-14  # relative to tr**2


@dataclass(frozen=True)
class IterationMatrix:
    """Real 2x2 matrix ``[[a, b], [c, d]]``."""

    a: float
    b: float
    c: float
    d: float

    @classmethod
    def from_array(cls, m) -> "IterationMatrix":
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise DomainError(f"expected a 2x2 matrix, got shape {m.shape}")
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    def to_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self) -> float:
        return self.a + self.d

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def discriminant(self) -> float:
        """Discriminant ``tr**2 - 4 det`` of the characteristic polynomial."""
        return self.trace**2 - 4.0 * self.det

    @property
    def branch(self) -> str:
        """``"complex"``, ``"repeated"`` or ``"real"`` eigenvalue case.

        The discriminant counts as zero when it is within `DISC_TOL` of the
        squared eigenvalue scale, so tiny matrices are not misread.
        """
        disc = self.discriminant
        if abs(disc) <= DISC_TOL * max(self.trace**2, 4.0 * abs(self.det)):
            return "repeated"
        return "complex" if disc < 0.0 else "real"

    def eigenvalues(self) -> tuple[complex, complex]:
        """Closed-form roots of ``l**2 - tr l + det``, larger modulus first."""
        half_tr = 0.5 * self.trace
        branch = self.branch
        if branch == "repeated":
            return complex(half_tr), complex(half_tr)
        root = 0.5 * cmath.sqrt(self.discriminant)
        if branch == "real":
            root = complex(root.real, 0.0)
            # avoid cancellation: compute the larger root first, then use det
            big = half_tr + math.copysign(root.real, half_tr) if half_tr != 0.0 else root.real
            small = self.det / big if big != 0.0 else half_tr - root.real
            return complex(big), complex(small)
        return complex(half_tr, abs(root.imag)), complex(half_tr, -abs(root.imag))

    def __matmul__(self, other):
        if isinstance(other, IterationMatrix):
            return IterationMatrix.from_array(self.to_array() @ other.to_array())
        return self.to_array() @ np.asarray(other, dtype=float)


def beta_of_k(k: float) -> float:
    k2 = k * k
    return (1.0 - k2) / (1.0 + k2)


def _check(eps: float, beta: float) -> None:
    if not (0.0 <= eps < 1.0):
        raise DomainError(f"eps must lie in [0, 1), got {eps!r}")
    if not (-1.0 < beta < 1.0):
        raise DomainError(f"beta must lie in (-1, 1), got {beta!r}")


def build_h1(eps: float, beta: float) -> IterationMatrix:
    """Wall-1-then-wall-2 map on ``(xi_dot, eta_dot)``."""
    _check(eps, beta)
    g = beta * (1.0 + eps)
    return IterationMatrix(-eps, -eps * g, g, g * g - eps)


def build_h2(eps: float, beta: float) -> IterationMatrix:
    """Wall-2-then-wall-1 map on ``(xi_dot, eta_dot)``."""
    _check(eps, beta)
    g = beta * (1.0 + eps)
    return IterationMatrix(g * g - eps, g, -eps * g, -eps)


def basis_matrix(k: float) -> IterationMatrix:
    """Change of coordinates ``(vx, vy) -> (xi_dot, eta_dot)``."""
    if not k > 0.0:
        raise DomainError(f"k must be positive, got {k!r}")
    return IterationMatrix(k, 1.0, k, -1.0)


def similarity(h: IterationMatrix, k: float) -> IterationMatrix:
    """``B^-1 H B`` with ``B`` from :func:`basis_matrix`."""
    b = basis_matrix(k).to_array()
    return IterationMatrix.from_array(np.linalg.solve(b, h.to_array() @ b))


def _k_entries(eps: float, k: float):
    k2 = k * k
    den = (1.0 + k2) ** 2
    diag1 = ((1.0 - eps * k2) ** 2 - k2 * (1.0 + eps) ** 2) / den
    diag2 = ((eps - k2) ** 2 - k2 * (1.0 + eps) ** 2) / den
    off = k * (1.0 - k2) * (1.0 + eps) ** 2 / den
    return diag1, off, diag2


def build_k1(eps: float, k: float) -> IterationMatrix:
    """Cartesian form of ``H1``, assembled entrywise."""
    _check(eps, beta_of_k(k))
    d1, off, d2 = _k_entries(eps, k)
    return IterationMatrix(d1, off, -off, d2)


def build_k2(eps: float, k: float) -> IterationMatrix:
    """Cartesian form of ``H2``, assembled entrywise."""
    _check(eps, beta_of_k(k))
    d1, off, d2 = _k_entries(eps, k)
    return IterationMatrix(d1, -off, off, d2)


def spectral_radius(m: IterationMatrix) -> float:
    """Largest eigenvalue modulus, from the closed-form 2x2 roots."""
    if not all(math.isfinite(x) for x in (m.a, m.b, m.c, m.d)):
        raise DomainError("matrix entries must be finite")
    branch = m.branch
    if branch == "repeated":
        return abs(0.5 * m.trace)
    if branch == "complex":
        return math.sqrt(m.det)
    return max(abs(lam) for lam in m.eigenvalues())


def rho_bound_check(eps: float, k: float, slack: float = 1e-12) -> float:
    """Return ``rho(H1)`` and verify ``eps <= rho < 1`` for eps, k in (0, 1).

    `slack` absorbs rounding on the lower bound, which is attained exactly
    whenever the eigenvalues are complex.

    Raises
    ------
    DomainError
        If `eps` or `k` is outside (0, 1).
    BoundViolation
        If the bound fails.
    """
    if not (0.0 < eps < 1.0):
        raise DomainError(f"eps must lie in (0, 1), got {eps!r}")
    if not (0.0 < k < 1.0):
        raise DomainError(f"k must lie in (0, 1), got {k!r}")
    rho = spectral_radius(build_h1(eps, beta_of_k(k)))
    if not (eps - slack <= rho < 1.0):
        raise BoundViolation(f"rho(H1)={rho!r} outside [{eps!r}, 1) for k={k!r}")
    return rho


def estimate_rate(trace: Sequence[VelocityXY], skip: int = 1) -> float:
    """Per-two-step contraction factor fitted to a decaying trace.

    The first `skip` states are dropped (they may include the multiple
    impact), then ``log ||v||`` on every other remaining state is fitted
    against the pair index by least squares.  The exponential of the slope
    is returned, directly comparable with ``rho(H1)``.
    """
    norms = [norm2_xy(v) for v in trace]
    if len(norms) < 8:
        raise DomainError(f"need at least 8 states to fit a rate, got {len(norms)}")
    tail = norms[skip::2]
    if len(tail) < 3:
        raise DomainError("too few states remain after skipping the transient")
    if any(not (b < a) for a, b in zip(norms[skip:], norms[skip + 1:])):
        raise DomainError("trace norms must be strictly decreasing")
    if tail[-1] <= 0.0:
        raise DomainError("trace reaches zero norm; logarithm undefined")
    h = np.arange(len(tail), dtype=float)
    slope = np.polyfit(h, np.log(tail), 1)[0]
    return float(math.exp(slope))

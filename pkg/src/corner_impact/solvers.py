"""Iterated impact resolution.

``run_ta`` iterates the exact-dispatch rule until the velocity exits the
corner.  ``run_na`` is the thresholded variant: projections not exceeding
``S`` are treated as non-impacting, and the loop also stops once the disk
is almost at rest (norm not above ``S_v``) or after ``N_max`` steps.  With
``S = S_v = 0`` both walk through identical states.
"""
from __future__ import annotations

import enum
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .errors import DomainError
from .geometry import Corner, VelocityXiEta, VelocityXY, make_corner, norm2_xy, normalized
from .rules import RestitutionMode, apply_branch_xy, check_eps, step_newtonian_xy
from .zones import Zone, zone_of

_log = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_S",
    "DEFAULT_SV",
    "DEFAULT_NMAX",
    "StopReason",
    "TraceEntry",
    "RunConfig",
    "RunResult",
    "GridError",
    "run_ta",
    "run_na",
    "run_grid",
    "thread_cap",
]

DEFAULT_S = 2.0 * 2.0**-52
DEFAULT_SV = 1e-12
DEFAULT_NMAX = 10_000

_UNIT_TOL = 1e-9


class StopReason(str, enum.Enum):
    EXIT_ZONE = "ExitZone"
    ALMOST_AT_REST = "AlmostAtRest"
    STEP_CAP = "StepCap"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class TraceEntry:
    """State before step `index`; `zone` is the branch the dispatcher selects there."""

    index: int
    xy: VelocityXY
    xieta: VelocityXiEta
    zone: Zone


@dataclass(frozen=True)
class RunConfig:
    mode: RestitutionMode
    corner: Corner
    S: float = DEFAULT_S
    S_v: float = DEFAULT_SV
    N_max: int = DEFAULT_NMAX
    trace: bool = False
    normalize: bool = True

    def __post_init__(self):
        if not self.S >= 0.0:
            raise DomainError(f"S must be nonnegative, got {self.S!r}")
        if not self.S_v >= 0.0:
            raise DomainError(f"S_v must be nonnegative, got {self.S_v!r}")
        if int(self.N_max) != self.N_max or self.N_max < 1:
            raise DomainError(f"N_max must be a positive integer, got {self.N_max!r}")


@dataclass(frozen=True)
class RunResult:
    v_final: VelocityXY
    steps: int
    stop: StopReason
    zone0: Zone
    v0: VelocityXY
    trace: tuple[TraceEntry, ...] | None = field(default=None, repr=False)

    @property
    def norm_final(self) -> float:
        return norm2_xy(self.v_final)


def _entry(n: int, v: VelocityXY, c: Corner, S: float) -> TraceEntry:
    xi, eta = c.k * v.vx + v.vy, c.k * v.vx - v.vy
    return TraceEntry(n, v, VelocityXiEta(xi, eta, v.spin), zone_of(xi, eta, S))


def run_ta(
    v0: VelocityXY,
    mode: RestitutionMode,
    c: Corner,
    n_cap: int = 1_000_000,
    trace: bool = False,
) -> RunResult:
    """Apply the exact rule until the velocity reaches ``Z0`` or `n_cap` steps.

    No normalization and no rest test: a non-ideal run that never exits
    ends with ``StepCap``.
    """
    if n_cap < 1:
        raise DomainError(f"n_cap must be at least 1, got {n_cap!r}")
    v = v0
    zone0 = zone_of(c.k * v.vx + v.vy, c.k * v.vx - v.vy)
    entries = [] if trace else None
    n = 0
    while True:
        xi, eta = c.k * v.vx + v.vy, c.k * v.vx - v.vy
        if entries is not None:
            entries.append(TraceEntry(n, v, VelocityXiEta(xi, eta, v.spin), zone_of(xi, eta)))
        if xi <= 0.0 and eta <= 0.0:
            stop = StopReason.EXIT_ZONE
            break
        if n >= n_cap:
            stop = StopReason.STEP_CAP
            break
        v = step_newtonian_xy(v, c, mode.eps)
        n += 1
    return RunResult(v, n, stop, zone0, v0, tuple(entries) if entries is not None else None)


def run_na(v0: VelocityXY, cfg: RunConfig) -> RunResult:
    """Thresholded iteration.

    The loop continues while some projection exceeds ``S``, fewer than
    ``N_max`` steps were taken, and the norm exceeds ``S_v``.  When several
    stop conditions hold at once the reason reported is, in order of
    priority, ``ExitZone``, ``AlmostAtRest``, ``StepCap``.
    """
    c, S, S_v, eps = cfg.corner, cfg.S, cfg.S_v, cfg.mode.eps
    if cfg.normalize:
        norm0 = norm2_xy(v0)
        if abs(norm0 - 1.0) > _UNIT_TOL:
            _log.warning("normalizing initial velocity of norm %.17g to unit norm", norm0)
            v0 = normalized(v0)
    v = v0
    k = c.k
    xi, eta = k * v.vx + v.vy, k * v.vx - v.vy
    zone0 = zone_of(xi, eta, S)
    entries = [] if cfg.trace else None
    n = 0
    while (xi > S or eta > S) and n < cfg.N_max and norm2_xy(v) > S_v:
        branch = zone_of(xi, eta, S)
        if entries is not None:
            entries.append(TraceEntry(n, v, VelocityXiEta(xi, eta, v.spin), branch))
        v = apply_branch_xy(branch, v, c, eps)
        xi, eta = k * v.vx + v.vy, k * v.vx - v.vy
        n += 1
    if entries is not None:
        entries.append(_entry(n, v, c, S))
    if not (xi > S or eta > S):
        stop = StopReason.EXIT_ZONE
    elif not norm2_xy(v) > S_v:
        stop = StopReason.ALMOST_AT_REST
    else:
        stop = StopReason.STEP_CAP
    return RunResult(v, n, stop, zone0, v0, tuple(entries) if entries is not None else None)


class GridError(DomainError):
    """A grid case failed; `index` locates it in the input sequence."""

    def __init__(self, index: int, cause: Exception):
        super().__init__(f"grid case {index}: {cause}")
        self.index = index
        self.cause = cause


def thread_cap() -> int:
    """Worker count from ``CORNER_IMPACT_THREADS`` (default 1)."""
    raw = os.environ.get("CORNER_IMPACT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise DomainError(f"CORNER_IMPACT_THREADS must be an integer, got {raw!r}") from None


def run_grid(
    configs: Sequence[tuple[float, float, VelocityXY]],
    cfg_defaults: RunConfig | None = None,
    workers: int | None = None,
) -> list[RunResult]:
    """Run NA on every ``(eps, alpha, v0)`` triple, preserving input order.

    Thresholds, step cap and trace flag come from `cfg_defaults`; its mode
    and corner are replaced per case.
    """
    base = cfg_defaults or RunConfig(RestitutionMode.ideal(), make_corner(math.pi / 4))

    def one(item):
        index, (eps, alpha, v0) = item
        try:
            cfg = RunConfig(
                RestitutionMode(check_eps(eps)),
                make_corner(alpha),
                base.S,
                base.S_v,
                base.N_max,
                base.trace,
                base.normalize,
            )
            return run_na(v0, cfg)
        except DomainError as exc:
            raise GridError(index, exc) from exc

    items = list(enumerate(configs))
    workers = thread_cap() if workers is None else workers
    if workers <= 1 or len(items) < 2:
        return [one(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, items))

"""Frictionless single and multiple impacts of a rigid disk in a corner."""

__version__ = "0.1.0"

from .errors import BoundViolation, DegenerateVelocityError, DomainError
from .geometry import (
    Corner,
    VelocityAngular,
    VelocityXiEta,
    VelocityXY,
    VerticalMetric,
    make_corner,
    norm2_xieta,
    norm2_xy,
    parse_angle,
    xieta_to_xy,
    xy_to_xieta,
)
from .rules import RestitutionMode, oracle_step, step_ideal_xy, step_newtonian_xy
from .solvers import RunConfig, RunResult, StopReason, run_na, run_ta
from .zones import Zone, classify_exact, classify_thresholded

__all__ = [
    "BoundViolation",
    "Corner",
    "DegenerateVelocityError",
    "DomainError",
    "RestitutionMode",
    "RunConfig",
    "RunResult",
    "StopReason",
    "VelocityAngular",
    "VelocityXiEta",
    "VelocityXY",
    "VerticalMetric",
    "Zone",
    "classify_exact",
    "classify_thresholded",
    "make_corner",
    "norm2_xieta",
    "norm2_xy",
    "oracle_step",
    "parse_angle",
    "run_na",
    "run_ta",
    "step_ideal_xy",
    "step_newtonian_xy",
    "xieta_to_xy",
    "xy_to_xieta",
]

"""Depth-uncertainty aware lane-exit planning and simulation."""

from ._core import (
    DepthErrorModel,
    Error,
    LaneExitPath,
    closing_speeds,
    next_sample_depth,
    simulate,
)

__all__ = [
    "DepthErrorModel",
    "Error",
    "LaneExitPath",
    "closing_speeds",
    "next_sample_depth",
    "simulate",
]

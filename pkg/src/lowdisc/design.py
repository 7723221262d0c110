"""Point-set container: an N x d array of coordinates tagged with its domain."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ContractViolationError


class Domain(Enum):
    """Domain a design lives on.

    UNIT_CUBE is the open cube (0,1)^d, CENTERED_CUBE the open cube
    (-0.5,0.5)^d, REAL_SPACE is all of R^d.
    """

    UNIT_CUBE = "unit-cube"
    CENTERED_CUBE = "centered-cube"
    REAL_SPACE = "real-space"


@dataclass(frozen=True, eq=False)
class Design:
    """Immutable N x d design.

    Coordinates are validated against the domain on construction and the
    underlying array is frozen, so a Design can be shared freely between
    threads.
    """

    points: np.ndarray
    domain: Domain

    def __post_init__(self) -> None:
        # Copy so freezing never mutates (or aliases) the caller's array.
        pts = np.array(self.points, dtype=np.float64, order="C", copy=True)
        if pts.ndim != 2:
            raise ContractViolationError(
                f"design points must be a 2-d array, got shape {pts.shape}"
            )
        n, d = pts.shape
        if n < 1 or d < 1:
            raise ContractViolationError(f"design needs N >= 1 and d >= 1, got {n} x {d}")
        if not np.all(np.isfinite(pts)):
            raise ContractViolationError("design contains non-finite coordinates")
        if self.domain is Domain.UNIT_CUBE:
            if pts.min() <= 0.0 or pts.max() >= 1.0:
                raise ContractViolationError("unit-cube design has coordinates outside (0,1)")
        elif self.domain is Domain.CENTERED_CUBE:
            if pts.min() <= -0.5 or pts.max() >= 0.5:
                raise ContractViolationError(
                    "centered-cube design has coordinates outside (-0.5,0.5)"
                )
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def replace_points(self, points: np.ndarray) -> "Design":
        """New design with the same domain and different coordinates."""
        return Design(points, self.domain)

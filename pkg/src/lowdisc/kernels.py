"""Product kernels used to define discrepancies.

All kernels here share the one-dimensional base interaction

    ktilde(t, x) = (|t| + |x| - |x - t|) / 2,

which equals min(|t|,|x|) when t and x share a sign and 0 otherwise.  The
full kernel is the product over coordinates of 1 + gamma_j * ktilde applied
to suitably re-anchored coordinates:

* origin-anchored: raw coordinates (reference point at the origin);
* centered: unit-cube coordinates shifted by 0.5 (reference at the cube
  center) -- this is the centered-L2 kernel;
* transformed: coordinates first mapped through a CDF into (0,1) and then
  shifted by 0.5, so the kernel on R^d inherits the centered kernel's
  geometry (distances between point masses stay bounded).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import ContractViolationError, NumericalError
from .targets import normal_cdf


class KernelBase(Enum):
    ORIGIN_ANCHORED = "origin"
    CENTERED_L2 = "centered-l2"
    TRANSFORMED_ORIGIN_ANCHORED = "transformed-normal"


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """A product kernel: base interaction, optional coordinate weights,
    and (for the transformed base only) the coordinatewise pre-transform
    mapping the raw domain into (0,1)."""

    base: KernelBase
    weights: np.ndarray | None = None
    pre_transform: Callable | None = None

    def __post_init__(self) -> None:
        if self.weights is not None:
            w = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64))
            if w.ndim != 1 or w.size < 1:
                raise ContractViolationError("kernel weights must be a 1-d vector")
            if np.any(~np.isfinite(w)) or np.any(w <= 0.0):
                raise ContractViolationError("kernel weights must be positive and finite")
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)
        if self.base is KernelBase.TRANSFORMED_ORIGIN_ANCHORED:
            if self.pre_transform is None:
                raise ContractViolationError("transformed kernel requires a pre_transform")
        elif self.pre_transform is not None:
            raise ContractViolationError("pre_transform is only valid for the transformed base")


def origin_kernel(weights=None) -> KernelSpec:
    """Product kernel anchored at the origin (for origin-centered targets)."""
    return KernelSpec(KernelBase.ORIGIN_ANCHORED, weights=weights)


def centered_l2_kernel(weights=None) -> KernelSpec:
    """Kernel anchored at the unit-cube center; defines the centered L2 discrepancy."""
    return KernelSpec(KernelBase.CENTERED_L2, weights=weights)


def transformed_normal_kernel(weights=None) -> KernelSpec:
    """Centered kernel pulled back to R^d through the standard normal CDF."""
    return KernelSpec(
        KernelBase.TRANSFORMED_ORIGIN_ANCHORED,
        weights=weights,
        pre_transform=normal_cdf,
    )


def kernel_by_name(name: str, weights=None) -> KernelSpec:
    """Resolve a kernel from its CLI name: origin | centered-l2 | transformed-normal."""
    try:
        base = KernelBase(name)
    except ValueError:
        raise ContractViolationError(f"unknown kernel {name!r}") from None
    if base is KernelBase.TRANSFORMED_ORIGIN_ANCHORED:
        return transformed_normal_kernel(weights)
    return KernelSpec(base, weights=weights)


def ktilde_origin(t, x):
    """Base interaction (|t| + |x| - |x - t|) / 2, elementwise.

    Equals min(|t|,|x|) for same-signed arguments and 0 otherwise;
    ktilde(x, x) = |x|.
    """
    t = np.asarray(t, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    out = 0.5 * (np.abs(t) + np.abs(x) - np.abs(x - t))
    return float(out) if out.ndim == 0 else out


def anchor_coordinates(spec: KernelSpec, points):
    """Map raw coordinates to the frame in which the base interaction applies.

    Origin-anchored: identity.  Centered: subtract 0.5.  Transformed: apply
    the pre-transform into (0,1), then subtract 0.5.
    """
    arr = np.asarray(points, dtype=np.float64)
    if spec.base is KernelBase.ORIGIN_ANCHORED:
        return arr
    if spec.base is KernelBase.CENTERED_L2:
        return arr - 0.5
    return np.asarray(spec.pre_transform(arr), dtype=np.float64) - 0.5


def _resolve_weights(spec: KernelSpec, d: int) -> np.ndarray:
    if spec.weights is None:
        return np.ones(d)
    if spec.weights.size != d:
        raise ContractViolationError(
            f"kernel has {spec.weights.size} weights but points have dimension {d}"
        )
    return spec.weights


def kernel_eval(spec: KernelSpec, t, x) -> float:
    """Evaluate the product kernel at a pair of d-dimensional points."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if t.ndim != 1 or x.ndim != 1 or t.size != x.size:
        raise ContractViolationError("kernel arguments must be equal-length vectors")
    gamma = _resolve_weights(spec, t.size)
    zt = anchor_coordinates(spec, t)
    zx = anchor_coordinates(spec, x)
    return float(np.prod(1.0 + gamma * ktilde_origin(zt, zx)))


def dirac_distance(spec: KernelSpec, t, x) -> float:
    """Kernel-induced distance between the point masses at t and x.

    sqrt(K(t,t) - 2 K(t,x) + K(x,x)); tiny negative radicands (roundoff)
    are clamped to zero, larger ones raise NumericalError.
    """
    sq = kernel_eval(spec, t, t) - 2.0 * kernel_eval(spec, t, x) + kernel_eval(spec, x, x)
    if sq < -1e-12:
        raise NumericalError(f"negative squared distance {sq!r} beyond tolerance")
    return float(np.sqrt(max(sq, 0.0)))

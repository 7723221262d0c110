"""Target distributions and their per-coordinate kernel interaction functions.

Three product-form targets are supported: uniform on the unit cube (0,1)^d,
uniform on the centered cube (-0.5,0.5)^d, and the standard normal on R^d.
Each carries its marginal CDF/quantile/density together with the univariate
interaction function h and its mean c, which are what the discrepancy
formulas actually consume:

    h(x) = E_t[ ktilde(t, x) ],      c = E_x[ h(x) ],

with ktilde the base interaction of the paired kernel and the expectations
taken under the target marginal.  h and c are stored in closed form;
quadrature is used only by the verification tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy import special

from .errors import ContractViolationError

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

#: Mean of the origin-anchored interaction under the standard normal,
#: c = E[ktilde(T, X)] = sqrt(2/pi) - 1/sqrt(pi) for independent T, X ~ N(0,1).
C_NORMAL = (math.sqrt(2.0) - 1.0) / math.sqrt(math.pi)

#: Mean interaction for either uniform target (centered interaction).
C_UNIFORM = 1.0 / 12.0


def normal_pdf(x):
    """Standard normal density, elementwise."""
    x = np.asarray(x, dtype=np.float64)
    out = INV_SQRT_2PI * np.exp(-0.5 * np.square(x))
    return float(out) if out.ndim == 0 else out


def normal_cdf(x):
    """Standard normal distribution function Phi, elementwise.

    Evaluated through the complementary error function, giving full double
    precision across the real line.
    """
    x = np.asarray(x, dtype=np.float64)
    out = special.ndtr(x)
    return float(out) if np.ndim(out) == 0 else out


# Rational approximation coefficients (Acklam), central and tail branches.
_QA = np.array(
    [-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
     1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00]
)
_QB = np.array(
    [-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
     6.680131188771972e+01, -1.328068155288572e+01, 1.0]
)
_QC = np.array(
    [-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
     -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00]
)
_QD = np.array(
    [7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
     3.754408661907416e+00, 1.0]
)
_Q_TAIL = 0.02425


def normal_quantile(p):
    """Inverse of the standard normal CDF on the open interval (0,1).

    A rational initial guess is polished by one Halley step on Phi, which
    brings |Phi(q(p)) - p| down to roughly machine precision (comfortably
    below the 1e-12 contract).

    Raises
    ------
    ContractViolationError
        If any entry of ``p`` lies outside (0,1).
    """
    arr = np.asarray(p, dtype=np.float64)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ContractViolationError("quantile argument must lie strictly inside (0,1)")

    q = np.empty_like(arr)
    lo = arr < _Q_TAIL
    hi = arr > 1.0 - _Q_TAIL
    mid = ~(lo | hi)
    if np.any(mid):
        r = arr[mid] - 0.5
        s = r * r
        q[mid] = r * np.polyval(_QA, s) / np.polyval(_QB, s)
    if np.any(lo):
        t = np.sqrt(-2.0 * np.log(arr[lo]))
        q[lo] = np.polyval(_QC, t) / np.polyval(_QD, t)
    if np.any(hi):
        t = np.sqrt(-2.0 * np.log(1.0 - arr[hi]))
        q[hi] = -np.polyval(_QC, t) / np.polyval(_QD, t)

    # One Halley refinement on Phi(q) - p.
    err = special.ndtr(q) - arr
    u = err * math.sqrt(2.0 * math.pi) * np.exp(0.5 * q * q)
    q = q - u / (1.0 + 0.5 * q * u)
    return float(q[0]) if scalar else q


def normal_h(x):
    """Mean origin-anchored interaction against a standard normal variate.

    h(x) = 1/sqrt(2*pi) + |x|/2 - x*(Phi(x) - 1/2) - phi(x).  Even in x,
    nonnegative, and tends to 1/sqrt(2*pi) as |x| grows.
    """
    x = np.asarray(x, dtype=np.float64)
    out = (
        INV_SQRT_2PI
        + 0.5 * np.abs(x)
        - x * (special.ndtr(x) - 0.5)
        - INV_SQRT_2PI * np.exp(-0.5 * np.square(x))
    )
    return float(out) if out.ndim == 0 else out


def uniform_centered_h(u):
    """Mean centered interaction against a uniform variate on (0,1).

    h(u) = (|u - 1/2| - |u - 1/2|^2) / 2 for u in the open unit interval.
    """
    arr = np.asarray(u, dtype=np.float64)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ContractViolationError("argument must lie strictly inside (0,1)")
    a = np.abs(arr - 0.5)
    out = 0.5 * (a - a * a)
    return float(out) if out.ndim == 0 else out


def centered_cube_h(t):
    """Centered interaction mean in centered coordinates t in (-0.5,0.5)."""
    arr = np.asarray(t, dtype=np.float64)
    if np.any(arr <= -0.5) or np.any(arr >= 0.5):
        raise ContractViolationError("argument must lie strictly inside (-0.5,0.5)")
    a = np.abs(arr)
    out = 0.5 * (a - a * a)
    return float(out) if out.ndim == 0 else out


class TargetKind(Enum):
    UNIT_UNIFORM = "unit"
    CENTERED_UNIFORM = "centered"
    STANDARD_NORMAL = "normal"


@dataclass(frozen=True, eq=False)
class TargetSpec:
    """A product-form target distribution with identical marginals.

    ``h_fn`` and ``c_const`` describe the interaction of the target with its
    natural kernel pairing (origin-anchored for the normal and centered-cube
    targets, centered for the unit-cube target); c_const equals the integral
    of h against the marginal density.
    """

    kind: TargetKind
    dimension: int
    marginal_cdf: Callable
    marginal_quantile: Callable
    marginal_density: Callable
    h_fn: Callable
    c_const: float

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ContractViolationError("target dimension must be >= 1")


def _unit_cdf(x):
    return np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)


def _unit_quantile(p):
    arr = np.asarray(p, dtype=np.float64)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ContractViolationError("quantile argument must lie strictly inside (0,1)")
    return arr


def _unit_density(x):
    arr = np.asarray(x, dtype=np.float64)
    return np.where((arr > 0.0) & (arr < 1.0), 1.0, 0.0)


def unit_uniform(dimension: int) -> TargetSpec:
    """Uniform target on the open unit cube (0,1)^d."""
    return TargetSpec(
        kind=TargetKind.UNIT_UNIFORM,
        dimension=dimension,
        marginal_cdf=_unit_cdf,
        marginal_quantile=_unit_quantile,
        marginal_density=_unit_density,
        h_fn=uniform_centered_h,
        c_const=C_UNIFORM,
    )


def centered_uniform(dimension: int) -> TargetSpec:
    """Uniform target on the centered cube (-0.5,0.5)^d."""
    return TargetSpec(
        kind=TargetKind.CENTERED_UNIFORM,
        dimension=dimension,
        marginal_cdf=lambda x: np.clip(np.asarray(x, dtype=np.float64) + 0.5, 0.0, 1.0),
        marginal_quantile=lambda p: _unit_quantile(p) - 0.5,
        marginal_density=lambda x: np.where(
            (np.asarray(x, dtype=np.float64) > -0.5) & (np.asarray(x, dtype=np.float64) < 0.5),
            1.0,
            0.0,
        ),
        h_fn=centered_cube_h,
        c_const=C_UNIFORM,
    )


def standard_normal(dimension: int) -> TargetSpec:
    """Standard normal target on R^d with independent N(0,1) marginals."""
    return TargetSpec(
        kind=TargetKind.STANDARD_NORMAL,
        dimension=dimension,
        marginal_cdf=normal_cdf,
        marginal_quantile=normal_quantile,
        marginal_density=normal_pdf,
        h_fn=normal_h,
        c_const=C_NORMAL,
    )


def target_by_name(name: str, dimension: int) -> TargetSpec:
    """Resolve a target from its CLI name: unit | centered | normal."""
    try:
        kind = TargetKind(name)
    except ValueError:
        raise ContractViolationError(f"unknown target {name!r}") from None
    factory = {
        TargetKind.UNIT_UNIFORM: unit_uniform,
        TargetKind.CENTERED_UNIFORM: centered_uniform,
        TargetKind.STANDARD_NORMAL: standard_normal,
    }[kind]
    return factory(dimension)

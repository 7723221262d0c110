"""Greedy coordinate-exchange optimization of the squared discrepancy.

Each iteration scores points and coordinates by their deletion gains, picks
the worst pair (i*, j*), and replaces the single coordinate x[i*, j*] by the
maximizer of the improvement

    delta(x) = D^2(X) - D^2(X with x[i*,j*] := x).

Up to an additive constant and a factor 1/N, delta equals the reduced
objective

    delta'(x) = A h(x) - (1/N) sum_{i != i*} B_i ktilde(x, x_ij*) - C ktilde(x, x),

whose coefficients are computed once per iteration, so every candidate
evaluation costs O(N).  delta' is piecewise smooth with kinks exactly at the
anchor point and the existing column values; the search evaluates a coarse
grid plus all kinks and polishes the best bracket by golden section.  The
loop stops when the best available improvement drops below ``tol`` or after
``max_iters`` iterations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from . import backends
from .design import Design
from .discrepancy import (
    Prepared,
    _coord_deletion_prepared,
    _discrepancy_sq_prepared,
    _point_deletion_prepared,
    prepare,
)
from .errors import ContractViolationError, NumericalError
from .generators import GeneratorConfig, GeneratorKind, generate, transform_to_target
from .kernels import KernelSpec, centered_l2_kernel, ktilde_origin, origin_kernel
from .targets import TargetKind, TargetSpec, normal_quantile

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ExchangeConfig:
    """Knobs for the exchange loop.

    ``tol`` is on the squared-discrepancy scale.  ``search_lo``/``search_hi``
    override the univariate search interval; when absent it is derived from
    the target (for the normal target: the quantiles at 1/(4N) and
    1 - 1/(4N), pulling extreme coordinates inward).
    """

    tol: float = 1e-10
    max_iters: int = 200
    search_lo: float | None = None
    search_hi: float | None = None
    grid_size: int = 64

    def __post_init__(self) -> None:
        if self.tol <= 0.0:
            raise ContractViolationError("tol must be positive")
        if self.max_iters < 1:
            raise ContractViolationError("max_iters must be >= 1")
        if self.grid_size < 2:
            raise ContractViolationError("grid_size must be >= 2")
        if (
            self.search_lo is not None
            and self.search_hi is not None
            and not self.search_lo < self.search_hi
        ):
            raise ContractViolationError("search_lo must be below search_hi")


class Termination(Enum):
    TOL = "tol"
    MAX_ITERS = "max-iters"


@dataclass(frozen=True)
class ExchangeStep:
    iteration: int
    point: int
    coord: int
    old: float
    new: float
    delta: float
    discrepancy: float


@dataclass(frozen=True)
class ExchangeTrace:
    steps: list[ExchangeStep]
    terminated_by: Termination
    initial_discrepancy: float
    final_discrepancy: float

    @property
    def iterations(self) -> int:
        return len(self.steps)


def default_kernel_for(target: TargetSpec) -> KernelSpec:
    """Natural kernel pairing: centered for the unit cube, origin otherwise."""
    if target.kind is TargetKind.UNIT_UNIFORM:
        return centered_l2_kernel()
    return origin_kernel()


def _default_bounds(target: TargetSpec, n: int) -> tuple[float, float]:
    p = 1.0 / (4.0 * n)
    if target.kind is TargetKind.STANDARD_NORMAL:
        return normal_quantile(p), normal_quantile(1.0 - p)
    if target.kind is TargetKind.UNIT_UNIFORM:
        return p, 1.0 - p
    return p - 0.5, 0.5 - p


def _anchor_point(target: TargetSpec) -> float:
    return 0.5 if target.kind is TargetKind.UNIT_UNIFORM else 0.0


class ExchangeContext:
    """Coefficients of the reduced objective for one (i*, j*) choice."""

    def __init__(
        self,
        design: Design,
        target: TargetSpec,
        kernel: KernelSpec,
        prep: Prepared,
        kmat: np.ndarray,
        i_star: int,
        j_star: int,
    ) -> None:
        n = prep.n
        if not 0 <= i_star < n or not 0 <= j_star < prep.d:
            raise ContractViolationError("exchange indices out of range")
        self.design = design
        self.target = target
        self.kernel = kernel
        self.i_star = i_star
        self.j_star = j_star
        self.n = n
        self._prep = prep
        self._col_z = prep.z[:, j_star].copy()
        self._w = float(prep.gamma[j_star])
        self._x_old = float(design.points[i_star, j_star])

        hprod = prep.h_products()
        w = self._w
        z_old = float(prep.z[i_star, j_star])
        h_old = float(prep.hmat[i_star, j_star])
        kt_old = ktilde_origin(z_old, self._col_z)
        self._A = 2.0 * hprod[i_star] / (1.0 + w * h_old)
        b = 2.0 * kmat[i_star, :] / (1.0 + w * kt_old)
        b[i_star] = 0.0
        self._B = b
        self._C = kmat[i_star, i_star] / (n * (1.0 + w * abs(z_old)))
        self._dp_old = float(self.delta_prime(self._x_old))

    @property
    def x_old(self) -> float:
        return self._x_old

    def kink_locations(self) -> np.ndarray:
        """Raw-coordinate kinks of the reduced objective: the anchor plus the
        other points' column values."""
        col = np.delete(self.design.points[:, self.j_star], self.i_star)
        return np.concatenate(([_anchor_point(self.target)], col))

    def delta_prime(self, x):
        """Reduced improvement objective, vectorized over candidates."""
        xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
        z = np.atleast_1d(self._prep.z_of_x(xs))
        h = np.atleast_1d(self._prep.h_of_x(xs))
        w = self._w
        kt = ktilde_origin(z[:, None], self._col_z[None, :])
        out = self._A * w * h - (w / self.n) * (kt @ self._B) - self._C * w * np.abs(z)
        return float(out[0]) if np.ndim(x) == 0 else out

    def delta(self, x):
        """Exact improvement in squared discrepancy for the exchange x."""
        dp = self.delta_prime(x)
        return (dp - self._dp_old) / self.n


def make_exchange_context(
    design: Design,
    target: TargetSpec,
    kernel: KernelSpec,
    i_star: int,
    j_star: int,
) -> ExchangeContext:
    prep = prepare(design, target, kernel)
    kmat = backends.pairwise_kernel_matrix(prep.z, prep.gamma)
    return ExchangeContext(design, target, kernel, prep, kmat, i_star, j_star)


def delta_full(
    design: Design,
    target: TargetSpec,
    kernel: KernelSpec,
    i_star: int,
    j_star: int,
    x: float,
) -> float:
    """Improvement in squared discrepancy from replacing x[i*,j*] by x,
    evaluated through the closed expansion (no rebuild of the design)."""
    prep = prepare(design, target, kernel)
    kmat = backends.pairwise_kernel_matrix(prep.z, prep.gamma)
    n = prep.n
    w = float(prep.gamma[j_star])
    hprod = prep.h_products()
    z_old = float(prep.z[i_star, j_star])
    h_old = float(prep.hmat[i_star, j_star])
    z_new = float(prep.z_of_x(np.float64(x)))
    h_new = float(prep.h_of_x(np.float64(x)))
    col_z = prep.z[:, j_star]

    first = -2.0 * (w * h_old - w * h_new) * hprod[i_star] / (n * (1.0 + w * h_old))
    kt_old = ktilde_origin(z_old, col_z)
    kt_new = ktilde_origin(z_new, col_z)
    num = (w * kt_old - w * kt_new) * kmat[i_star, :] / (1.0 + w * kt_old)
    num[i_star] = 0.0
    cross = 2.0 * float(num.sum())
    diag = (w * abs(z_old) - w * abs(z_new)) * kmat[i_star, i_star] / (1.0 + w * abs(z_old))
    return first + (cross + diag) / (n * n)


def _golden_max(f, a: float, b: float, tol: float = 1e-10) -> float:
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
    return 0.5 * (a + b)


def maximize_delta(
    context: ExchangeContext, config: ExchangeConfig | None = None
) -> tuple[float, float]:
    """Maximize the exchange improvement over the search interval.

    Evaluates the reduced objective on a uniform grid plus every kink inside
    the interval, then refines the best bracket by golden section.  Returns
    (x_star, delta_star) with delta_star the exact improvement at x_star.
    """
    config = config or ExchangeConfig()
    lo, hi = config.search_lo, config.search_hi
    if lo is None or hi is None:
        dlo, dhi = _default_bounds(context.target, context.n)
        lo = dlo if lo is None else lo
        hi = dhi if hi is None else hi
    if not lo < hi:
        raise ContractViolationError("empty search interval")

    kinks = context.kink_locations()
    kinks = kinks[(kinks > lo) & (kinks < hi)]
    cand = np.unique(np.concatenate((np.linspace(lo, hi, config.grid_size), kinks)))
    vals = context.delta_prime(cand)
    if not np.all(np.isfinite(vals)):
        raise NumericalError("non-finite exchange objective")

    best = int(np.argmax(vals))
    a = cand[best - 1] if best > 0 else cand[0]
    b = cand[best + 1] if best < cand.size - 1 else cand[-1]
    refined = _golden_max(lambda x: context.delta_prime(float(x)), float(a), float(b))

    xs = np.append(cand, refined)
    fs = np.append(vals, context.delta_prime(refined))
    k = int(np.argmax(fs))
    x_star = float(xs[k])
    return x_star, float(context.delta(x_star))


def coordinate_exchange(
    design: Design,
    target: TargetSpec,
    kernel: KernelSpec | None = None,
    config: ExchangeConfig | None = None,
) -> tuple[Design, ExchangeTrace]:
    """Run the full exchange loop and return the improved design plus trace.

    Per iteration: pick i* maximizing the point-deletion score, j* maximizing
    the coordinate-deletion score (ties go to the lowest index), maximize the
    improvement over the chosen coordinate, and apply the exchange iff it
    beats ``tol``; otherwise stop.  The recorded discrepancies never
    increase.
    """
    kernel = kernel if kernel is not None else default_kernel_for(target)
    config = config or ExchangeConfig()
    if design.n < 2 or design.d < 2:
        raise ContractViolationError("coordinate exchange requires N >= 2 and d >= 2")

    pts = design.points.copy()
    current = Design(pts, design.domain)
    prep = prepare(current, target, kernel)
    initial = math.sqrt(max(_discrepancy_sq_prepared(prep), 0.0))

    steps: list[ExchangeStep] = []
    terminated = Termination.MAX_ITERS
    last = initial
    for m in range(1, config.max_iters + 1):
        kmat = backends.pairwise_kernel_matrix(prep.z, prep.gamma)
        i_star = int(np.argmax(_point_deletion_prepared(prep, kmat)))
        j_star = int(np.argmax(_coord_deletion_prepared(prep, kmat)))
        ctx = ExchangeContext(current, target, kernel, prep, kmat, i_star, j_star)
        x_star, delta_star = maximize_delta(ctx, config)
        if delta_star <= config.tol:
            terminated = Termination.TOL
            break
        old = pts[i_star, j_star]
        pts[i_star, j_star] = x_star
        current = Design(pts, design.domain)
        prep = prepare(current, target, kernel)
        last = math.sqrt(max(_discrepancy_sq_prepared(prep), 0.0))
        steps.append(
            ExchangeStep(
                iteration=m,
                point=i_star,
                coord=j_star,
                old=float(old),
                new=x_star,
                delta=delta_star,
                discrepancy=last,
            )
        )
    trace = ExchangeTrace(
        steps=steps,
        terminated_by=terminated,
        initial_discrepancy=initial,
        final_discrepancy=last,
    )
    return current, trace


@dataclass(frozen=True)
class MultistartRun:
    seed: int
    final_discrepancy: float
    iterations: int
    terminated_by: Termination


def coordinate_exchange_multistart(
    n: int,
    d: int,
    seeds,
    target: TargetSpec,
    kernel: KernelSpec | None = None,
    config: ExchangeConfig | None = None,
    generator_kind: GeneratorKind = GeneratorKind.ESOBOL,
) -> tuple[Design, ExchangeTrace, list[MultistartRun]]:
    """Optimize from several generated starting designs, keep the best.

    Starting designs are drawn per seed from ``generator_kind`` and
    transformed to the target; results are returned in seed order.
    """
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ContractViolationError("multistart needs at least one seed")
    best: tuple[Design, ExchangeTrace] | None = None
    runs: list[MultistartRun] = []
    for seed in seeds:
        start = transform_to_target(
            generate(GeneratorConfig(generator_kind, n, d, seed)), target
        )
        optimized, trace = coordinate_exchange(start, target, kernel, config)
        runs.append(
            MultistartRun(seed, trace.final_discrepancy, trace.iterations, trace.terminated_by)
        )
        if best is None or trace.final_discrepancy < best[1].final_discrepancy:
            best = (optimized, trace)
    assert best is not None
    return best[0], best[1], runs


def save_trace(trace: ExchangeTrace, path) -> None:
    """Write the trace as CSV (point/coordinate indices are 1-based)."""
    path = Path(path)
    lines = ["iter,i,j,old,new,delta,discrepancy"]
    for s in trace.steps:
        lines.append(
            f"{s.iteration},{s.point + 1},{s.coord + 1},"
            f"{s.old:.17g},{s.new:.17g},{s.delta:.17g},{s.discrepancy:.17g}"
        )
    path.write_text("\n".join(lines) + "\n")

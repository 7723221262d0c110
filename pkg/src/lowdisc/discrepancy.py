"""Squared-discrepancy computations.

The central quantity is

    D^2(X, target, K) = prod_j(1 + g_j c) - (2/N) sum_i H(x_i)
                        + (1/N^2) sum_{i,k} K(x_i, x_k),

with H(x) = prod_j(1 + g_j h(x_j)).  It measures, in the norm induced by the
kernel, how far the empirical distribution of the design is from the target.
This module provides the generic product-form engine, direct closed forms
for the standard target/kernel pairings, the point/coordinate deletion
scores used by the coordinate-exchange optimizer, and the per-projection
decomposition of the weighted discrepancy.

All inputs are immutable and every computation is pure; the pairwise double
sum is reduced sequentially in a single partition, so results are
deterministic for a given backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable

import numpy as np
from scipy import special

from . import backends
from .design import Design, Domain
from .errors import ContractViolationError, SizeRefusalError
from .kernels import KernelBase, KernelSpec, anchor_coordinates
from .targets import (
    C_NORMAL,
    C_UNIFORM,
    INV_SQRT_2PI,
    TargetKind,
    TargetSpec,
)

_DOMAIN_OF_TARGET = {
    TargetKind.UNIT_UNIFORM: Domain.UNIT_CUBE,
    TargetKind.CENTERED_UNIFORM: Domain.CENTERED_CUBE,
    TargetKind.STANDARD_NORMAL: Domain.REAL_SPACE,
}

# Valid target/kernel pairings for the product-form engine.
_PAIRINGS = {
    (TargetKind.STANDARD_NORMAL, KernelBase.ORIGIN_ANCHORED),
    (TargetKind.CENTERED_UNIFORM, KernelBase.ORIGIN_ANCHORED),
    (TargetKind.UNIT_UNIFORM, KernelBase.CENTERED_L2),
    (TargetKind.STANDARD_NORMAL, KernelBase.TRANSFORMED_ORIGIN_ANCHORED),
}


@dataclass(frozen=True, eq=False)
class Prepared:
    """Design/target/kernel triple reduced to the arrays the engine needs.

    ``z`` holds the anchored coordinates fed to the base interaction, ``hmat``
    the per-coordinate h values, ``c`` the interaction mean, ``gamma`` the
    coordinate weights.  ``h_of_x``/``z_of_x`` map a raw coordinate to its h
    value and anchored position (used by the univariate exchange search).
    """

    z: np.ndarray
    hmat: np.ndarray
    c: float
    gamma: np.ndarray
    h_of_x: Callable
    z_of_x: Callable

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @property
    def d(self) -> int:
        return self.z.shape[1]

    def h_products(self) -> np.ndarray:
        return np.prod(1.0 + self.gamma[None, :] * self.hmat, axis=1)

    def constant(self) -> float:
        return float(np.prod(1.0 + self.gamma * self.c))


def _centered_h_from_z(z):
    a = np.abs(z)
    return 0.5 * (a - a * a)


def prepare(design: Design, target: TargetSpec, kernel: KernelSpec) -> Prepared:
    """Validate the pairing and build the engine inputs."""
    if design.d != target.dimension:
        raise ContractViolationError(
            f"design dimension {design.d} does not match target dimension {target.dimension}"
        )
    if design.domain is not _DOMAIN_OF_TARGET[target.kind]:
        raise ContractViolationError(
            f"design domain {design.domain.value} does not match target {target.kind.value}"
        )
    if (target.kind, kernel.base) not in _PAIRINGS:
        raise ContractViolationError(
            f"kernel base {kernel.base.value} is not paired with target {target.kind.value}"
        )
    if kernel.weights is not None and kernel.weights.size != design.d:
        raise ContractViolationError(
            f"kernel has {kernel.weights.size} weights but design dimension is {design.d}"
        )
    gamma = np.ones(design.d) if kernel.weights is None else kernel.weights

    pts = design.points
    z = np.ascontiguousarray(anchor_coordinates(kernel, pts))
    if target.kind is TargetKind.STANDARD_NORMAL and kernel.base is KernelBase.ORIGIN_ANCHORED:
        hmat = target.h_fn(pts)
        h_of_x = target.h_fn
        z_of_x = lambda x: np.asarray(x, dtype=np.float64)
        c = target.c_const
    else:
        # All centered-geometry pairings share h and c in anchored
        # coordinates; in particular the transformed kernel inherits the
        # uniform interaction mean, not the target's natural one.
        hmat = _centered_h_from_z(z)
        z_of_x = lambda x: anchor_coordinates(kernel, np.asarray(x, dtype=np.float64))
        h_of_x = lambda x: _centered_h_from_z(z_of_x(x))
        c = C_UNIFORM
    return Prepared(
        z=z,
        hmat=np.ascontiguousarray(hmat),
        c=c,
        gamma=np.ascontiguousarray(gamma),
        h_of_x=h_of_x,
        z_of_x=z_of_x,
    )


def discrepancy_sq_generic(design: Design, target: TargetSpec, kernel: KernelSpec) -> float:
    """Squared discrepancy through the generic product-form engine, O(d*N^2)."""
    prep = prepare(design, target, kernel)
    return _discrepancy_sq_prepared(prep)


def _discrepancy_sq_prepared(prep: Prepared) -> float:
    n = prep.n
    h_mean = float(prep.h_products().mean())
    pair = backends.pairwise_kernel_sum(prep.z, prep.gamma)
    return prep.constant() - 2.0 * h_mean + pair / (n * n)


def discrepancy(design: Design, target: TargetSpec, kernel: KernelSpec) -> float:
    """Discrepancy (square root of the floored squared discrepancy)."""
    return math.sqrt(max(discrepancy_sq_generic(design, target, kernel), 0.0))


@dataclass(frozen=True)
class DiscrepancyReport:
    """Squared discrepancy, its square root, and optional projection pieces."""

    squared: float
    value: float
    pieces: dict[tuple[int, ...], float] | None = None


def discrepancy_report(
    design: Design,
    target: TargetSpec,
    kernel: KernelSpec,
    pieces_order: int | None = None,
) -> DiscrepancyReport:
    sq = discrepancy_sq_generic(design, target, kernel)
    pieces = None
    if pieces_order is not None:
        pieces = projection_decomposition(design, target, kernel, pieces_order)
    return DiscrepancyReport(squared=sq, value=math.sqrt(max(sq, 0.0)), pieces=pieces)


# ---------------------------------------------------------------------------
# Closed forms.  These are deliberately direct transcriptions, kept separate
# from the generic engine so the two act as cross-checks on each other.
# ---------------------------------------------------------------------------


def discrepancy_sq_normal_closed(design: Design) -> float:
    """Squared discrepancy of a design in R^d against the standard normal,
    using the origin-anchored kernel."""
    if design.domain is not Domain.REAL_SPACE:
        raise ContractViolationError("normal closed form requires a real-space design")
    x = design.points
    n, d = x.shape
    h = (
        INV_SQRT_2PI
        + 0.5 * np.abs(x)
        - x * (special.ndtr(x) - 0.5)
        - INV_SQRT_2PI * np.exp(-0.5 * np.square(x))
    )
    mid = np.prod(1.0 + h, axis=1)
    pair = np.ones((n, n))
    for j in range(d):
        col = x[:, j]
        a = np.abs(col)
        pair *= 1.0 + 0.5 * (a[:, None] + a[None, :] - np.abs(col[:, None] - col[None, :]))
    return (1.0 + C_NORMAL) ** d - 2.0 * float(mid.mean()) + float(pair.sum()) / (n * n)


def discrepancy_sq_centered_l2(design: Design) -> float:
    """Centered L2 squared discrepancy of a unit-cube design."""
    if design.domain is not Domain.UNIT_CUBE:
        raise ContractViolationError("centered-L2 closed form requires a unit-cube design")
    u = design.points
    n, d = u.shape
    a = np.abs(u - 0.5)
    mid = np.prod(1.0 + 0.5 * (a - a * a), axis=1)
    pair = np.ones((n, n))
    for j in range(d):
        col = a[:, j]
        pair *= 1.0 + 0.5 * (
            col[:, None] + col[None, :] - np.abs(u[:, j][:, None] - u[:, j][None, :])
        )
    return (13.0 / 12.0) ** d - 2.0 * float(mid.mean()) + float(pair.sum()) / (n * n)


def discrepancy_sq_uniform_origin(design: Design) -> float:
    """Squared discrepancy of a unit-cube design under the origin-anchored
    kernel taken on (0,1)^d directly (constant (4/3)^d); an alternative
    uniform quality measure to the centered L2 form."""
    if design.domain is not Domain.UNIT_CUBE:
        raise ContractViolationError("uniform origin form requires a unit-cube design")
    u = design.points
    n, d = u.shape
    mid = np.prod(1.0 + u - 0.5 * np.square(u), axis=1)
    pair = np.ones((n, n))
    for j in range(d):
        col = u[:, j]
        pair *= 1.0 + np.minimum(col[:, None], col[None, :])
    return (4.0 / 3.0) ** d - 2.0 * float(mid.mean()) + float(pair.sum()) / (n * n)


def shift_design(design: Design) -> Design:
    """Translate a unit-cube design to the centered cube (subtract 0.5).

    The centered L2 discrepancy of the original equals the origin-anchored
    discrepancy of the shifted design against the centered-cube uniform.
    """
    if design.domain is not Domain.UNIT_CUBE:
        raise ContractViolationError("shift_design requires a unit-cube design")
    return Design(design.points - 0.5, Domain.CENTERED_CUBE)


# ---------------------------------------------------------------------------
# Deletion scores (greedy selection machinery).
# ---------------------------------------------------------------------------


def point_deletion_scores(design: Design, target: TargetSpec, kernel: KernelSpec) -> np.ndarray:
    """Score each point by the drop in squared discrepancy its removal buys.

    score(i) = D^2(X) - ((N-1)/N)^2 D^2(X without x_i); computed in closed
    form at total cost O(d*N^2).  The argmax is the point contributing least.
    """
    if design.n < 2:
        raise ContractViolationError("point deletion requires N >= 2")
    prep = prepare(design, target, kernel)
    kmat = backends.pairwise_kernel_matrix(prep.z, prep.gamma)
    return _point_deletion_prepared(prep, kmat)


def _point_deletion_prepared(prep: Prepared, kmat: np.ndarray) -> np.ndarray:
    n = prep.n
    hprod = prep.h_products()
    rows = kmat.sum(axis=1)
    diag = np.diagonal(kmat)
    const = (2.0 * n - 1.0) * prep.constant() / (n * n)
    return const - (2.0 / n) * (hprod.mean() + (1.0 - 1.0 / n) * hprod) + (
        2.0 * rows - diag
    ) / (n * n)


def coord_deletion_scores(design: Design, target: TargetSpec, kernel: KernelSpec) -> np.ndarray:
    """Score each coordinate by the drop in squared discrepancy from leaving
    it out of the computation entirely.

    score(j) = D^2(X) - D^2(X with coordinate j removed); the constant term
    expands to g_j*c * prod_{k != j}(1 + g_k*c).  Total cost O(d*N^2).
    """
    if design.d < 2:
        raise ContractViolationError("coordinate deletion requires d >= 2")
    prep = prepare(design, target, kernel)
    kmat = backends.pairwise_kernel_matrix(prep.z, prep.gamma)
    return _coord_deletion_prepared(prep, kmat)


def _coord_deletion_prepared(prep: Prepared, kmat: np.ndarray) -> np.ndarray:
    n = prep.n
    hprod = prep.h_products()
    gh = prep.gamma[None, :] * prep.hmat
    consts = prep.gamma * prep.c * (prep.constant() / (1.0 + prep.gamma * prep.c))
    mid = (2.0 / n) * np.sum(gh * hprod[:, None] / (1.0 + gh), axis=0)
    pair = backends.coord_interaction_sums(prep.z, kmat, prep.gamma) / (n * n)
    return consts - mid + pair


# ---------------------------------------------------------------------------
# Projection decomposition of the weighted squared discrepancy.
# ---------------------------------------------------------------------------

_MAX_SUBSETS = 1 << 20


def projection_decomposition(
    design: Design,
    target: TargetSpec,
    kernel: KernelSpec,
    max_order: int,
) -> dict[tuple[int, ...], float]:
    """Per-projection pieces of the squared discrepancy.

    For each nonempty coordinate subset u with |u| <= max_order,

        piece(u) = c^|u| - (2/N) sum_i prod_{j in u} h(x_ij)
                   + (1/N^2) sum_{i,k} prod_{j in u} ktilde(z_ij, z_kj).

    The weighted squared discrepancy equals sum_u (prod_{j in u} g_j) piece(u)
    over all nonempty subsets (max_order = d).  Keys are 0-based coordinate
    index tuples.
    """
    d = design.d
    if not 1 <= max_order <= d:
        raise ContractViolationError(f"max_order must lie in [1, {d}], got {max_order}")
    n_subsets = sum(math.comb(d, k) for k in range(1, max_order + 1))
    if n_subsets > _MAX_SUBSETS:
        raise SizeRefusalError(
            f"projection decomposition would enumerate {n_subsets} subsets "
            f"(limit {_MAX_SUBSETS}); reduce max_order or dimension"
        )
    prep = prepare(design, target, kernel)
    n = prep.n
    ktil = np.empty((d, n, n))
    for j in range(d):
        col = prep.z[:, j]
        a = np.abs(col)
        ktil[j] = 0.5 * (a[:, None] + a[None, :] - np.abs(col[:, None] - col[None, :]))

    pieces: dict[tuple[int, ...], float] = {}
    for order in range(1, max_order + 1):
        c_pow = prep.c**order
        for subset in combinations(range(d), order):
            hterm = np.prod(prep.hmat[:, subset], axis=1).sum()
            kterm = ktil[list(subset)].prod(axis=0).sum()
            pieces[subset] = c_pow - 2.0 * float(hterm) / n + float(kterm) / (n * n)
    return pieces


def weighted_pieces_total(
    pieces: dict[tuple[int, ...], float], gamma: np.ndarray | None = None
) -> float:
    """Combine projection pieces into the weighted squared discrepancy."""
    total = 0.0
    for subset, value in pieces.items():
        g = 1.0 if gamma is None else float(np.prod(np.asarray(gamma)[list(subset)]))
        total += g * value
    return total

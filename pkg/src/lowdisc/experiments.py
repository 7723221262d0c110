"""Desk-scale studies: cubature error demo, uniform-vs-normal discrepancy
correlation, generator comparison, and quadrature verification of the
closed-form kernel integrals.

All studies are deterministic given (study, seed, replicates); per-replicate
seeds are derived from the master seed with a seed sequence so replicates
could run concurrently without changing any output (timing columns excepted,
they are informational only).
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from scipy import integrate
from scipy.stats import chi2

from .design import Design, Domain
from .discrepancy import (
    discrepancy_sq_centered_l2,
    discrepancy_sq_normal_closed,
)
from .errors import ContractViolationError, NumericalError
from .generators import (
    GeneratorConfig,
    GeneratorKind,
    generate,
    transform_to_target,
)
from .kernels import ktilde_origin
from .optimizer import ExchangeConfig, coordinate_exchange
from .targets import C_NORMAL, normal_h, normal_pdf, standard_normal

#: Damping constant of the example integrand (keeps it bounded at infinity).
DAMPING = 1e-8

#: (dimension, sample size) pairs used by the generator comparison.
COMPARE_PAIRS = ((2, 32), (3, 64), (4, 64), (6, 128), (8, 256), (10, 512))

_FAMILIES = ("rand", "sobol", "esobol", "ce")


class Study(Enum):
    CUBATURE = "cubature"
    CORRELATION = "correlation"
    COMPARE = "compare"
    VERIFY_APPENDIX = "verify-appendix"


@dataclass(frozen=True)
class StudyConfig:
    study: Study
    dims: tuple[int, ...] = ()
    sizes: tuple[int, ...] = ()
    replicates: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.replicates < 1:
            raise ContractViolationError("replicates must be >= 1")


def _child_seeds(seed: int, count: int) -> np.ndarray:
    ss = np.random.SeedSequence(seed)
    return ss.generate_state(count, dtype=np.uint64)


# ---------------------------------------------------------------------------
# Cubature example.
# ---------------------------------------------------------------------------


def integrand_example(x):
    """Radial test integrand s / (1 + DAMPING * s) with s = sum of squares.

    Accepts a single point (d,) or a batch (n, d); bounded above by
    1/DAMPING, invariant under coordinate permutations and sign flips.
    """
    arr = np.asarray(x, dtype=np.float64)
    s = np.sum(np.square(arr), axis=-1)
    return s / (1.0 + DAMPING * s)


def reference_mu(d: int, damping: float = DAMPING) -> float:
    """Mean of the example integrand under the standard normal on R^d.

    Because the integrand is radial, the d-dimensional mean reduces to a
    one-dimensional integral of s/(1 + damping*s) against the chi-square(d)
    density of s, evaluated by adaptive quadrature at relative tolerance
    1e-12.  ``damping=0`` recovers the chi-square mean d exactly.
    """
    if d < 1:
        raise ContractViolationError("dimension must be >= 1")
    result = integrate.quad(
        lambda s: s / (1.0 + damping * s) * chi2.pdf(s, d),
        0.0,
        np.inf,
        epsabs=0.0,
        epsrel=1e-12,
        limit=400,
        full_output=True,
    )
    value, abserr = result[0], result[1]
    if len(result) > 3 or not np.isfinite(value) or abserr > 1e-8 * max(abs(value), 1.0):
        raise NumericalError("reference quadrature failed to converge")
    return float(value)


def cubature_estimate(design: Design) -> float:
    """Sample mean of the example integrand over the design points."""
    return float(integrand_example(design.points).mean())


@dataclass(frozen=True)
class CubatureResult:
    label: str
    estimate: float
    reference: float
    relative_error: float
    discrepancy_uniform: float
    discrepancy_normal: float


def run_cubature_example(
    seed: int,
    n: int = 512,
    d: int = 10,
    outlier_reference: str = "center",
) -> tuple[CubatureResult, CubatureResult]:
    """Build the pair of designs that makes cubature error visible.

    Design 1 is a scrambled Sobol' set transformed to the normal target.
    Design 2 replaces one point of the uniform set with (1e-15, ..., 1e-15),
    which the quantile transform throws far into the negative orthant.  The
    replaced point is the one nearest the cube center (0.5, ..., 0.5), or
    nearest the origin after transformation when
    ``outlier_reference='origin'``.
    """
    if outlier_reference not in ("center", "origin"):
        raise ContractViolationError("outlier_reference must be 'center' or 'origin'")
    target = standard_normal(d)
    u1 = generate(GeneratorConfig(GeneratorKind.SCRAMBLED_SOBOL, n, d, seed))
    x1 = transform_to_target(u1, target)
    if outlier_reference == "center":
        idx = int(np.argmin(np.sum(np.square(u1.points - 0.5), axis=1)))
    else:
        idx = int(np.argmin(np.sum(np.square(x1.points), axis=1)))
    pts2 = u1.points.copy()
    pts2[idx, :] = 1e-15
    u2 = Design(pts2, Domain.UNIT_CUBE)
    x2 = transform_to_target(u2, target)

    mu = reference_mu(d)
    results = []
    for label, u, x in (("U1", u1, x1), ("U2", u2, x2)):
        est = cubature_estimate(x)
        results.append(
            CubatureResult(
                label=label,
                estimate=est,
                reference=mu,
                relative_error=abs(est - mu) / abs(mu),
                discrepancy_uniform=math.sqrt(max(discrepancy_sq_centered_l2(u), 0.0)),
                discrepancy_normal=math.sqrt(max(discrepancy_sq_normal_closed(x), 0.0)),
            )
        )
    return results[0], results[1]


# ---------------------------------------------------------------------------
# Correlation study.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorrelationRow:
    d: int
    correlation: float  # nan when degenerate
    degenerate: bool


def run_correlation_study(
    dims=tuple(range(1, 11)),
    n: int = 50,
    replicates: int = 500,
    seed: int = 0,
) -> list[CorrelationRow]:
    """Pearson correlation, per dimension, between the centered-L2 discrepancy
    of an IID uniform design and the normal discrepancy of its quantile
    transform, over ``replicates`` independent designs."""
    if replicates < 2:
        raise ContractViolationError("correlation needs at least 2 replicates")
    rows = []
    for d in dims:
        target = standard_normal(d)
        seeds = _child_seeds(seed + d, replicates)
        du = np.empty(replicates)
        dn = np.empty(replicates)
        for r in range(replicates):
            u = generate(GeneratorConfig(GeneratorKind.RAND, n, d, int(seeds[r])))
            du[r] = math.sqrt(max(discrepancy_sq_centered_l2(u), 0.0))
            x = transform_to_target(u, target)
            dn[r] = math.sqrt(max(discrepancy_sq_normal_closed(x), 0.0))
        scale = max(du.std(), dn.std())
        if du.std() < 1e-12 or dn.std() < 1e-12 or not np.isfinite(scale):
            rows.append(CorrelationRow(d=d, correlation=float("nan"), degenerate=True))
            continue
        corr = float(np.corrcoef(du, dn)[0, 1])
        rows.append(CorrelationRow(d=d, correlation=corr, degenerate=False))
    return rows


# ---------------------------------------------------------------------------
# Generator comparison.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompareRecord:
    family: str
    d: int
    n: int
    replicate: int
    discrepancy: float
    start_discrepancy: float
    iterations: int
    monotone: bool
    seconds: float


def run_compare_study(
    pairs=COMPARE_PAIRS,
    replicates: int = 500,
    seed: int = 0,
    families=_FAMILIES,
    ce_config: ExchangeConfig | None = None,
) -> list[CompareRecord]:
    """Normal-discrepancy samples for the four design families.

    rand / sobol / esobol are evaluated as generated (sobol replicates walk
    consecutive blocks of the sequence); ce starts from the matching esobol
    replicate and runs the coordinate exchange, so its discrepancy can never
    exceed its own start.  ``seconds`` measures construction only.
    """
    unknown = set(families) - set(_FAMILIES)
    if unknown:
        raise ContractViolationError(f"unknown families {sorted(unknown)}")
    ce_config = ce_config or ExchangeConfig()
    records: list[CompareRecord] = []
    for d, n in pairs:
        target = standard_normal(d)
        seeds = _child_seeds(seed + 1009 * d + n, replicates)
        for r in range(replicates):
            built = {}
            t0 = time.perf_counter()
            u_rand = generate(GeneratorConfig(GeneratorKind.RAND, n, d, int(seeds[r])))
            x_rand = transform_to_target(u_rand, target)
            t_rand = time.perf_counter() - t0

            t0 = time.perf_counter()
            u_sob = generate(GeneratorConfig(GeneratorKind.SOBOL, n, d, skip=r * n))
            x_sob = transform_to_target(u_sob, target)
            t_sob = time.perf_counter() - t0

            t0 = time.perf_counter()
            u_eso = generate(GeneratorConfig(GeneratorKind.ESOBOL, n, d, int(seeds[r])))
            x_eso = transform_to_target(u_eso, target)
            t_eso = time.perf_counter() - t0

            d_rand = math.sqrt(max(discrepancy_sq_normal_closed(x_rand), 0.0))
            d_sob = math.sqrt(max(discrepancy_sq_normal_closed(x_sob), 0.0))
            d_eso = math.sqrt(max(discrepancy_sq_normal_closed(x_eso), 0.0))

            built["rand"] = (x_rand, d_rand, d_rand, 0, True, t_rand)
            built["sobol"] = (x_sob, d_sob, d_sob, 0, True, t_sob)
            built["esobol"] = (x_eso, d_eso, d_eso, 0, True, t_eso)

            if "ce" in families:
                t0 = time.perf_counter()
                _, trace = coordinate_exchange(x_eso, target, config=ce_config)
                t_ce = time.perf_counter() - t0 + t_eso
                path = [trace.initial_discrepancy] + [s.discrepancy for s in trace.steps]
                monotone = bool(np.all(np.diff(path) <= 1e-12))
                built["ce"] = (
                    None,
                    trace.final_discrepancy,
                    trace.initial_discrepancy,
                    trace.iterations,
                    monotone,
                    t_ce,
                )

            for family in families:
                _, disc, start, iters, mono, secs = built[family]
                records.append(
                    CompareRecord(
                        family=family,
                        d=d,
                        n=n,
                        replicate=r,
                        discrepancy=disc,
                        start_discrepancy=start,
                        iterations=iters,
                        monotone=mono,
                        seconds=secs,
                    )
                )
    return records


# ---------------------------------------------------------------------------
# Quadrature verification of the closed-form kernel integrals.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AppendixCheck:
    d: int
    single_max_abs_err: float
    single_ok: bool
    double_quadrature: float
    double_closed: float
    double_abs_err: float
    double_ok: bool

    @property
    def ok(self) -> bool:
        return self.single_ok and self.double_ok


def _single_integral_quad(x: float) -> float:
    """One-fold mean of the full origin-anchored kernel against the normal,
    integral of (1 + ktilde(t, x)) phi(t) dt, by adaptive quadrature."""
    val, _ = integrate.quad(
        lambda t: (1.0 + ktilde_origin(t, x)) * normal_pdf(t),
        -9.0,
        9.0,
        points=sorted({0.0, float(np.clip(x, -9.0, 9.0))}),
        epsabs=1e-13,
        epsrel=1e-13,
        limit=300,
    )
    return val


def verify_appendix(d: int) -> AppendixCheck:
    """Check the closed forms for the kernel's one- and two-fold normal means.

    The one-fold closed form 1 + h(x) is compared against direct quadrature
    at 25 sample points (tolerance 1e-8).  The two-fold mean is compared
    against (1 + c)^d with c = sqrt(2/pi) - 1/sqrt(pi): for d=1 by nested
    quadrature of the kernel itself, for d=2 by 2-d quadrature of the product
    of verified one-fold means (tolerance 1e-6).
    """
    if d not in (1, 2):
        raise ContractViolationError("appendix verification supports d in {1, 2}")
    xs = np.linspace(-4.0, 4.0, 25)
    single_errs = [abs(_single_integral_quad(x) - (1.0 + float(normal_h(x)))) for x in xs]
    single_max = max(single_errs)

    if d == 1:
        double_quad, _ = integrate.quad(
            lambda x: _single_integral_quad(x) * normal_pdf(x),
            -9.0,
            9.0,
            epsabs=1e-10,
            epsrel=1e-10,
            limit=300,
        )
    else:
        double_quad, _ = integrate.dblquad(
            lambda y, x: (1.0 + normal_h(x))
            * (1.0 + normal_h(y))
            * normal_pdf(x)
            * normal_pdf(y),
            -9.0,
            9.0,
            -9.0,
            9.0,
            epsabs=1e-9,
            epsrel=1e-9,
        )
    double_closed = (1.0 + C_NORMAL) ** d
    double_err = abs(double_quad - double_closed)
    return AppendixCheck(
        d=d,
        single_max_abs_err=single_max,
        single_ok=single_max <= 1e-8,
        double_quadrature=float(double_quad),
        double_closed=double_closed,
        double_abs_err=double_err,
        double_ok=double_err <= 1e-6,
    )


# ---------------------------------------------------------------------------
# Study driver and CSV output.
# ---------------------------------------------------------------------------


def run_study(config: StudyConfig, out_path=None):
    """Run a study and optionally write its rows to CSV."""
    if config.study is Study.CUBATURE:
        rows = []
        for s in _child_seeds(config.seed, config.replicates):
            r1, r2 = run_cubature_example(int(s))
            rows.extend([(int(s), r1), (int(s), r2)])
        header = [
            "seed",
            "design",
            "estimate",
            "reference",
            "relative_error",
            "discrepancy_uniform",
            "discrepancy_normal",
        ]
        records = [
            [seed, r.label, r.estimate, r.reference, r.relative_error,
             r.discrepancy_uniform, r.discrepancy_normal]
            for seed, r in rows
        ]
    elif config.study is Study.CORRELATION:
        dims = config.dims or tuple(range(1, 11))
        n = config.sizes[0] if config.sizes else 50
        result = run_correlation_study(dims=dims, n=n, replicates=config.replicates,
                                       seed=config.seed)
        header = ["d", "correlation", "degenerate"]
        records = [
            [row.d, "" if row.degenerate else f"{row.correlation:.17g}", int(row.degenerate)]
            for row in result
        ]
        rows = result
    elif config.study is Study.COMPARE:
        pairs = tuple(zip(config.dims, config.sizes)) if config.dims else COMPARE_PAIRS
        result = run_compare_study(pairs=pairs, replicates=config.replicates, seed=config.seed)
        header = [
            "family", "d", "n", "replicate", "discrepancy", "start_discrepancy",
            "iterations", "monotone", "seconds",
        ]
        records = [
            [r.family, r.d, r.n, r.replicate, f"{r.discrepancy:.17g}",
             f"{r.start_discrepancy:.17g}", r.iterations, int(r.monotone), f"{r.seconds:.6g}"]
            for r in result
        ]
        rows = result
    else:
        raise ContractViolationError(f"run_study does not handle {config.study}")

    if out_path is not None:
        with Path(out_path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(records)
    return rows

"""Design generators and the inverse-CDF transform to a target domain.

Four families:

* rand: IID uniforms;
* sobol: the Sobol' sequence (the all-zeros leading point is always
  dropped so the quantile transform stays finite; ``skip`` drops further
  leading points, e.g. ``skip = r*n`` walks consecutive blocks);
* scrambled-sobol: sobol plus a per-coordinate random digital shift
  (bitwise XOR on the dyadic expansion), which preserves the dyadic
  stratification of the raw sequence;
* esobol: scrambled-sobol with every one-dimensional projection re-mapped,
  rank-preservingly, onto the grid {1/(2N), 3/(2N), ..., (2N-1)/(2N)}.

All generators are pure functions of their config.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.stats import qmc

from .design import Design, Domain
from .errors import ContractViolationError, SizeRefusalError
from .targets import TargetKind, TargetSpec

_EPS = 2.0**-53
_SOBOL_MAX_DIM = 21201  # direction-number table limit
_BITS = 53


class GeneratorKind(Enum):
    RAND = "rand"
    SOBOL = "sobol"
    SCRAMBLED_SOBOL = "scrambled-sobol"
    ESOBOL = "esobol"


@dataclass(frozen=True)
class GeneratorConfig:
    kind: GeneratorKind
    n: int
    d: int
    seed: int = 0
    skip: int = 0

    def __post_init__(self) -> None:
        if self.n < 1 or self.d < 1:
            raise ContractViolationError("generator needs n >= 1 and d >= 1")
        if self.seed < 0 or self.skip < 0:
            raise ContractViolationError("seed and skip must be nonnegative")
        if self.kind is not GeneratorKind.RAND and self.d > _SOBOL_MAX_DIM:
            raise SizeRefusalError(
                f"dimension {self.d} exceeds the direction-number table ({_SOBOL_MAX_DIM})"
            )


def generate_uniform(config: GeneratorConfig) -> Design:
    """IID uniform design on the open unit cube, clamped away from {0,1}."""
    rng = np.random.default_rng(config.seed)
    pts = rng.uniform(size=(config.n, config.d))
    return Design(np.clip(pts, _EPS, 1.0 - _EPS), Domain.UNIT_CUBE)


def generate_sobol(config: GeneratorConfig) -> Design:
    """Unscrambled Sobol' points, starting after the all-zeros point.

    Warns when n is not a power of two: the sequence's balance properties
    only pay off on power-of-two blocks.
    """
    if config.n & (config.n - 1):
        warnings.warn(
            f"sobol sample size {config.n} is not a power of two; "
            "power-of-two sizes are recommended",
            UserWarning,
            stacklevel=2,
        )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        engine = qmc.Sobol(config.d, scramble=False)
        engine.fast_forward(1 + config.skip)
        pts = engine.random(config.n)
    return Design(np.clip(pts, _EPS, 1.0 - _EPS), Domain.UNIT_CUBE)


def _digital_shift(points: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    """XOR each column's 53-bit dyadic expansion with a fixed shift."""
    bits = np.floor(points * 2.0**_BITS).astype(np.uint64)
    shifted = (bits ^ shifts[None, :].astype(np.uint64)).astype(np.float64) / 2.0**_BITS
    return np.clip(shifted, _EPS, 1.0 - _EPS)


def scramble(design: Design, seed: int) -> Design:
    """Random digital shift of a unit-cube design, one shift per coordinate.

    XOR-ing a fixed mask onto the dyadic digits permutes every aligned
    dyadic interval partition onto itself, so stratification of digital
    sequences survives.  Deterministic per seed.
    """
    if design.domain is not Domain.UNIT_CUBE:
        raise ContractViolationError("scramble requires a unit-cube design")
    rng = np.random.default_rng(seed)
    shifts = rng.integers(0, 1 << _BITS, size=design.d, dtype=np.uint64)
    return Design(_digital_shift(design.points, shifts), Domain.UNIT_CUBE)


def esobol_adjust(design: Design) -> Design:
    """Snap every one-dimensional projection onto the centered grid.

    Within each column the rank order is preserved and the sorted values
    become exactly {(2k-1)/(2N)}.  Idempotent; ties are broken by original
    row index (stable) and reported through a warning.
    """
    if design.domain is not Domain.UNIT_CUBE:
        raise ContractViolationError("esobol_adjust requires a unit-cube design")
    pts = design.points
    n, d = pts.shape
    out = np.empty_like(pts)
    grid = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    tied = []
    for j in range(d):
        col = pts[:, j]
        if np.unique(col).size < n:
            tied.append(j)
        order = np.argsort(col, kind="stable")
        ranks = np.empty(n, dtype=np.int64)
        ranks[order] = np.arange(n)
        out[:, j] = grid[ranks]
    if tied:
        warnings.warn(
            f"ties in columns {tied} broken by original row index", UserWarning, stacklevel=2
        )
    return Design(out, Domain.UNIT_CUBE)


def generate(config: GeneratorConfig) -> Design:
    """Dispatch on the generator family; always yields a unit-cube design."""
    if config.kind is GeneratorKind.RAND:
        return generate_uniform(config)
    if config.kind is GeneratorKind.SOBOL:
        return generate_sobol(config)
    base = generate_sobol(config)
    scrambled = scramble(base, config.seed)
    if config.kind is GeneratorKind.SCRAMBLED_SOBOL:
        return scrambled
    return esobol_adjust(scrambled)


def transform_to_target(design: Design, target: TargetSpec) -> Design:
    """Map a unit-cube design through the target's marginal quantiles."""
    if design.domain is not Domain.UNIT_CUBE:
        raise ContractViolationError("transform_to_target requires a unit-cube design")
    if design.d != target.dimension:
        raise ContractViolationError(
            f"design dimension {design.d} does not match target dimension {target.dimension}"
        )
    if target.kind is TargetKind.UNIT_UNIFORM:
        return design
    pts = target.marginal_quantile(design.points)
    domain = (
        Domain.CENTERED_CUBE
        if target.kind is TargetKind.CENTERED_UNIFORM
        else Domain.REAL_SPACE
    )
    return Design(pts, domain)


# ---------------------------------------------------------------------------
# Serialization: CSV with header x1,...,xd at full double precision, plus an
# optional JSON metadata sidecar carrying the generator config.
# ---------------------------------------------------------------------------


def save_design(design: Design, path, meta: dict | None = None) -> None:
    path = Path(path)
    header = ",".join(f"x{j + 1}" for j in range(design.d))
    np.savetxt(path, design.points, delimiter=",", header=header, comments="", fmt="%.17g")
    if meta is not None:
        sidecar = path.with_suffix(".meta.json")
        sidecar.write_text(json.dumps(meta, indent=2) + "\n")


def config_meta(config: GeneratorConfig, target: str = "unit") -> dict:
    meta = asdict(config)
    meta["kind"] = config.kind.value
    meta["target"] = target
    return meta


def load_design(path, domain: Domain) -> Design:
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip()
    if not header.startswith("x1"):
        raise ContractViolationError(f"{path} does not look like a design CSV (header {header!r})")
    pts = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return Design(pts, domain)

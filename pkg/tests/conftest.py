import numpy as np
import pytest

from lowdisc import backends
from lowdisc.design import Design, Domain


@pytest.fixture(scope="session", autouse=True)
def warm_backend():
    """Trigger any JIT compilation once so timed tests measure warm code."""
    z = np.ascontiguousarray(np.array([[0.1, -0.2], [0.3, 0.4], [-0.5, 0.6]]))
    gamma = np.ones(2)
    backends.pairwise_kernel_sum(z, gamma)
    kmat = backends.pairwise_kernel_matrix(z, gamma)
    backends.coord_interaction_sums(z, kmat, gamma)


def random_unit_design(rng, n, d) -> Design:
    return Design(rng.uniform(2.0**-53, 1.0 - 2.0**-53, size=(n, d)), Domain.UNIT_CUBE)


def random_normal_design(rng, n, d) -> Design:
    return Design(rng.normal(size=(n, d)), Domain.REAL_SPACE)


def rel_err(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale

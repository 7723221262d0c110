"""Pure-numpy implementations of the hot loops.

Broadcast-based fallback used when numba is unavailable or when
LOWDISC_BACKEND=numpy is set.  Allocates O(N^2) temporaries per coordinate;
results match the numba versions to roundoff.
"""

import numpy as np


def _ktilde_outer(col):
    a = np.abs(col)
    return 0.5 * (a[:, None] + a[None, :] - np.abs(col[:, None] - col[None, :]))


def pairwise_kernel_sum(z, gamma):
    return float(pairwise_kernel_matrix(z, gamma).sum())


def pairwise_kernel_matrix(z, gamma):
    n, d = z.shape
    out = np.ones((n, n))
    for j in range(d):
        out *= 1.0 + gamma[j] * _ktilde_outer(z[:, j])
    return out


def coord_interaction_sums(z, kmat, gamma):
    n, d = z.shape
    out = np.empty(d)
    for j in range(d):
        kt = gamma[j] * _ktilde_outer(z[:, j])
        out[j] = float((kt / (1.0 + kt) * kmat).sum())
    return out

"""Numba-compiled hot loops.

These are the O(d*N^2) inner loops that dominate every discrepancy and
coordinate-exchange computation.  Signatures match _numpy_kernels exactly;
arrays must be float64 and C-contiguous.  Symmetry is exploited (upper
triangle twice plus diagonal) and scalar reductions are Kahan-compensated so
they match numpy's pairwise summation to well below the 1e-12 agreement the
engine cross-checks assume, despite the different accumulation order.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def pairwise_kernel_sum(z, gamma):
    n, d = z.shape
    total = 0.0
    comp = 0.0
    for i in range(n):
        diag = 1.0
        for j in range(d):
            diag *= 1.0 + gamma[j] * abs(z[i, j])
        y = diag - comp
        t = total + y
        comp = (t - total) - y
        total = t
        for k in range(i + 1, n):
            prod = 1.0
            for j in range(d):
                a = z[i, j]
                b = z[k, j]
                ktil = 0.5 * (abs(a) + abs(b) - abs(a - b))
                prod *= 1.0 + gamma[j] * ktil
            y = 2.0 * prod - comp
            t = total + y
            comp = (t - total) - y
            total = t
    return total


@njit(cache=True)
def pairwise_kernel_matrix(z, gamma):
    n, d = z.shape
    out = np.empty((n, n))
    for i in range(n):
        diag = 1.0
        for j in range(d):
            diag *= 1.0 + gamma[j] * abs(z[i, j])
        out[i, i] = diag
        for k in range(i + 1, n):
            prod = 1.0
            for j in range(d):
                a = z[i, j]
                b = z[k, j]
                ktil = 0.5 * (abs(a) + abs(b) - abs(a - b))
                prod *= 1.0 + gamma[j] * ktil
            out[i, k] = prod
            out[k, i] = prod
    return out


@njit(cache=True)
def coord_interaction_sums(z, kmat, gamma):
    """For each coordinate j, sum over all pairs (i,k) of

        w_j*ktilde(z_ij, z_kj) / (1 + w_j*ktilde(z_ij, z_kj)) * kmat[i,k].
    """
    n, d = z.shape
    out = np.zeros(d)
    for j in range(d):
        w = gamma[j]
        acc = 0.0
        comp = 0.0
        for i in range(n):
            ktil = w * abs(z[i, j])
            y = ktil / (1.0 + ktil) * kmat[i, i] - comp
            t = acc + y
            comp = (t - acc) - y
            acc = t
            for k in range(i + 1, n):
                a = z[i, j]
                b = z[k, j]
                ktil = w * 0.5 * (abs(a) + abs(b) - abs(a - b))
                y = 2.0 * ktil / (1.0 + ktil) * kmat[i, k] - comp
                t = acc + y
                comp = (t - acc) - y
                acc = t
        out[j] = acc
    return out

"""Numba-compiled inner loops for the entropic OT solver.

These are plain elementwise/reduction kernels; they exist because the solver
rebuilds n0 x n1 Gibbs kernels often enough that fused single-pass loops beat
chained numpy temporaries by a wide margin on large problems.
"""

from __future__ import annotations

import os

os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

import numba
import numpy as np


@numba.njit(parallel=True, fastmath=True, cache=True)
def gibbs_kernel(cost, alpha, beta, inv_eps, out):
    """out[i, j] = exp((alpha[i] + beta[j] - cost[i, j]) * inv_eps).

    Exponents below -700 are flushed to an exact zero: they are < 1e-304
    anyway, and letting exp produce subnormals would drag both this loop and
    the downstream BLAS products onto denormal slow paths.
    """
    n0, n1 = cost.shape
    for i in numba.prange(n0):
        ai = alpha[i]
        for j in range(n1):
            e = (ai + beta[j] - cost[i, j]) * inv_eps
            out[i, j] = np.exp(e) if e > -700.0 else 0.0
    return out


@numba.njit(parallel=True, fastmath=True, cache=True)
def row_softmin(cost, alpha, beta, eps, out):
    """out[i] = -eps * logsumexp_j((alpha[i] + beta[j] - cost[i, j]) / eps).

    Row-wise soft minimum of the residual cost; used as a slow-path update
    when the scaled kernel underflows.
    """
    n0, n1 = cost.shape
    for i in numba.prange(n0):
        ai = alpha[i]
        m = -np.inf
        for j in range(n1):
            v = ai + beta[j] - cost[i, j]
            if v > m:
                m = v
        acc = 0.0
        for j in range(n1):
            acc += np.exp((ai + beta[j] - cost[i, j] - m) / eps)
        out[i] = -(m + eps * np.log(acc))
    return out


@numba.njit(parallel=True, fastmath=True, cache=True)
def col_softmin(cost, alpha, beta, eps, out):
    """Column-wise analogue of row_softmin (operates on cost as stored)."""
    n0, n1 = cost.shape
    for j in numba.prange(n1):
        bj = beta[j]
        m = -np.inf
        for i in range(n0):
            v = alpha[i] + bj - cost[i, j]
            if v > m:
                m = v
        acc = 0.0
        for i in range(n0):
            acc += np.exp((alpha[i] + bj - cost[i, j] - m) / eps)
        out[j] = -(m + eps * np.log(acc))
    return out


def warmup() -> None:
    """Trigger JIT compilation on tiny inputs (cache persists across runs)."""
    c = np.zeros((2, 2))
    a = np.zeros(2)
    gibbs_kernel(c, a, a, 1.0, np.empty((2, 2)))
    row_softmin(c, a, a, 1.0, np.empty(2))
    col_softmin(c, a, a, 1.0, np.empty(2))

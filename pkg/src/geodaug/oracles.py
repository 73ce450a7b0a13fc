"""Independent reference solvers used to cross-check the entropic machinery.

These deliberately take different routes than the production code: exact
linear programming (or brute-force enumeration over permutations) instead of
Sinkhorn iterations. They only scale to tiny instances.
"""

from __future__ import annotations

from itertools import permutations

import numpy as np
from scipy.optimize import linprog


def exact_ot_cost_permutations(cost: np.ndarray) -> float:
    """Exact OT cost for uniform weights on an n x n instance by enumerating
    all n! assignment couplings (optimal because the polytope's vertices for
    uniform square marginals are permutation matrices)."""
    cost = np.asarray(cost, dtype=np.float64)
    n0, n1 = cost.shape
    if n0 != n1:
        raise ValueError("permutation oracle needs a square instance")
    if n0 > 8:
        raise ValueError("permutation oracle is limited to n <= 8")
    best = np.inf
    idx = np.arange(n0)
    for perm in permutations(range(n0)):
        total = cost[idx, list(perm)].sum()
        if total < best:
            best = total
    return float(best / n0)


def exact_ot_cost_lp(cost: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """Exact OT cost via the transportation linear program (HiGHS)."""
    cost = np.asarray(cost, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n0, n1 = cost.shape
    if a.shape != (n0,) or b.shape != (n1,):
        raise ValueError("marginal shapes do not match the cost matrix")
    # Row-sum and column-sum equality constraints on the flattened coupling.
    a_eq = np.zeros((n0 + n1, n0 * n1))
    for i in range(n0):
        a_eq[i, i * n1 : (i + 1) * n1] = 1.0
    for j in range(n1):
        a_eq[n0 + j, j::n1] = 1.0
    res = linprog(
        cost.ravel(),
        A_eq=a_eq,
        b_eq=np.concatenate([a, b]),
        bounds=(0, None),
        method="highs",
    )
    if not res.success:
        raise RuntimeError(f"LP oracle failed: {res.message}")
    return float(res.fun)

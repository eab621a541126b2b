"""Best-first branch and bound over the binary variables of a model.

Nodes are ordered by their parent's LP bound (ties FIFO), branching picks
the most fractional binary (ties to the lowest index) and explores the
1-branch first. Because the heap is bound-ordered, the first node whose
bound cannot beat the incumbent proves optimality; a node budget turns the
same information into a best bound plus gap instead of a wrong answer.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

from .model import LinearProgram, LpStatus, MipResult, MipStatus
from .simplex import solve_lp

PRUNE_EPS = 1e-9
TOL_INT = 1e-6


def solve_mip(
    lp: LinearProgram,
    node_limit: int = 200_000,
    tol_int: float = TOL_INT,
) -> MipResult:
    incumbent_x: np.ndarray | None = None
    incumbent_obj = math.inf
    seq = 0
    heap: list[tuple[float, int, dict]] = [(-math.inf, seq, {})]
    nodes = 0
    binaries = [j for j in range(lp.n_vars) if lp.binary[j]]

    while heap:
        bound, _, fixes = heapq.heappop(heap)
        if bound >= incumbent_obj - PRUNE_EPS:
            break
        if nodes >= node_limit:
            heapq.heappush(heap, (bound, -1, fixes))
            best_bound = min(bound, incumbent_obj)
            return MipResult(
                MipStatus.NODE_LIMIT, incumbent_x, incumbent_obj, best_bound, nodes
            )
        nodes += 1
        sol = solve_lp(lp, bound_overrides=fixes)
        if sol.status == LpStatus.INFEASIBLE:
            continue
        if sol.status == LpStatus.UNBOUNDED:
            raise ValueError("relaxation is unbounded; model is malformed")
        if sol.status != LpStatus.OPTIMAL:
            raise RuntimeError("LP numeric failure during branch and bound")
        if sol.objective >= incumbent_obj - PRUNE_EPS:
            continue

        x = sol.x
        frac_j = -1
        frac_best = tol_int
        for j in binaries:
            frac = min(x[j], 1.0 - x[j])
            if frac > frac_best:
                frac_best = frac
                frac_j = j
        if frac_j < 0:
            x_int = x.copy()
            for j in binaries:
                x_int[j] = round(x_int[j])
            obj = lp.objective_value(x_int)
            if obj < incumbent_obj - PRUNE_EPS:
                incumbent_obj = obj
                incumbent_x = x_int
            continue

        for val in (1.0, 0.0):
            seq += 1
            child = dict(fixes)
            child[frac_j] = (val, val)
            heapq.heappush(heap, (sol.objective, seq, child))

    if incumbent_x is None:
        return MipResult(MipStatus.INFEASIBLE, None, math.inf, math.inf, nodes)
    return MipResult(MipStatus.OPTIMAL, incumbent_x, incumbent_obj, incumbent_obj, nodes)

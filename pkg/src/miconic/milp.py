"""Branch and bound for mixed-integer linear programs over the simplex core.

Nodes are explored best-bound first; branching picks the integer variable
whose relaxation value is nearest the middle of two integers, ties broken by
lowest index, and splits on floor/ceil.  Integer variables must carry finite
bounds, which keeps the tree finite even when a node relaxation is unbounded:
such a node is branched on a feasible point until the integer part is fixed.
"""

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import NumericFailure, UnboundedInteger
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, LpProblem, solve_lp

_INT_TOL = 1e-6


@dataclass
class MilpResult:
    status: str
    x: np.ndarray = None
    obj: float = None
    lower_bound: float = -np.inf
    nodes: int = 0
    ray: np.ndarray = None


def _most_fractional(x, int_idx):
    best_j, best_score = -1, _INT_TOL
    for j in int_idx:
        f = x[j] - np.floor(x[j])
        score = min(f, 1.0 - f)
        if score > best_score + 1e-15:
            best_j, best_score = j, score
    return best_j


def solve_milp(A, b, c, lb, ub, int_idx, rel_gap=1e-6, node_limit=1_000_000):
    """Globally solve min c.x s.t. A x = b, lb <= x <= ub, x_j integer on int_idx."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    c = np.asarray(c, dtype=float).ravel()
    lb = np.asarray(lb, dtype=float).ravel()
    ub = np.asarray(ub, dtype=float).ravel()
    int_idx = sorted(int(j) for j in int_idx)
    for j in int_idx:
        if not (np.isfinite(lb[j]) and np.isfinite(ub[j])):
            raise UnboundedInteger("integer variable %d needs finite bounds" % j)

    best_x, best_obj = None, np.inf
    heap = [(-np.inf, 0, lb.copy(), ub.copy())]
    counter = 1
    nodes = 0
    unbounded_ray = None

    def snap(x):
        out = x.copy()
        for j in int_idx:
            out[j] = round(out[j])
        return out

    while heap:
        bound, _, nlb, nub = heapq.heappop(heap)
        if bound >= best_obj - rel_gap * (1.0 + abs(best_obj)):
            # everything left on the heap is at least this bound
            heapq.heappush(heap, (bound, -1, nlb, nub))
            break
        nodes += 1
        if nodes > node_limit:
            raise NumericFailure("branch and bound node limit exceeded")
        if np.any(nlb > nub):
            continue
        res = solve_lp(LpProblem(A, b, c, nlb, nub))
        if res.status == INFEASIBLE:
            continue
        if res.status == UNBOUNDED:
            # integer bounds are finite, so the ray lives in the continuous
            # part; any feasible point of this node extends to an unbounded
            # mixed solution once its integer part is fixed
            feas = solve_lp(LpProblem(A, b, np.zeros_like(c), nlb, nub))
            if feas.status != OPTIMAL:
                continue
            x = feas.x
            node_bound = -np.inf
            j = _most_fractional(x, int_idx)
            if j < 0:
                return MilpResult(
                    UNBOUNDED, x=snap(x), lower_bound=-np.inf,
                    nodes=nodes, ray=res.ray,
                )
        else:
            x = res.x
            node_bound = res.obj
            if node_bound >= best_obj - rel_gap * (1.0 + abs(best_obj)):
                continue
            j = _most_fractional(x, int_idx)
            if j < 0:
                if node_bound < best_obj:
                    best_obj, best_x = node_bound, snap(x)
                continue
        lo = np.floor(x[j])
        left_ub = nub.copy()
        left_ub[j] = lo
        right_lb = nlb.copy()
        right_lb[j] = lo + 1.0
        heapq.heappush(heap, (node_bound, counter, nlb.copy(), left_ub))
        heapq.heappush(heap, (node_bound, counter + 1, right_lb, nub.copy()))
        counter += 2

    lower = heap[0][0] if heap else best_obj
    if best_x is None:
        if heap:
            raise NumericFailure("branch and bound stopped with open nodes")
        return MilpResult(INFEASIBLE, nodes=nodes, lower_bound=np.inf)
    return MilpResult(
        OPTIMAL, x=best_x, obj=best_obj,
        lower_bound=min(lower, best_obj), nodes=nodes,
    )

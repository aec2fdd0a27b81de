"""Branch-and-bound checks against exhaustive integer enumeration."""

import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from miconic.errors import UnboundedInteger
from miconic.milp import solve_milp
from miconic.simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, LpProblem, solve_lp


def oracle_milp(A, b, c, lb, ub, int_idx):
    """Fix every integral assignment in turn and keep the best LP value."""
    ranges = [range(int(lb[j]), int(ub[j]) + 1) for j in int_idx]
    best = np.inf
    feasible = False
    for assignment in itertools.product(*ranges):
        flb, fub = lb.copy(), ub.copy()
        for j, v in zip(int_idx, assignment):
            flb[j] = fub[j] = float(v)
        res = solve_lp(LpProblem(A, b, c, flb, fub))
        if res.status == OPTIMAL:
            feasible = True
            best = min(best, res.obj)
    if not feasible:
        return INFEASIBLE, None
    return OPTIMAL, best


def random_instance(rng):
    m = rng.integers(1, 3)
    n = rng.integers(m + 1, 6)
    n_int = rng.integers(1, n + 1)
    int_idx = sorted(rng.choice(n, size=n_int, replace=False).tolist())
    A = np.round(rng.standard_normal((m, n)) * 2.0, 1)
    lb = rng.integers(-2, 1, size=n).astype(float)
    ub = lb + rng.integers(1, 4, size=n)
    c = np.round(rng.standard_normal(n) * 3.0, 1)
    if rng.uniform() < 0.75:
        x0 = rng.uniform(lb, ub)
        for j in int_idx:
            x0[j] = round(x0[j])
        b = A @ x0
    else:
        b = np.round(rng.standard_normal(m) * 2.0, 1)
    return A, b, c, lb, ub, int_idx


def test_against_enumeration_oracle():
    rng = np.random.default_rng(303)
    n_opt = n_inf = 0
    for _ in range(100):
        A, b, c, lb, ub, int_idx = random_instance(rng)
        want_status, want_obj = oracle_milp(A, b, c, lb, ub, int_idx)
        res = solve_milp(A, b, c, lb, ub, int_idx)
        assert res.status == want_status
        if want_status == OPTIMAL:
            n_opt += 1
            assert_allclose(res.obj, want_obj, rtol=1e-6, atol=1e-6)
            assert res.lower_bound <= res.obj + 1e-9
            # integer coordinates come back exactly integral
            for j in int_idx:
                assert res.x[j] == round(res.x[j])
            assert np.all(res.x >= lb - 1e-7) and np.all(res.x <= ub + 1e-7)
            assert_allclose(A @ res.x, b, atol=1e-6 * (1 + np.abs(b).max()))
        else:
            n_inf += 1
    assert n_opt > 50
    assert n_inf > 5


def test_small_knapsack():
    # max 5a + 4b + 3c s.t. 2a + 3b + c <= 5 over binaries; best is (1,1,0) -> 9
    A = np.array([[2.0, 3.0, 1.0, 1.0]])
    b = np.array([5.0])
    c = np.array([-5.0, -4.0, -3.0, 0.0])
    lb = np.zeros(4)
    ub = np.array([1.0, 1.0, 1.0, np.inf])
    res = solve_milp(A, b, c, lb, ub, [0, 1, 2])
    assert res.status == OPTIMAL
    assert_allclose(res.obj, -9.0, atol=1e-9)
    assert_allclose(res.x[:3], [1.0, 1.0, 0.0])


def test_infeasible_parity_gap():
    # 2x = 3 has no integral solution in range
    res = solve_milp([[2.0]], [3.0], [1.0], [-10.0], [10.0], [0])
    assert res.status == INFEASIBLE


def test_unbounded_free_column():
    # x integral and pinned by the row; z free with negative direction in objective
    A = np.array([[1.0, 0.0]])
    res = solve_milp(A, [0.0], [0.0, 1.0], [0.0, -np.inf], [1.0, np.inf], [0])
    assert res.status == UNBOUNDED
    assert res.ray is not None
    assert_allclose(A @ res.ray, [0.0], atol=1e-12)
    # the ray keeps the integer coordinate fixed
    assert res.ray[0] == 0.0


def test_unbounded_after_branching():
    # relaxation value depends on x, but every fixed x leaves z unbounded below
    A = np.array([[1.0, 1.0, 0.0]])
    b = np.array([0.5])
    c = np.array([0.0, 0.0, 1.0])
    lb = np.array([0.0, -np.inf, -np.inf])
    ub = np.array([1.0, np.inf, np.inf])
    res = solve_milp(A, b, c, lb, ub, [0])
    assert res.status == UNBOUNDED


def test_integer_bounds_must_be_finite():
    with pytest.raises(UnboundedInteger):
        solve_milp([[1.0]], [0.0], [1.0], [0.0], [np.inf], [0])


def test_gap_and_bound_reporting():
    rng = np.random.default_rng(404)
    A = rng.standard_normal((2, 5))
    x0 = np.array([1.0, 2.0, 0.5, -0.5, 1.5])
    b = A @ x0
    c = rng.standard_normal(5)
    lb = np.array([0.0, 0.0, -3.0, -3.0, -3.0])
    ub = np.array([3.0, 3.0, 3.0, 3.0, 3.0])
    res = solve_milp(A, b, c, lb, ub, [0, 1])
    assert res.status == OPTIMAL
    gap = res.obj - res.lower_bound
    assert gap <= 1e-6 * (1.0 + abs(res.obj)) + 1e-12

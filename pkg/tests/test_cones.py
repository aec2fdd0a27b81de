"""Membership, duality, separation, and barrier checks for the cone library."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from miconic import cones
from miconic.cones import Cone, ConeProduct
from miconic.errors import DimensionMismatch, NotInterior

ALL_PRIMAL = [
    cones.nonneg(1),
    cones.nonneg(4),
    cones.soc(2),
    cones.soc(3),
    cones.soc(5),
    cones.rsoc(3),
    cones.rsoc(6),
    cones.exp_cone(),
    cones.pow_cone(0.5),
    cones.pow_cone(0.25),
    cones.pow_cone(0.8),
]


def test_membership_orthant():
    c = cones.nonneg(3)
    assert cones.member(c, [0.0, 1.0, 2.0])
    assert not cones.member(c, [-1e-6, 1.0, 2.0])
    assert cones.member(c, [-1e-6, 1.0, 2.0], tol=1e-5)


def test_membership_soc():
    c = cones.soc(3)
    assert cones.member(c, [5.0, 3.0, 4.0])
    assert not cones.member(c, [4.999, 3.0, 4.0])
    assert cones.member(c, [4.999, 3.0, 4.0], tol=2e-3)
    assert not cones.member(c, [-1.0, 0.0, 0.0])


def test_membership_rsoc_tolerance_example():
    c = cones.rsoc(3)
    # 2*0*5 = 0 < 0.1**2, so this fails exactly but passes at a loose tol
    assert not cones.member(c, [0.0, 5.0, 0.1], tol=0.0)
    assert cones.member(c, [0.0, 5.0, 0.1], tol=1.1e-2)
    assert cones.member(c, [1.0, 2.0, 2.0])
    assert not cones.member(c, [1.0, 2.0, 2.1])
    assert not cones.member(c, [-1.0, -1.0, 1.0])


def test_membership_exp():
    c = cones.exp_cone()
    assert cones.member(c, [1.0, 1.0, math.e + 1e-12])
    assert not cones.member(c, [1.0, 1.0, math.e - 1e-3])
    # closure ray: y = 0 needs x <= 0 and z >= 0
    assert cones.member(c, [0.0, 0.0, 5.0])
    assert cones.member(c, [-3.0, 0.0, 0.0])
    assert not cones.member(c, [1e-3, 0.0, 5.0])
    assert not cones.member(c, [0.0, -1.0, 5.0])
    # huge ratio x/y must not overflow
    assert not cones.member(c, [1e4, 1e-3, 1e5])


def test_membership_exp_dual():
    c = Cone(cones.EXPDUAL, 3)
    # u < 0 branch: -u * exp(v/u) <= e * w
    assert cones.member(c, [-1.0, 0.0, 1.0 / math.e + 1e-12])
    assert not cones.member(c, [-1.0, 0.0, 1.0 / math.e - 1e-3])
    assert cones.member(c, [0.0, 2.0, 3.0])
    assert not cones.member(c, [0.0, -1e-3, 3.0])
    assert not cones.member(c, [1e-3, 1.0, 1.0])


def test_membership_pow():
    c = cones.pow_cone(0.5)
    assert cones.member(c, [1.0, 1.0, 1.0])
    assert not cones.member(c, [1.0, 1.0, 1.0 + 1e-6])
    assert cones.member(c, [4.0, 1.0, -2.0])
    assert not cones.member(c, [-1e-6, 1.0, 0.0])
    c8 = cones.pow_cone(0.8)
    assert cones.member(c8, [2.0, 3.0, 2.0**0.8 * 3.0**0.2])
    assert not cones.member(c8, [2.0, 3.0, 2.0**0.8 * 3.0**0.2 + 1e-6])


def test_dual_pairs():
    assert cones.dual(cones.nonneg(4)) == cones.nonneg(4)
    assert cones.dual(cones.soc(3)) == cones.soc(3)
    assert cones.dual(cones.rsoc(5)) == cones.rsoc(5)
    assert cones.dual(cones.exp_cone()).kind == cones.EXPDUAL
    assert cones.dual(cones.dual(cones.exp_cone())) == cones.exp_cone()
    assert cones.dual(cones.pow_cone(0.3)) == Cone(cones.POWDUAL, 3, 0.3)
    assert cones.dual(cones.dual(cones.pow_cone(0.3))) == cones.pow_cone(0.3)


def test_cone_validation():
    with pytest.raises(DimensionMismatch):
        cones.soc(1)
    with pytest.raises(DimensionMismatch):
        cones.rsoc(2)
    with pytest.raises(DimensionMismatch):
        Cone(cones.EXP, 4)
    with pytest.raises(ValueError):
        cones.pow_cone(1.0)
    with pytest.raises(ValueError):
        Cone("ball", 3)


@pytest.mark.parametrize("cone", ALL_PRIMAL, ids=str)
def test_duality_pairing_nonnegative(cone):
    # inner products between cone members and dual cone members stay >= 0
    rng = np.random.default_rng(7)
    dual = cones.dual(cone)
    for _ in range(900):
        z = cones.sample_point(cone, rng, scale=rng.uniform(0.1, 10.0))
        b = cones.sample_point(dual, rng, scale=rng.uniform(0.1, 10.0))
        assert float(z @ b) >= -1e-9 * max(1.0, np.linalg.norm(z) * np.linalg.norm(b))


def _outside_points(cone, rng, count):
    pts = []
    while len(pts) < count:
        p = rng.standard_normal(cone.dim) * rng.uniform(0.1, 10.0)
        if not cones.member(cone, p, 1e-9):
            pts.append(p)
    return pts


@pytest.mark.parametrize("cone", ALL_PRIMAL, ids=str)
def test_separation_contract(cone):
    rng = np.random.default_rng(11)
    dual = cones.dual(cone)
    for p in _outside_points(cone, rng, 300):
        beta = cones.separate(cone, p)
        assert beta is not None
        assert_allclose(np.linalg.norm(beta), 1.0, rtol=1e-12)
        assert cones.member(dual, beta, 1e-9)
        assert float(beta @ p) < 0.0


@pytest.mark.parametrize("cone", ALL_PRIMAL, ids=str)
def test_separate_returns_none_inside(cone):
    rng = np.random.default_rng(13)
    for _ in range(50):
        p = cones.sample_point(cone, rng)
        assert cones.separate(cone, p) is None


def test_separation_examples():
    # most-negative coordinate of the orthant
    beta = cones.separate(cones.nonneg(2), [-1.0, 3.0])
    assert_allclose(beta, [1.0, 0.0])
    # second-order cone: outer normal through the violated direction
    beta = cones.separate(cones.soc(3), [1.0, 2.0, 0.0])
    assert_allclose(beta, [1.0 / math.sqrt(2), -1.0 / math.sqrt(2), 0.0])


def test_separation_exp_edge_cases():
    c = cones.exp_cone()
    dual = cones.dual(c)
    hard = [
        np.array([2.0, 0.0, 5.0]),      # y = 0 wing, x > 0
        np.array([2.0, -1e-12, 5.0]),   # slightly negative y
        np.array([0.0, -2.0, 1.0]),     # negative y
        np.array([0.0, 1.0, -3.0]),     # negative z with positive y
        np.array([-1.0, -1e-14, -2.0]),  # both y and z negative
        np.array([1e4, 1e-2, 1.0]),     # overflow-scale ratio
        np.array([700.0, 1.0, 10.0]),   # overflow-scale exponent
    ]
    for p in hard:
        beta = cones.separate(c, p)
        assert beta is not None
        assert cones.member(dual, beta, 1e-9)
        assert float(beta @ p) < 0.0


def test_separation_pow_edge_cases():
    for alpha in (0.5, 0.25, 0.8):
        c = cones.pow_cone(alpha)
        dual = cones.dual(c)
        hard = [
            np.array([0.0, 1.0, 1.0]),
            np.array([1.0, 0.0, -1.0]),
            np.array([0.0, 0.0, 2.0]),
            np.array([1e8, 0.0, 3.0]),
            np.array([0.0, 1e8, 3.0]),
            np.array([-2.0, 5.0, 1.0]),
            np.array([1e-8, 1e-8, 1.0]),
        ]
        for p in hard:
            beta = cones.separate(c, p)
            assert beta is not None
            assert cones.member(dual, beta, 1e-9)
            assert float(beta @ p) < 0.0


@pytest.mark.parametrize("cone", ALL_PRIMAL, ids=str)
def test_barrier_gradient_matches_finite_differences(cone):
    rng = np.random.default_rng(17)
    for _ in range(12):
        z = cones.sample_interior(cone, rng)
        val, grad, hess = cones.barrier_value_grad_hess(cone, z)
        h = 1e-6
        fd_grad = np.zeros_like(z)
        for i in range(cone.dim):
            e = np.zeros_like(z)
            e[i] = h * max(1.0, abs(z[i]))
            vp = cones.barrier_value_grad_hess(cone, z + e)[0]
            vm = cones.barrier_value_grad_hess(cone, z - e)[0]
            fd_grad[i] = (vp - vm) / (2.0 * e[i])
        assert_allclose(grad, fd_grad, rtol=2e-4, atol=1e-6)


@pytest.mark.parametrize("cone", ALL_PRIMAL, ids=str)
def test_barrier_hessian_matches_finite_differences(cone):
    rng = np.random.default_rng(19)
    for _ in range(6):
        z = cones.sample_interior(cone, rng)
        _, _, hess = cones.barrier_value_grad_hess(cone, z)
        h = 1e-6
        fd = np.zeros((cone.dim, cone.dim))
        for i in range(cone.dim):
            e = np.zeros_like(z)
            e[i] = h * max(1.0, abs(z[i]))
            gp = cones.barrier_value_grad_hess(cone, z + e)[1]
            gm = cones.barrier_value_grad_hess(cone, z - e)[1]
            fd[:, i] = (gp - gm) / (2.0 * e[i])
        assert_allclose(hess, fd, rtol=5e-4, atol=1e-5)
        assert_allclose(hess, hess.T, rtol=1e-10, atol=1e-12)
        eigvals = np.linalg.eigvalsh(hess)
        assert eigvals.min() > 0.0


@pytest.mark.parametrize("cone", ALL_PRIMAL, ids=str)
def test_barrier_log_homogeneity(cone):
    # F(tau z) = F(z) - nu log tau, grad F(z) . z = -nu, H(z) z = -grad F(z)
    rng = np.random.default_rng(23)
    for _ in range(10):
        z = cones.sample_interior(cone, rng)
        tau = rng.uniform(0.3, 3.0)
        v0, g0, h0 = cones.barrier_value_grad_hess(cone, z)
        v1 = cones.barrier_value_grad_hess(cone, tau * z)[0]
        assert_allclose(v1, v0 - cone.nu * math.log(tau), rtol=1e-9, atol=1e-9)
        assert_allclose(float(g0 @ z), -cone.nu, rtol=1e-9)
        assert_allclose(h0 @ z, -g0, rtol=1e-8, atol=1e-10)


@pytest.mark.parametrize("cone", ALL_PRIMAL, ids=str)
def test_barrier_gradient_in_dual_interior(cone):
    rng = np.random.default_rng(29)
    dual = cones.dual(cone)
    for _ in range(20):
        z = cones.sample_interior(cone, rng)
        g = cones.barrier_value_grad_hess(cone, z)[1]
        assert cones.member(dual, -g, 0.0)


@pytest.mark.parametrize("cone", ALL_PRIMAL, ids=str)
def test_barrier_rejects_non_interior(cone):
    rng = np.random.default_rng(31)
    boundary = np.zeros(cone.dim)
    with pytest.raises(NotInterior):
        cones.barrier_value_grad_hess(cone, boundary)
    p = _outside_points(cone, rng, 1)[0]
    with pytest.raises(NotInterior):
        cones.barrier_value_grad_hess(cone, p)


@pytest.mark.parametrize("cone", ALL_PRIMAL, ids=str)
def test_canonical_interior_point(cone):
    p = cones.interior_point(cone)
    assert cones.member(cone, p, 0.0)
    # strictly interior: the barrier must evaluate
    cones.barrier_value_grad_hess(cone, p)


def test_product_slicing_and_membership():
    prod = ConeProduct([cones.nonneg(2), cones.soc(3), cones.exp_cone()])
    assert prod.dim == 8
    assert prod.nu == 2 + 2 + 3
    sl = list(prod.slices())
    assert sl[0][1] == slice(0, 2)
    assert sl[1][1] == slice(2, 5)
    assert sl[2][1] == slice(5, 8)
    z = np.concatenate([[1.0, 2.0], [5.0, 3.0, 4.0], [-1.0, 1.0, 1.0]])
    assert cones.member_product(prod, z)
    z[0] = -1.0
    assert not cones.member_product(prod, z)
    rng = np.random.default_rng(37)
    s = cones.sample_product(prod, rng, interior=True)
    assert cones.member_product(prod, s)


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        cones.member(cones.soc(3), [1.0, 2.0])
    with pytest.raises(DimensionMismatch):
        cones.barrier_value_grad_hess(cones.nonneg(2), [1.0, 2.0, 3.0])

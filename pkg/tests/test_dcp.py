"""Curvature analysis checks: worked compositions plus sampled soundness."""

import numpy as np
import pytest

from miconic import atoms
from miconic.errors import ArityError, UnboundedInteger, UnknownAtomError
from miconic.expr import (
    AFFINE,
    CONCAVE,
    CONSTANT,
    CONVEX,
    NEGATIVE,
    POSITIVE,
    UNKNOWN,
    UNKNOWN_SIGN,
    Constant,
    curvature_of,
    evaluate,
    make_atom,
    sign_of,
)
from miconic.model import DcpModel, dcp_verify


def test_affine_combination_is_affine():
    m = DcpModel()
    x1 = m.variable("x1")
    x2 = m.variable("x2")
    assert curvature_of(3 * x1 + 2 * x2 - 7) == AFFINE


def test_max_of_exp_square_and_linear_is_convex():
    m = DcpModel()
    x = m.variable("x")
    expr = atoms.max(atoms.exp(atoms.square(x)), -2 * x)
    assert curvature_of(expr) == CONVEX


def test_difference_of_squares_is_unknown():
    m = DcpModel()
    x1 = m.variable("x1")
    x2 = m.variable("x2")
    assert curvature_of(atoms.square(x1) - atoms.square(x2)) == UNKNOWN


def test_constant_folding():
    assert curvature_of(Constant(4.0)) == CONSTANT
    m = DcpModel()
    x = m.variable("x")
    assert curvature_of(x - x) == CONSTANT  # coefficients cancel structurally
    assert curvature_of(atoms.square(Constant(3.0))) == CONSTANT


def test_sign_refined_compositions():
    m = DcpModel()
    x = m.variable("x")
    # square of a positive convex inner function is convex
    assert curvature_of(atoms.square(atoms.exp(x))) == CONVEX
    # square of a negative concave inner function is convex
    assert curvature_of(atoms.square(-atoms.exp(x))) == CONVEX
    # square of a sign-unknown nonaffine inner function is not provable
    y = m.variable("y", lb=0.1, ub=10.0)
    assert curvature_of(atoms.square(atoms.log(y))) == UNKNOWN
    # abs over affine needs no sign information
    assert curvature_of(atoms.abs(3 * x - 1)) == CONVEX


def test_concave_compositions():
    m = DcpModel()
    x = m.variable("x", lb=0.0, ub=5.0)
    y = m.variable("y", lb=0.0, ub=5.0)
    g = atoms.geo_mean(x, y)
    assert curvature_of(g) == CONCAVE
    assert curvature_of(-g) == CONVEX
    # log of a concave positive function is concave (nondecreasing outer)
    assert curvature_of(atoms.log(g + 0.1)) == CONCAVE
    # inv_pos is nonincreasing, so inv_pos of concave is convex
    assert curvature_of(atoms.inv_pos(g + 0.1)) == CONVEX


def test_convex_plus_convex_and_mixtures():
    m = DcpModel()
    x = m.variable("x")
    y = m.variable("y")
    assert curvature_of(atoms.square(x) + atoms.abs(y)) == CONVEX
    assert curvature_of(atoms.square(x) - 3 * y + 1) == CONVEX
    assert curvature_of(-atoms.square(x) + atoms.abs(y)) == UNKNOWN
    assert curvature_of(2.0 * atoms.entropy(x) + y) == CONCAVE


def test_curvature_depends_only_on_structure():
    def build(names):
        m = DcpModel()
        a = m.variable(names[0])
        b = m.variable(names[1])
        return atoms.max(atoms.exp(a), atoms.square(b) - 1)

    assert curvature_of(build(["p", "q"])) == curvature_of(build(["u", "v"]))


def test_sign_lattice():
    m = DcpModel()
    p = m.variable("p", lb=0.0, ub=4.0)
    n = m.variable("n", lb=-4.0, ub=0.0)
    f = m.variable("f")
    assert sign_of(p) == POSITIVE
    assert sign_of(n) == NEGATIVE
    assert sign_of(f) == UNKNOWN_SIGN
    assert sign_of(2 * p + 3) == POSITIVE
    assert sign_of(-2 * p - 1) == NEGATIVE
    assert sign_of(p + n) == UNKNOWN_SIGN
    assert sign_of(p - n) == POSITIVE
    assert sign_of(atoms.max(n, n - 1)) == NEGATIVE
    assert sign_of(atoms.max(f, p)) == POSITIVE
    assert sign_of(atoms.norm2(f, f)) == POSITIVE


def test_atom_errors():
    m = DcpModel()
    x = m.variable("x")
    with pytest.raises(UnknownAtomError):
        make_atom("cosh", [x])
    with pytest.raises(ArityError):
        atoms.geo_mean(x, x) and make_atom("geo_mean", [x])
    with pytest.raises(ArityError):
        atoms.pow_rational(x, 0.5)
    with pytest.raises(ArityError):
        make_atom("abs", [x], param=2.0)


def test_variable_declaration_errors():
    m = DcpModel()
    with pytest.raises(UnboundedInteger):
        m.variable("k", integer=True)
    with pytest.raises(ValueError):
        m.variable("w", lb=2.0, ub=1.0)


def test_expression_arithmetic_restrictions():
    m = DcpModel()
    x = m.variable("x")
    y = m.variable("y")
    with pytest.raises(TypeError):
        x * y
    with pytest.raises(TypeError):
        x / y
    with pytest.raises(TypeError):
        if x <= y:
            pass


def test_evaluate():
    m = DcpModel()
    x = m.variable("x")
    y = m.variable("y")
    expr = 2 * atoms.square(x) - atoms.abs(y) + 1
    assert evaluate(expr, {x: 3.0, y: -2.0}) == pytest.approx(17.0)
    assert evaluate(expr, [3.0, -2.0]) == pytest.approx(17.0)
    assert evaluate(atoms.entropy(x), {x: 0.0}) == 0.0
    assert evaluate(atoms.entropy(x), {x: 1.0}) == 0.0
    big = evaluate(atoms.logsumexp(x, y), {x: 1000.0, y: 1000.0})
    assert big == pytest.approx(1000.0 + np.log(2.0))
    assert evaluate(atoms.pow_rational(x, 2), {x: -2.0}) == pytest.approx(4.0)
    assert evaluate(atoms.geo_mean(x, y), {x: 4.0, y: 9.0}) == pytest.approx(6.0)
    with pytest.raises(ValueError):
        evaluate(atoms.inv_pos(x), {x: -1.0})


def test_dcp_verify_accepts_convex_model():
    m = DcpModel()
    x = m.variable("x")
    m.minimize(x)
    m.add(atoms.exp(x) - 3 <= 0)
    report = dcp_verify(m)
    assert report.ok and not report.violations


def test_dcp_verify_rejects_concave_inequality():
    m = DcpModel()
    x = m.variable("x", lb=0.0, ub=9.0)
    y = m.variable("y", lb=0.0, ub=9.0)
    m.minimize(x)
    m.add(atoms.geo_mean(x, y) <= 0)
    report = dcp_verify(m)
    assert not report.ok
    assert any("constraint[0]" in v for v in report.violations)


def test_dcp_verify_rejects_nonaffine_equality():
    m = DcpModel()
    x = m.variable("x")
    m.minimize(x)
    m.add(atoms.square(x) == 1)
    report = dcp_verify(m)
    assert not report.ok


def test_dcp_verify_flags_undeclared_variable():
    m = DcpModel()
    other = DcpModel()
    x = m.variable("x")
    z = other.variable("z")
    m.minimize(x + z)
    report = dcp_verify(m)
    assert not report.ok
    assert any("undeclared" in v for v in report.violations)


def test_dcp_verify_separable_square_model():
    # per-term squares on 0/1 integers with a shared budget row
    m = DcpModel()
    xs = [m.variable(f"x{i}", integer=True, lb=0, ub=1) for i in range(3)]
    zs = [m.variable(f"z{i}") for i in range(3)]
    m.minimize(Constant(0.0))
    for x, z in zip(xs, zs):
        m.add(atoms.square(x - 0.5) - z <= 0)
    m.add(zs[0] + zs[1] + zs[2] <= 0.5)
    report = dcp_verify(m)
    assert report.ok


def _domain_cases():
    m = DcpModel()
    x = m.variable("x", lb=-3.0, ub=3.0)
    y = m.variable("y", lb=-3.0, ub=3.0)
    p = m.variable("p", lb=0.1, ub=4.0)
    q = m.variable("q", lb=0.1, ub=4.0)
    vars_ = [x, y, p, q]
    cases = [
        atoms.abs(2 * x - y),
        atoms.square(x + 0.5),
        atoms.sumsquares(x, y, p),
        atoms.norm2(x - 1, y + 2),
        atoms.exp(0.5 * x),
        atoms.logsumexp(x, y, x - y),
        atoms.pow_rational(x, 1.5),
        atoms.pow_rational(x, 3),
        atoms.inv_pos(p),
        atoms.max(x, y, atoms.square(x)),
        atoms.square(atoms.exp(x)),
        atoms.exp(atoms.square(x)) + atoms.abs(y),
        atoms.inv_pos(atoms.geo_mean(p, q)),
        atoms.geo_mean(p, q),
        atoms.log(p),
        atoms.entropy(p),
        atoms.log(atoms.geo_mean(p, q)),
        2.5 * atoms.entropy(p) - atoms.square(x) * 0.0 + atoms.log(q),
    ]
    return vars_, cases


def test_midpoint_soundness_of_reported_curvature():
    vars_, cases = _domain_cases()
    rng = np.random.default_rng(601)
    for expr in cases:
        curv = curvature_of(expr)
        assert curv in (CONVEX, CONCAVE), f"case skipped analysis: {expr!r}"
        for _ in range(1000):
            a = {v: rng.uniform(v.lb, v.ub) for v in vars_}
            b = {v: rng.uniform(v.lb, v.ub) for v in vars_}
            mid = {v: 0.5 * (a[v] + b[v]) for v in vars_}
            fm = evaluate(expr, mid)
            avg = 0.5 * (evaluate(expr, a) + evaluate(expr, b))
            if curv == CONVEX:
                assert fm <= avg + 1e-9
            else:
                assert fm >= avg - 1e-9


def test_atom_library_contents():
    names = {a.name for a in atoms.atom_library()}
    assert {
        "abs", "square", "sumsquares", "norm2", "geo_mean", "exp", "log",
        "entropy", "logsumexp", "pow_rational", "inv_pos", "max",
    } <= names

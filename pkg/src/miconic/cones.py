"""Cone families: membership, duals, separation, and barrier calculus.

Five primal families are supported: the nonnegative orthant NONNEG(d),
the second-order cone SOC(d) = {(t, x) : ||x|| <= t}, the rotated
second-order cone RSOC(d) = {(x, y, w) : 2xy >= ||w||^2, x >= 0, y >= 0},
the exponential cone EXP = cl{(x, y, z) : y > 0, y*exp(x/y) <= z}, and the
power cone POW(a) = {(x, y, z) : |z| <= x^a * y^(1-a), x >= 0, y >= 0}.

NONNEG, SOC and RSOC are self-dual.  The duals of EXP and POW are distinct
families (EXPDUAL, POWDUAL) that support membership tests so certificates
can be validated, but no barrier.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DimensionMismatch, NotInterior

NONNEG = "nonneg"
SOC = "soc"
RSOC = "rsoc"
EXP = "exp"
POW = "pow"
EXPDUAL = "expdual"
POWDUAL = "powdual"

_PRIMAL_KINDS = (NONNEG, SOC, RSOC, EXP, POW)


@dataclass(frozen=True)
class Cone:
    """A single cone factor, tagged by family and dimension."""

    kind: str
    dim: int
    alpha: float = None

    def __post_init__(self):
        if self.kind == NONNEG:
            if self.dim < 1:
                raise DimensionMismatch("nonneg cone needs dim >= 1")
        elif self.kind == SOC:
            if self.dim < 2:
                raise DimensionMismatch("soc cone needs dim >= 2")
        elif self.kind == RSOC:
            if self.dim < 3:
                raise DimensionMismatch("rsoc cone needs dim >= 3")
        elif self.kind in (EXP, EXPDUAL):
            if self.dim != 3:
                raise DimensionMismatch("exp cone has dim 3")
        elif self.kind in (POW, POWDUAL):
            if self.dim != 3:
                raise DimensionMismatch("pow cone has dim 3")
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ValueError("pow cone needs alpha in (0, 1)")
        else:
            raise ValueError("unknown cone kind %r" % (self.kind,))

    @property
    def nu(self):
        """Barrier parameter of the standard log-homogeneous barrier."""
        if self.kind == NONNEG:
            return self.dim
        if self.kind in (SOC, RSOC):
            return 2
        return 3


def nonneg(dim):
    return Cone(NONNEG, dim)


def soc(dim):
    return Cone(SOC, dim)


def rsoc(dim):
    return Cone(RSOC, dim)


def exp_cone():
    return Cone(EXP, 3)


def pow_cone(alpha):
    return Cone(POW, 3, alpha)


@dataclass(frozen=True)
class ConeProduct:
    """An ordered product of cone factors covering a z-block."""

    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def dim(self):
        return sum(f.dim for f in self.factors)

    def slices(self):
        """Yield (factor, slice) pairs in order."""
        at = 0
        for f in self.factors:
            yield f, slice(at, at + f.dim)
            at += f.dim

    @property
    def nu(self):
        return sum(f.nu for f in self.factors)


def dual(cone):
    """The dual cone description.  Self-dual families return themselves."""
    if cone.kind in (NONNEG, SOC, RSOC):
        return cone
    if cone.kind == EXP:
        return Cone(EXPDUAL, 3)
    if cone.kind == EXPDUAL:
        return Cone(EXP, 3)
    if cone.kind == POW:
        return Cone(POWDUAL, 3, cone.alpha)
    if cone.kind == POWDUAL:
        return Cone(POW, 3, cone.alpha)
    raise ValueError(cone.kind)


def _check_dim(cone, p):
    p = np.asarray(p, dtype=float)
    if p.shape != (cone.dim,):
        raise DimensionMismatch(
            "point of shape %s for cone of dim %d" % (p.shape, cone.dim)
        )
    return p


def _exp_branch_pos(x, y, z, tol):
    # y > 0 branch of EXP: y * exp(x/y) <= z + tol, evaluated stably.
    if y <= 0.0:
        return False
    r = x / y
    if r > 500.0:
        if z + tol <= 0.0:
            return False
        return math.log(y) + r <= math.log(z + tol)
    val = y * math.exp(r)
    return val <= z + tol


def _expdual_branch_neg(u, v, w, tol):
    # u < 0 branch of EXPDUAL: -u * exp(v/u) <= e * w + tol.
    if u >= 0.0:
        return False
    r = v / u
    if r > 500.0:
        rhs = math.e * w + tol
        if rhs <= 0.0:
            return False
        return math.log(-u) + r <= math.log(rhs)
    val = (-u) * math.exp(r)
    return val <= math.e * w + tol


def _pow_surface(a, b, alpha):
    # a^alpha * b^(1-alpha) with negative inputs clamped to zero.
    a = max(a, 0.0)
    b = max(b, 0.0)
    if a == 0.0 or b == 0.0:
        return 0.0
    return math.exp(alpha * math.log(a) + (1.0 - alpha) * math.log(b))


def member(cone, p, tol=0.0):
    """Membership test with additive tolerance on the defining inequalities."""
    p = _check_dim(cone, p)
    k = cone.kind
    if k == NONNEG:
        return bool(np.min(p) >= -tol)
    if k == SOC:
        t, x = p[0], p[1:]
        return t >= -tol and float(np.linalg.norm(x)) <= t + tol
    if k == RSOC:
        x, y, w = p[0], p[1], p[2:]
        return (
            x >= -tol
            and y >= -tol
            and float(w @ w) <= 2.0 * max(x, 0.0) * max(y, 0.0) + tol
        )
    if k == EXP:
        x, y, z = p
        if _exp_branch_pos(x, y, z, tol):
            return True
        return abs(y) <= tol and x <= tol and z >= -tol
    if k == EXPDUAL:
        u, v, w = p
        if _expdual_branch_neg(u, v, w, tol):
            return True
        return abs(u) <= tol and v >= -tol and w >= -tol
    if k == POW:
        x, y, z = p
        if x < -tol or y < -tol:
            return False
        return abs(z) <= _pow_surface(x, y, cone.alpha) + tol
    if k == POWDUAL:
        u, v, w = p
        if u < -tol or v < -tol:
            return False
        a = cone.alpha
        return abs(w) <= _pow_surface(u / a, v / (1.0 - a), a) + tol
    raise ValueError(k)


def strict_member(cone, p):
    """Exact strict-interior test, the domain of the cone's barrier.

    Evaluated in log form where the defining inequality could overflow.
    """
    p = _check_dim(cone, p)
    k = cone.kind
    if k == NONNEG:
        return bool(np.min(p) > 0.0)
    if k == SOC:
        return p[0] > float(np.linalg.norm(p[1:]))
    if k == RSOC:
        x, y, w = p[0], p[1], p[2:]
        return x > 0.0 and y > 0.0 and float(w @ w) < 2.0 * x * y
    if k == EXP:
        x, y, z = p
        return y > 0.0 and z > 0.0 and math.log(y) + x / y < math.log(z)
    if k == EXPDUAL:
        u, v, w = p
        return u < 0.0 and w > 0.0 and math.log(-u) + v / u < 1.0 + math.log(w)
    if k == POW:
        x, y, z = p
        if x <= 0.0 or y <= 0.0:
            return False
        if z == 0.0:
            return True
        a = cone.alpha
        return math.log(abs(z)) < a * math.log(x) + (1.0 - a) * math.log(y)
    if k == POWDUAL:
        u, v, w = p
        if u <= 0.0 or v <= 0.0:
            return False
        if w == 0.0:
            return True
        a = cone.alpha
        return math.log(abs(w)) < a * math.log(u / a) + (1.0 - a) * math.log(
            v / (1.0 - a)
        )
    raise ValueError(k)


def _unit(beta):
    n = float(np.linalg.norm(beta))
    if n == 0.0:
        return None
    return beta / n


def _separate_soc(p):
    t, x = p[0], p[1:]
    nx = float(np.linalg.norm(x))
    beta = np.zeros_like(p)
    if nx > 0.0:
        beta[0] = 1.0
        beta[1:] = -x / nx
    else:
        beta[0] = 1.0
    return beta


_RSOC_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _rsoc_rotate(p):
    # Orthogonal involution mapping RSOC onto SOC and back.
    q = p.copy()
    q[0] = (p[0] + p[1]) * _RSOC_INV_SQRT2
    q[1] = (p[0] - p[1]) * _RSOC_INV_SQRT2
    return q


def _separate_exp(p):
    x, y, z = p
    if y > 0.0:
        # Supporting hyperplane of the graph y*exp(x/y) at the given ray,
        # scaled by exp(-x/y) when that would overflow.
        r = x / y
        if r > 50.0:
            return np.array([-1.0, r - 1.0, math.exp(-r) if r < 745.0 else 0.0])
        er = math.exp(r)
        return np.array([-er, er * (r - 1.0), 1.0])
    if z >= 0.0 and x > 1e-9:
        # Boundary dual with u < 0; the v*y term only helps since y <= 0.
        v = max(1.0, math.log((abs(z) + 1.0) / x) + 5.0)
        return np.array([-1.0, v, math.exp(-v - 1.0) if v < 744.0 else 0.0])
    # Remaining violations have y < 0 or z < 0; cut on the worse coordinate.
    if z < y:
        return np.array([0.0, 0.0, 1.0])
    return np.array([0.0, 1.0, 0.0])


def _separate_pow(p, alpha):
    x, y, z = p
    xc, yc = max(x, 0.0), max(y, 0.0)
    viol_sign = -min(x, y, 0.0)
    viol_surf = abs(z) - _pow_surface(xc, yc, alpha)
    if viol_sign >= viol_surf:
        beta = np.zeros(3)
        beta[0 if x <= y else 1] = 1.0
        return beta
    # |z| exceeds the surface: support the graph at (xc+d, yc+d), nudged off
    # zero coordinates but kept below |z| so the cut still separates p.
    d = 0.0 if min(xc, yc) > 0.0 else abs(z) * 1e-9 + 1e-300
    for _ in range(60):
        xs, ys = xc + d, yc + d
        if _pow_surface(xs, ys, alpha) <= abs(z) - 0.5 * viol_surf:
            break
        d *= 1e-6
        if d < 1e-300:
            d = 0.0
            xs, ys = max(xc, 1e-300), max(yc, 1e-300)
            break
    b1 = alpha * math.exp((1.0 - alpha) * (math.log(ys) - math.log(xs)))
    b2 = (1.0 - alpha) * math.exp(alpha * (math.log(xs) - math.log(ys)))
    return np.array([b1, b2, -math.copysign(1.0, z)])


def separate(cone, p):
    """A unit-norm dual vector beta with beta.p < 0, or None if p is inside.

    The returned beta is an outer normal of a hyperplane supporting the cone,
    so beta is a member of the dual cone and every cone point q satisfies
    beta.q >= 0 while beta.p < 0.  Dual families reduce to their primal
    counterparts through a symmetric change of coordinates.
    """
    p = _check_dim(cone, p)
    if member(cone, p, 1e-9):
        return None
    k = cone.kind
    if k == NONNEG:
        beta = np.zeros_like(p)
        beta[int(np.argmin(p))] = 1.0
    elif k == SOC:
        beta = _separate_soc(p)
    elif k == RSOC:
        beta = _rsoc_rotate(_separate_soc(_rsoc_rotate(p)))
    elif k == EXP:
        beta = _separate_exp(p)
    elif k == POW:
        beta = _separate_pow(p, cone.alpha)
    elif k == EXPDUAL:
        # p in EXPDUAL iff M p in EXP for the symmetric M below, so a
        # separator of M p maps back through M onto a member of EXP
        mp = np.array([-p[1], -p[0], math.e * p[2]])
        bt = _separate_exp(mp)
        beta = np.array([-bt[1], -bt[0], math.e * bt[2]])
    elif k == POWDUAL:
        a = cone.alpha
        tp = np.array([p[0] / a, p[1] / (1.0 - a), p[2]])
        bt = _separate_pow(tp, a)
        beta = np.array([bt[0] / a, bt[1] / (1.0 - a), bt[2]])
    else:
        raise ValueError(k)
    return _unit(beta)


def interior_point(cone):
    """A canonical strictly interior point, used to start the conic solver."""
    k = cone.kind
    if k == NONNEG:
        return np.ones(cone.dim)
    if k == SOC:
        p = np.zeros(cone.dim)
        p[0] = 1.0
        return p
    if k == RSOC:
        p = np.zeros(cone.dim)
        p[0] = 1.0
        p[1] = 1.0
        return p
    if k == EXP:
        return np.array([-1.0, 1.0, 1.0])
    if k == POW:
        return np.array([1.0, 1.0, 0.0])
    raise ValueError(k)


def barrier_value_grad_hess(cone, z):
    """Standard log-homogeneous self-concordant barrier at interior point z.

    Returns (value, gradient, hessian).  Raises NotInterior when z is not
    strictly inside the cone.
    """
    z = _check_dim(cone, z)
    k = cone.kind
    if k == NONNEG:
        if np.min(z) <= 0.0:
            raise NotInterior("orthant barrier needs strictly positive point")
        val = -float(np.sum(np.log(z)))
        grad = -1.0 / z
        hess = np.diag(1.0 / z**2)
        return val, grad, hess
    if k == SOC:
        t, x = z[0], z[1:]
        s = t * t - float(x @ x)
        if s <= 0.0 or t <= 0.0:
            raise NotInterior("soc barrier domain violated")
        ds = np.concatenate(([2.0 * t], -2.0 * x))
        d2s = np.diag(np.concatenate(([2.0], -2.0 * np.ones(len(x)))))
        val = -math.log(s)
        grad = -ds / s
        hess = np.outer(ds, ds) / s**2 - d2s / s
        return val, grad, hess
    if k == RSOC:
        x, y, w = z[0], z[1], z[2:]
        s = 2.0 * x * y - float(w @ w)
        if s <= 0.0 or x <= 0.0 or y <= 0.0:
            raise NotInterior("rsoc barrier domain violated")
        ds = np.concatenate(([2.0 * y, 2.0 * x], -2.0 * w))
        d2s = np.zeros((cone.dim, cone.dim))
        d2s[0, 1] = d2s[1, 0] = 2.0
        for i in range(2, cone.dim):
            d2s[i, i] = -2.0
        val = -math.log(s)
        grad = -ds / s
        hess = np.outer(ds, ds) / s**2 - d2s / s
        return val, grad, hess
    if k == EXP:
        x, y, zz = z
        if y <= 0.0 or zz <= 0.0:
            raise NotInterior("exp barrier domain violated")
        psi = y * math.log(zz / y) - x
        if psi <= 0.0:
            raise NotInterior("exp barrier domain violated")
        dpsi = np.array([-1.0, math.log(zz / y) - 1.0, y / zz])
        d2psi = np.array(
            [
                [0.0, 0.0, 0.0],
                [0.0, -1.0 / y, 1.0 / zz],
                [0.0, 1.0 / zz, -y / zz**2],
            ]
        )
        val = -math.log(psi) - math.log(y) - math.log(zz)
        grad = -dpsi / psi + np.array([0.0, -1.0 / y, -1.0 / zz])
        hess = (
            np.outer(dpsi, dpsi) / psi**2
            - d2psi / psi
            + np.diag([0.0, 1.0 / y**2, 1.0 / zz**2])
        )
        return val, grad, hess
    if k == POW:
        a = cone.alpha
        x, y, zz = z
        if x <= 0.0 or y <= 0.0:
            raise NotInterior("pow barrier domain violated")
        xa = math.exp(2.0 * a * math.log(x) + 2.0 * (1.0 - a) * math.log(y))
        phi = xa - zz * zz
        if phi <= 0.0:
            raise NotInterior("pow barrier domain violated")
        dphi = np.array([2.0 * a * xa / x, 2.0 * (1.0 - a) * xa / y, -2.0 * zz])
        d2phi = np.array(
            [
                [2.0 * a * (2.0 * a - 1.0) * xa / x**2,
                 4.0 * a * (1.0 - a) * xa / (x * y), 0.0],
                [4.0 * a * (1.0 - a) * xa / (x * y),
                 2.0 * (1.0 - a) * (1.0 - 2.0 * a) * xa / y**2, 0.0],
                [0.0, 0.0, -2.0],
            ]
        )
        val = -math.log(phi) - (1.0 - a) * math.log(x) - a * math.log(y)
        grad = -dphi / phi + np.array([-(1.0 - a) / x, -a / y, 0.0])
        hess = (
            np.outer(dphi, dphi) / phi**2
            - d2phi / phi
            + np.diag([(1.0 - a) / x**2, a / y**2, 0.0])
        )
        return val, grad, hess
    raise ValueError("no barrier for cone kind %r" % (k,))


def sample_point(cone, rng, scale=1.0):
    """A random point of the cone (boundary reachable)."""
    k = cone.kind
    if k == NONNEG:
        return np.abs(rng.standard_normal(cone.dim)) * scale
    if k == SOC:
        x = rng.standard_normal(cone.dim - 1) * scale
        t = np.linalg.norm(x) * rng.uniform(1.0, 2.0)
        return np.concatenate(([t], x))
    if k == RSOC:
        return _rsoc_rotate(sample_point(Cone(SOC, cone.dim), rng, scale))
    if k == EXP:
        x = rng.uniform(-2.0, 2.0) * scale
        y = rng.uniform(0.05, 2.0) * scale
        z = y * math.exp(min(x / y, 30.0)) * rng.uniform(1.0, 2.0)
        return np.array([x, y, z])
    if k == POW:
        x = rng.uniform(0.0, 2.0) * scale
        y = rng.uniform(0.0, 2.0) * scale
        z = _pow_surface(x, y, cone.alpha) * rng.uniform(-1.0, 1.0)
        return np.array([x, y, z])
    if k == EXPDUAL:
        u = -rng.uniform(0.05, 2.0) * scale
        v = rng.uniform(-2.0, 2.0) * scale
        w = (-u) * math.exp(min(v / u, 30.0)) / math.e * rng.uniform(1.0, 2.0)
        return np.array([u, v, w])
    if k == POWDUAL:
        a = cone.alpha
        u = rng.uniform(0.0, 2.0) * scale
        v = rng.uniform(0.0, 2.0) * scale
        w = _pow_surface(u / a, v / (1.0 - a), a) * rng.uniform(-1.0, 1.0)
        return np.array([u, v, w])
    raise ValueError(k)


def sample_interior(cone, rng, scale=1.0):
    """A random strictly interior point of the cone."""
    k = cone.kind
    if k == NONNEG:
        return rng.uniform(0.2, 2.0, size=cone.dim) * scale
    if k == SOC:
        x = rng.standard_normal(cone.dim - 1) * scale
        t = np.linalg.norm(x) + rng.uniform(0.2, 1.5) * scale
        return np.concatenate(([t], x))
    if k == RSOC:
        return _rsoc_rotate(sample_interior(Cone(SOC, cone.dim), rng, scale))
    if k == EXP:
        x = rng.uniform(-2.0, 2.0) * scale
        y = rng.uniform(0.2, 2.0) * scale
        z = y * math.exp(min(x / y, 30.0)) * rng.uniform(1.2, 3.0)
        return np.array([x, y, z])
    if k == POW:
        x = rng.uniform(0.3, 2.0) * scale
        y = rng.uniform(0.3, 2.0) * scale
        z = _pow_surface(x, y, cone.alpha) * rng.uniform(-0.8, 0.8)
        return np.array([x, y, z])
    if k == EXPDUAL:
        u = -rng.uniform(0.2, 2.0) * scale
        v = rng.uniform(-2.0, 2.0) * scale
        w = (-u) * math.exp(min(v / u, 30.0)) / math.e * rng.uniform(1.2, 3.0)
        return np.array([u, v, w])
    if k == POWDUAL:
        a = cone.alpha
        u = rng.uniform(0.3, 2.0) * scale
        v = rng.uniform(0.3, 2.0) * scale
        w = _pow_surface(u / a, v / (1.0 - a), a) * rng.uniform(-0.8, 0.8)
        return np.array([u, v, w])
    raise ValueError(k)


def sample_product(cones, rng, interior=False, scale=1.0):
    """A stacked sample across all factors of a ConeProduct."""
    parts = []
    for f in cones.factors:
        if interior:
            parts.append(sample_interior(f, rng, scale))
        else:
            parts.append(sample_point(f, rng, scale))
    return np.concatenate(parts) if parts else np.zeros(0)


def member_product(cones, z, tol=0.0):
    """Factor-wise membership of a full z-block."""
    z = np.asarray(z, dtype=float)
    if z.shape != (cones.dim,):
        raise DimensionMismatch("z of shape %s for product dim %d" % (z.shape, cones.dim))
    return all(member(f, z[s], tol) for f, s in cones.slices())

"""Interior-point solver for continuous conic programs.

Solves  min c.z  s.t.  A z = b,  z in K  through a homogeneous self-dual
embedding: iterates (z, lam, beta, tau, kappa) with z interior to K and
beta interior to K* follow the central path of the embedding, and exactly
one of tau or kappa survives in the limit.  Every iteration the scaled
points are offered to independent validators, so a returned certificate
never relies on solver internals:

  optimal     z/tau primal feasible, beta = c - A'lam/tau dual feasible,
              matching objectives
  infeasible  lam with -A'lam in K* and b.lam > 0
  unbounded   ray in K with A ray = 0 and c.ray < 0

If no certificate reaches the target tolerance the best candidate within a
looser tolerance is reported as almost optimal, otherwise the solve is a
numeric failure.  Preprocessing removes dependent rows (producing an exact
infeasibility certificate when they are inconsistent) and short-circuits
problems whose rows already determine z completely.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import cones
from .errors import NotInterior

OPTIMAL = "optimal"
ALMOST_OPTIMAL = "almost_optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
NUMERIC_FAILURE = "numeric_failure"

EPS_OPT = 1e-7
EPS_ALMOST = 1e-5
EPS_PAIRING = 1e-8

_MAX_ITERS = 400


@dataclass
class ContinuousConicProblem:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    cones: cones.ConeProduct

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.b = np.asarray(self.b, dtype=float).ravel()
        self.c = np.asarray(self.c, dtype=float).ravel()
        m, n = self.A.shape
        if self.b.shape != (m,) or self.c.shape != (n,):
            raise ValueError("inconsistent conic problem dimensions")
        if self.cones.dim != n:
            raise ValueError("cone product does not cover the z block")


@dataclass
class ConicResult:
    """Solve outcome with its certificate vectors.

    For optimal/almost_optimal: z, obj, lam (beta = c - A'lam in K*).
    For infeasible: lam scaled so that either max|A'lam| = 1 or b.lam = 1,
    with beta = -A'lam.  For unbounded: ray with max|ray| = 1.
    """

    status: str
    z: np.ndarray = None
    obj: float = None
    lam: np.ndarray = None
    beta: np.ndarray = None
    ray: np.ndarray = None
    iterations: int = 0
    metrics: dict = field(default_factory=dict)


def dual_product(K):
    return cones.ConeProduct(tuple(cones.dual(f) for f in K.factors))


def _validate_optimal(A, b, c, K, Kd, z, lam, tol):
    if not np.all(np.isfinite(z)) or not np.all(np.isfinite(lam)):
        return None
    zs = 1.0 + float(np.max(np.abs(z), initial=0.0))
    if not cones.member_product(K, z, tol * zs):
        return None
    pres = float(np.max(np.abs(A @ z - b), initial=0.0))
    if pres > tol * (1.0 + float(np.max(np.abs(b), initial=0.0))):
        return None
    beta = c - A.T @ lam
    bs = 1.0 + float(np.max(np.abs(beta), initial=0.0))
    if not cones.member_product(Kd, beta, tol * bs):
        return None
    pobj = float(c @ z)
    dobj = float(b @ lam)
    if abs(pobj - dobj) > tol * (1.0 + abs(pobj) + abs(dobj)):
        return None
    return z, lam, beta, pobj


def _validate_infeasible(A, b, Kd, lam, tol):
    if not np.all(np.isfinite(lam)):
        return None
    g = -(A.T @ lam)
    s = float(np.max(np.abs(g), initial=0.0))
    pairing = float(b @ lam)
    if s > 1e-12 * max(1.0, float(np.max(np.abs(lam), initial=0.0))):
        lam_n = lam / s
        beta = g / s
        if not cones.member_product(Kd, beta, tol * 2.0):
            return None
        if float(b @ lam_n) <= EPS_PAIRING:
            return None
        return lam_n, beta
    if pairing <= 0.0:
        return None
    lam_n = lam / pairing
    beta = -(A.T @ lam_n)
    if float(np.max(np.abs(beta), initial=0.0)) > tol:
        return None
    return lam_n, beta


def _validate_unbounded(A, c, K, z, tol):
    if not np.all(np.isfinite(z)):
        return None
    s = float(np.max(np.abs(z), initial=0.0))
    if s <= 0.0:
        return None
    ray = z / s
    # rays come from strictly interior iterates, so membership must hold
    # essentially exactly after rescaling
    if not cones.member_product(K, ray, 1e-14):
        return None
    arow = float(np.max(np.abs(A @ ray), initial=0.0))
    if arow > tol * (1.0 + float(np.max(np.abs(A), initial=0.0))):
        return None
    # an interior point hugging a flat face of K can fake a descent rate of
    # order sqrt(kernel residual); demand the pairing clear that scale
    floor = 30.0 * np.sqrt(arow) * (1.0 + float(np.max(np.abs(c), initial=0.0)))
    if float(c @ ray) > -max(EPS_PAIRING, floor):
        return None
    return ray


class _BlockHessian:
    """Block-diagonal barrier Hessian with per-factor Cholesky factors."""

    def __init__(self, K, z, mu):
        self.slices = []
        self.chols = []
        for f, sl in K.slices():
            _, _, h = cones.barrier_value_grad_hess(f, z[sl])
            h = mu * h
            try:
                L = np.linalg.cholesky(h)
            except np.linalg.LinAlgError:
                jitter = 1e-13 * max(1.0, np.trace(h) / h.shape[0])
                L = np.linalg.cholesky(h + jitter * np.eye(h.shape[0]))
            self.slices.append(sl)
            self.chols.append(L)

    def solve(self, rhs):
        out = np.empty_like(rhs)
        for sl, L in zip(self.slices, self.chols):
            y = scipy.linalg.solve_triangular(L, rhs[sl], lower=True)
            out[sl] = scipy.linalg.solve_triangular(L.T, y, lower=False)
        return out


def _barrier_grad(K, z):
    g = np.empty_like(z)
    for f, sl in K.slices():
        g[sl] = cones.barrier_value_grad_hess(f, z[sl])[1]
    return g


def _interior(K, Kd, z, beta, tau, kappa):
    if tau <= 0.0 or kappa <= 0.0:
        return False
    for f, sl in K.slices():
        if not cones.strict_member(f, z[sl]):
            return False
    for f, sl in Kd.slices():
        if not cones.strict_member(f, beta[sl]):
            return False
    return True


def _proximity(K, z, beta, tau, kappa, nu):
    """Squared distance to the central path in the local Hessian metric."""
    mu = (float(z @ beta) + tau * kappa) / (nu + 1.0)
    if not np.isfinite(mu) or mu <= 0.0:
        return None
    try:
        W = _BlockHessian(K, z, mu)
    except (np.linalg.LinAlgError, NotInterior):
        return None
    e = beta + mu * _barrier_grad(K, z)
    val = float(e @ W.solve(e)) / mu + (tau * kappa / mu - 1.0) ** 2
    if not np.isfinite(val):
        return None
    return val


def _hsde_loop(A, b, c, K, max_iters):
    """Run the embedding on a preprocessed full-row-rank system."""
    m, n = A.shape
    Kd = dual_product(K)
    nu = K.nu

    z = np.concatenate([cones.interior_point(f) for f in K.factors])
    beta = -_barrier_grad(K, z)
    lam = np.zeros(m)
    tau = 1.0
    kappa = 1.0

    best_almost = None
    stalls = 0
    force_center = False
    metrics = {}

    for it in range(1, max_iters + 1):
        # offer scaled candidates to the validators first
        if tau > 1e-300:
            cand = _validate_optimal(A, b, c, K, Kd, z / tau, lam / tau, EPS_OPT)
            if cand is not None:
                zc, lc, bc, obj = cand
                return ConicResult(OPTIMAL, z=zc, obj=obj, lam=lc, beta=bc,
                                   iterations=it, metrics=metrics)
            cand = _validate_optimal(
                A, b, c, K, Kd, z / tau, lam / tau, EPS_ALMOST
            )
            if cand is not None:
                best_almost = cand
        cand = _validate_infeasible(A, b, Kd, lam, EPS_OPT)
        if cand is not None:
            lc, bc = cand
            return ConicResult(INFEASIBLE, lam=lc, beta=bc, obj=np.inf,
                               iterations=it, metrics=metrics)
        cand = _validate_unbounded(A, c, K, z, EPS_OPT)
        if cand is not None:
            return ConicResult(UNBOUNDED, ray=cand, obj=-np.inf,
                               iterations=it, metrics=metrics)

        mu = (float(z @ beta) + tau * kappa) / (nu + 1.0)
        if not np.isfinite(mu) or mu <= 0.0:
            break

        grad = _barrier_grad(K, z)
        try:
            W = _BlockHessian(K, z, mu)
        except np.linalg.LinAlgError:
            break

        # proximity to the central path decides centering vs progress
        e = beta + mu * grad
        prox2 = float(e @ W.solve(e)) / mu + (tau * kappa / mu - 1.0) ** 2
        sigma = 1.0 if (prox2 > 0.25 or force_center) else 0.0
        force_center = False

        r_p = A @ z - b * tau
        r_d = -(A.T @ lam) + c * tau - beta
        r_g = float(b @ lam) - float(c @ z) - kappa

        Winv_c = W.solve(c)
        S = W.solve(A.T)
        G = A @ S
        try:
            Gf = scipy.linalg.cho_factor(
                G + 1e-13 * max(1.0, np.trace(G) / m) * np.eye(m)
            )
        except (scipy.linalg.LinAlgError, ValueError):
            break
        v = scipy.linalg.cho_solve(Gf, b + A @ Winv_c)
        g1 = b - A @ Winv_c
        denom = float(g1 @ v) + float(c @ Winv_c) + mu / tau**2

        def solve_reduced(d1, d2, d3):
            # direction of the 3-equation reduced Newton system
            #   A dz - b dtau = d1
            #   -A'dlam + c dtau + W dz = d2
            #   b'dlam - c'dz + (mu/tau^2) dtau = d3
            wd2 = W.solve(d2)
            u = scipy.linalg.cho_solve(Gf, d1 - A @ wd2)
            dtau = (d3 + float(c @ wd2) - float(g1 @ u)) / denom
            dlam = u + v * dtau
            dz = W.solve(d2 + A.T @ dlam - c * dtau)
            return dz, dlam, dtau

        d1 = (sigma - 1.0) * r_p
        d2 = (sigma - 1.0) * r_d - beta - sigma * mu * grad
        d3 = (sigma - 1.0) * r_g - kappa + sigma * mu / tau
        dz, dlam, dtau = solve_reduced(d1, d2, d3)
        for _ in range(2):
            # iterative refinement keeps the direction accurate when the
            # scaled Hessian is badly conditioned near convergence
            e1 = d1 - (A @ dz - b * dtau)
            e2 = d2 - (-(A.T @ dlam) + c * dtau + _apply_W(W, dz))
            e3 = d3 - (float(b @ dlam) - float(c @ dz) + (mu / tau**2) * dtau)
            if (
                np.abs(e1).max(initial=0.0) + np.abs(e2).max(initial=0.0) + abs(e3)
            ) < 1e-11 * (1.0 + np.abs(d2).max(initial=0.0)):
                break
            cz, cl, ct = solve_reduced(e1, e2, e3)
            dz, dlam, dtau = dz + cz, dlam + cl, dtau + ct
        dbeta = -beta - sigma * mu * grad - _apply_W(W, dz)
        dkappa = -kappa + sigma * mu / tau - (mu / tau**2) * dtau

        # backtrack until the trial point is interior and stays near the
        # central path: progress steps must land back inside the prox ball,
        # centering steps must at least shrink the proximity
        alpha = 1.0
        accepted = False
        for _ in range(90):
            zt = z + alpha * dz
            bt = beta + alpha * dbeta
            tt = tau + alpha * dtau
            kt = kappa + alpha * dkappa
            if _interior(K, Kd, zt, bt, tt, kt):
                p2 = _proximity(K, zt, bt, tt, kt, nu)
                if p2 is not None and (
                    p2 <= 0.25 or (sigma == 1.0 and p2 < prox2)
                ):
                    accepted = True
                    break
            alpha *= 0.8
        if not accepted or alpha < 1e-9:
            stalls += 1
            force_center = True
            if stalls >= 3:
                break
            alpha = 0.0
        else:
            stalls = 0
            if sigma == 0.0 and alpha < 0.05:
                # poor predictor progress: recenter before trying again
                force_center = True
        if alpha > 0.0:
            z = z + alpha * dz
            lam = lam + alpha * dlam
            beta = beta + alpha * dbeta
            tau = tau + alpha * dtau
            kappa = kappa + alpha * dkappa

        big = max(tau, kappa, float(np.max(np.abs(z), initial=0.0)),
                  float(np.max(np.abs(beta), initial=0.0)),
                  float(np.max(np.abs(lam), initial=0.0)))
        if big > 1e10:
            s = 1.0 / big
            z, lam, beta = z * s, lam * s, beta * s
            tau, kappa = tau * s, kappa * s

    if best_almost is not None:
        zc, lc, bc, obj = best_almost
        return ConicResult(ALMOST_OPTIMAL, z=zc, obj=obj, lam=lc, beta=bc,
                           iterations=max_iters, metrics=metrics)
    return ConicResult(NUMERIC_FAILURE, iterations=max_iters, metrics=metrics)


def _apply_W(W, vec):
    out = np.empty_like(vec)
    for sl, L in zip(W.slices, W.chols):
        out[sl] = L @ (L.T @ vec[sl])
    return out


def _solve_unconstrained(c, K, Kd, m):
    """min c.z over z in K with no effective rows: 0 or unbounded below."""
    n = K.dim
    if cones.member_product(Kd, c, 0.0):
        return ConicResult(OPTIMAL, z=np.zeros(n), obj=0.0,
                           lam=np.zeros(m), beta=c.copy())
    ray = np.zeros(n)
    for f, sl in Kd.slices():
        beta = cones.separate(f, c[sl])
        if beta is not None:
            ray[sl] = beta
            break
    return ConicResult(UNBOUNDED, ray=ray, obj=-np.inf)


def _equilibrate(A, b):
    scale = np.maximum(np.max(np.abs(A), axis=1), np.abs(b))
    scale = np.where(scale > 0, scale, 1.0)
    d = 1.0 / scale
    return A * d[:, None], b * d, d


def solve_continuous(prob, max_iters=_MAX_ITERS):
    """Solve a continuous conic program with preprocessing and validation."""
    A0, b0, c, K = prob.A, prob.b, prob.c, prob.cones
    m, n = A0.shape
    Kd = dual_product(K)

    if n == 0:
        if float(np.max(np.abs(b0), initial=0.0)) <= 1e-12:
            return ConicResult(OPTIMAL, z=np.zeros(0), obj=0.0,
                               lam=np.zeros(m), beta=np.zeros(0))
        lam = b0 / float(b0 @ b0)
        return ConicResult(INFEASIBLE, lam=lam, beta=np.zeros(0), obj=np.inf)

    if m == 0:
        return _solve_unconstrained(c, K, Kd, m)

    A, b, d_scale = _equilibrate(A0, b0)

    # drop dependent rows; inconsistent dependencies give an exact certificate
    q, r, perm = scipy.linalg.qr(A.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > max(m, n) * 1e-13 * (diag[0] if len(diag) else 1.0)))
    kept = np.sort(perm[:rank])
    dropped = np.sort(perm[rank:])
    if len(dropped):
        Wc, *_ = np.linalg.lstsq(A[kept].T, A[dropped].T, rcond=None)
        rho = b[dropped] - Wc.T @ b[kept]
        worst = int(np.argmax(np.abs(rho)))
        if abs(rho[worst]) > 1e-9 * (1.0 + float(np.max(np.abs(b)))):
            lam = np.zeros(m)
            lam[dropped[worst]] = 1.0
            lam[kept] = -Wc[:, worst]
            lam /= float(b @ lam)
            return ConicResult(
                INFEASIBLE, lam=lam * d_scale,
                beta=-(A.T @ lam), obj=np.inf,
            )
    if rank == 0:
        # every row is numerically zero and consistent with b
        return _solve_unconstrained(c, K, Kd, m)
    Ak, bk = A[kept], b[kept]

    def embed_lam(lam_k):
        lam = np.zeros(m)
        lam[kept] = lam_k
        return lam * d_scale

    if rank == n:
        # the rows determine z outright: certify by direct linear algebra
        z = np.linalg.solve(Ak, bk)
        zs = 1.0 + float(np.max(np.abs(z)))
        if cones.member_product(K, z, 1e-9 * zs):
            lam_k = np.linalg.solve(Ak.T, c)
            return ConicResult(OPTIMAL, z=z, obj=float(c @ z),
                               lam=embed_lam(lam_k), beta=np.zeros(n))
        parts = np.zeros(n)
        for f, sl in K.slices():
            beta = cones.separate(f, z[sl])
            if beta is not None:
                parts[sl] = beta
                break
        lam_k = np.linalg.solve(Ak.T, -parts)
        scale = float(bk @ lam_k)
        # beta.z < 0 for the separating beta, so the pairing is positive
        lam_k /= scale
        return ConicResult(INFEASIBLE, lam=embed_lam(lam_k),
                           beta=parts / scale, obj=np.inf)

    res = _hsde_loop(Ak, bk, c, K, max_iters)
    if res.lam is not None:
        res.lam = embed_lam(res.lam)
    return res

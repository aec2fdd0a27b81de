"""Dense two-phase primal simplex for linear programs with variable bounds.

Solves  min c.x  s.t.  A x = b,  l <= x <= u  where entries of l and u may be
infinite.  Phase one minimizes the total artificial infeasibility; phase two
keeps the artificial columns pinned to zero.  Nonbasic variables rest at a
finite bound (or at zero when free), and the ratio test allows bound flips.

Entering variables follow Dantzig's rule with ties broken by lowest index;
after a long run of degenerate pivots the rule switches to Bland's, which
cannot cycle.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericFailure

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_AT_LOWER = 0
_AT_UPPER = 1
_FREE = 2
_BASIC = 3


@dataclass
class LpProblem:
    """min c.x subject to A x = b and elementwise bounds on x."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    lb: np.ndarray
    ub: np.ndarray

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.b = np.asarray(self.b, dtype=float).ravel()
        self.c = np.asarray(self.c, dtype=float).ravel()
        self.lb = np.asarray(self.lb, dtype=float).ravel()
        self.ub = np.asarray(self.ub, dtype=float).ravel()
        m, n = self.A.shape
        if self.b.shape != (m,) or self.c.shape != (n,):
            raise ValueError("inconsistent LP dimensions")
        if self.lb.shape != (n,) or self.ub.shape != (n,):
            raise ValueError("inconsistent bound dimensions")
        if np.any(self.lb > self.ub):
            raise ValueError("crossing bounds")


@dataclass
class LpResult:
    """Outcome of a simplex solve.

    status is one of optimal / infeasible / unbounded.  For optimal results
    x, obj and the equality-row duals y are set.  For infeasible results
    farkas holds y with y.b > sup{y.A x : l <= x <= u}.  For unbounded
    results ray is a recession direction with A ray = 0 and c.ray < 0.
    """

    status: str
    x: np.ndarray = None
    obj: float = None
    y: np.ndarray = None
    farkas: np.ndarray = None
    ray: np.ndarray = None
    iterations: int = 0


@dataclass
class _Tableau:
    A: np.ndarray
    b: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    basis: np.ndarray
    status: np.ndarray
    degenerate_pivots: int = 0
    tiny_pivots: int = 0
    iterations: int = 0
    enterable: np.ndarray = field(default=None)
    Binv: np.ndarray = None
    _since_refactor: int = 0

    def refactor(self):
        try:
            self.Binv = np.linalg.inv(self.A[:, self.basis])
        except np.linalg.LinAlgError:
            raise NumericFailure("singular simplex basis")
        self._since_refactor = 0

    def pivot_basis(self, leave, enter, w):
        """Replace basis[leave] by enter, updating Binv in product form."""
        wl = w[leave]
        if abs(wl) < 1e-13 or self._since_refactor >= 64:
            self.basis[leave] = enter
            self.refactor()
            return
        row = self.Binv[leave] / wl
        self.Binv -= np.outer(w, row)
        self.Binv[leave] = row
        self.basis[leave] = enter
        self._since_refactor += 1

    def nonbasic_values(self):
        v = np.zeros(self.A.shape[1])
        at_lower = self.status == _AT_LOWER
        at_upper = self.status == _AT_UPPER
        v[at_lower] = self.lb[at_lower]
        v[at_upper] = self.ub[at_upper]
        return v

    def values(self):
        v = self.nonbasic_values()
        rhs = self.b - self.A @ v
        v[self.basis] = self.Binv @ rhs
        return v

    def duals(self, c):
        return c[self.basis] @ self.Binv


_PIVOT_TOL = 1e-11
_COST_TOL = 1e-9
_MAX_ITER = 50000


def _choose_entering(tab, d, bland):
    at_upper = tab.status == _AT_UPPER
    score = np.where(at_upper, d, -d)
    sigma = np.where(at_upper, -1.0, 1.0)
    flip = (tab.status == _FREE) & (d > _COST_TOL)
    score[flip] = d[flip]
    sigma[flip] = -1.0
    score[~tab.enterable | (tab.status == _BASIC)] = -np.inf
    if bland:
        ok = score > _COST_TOL
        if not ok.any():
            return None
        best = int(np.argmax(ok))
    else:
        best = int(np.argmax(score))
        if not score[best] > _COST_TOL:
            return None
    return best, float(sigma[best])


def _phase(tab, c, allow_unbounded):
    """Run simplex iterations to optimality of objective c.

    Returns (status, values) where status is OPTIMAL or UNBOUNDED, the
    latter only when allow_unbounded is set (phase one is always bounded).
    """
    m, n = tab.A.shape
    bland_after = 10 * (m + n)
    while True:
        tab.iterations += 1
        if tab.iterations > _MAX_ITER:
            raise NumericFailure("simplex iteration limit")
        x = tab.values()
        y = tab.duals(c)
        d = c - tab.A.T @ y
        bland = tab.degenerate_pivots > bland_after
        pick = _choose_entering(tab, d, bland)
        if pick is None:
            return OPTIMAL, x
        e, sigma = pick
        w = tab.Binv @ tab.A[:, e]
        # entering moves by t >= 0 in direction sigma; basic values move -sigma*w*t
        wi = sigma * w
        xB = x[tab.basis]
        lbB = tab.lb[tab.basis]
        ubB = tab.ub[tab.basis]
        cap = np.full(m, np.inf)
        pos = wi > _PIVOT_TOL
        neg = wi < -_PIVOT_TOL
        with np.errstate(invalid="ignore"):
            cap[pos] = np.where(
                np.isfinite(lbB[pos]), (xB[pos] - lbB[pos]) / wi[pos], np.inf
            )
            cap[neg] = np.where(
                np.isfinite(ubB[neg]), (ubB[neg] - xB[neg]) / (-wi[neg]),
                np.inf,
            )
        np.maximum(cap, 0.0, out=cap)
        rng_e = tab.ub[e] - tab.lb[e]
        limit = rng_e if np.isfinite(rng_e) else np.inf
        cap_min = float(np.min(cap, initial=np.inf))
        if cap_min < limit - 1e-12:
            idx = np.nonzero(cap <= cap_min + 1e-12)[0]
            if bland:
                leave = int(idx[np.argmin(tab.basis[idx])])
            else:
                leave = int(idx[np.argmax(np.abs(w[idx]))])
            t_best = cap_min
            leave_hit = _AT_LOWER if wi[leave] > 0 else _AT_UPPER
        else:
            leave = -1
            t_best = limit
        if not np.isfinite(t_best):
            if not allow_unbounded:
                raise NumericFailure("phase one claims unbounded")
            ray = np.zeros(n)
            ray[e] = sigma
            ray[tab.basis] = -sigma * w
            return UNBOUNDED, ray
        if t_best < 1e-9:
            tab.degenerate_pivots += 1
        else:
            tab.degenerate_pivots = 0
        if leave < 0:
            # entering variable flips to its opposite bound
            tab.status[e] = _AT_UPPER if sigma > 0 else _AT_LOWER
            continue
        if abs(w[leave]) < _PIVOT_TOL:
            tab.tiny_pivots += 1
            if tab.tiny_pivots > 30:
                raise NumericFailure("repeated tiny simplex pivots")
        else:
            tab.tiny_pivots = 0
        tab.status[e] = _BASIC
        tab.status[tab.basis[leave]] = leave_hit
        tab.pivot_basis(leave, e, w)


def solve_lp(prob):
    """Solve a bounded-variable LP by the two-phase simplex method."""
    m, n = prob.A.shape
    if m == 0:
        # pure box problem: push each variable to its favorable bound
        x = np.zeros(n)
        for j in range(n):
            if prob.c[j] > 0:
                x[j] = prob.lb[j]
            elif prob.c[j] < 0:
                x[j] = prob.ub[j]
            else:
                x[j] = np.clip(0.0, prob.lb[j], prob.ub[j])
            if not np.isfinite(x[j]):
                ray = np.zeros(n)
                ray[j] = -np.sign(prob.c[j])
                return LpResult(UNBOUNDED, ray=ray)
        return LpResult(OPTIMAL, x=x, obj=float(prob.c @ x), y=np.zeros(0))

    # initial nonbasic rest points: finite bound nearest zero, else free at 0
    status = np.empty(n + m, dtype=int)
    for j in range(n):
        lo, hi = prob.lb[j], prob.ub[j]
        if np.isfinite(lo) and np.isfinite(hi):
            status[j] = _AT_LOWER if abs(lo) <= abs(hi) else _AT_UPPER
        elif np.isfinite(lo):
            status[j] = _AT_LOWER
        elif np.isfinite(hi):
            status[j] = _AT_UPPER
        else:
            status[j] = _FREE
    status[n:] = _BASIC

    v0 = np.zeros(n)
    v0[status[:n] == _AT_LOWER] = prob.lb[status[:n] == _AT_LOWER]
    v0[status[:n] == _AT_UPPER] = prob.ub[status[:n] == _AT_UPPER]
    rho = prob.b - prob.A @ v0
    signs = np.where(rho >= 0, 1.0, -1.0)

    A = np.hstack([prob.A, np.diag(signs)])
    lb = np.concatenate([prob.lb, np.zeros(m)])
    ub = np.concatenate([prob.ub, np.full(m, np.inf)])
    tab = _Tableau(
        A=A,
        b=prob.b.copy(),
        lb=lb,
        ub=ub,
        basis=np.arange(n, n + m),
        status=status,
        enterable=np.ones(n + m, dtype=bool),
    )
    tab.refactor()

    # fixed columns contribute a constant and must never enter the basis
    tab.enterable[:n] = prob.ub - prob.lb > 0.0

    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    _, x1 = _phase(tab, c1, allow_unbounded=False)
    infeas = float(c1 @ x1)
    scale = 1.0 + float(np.linalg.norm(prob.b, np.inf))
    if infeas > 1e-8 * scale:
        y = tab.duals(c1)
        return LpResult(INFEASIBLE, farkas=y, iterations=tab.iterations)

    # phase two: artificials pinned at zero and barred from entering
    tab.ub[n:] = 0.0
    tab.enterable[n:] = False
    c2 = np.concatenate([prob.c, np.zeros(m)])
    st, res = _phase(tab, c2, allow_unbounded=True)
    if st == UNBOUNDED:
        return LpResult(UNBOUNDED, ray=res[:n], iterations=tab.iterations)
    x = res[:n]
    return LpResult(
        OPTIMAL,
        x=x,
        obj=float(prob.c @ x),
        y=tab.duals(c2),
        iterations=tab.iterations,
    )

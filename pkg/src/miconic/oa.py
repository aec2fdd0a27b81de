"""Outer approximation for mixed-integer conic programs in standard form.

The driver alternates a MILP relaxation built from an accumulating pool of
dual cuts with continuous conic subproblems on the integer assignments the
MILP proposes.  A feasible subproblem contributes a tangent cut and a
candidate incumbent, an infeasible one contributes a ray cut excluding its
assignment, and when neither certificate is available the driver falls back
to separation cuts.  Instances whose fibers admit no dual certificates make
the loop revisit an assignment without moving either bound; that pattern is
detected and reported as an assumption failure rather than looped on.
"""

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import cones
from .errors import InvalidCut, NumericFailure, TooLarge
from .ipm import (
    ALMOST_OPTIMAL,
    INFEASIBLE,
    NUMERIC_FAILURE,
    OPTIMAL,
    UNBOUNDED,
    ContinuousConicProblem,
    solve_continuous,
)
from .milp import solve_milp

SUBPROBLEM_DUAL = "subproblem_dual"
INFEASIBILITY_RAY = "infeasibility_ray"
SEPARATION = "separation"
INITIAL_RELAXATION = "initial_relaxation"

ASSUMPTION_FAILURE = "assumption_failure"
ITERATION_LIMIT = "iteration_limit"
TIME_LIMIT = "time_limit"

_PROGRESS = 1e-9


@dataclass
class Cut:
    """A valid inequality beta.z >= 0 with beta in the dual cone product."""

    beta: np.ndarray
    provenance: str
    assignment: tuple = None


@dataclass
class OaConfig:
    tol: float = 1e-5
    max_iters: int = 1000
    time_limit: float = None
    milp_gap: float = 1e-8
    node_limit: int = 1_000_000


@dataclass
class OaState:
    cones: cones.ConeProduct
    tol: float
    z_upper: float = np.inf
    z_lower: float = -np.inf
    cuts: list = field(default_factory=list)
    incumbent_x: np.ndarray = None
    incumbent_z: np.ndarray = None
    visited: dict = field(default_factory=dict)
    iterations: int = 0
    _units: list = field(default_factory=list)


@dataclass
class OaOutcome:
    status: str
    x: np.ndarray = None
    z: np.ndarray = None
    obj: float = None
    lower_bound: float = -np.inf
    upper_bound: float = np.inf
    iterations: int = 0
    cut_count: int = 0
    cuts: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    diagnostic: str = None


_REPAIR_CAP = 1e-3
_interior_cache = {}


def _dual_interior(f):
    """A canonical strictly interior direction of the dual factor."""
    key = (f.kind, f.dim, getattr(f, "alpha", None))
    if key not in _interior_cache:
        g = cones.sample_interior(cones.dual(f), np.random.default_rng(7))
        _interior_cache[key] = g / float(np.max(np.abs(g)))
    return _interior_cache[key]


def _repair_block(f, block):
    """Nudge a block back onto the dual factor along an interior direction.

    Numerically computed dual vectors land on either side of the cone
    boundary; a doubling search finds a small shift restoring membership.
    Returns the repaired block, or None when the block is genuinely far
    from the cone (relative violation beyond the repair cap).
    """
    d = cones.dual(f)
    g = _dual_interior(f) * float(np.max(np.abs(block)))
    delta = 1e-10
    while delta <= _REPAIR_CAP:
        cand = block + delta * g
        if cones.member(d, cand, 1e-9):
            return cand
        delta *= 2.0
    return None


def add_cut(state, cut):
    """Validate, normalize and append a cut; vacuous or duplicate cuts drop.

    Each factor block must lie (essentially exactly) in the dual cone
    after scaling to unit max-norm; blocks that miss by a small margin are
    repaired toward the dual interior, and only cuts that stay outside the
    repair cap raise InvalidCut.
    """
    beta = np.asarray(cut.beta, dtype=float).ravel()
    if beta.shape != (state.cones.dim,):
        raise InvalidCut(
            "cut length %d does not match the cone block of dimension %d"
            % (beta.size, state.cones.dim)
        )
    if not np.all(np.isfinite(beta)):
        raise InvalidCut("cut has non-finite entries")
    scale = float(np.max(np.abs(beta), initial=0.0))
    if scale <= 0.0:
        # a zero cut is vacuous
        return state
    beta = beta / scale
    for f, sl in state.cones.slices():
        block = beta[sl]
        if cones.member(cones.dual(f), block, 1e-9):
            continue
        repaired = _repair_block(f, block)
        if repaired is None:
            raise InvalidCut("cut leaves the dual cone on a %s factor" % f.kind)
        beta[sl] = repaired
    beta = beta / float(np.max(np.abs(beta)))
    unit = beta / float(np.linalg.norm(beta))
    for old, u in zip(state.cuts, state._units):
        if old.provenance != cut.provenance or old.assignment != cut.assignment:
            continue
        if float(unit @ u) > 1.0 - 1e-10:
            return state
    state.cuts.append(Cut(beta, cut.provenance, cut.assignment))
    state._units.append(unit)
    return state


def _factor_tangents(f):
    """Boundary points of the dual cone used as initial relaxation cuts."""
    d = f.dim
    out = []
    if f.kind == cones.NONNEG:
        for i in range(d):
            v = np.zeros(d)
            v[i] = 1.0
            out.append(v)
    elif f.kind == cones.SOC:
        v = np.zeros(d)
        v[0] = 1.0
        out.append(v.copy())
        for i in range(1, d):
            for s in (1.0, -1.0):
                v = np.zeros(d)
                v[0], v[i] = 1.0, s
                out.append(v)
    elif f.kind == cones.RSOC:
        for i in (0, 1):
            v = np.zeros(d)
            v[i] = 1.0
            out.append(v)
        for i in range(2, d):
            for a, b in ((1.0, 0.5), (0.5, 1.0)):
                for s in (1.0, -1.0):
                    v = np.zeros(d)
                    v[0], v[1], v[i] = a, b, s
                    out.append(v)
    elif f.kind == cones.EXP:
        out.append(np.array([0.0, 1.0, 0.0]))
        out.append(np.array([0.0, 0.0, 1.0]))
        for x0 in (-1.0, 0.0, 1.0):
            g = math.exp(x0)
            out.append(np.array([-g, -g * (1.0 - x0), 1.0]))
    elif f.kind == cones.POW:
        a = f.alpha
        out.append(np.array([1.0, 0.0, 0.0]))
        out.append(np.array([0.0, 1.0, 0.0]))
        for s in (1.0, -1.0):
            out.append(np.array([a, 1.0 - a, s]))
    else:
        raise ValueError(f.kind)
    return out


def _initial_cuts(K):
    out = []
    at = 0
    for f in K.factors:
        for local in _factor_tangents(f):
            beta = np.zeros(K.dim)
            beta[at : at + f.dim] = local
            out.append(beta)
        at += f.dim
    return out


def _add_split(state, beta, provenance, assignment):
    """Add a cut factor-wise (each block padded with zeros); returns count.

    Splitting is valid because the dual of a product is the product of the
    duals, and per-factor cuts imply the aggregate.  If every block is
    rejected the aggregate itself is tried once.
    """
    beta = np.asarray(beta, dtype=float).ravel()
    scale = float(np.max(np.abs(beta), initial=0.0))
    if scale <= 0.0 or not np.all(np.isfinite(beta)):
        return 0
    added = 0
    for f, sl in state.cones.slices():
        block = beta[sl]
        if float(np.max(np.abs(block), initial=0.0)) <= 1e-12 * scale:
            continue
        padded = np.zeros_like(beta)
        padded[sl] = block
        before = len(state.cuts)
        try:
            add_cut(state, Cut(padded, provenance, assignment))
        except InvalidCut:
            continue
        added += len(state.cuts) - before
    if added == 0:
        before = len(state.cuts)
        try:
            add_cut(state, Cut(beta, provenance, assignment))
        except InvalidCut:
            return 0
        added = len(state.cuts) - before
    return added


def _milp_data(program, state):
    """The MILP relaxation: rows, cut rows with slack columns, boxes.

    A cut with a single nonzero coordinate is a sign restriction on one
    column, so it is folded into the column bounds instead of adding a row.
    Once a finite lower bound is known it is added as an objective row
    c.z >= bound (valid on every fiber), which keeps the relaxation
    bounded even though numerically repaired cuts are marginally weaker
    than the exact dual inequalities.
    """
    m, nx, nz = program.num_rows, program.num_integer, program.num_conic
    z_lb = np.full(nz, -np.inf)
    z_ub = np.full(nz, np.inf)
    rows = []
    for cut in state.cuts:
        nonzero = np.nonzero(cut.beta)[0]
        if nonzero.size == 1:
            j = int(nonzero[0])
            if cut.beta[j] > 0.0:
                z_lb[j] = max(z_lb[j], 0.0)
            else:
                z_ub[j] = min(z_ub[j], 0.0)
        else:
            rows.append(cut.beta)
    rhs = []
    if np.isfinite(state.z_lower):
        rows.append(program.c.copy())
        rhs.append(state.z_lower - 1e-6 * (1.0 + abs(state.z_lower)))
    k = len(rows)
    n = nx + nz + k
    A = np.zeros((m + k, n))
    A[:m, :nx] = program.A_x
    A[:m, nx : nx + nz] = program.A_z
    for i, beta in enumerate(rows):
        A[m + i, nx : nx + nz] = beta
        A[m + i, nx + nz + i] = -1.0
    b = np.concatenate([program.b, np.zeros(k - len(rhs)), np.array(rhs)])
    c = np.concatenate([np.zeros(nx), program.c, np.zeros(k)])
    lb = np.concatenate([program.L, z_lb, np.zeros(k)])
    ub = np.concatenate([program.U, z_ub, np.full(k, np.inf)])
    return A, b, c, lb, ub, list(range(nx))


def _root_relaxation(program):
    """Drop integrality: box the x columns with nonnegative pairs and solve.

    Returns (status, objective, duals of original rows).
    """
    m, nx = program.num_rows, program.num_integer
    if nx == 0:
        res = solve_continuous(
            ContinuousConicProblem(
                program.A_z, program.b, program.c, program.cones
            )
        )
        lam = res.lam[:m] if res.lam is not None else None
        return res.status, res.obj, lam
    nz = program.num_conic
    A = np.zeros((m + nx, 2 * nx + nz))
    A[:m, :nx] = program.A_x
    A[:m, 2 * nx :] = program.A_z
    A[m:, :nx] = np.eye(nx)
    A[m:, nx : 2 * nx] = np.eye(nx)
    b = np.concatenate(
        [program.b - program.A_x @ program.L, program.U - program.L]
    )
    c = np.concatenate([np.zeros(2 * nx), program.c])
    K = cones.ConeProduct(
        (cones.nonneg(nx), cones.nonneg(nx)) + tuple(program.cones.factors)
    )
    res = solve_continuous(ContinuousConicProblem(A, b, c, K))
    lam = res.lam[:m] if res.lam is not None else None
    return res.status, res.obj, lam


def _gap_closed(state):
    if not np.isfinite(state.z_upper):
        return False
    return state.z_upper - state.z_lower <= state.tol * (
        1.0 + abs(state.z_upper)
    )


def _outcome(status, state, trace, diagnostic=None):
    return OaOutcome(
        status=status,
        x=state.incumbent_x,
        z=state.incumbent_z,
        obj=state.z_upper if state.incumbent_x is not None else None,
        lower_bound=state.z_lower,
        upper_bound=state.z_upper,
        iterations=state.iterations,
        cut_count=len(state.cuts),
        cuts=list(state.cuts),
        trace=trace,
        diagnostic=diagnostic,
    )


def oa_solve(program, config=None):
    """Globally solve a mixed-integer conic program by outer approximation."""
    cfg = config or OaConfig()
    t0 = time.monotonic()
    state = OaState(cones=program.cones, tol=cfg.tol)
    trace = []
    for beta in _initial_cuts(program.cones):
        add_cut(state, Cut(beta, INITIAL_RELAXATION))

    root_status, root_obj, root_lam = _root_relaxation(program)
    if root_status == INFEASIBLE:
        state.z_lower = np.inf
        return _outcome(INFEASIBLE, state, trace)
    if root_status == UNBOUNDED:
        return _outcome(
            ASSUMPTION_FAILURE, state, trace,
            "the continuous relaxation is unbounded, so no bounded "
            "polyhedral relaxation exists",
        )
    if root_status == OPTIMAL:
        state.z_lower = float(root_obj)
        _add_split(
            state,
            program.c - program.A_z.T @ root_lam,
            INITIAL_RELAXATION,
            None,
        )
    # almost_optimal or numeric_failure: continue without a root cut

    nx, nz = program.num_integer, program.num_conic
    stall_assignment, stall_count = None, 0
    while state.iterations < cfg.max_iters:
        if (
            cfg.time_limit is not None
            and time.monotonic() - t0 > cfg.time_limit
        ):
            return _outcome(TIME_LIMIT, state, trace)
        state.iterations += 1
        record = {
            "iteration": state.iterations,
            "milp_status": None,
            "milp_value": None,
            "assignment": None,
            "subproblem_status": None,
            "subproblem_value": None,
            "new_cuts": 0,
        }

        A, b, c, lb, ub, int_idx = _milp_data(program, state)
        try:
            mres = solve_milp(
                A, b, c, lb, ub, int_idx,
                rel_gap=cfg.milp_gap, node_limit=cfg.node_limit,
            )
        except NumericFailure as err:
            _finish(record, state, trace)
            return _outcome(
                ASSUMPTION_FAILURE, state, trace,
                "MILP relaxation could not be solved: %s" % err,
            )
        record["milp_status"] = mres.status
        if mres.status == INFEASIBLE:
            _finish(record, state, trace)
            if state.incumbent_x is not None:
                return _outcome(
                    ASSUMPTION_FAILURE, state, trace,
                    "MILP relaxation infeasible while an incumbent exists",
                )
            state.z_lower = np.inf
            return _outcome(INFEASIBLE, state, trace)
        if mres.status == UNBOUNDED:
            _finish(record, state, trace)
            return _outcome(
                ASSUMPTION_FAILURE, state, trace,
                "the MILP relaxation is unbounded; valid cuts cannot bound "
                "it, which indicates a fiber without strong duality",
            )
        record["milp_value"] = float(mres.obj)
        state.z_lower = max(state.z_lower, float(mres.lower_bound))
        assignment = tuple(int(round(v)) for v in mres.x[:nx])
        record["assignment"] = list(assignment)

        if _gap_closed(state):
            _finish(record, state, trace)
            return _outcome(OPTIMAL, state, trace)

        if assignment in state.visited:
            old_lo, old_hi = state.visited[assignment]
            if (
                state.z_lower - old_lo <= _PROGRESS
                and old_hi - state.z_upper <= _PROGRESS
            ):
                _finish(record, state, trace)
                return _outcome(
                    ASSUMPTION_FAILURE, state, trace,
                    "integer assignment %s revisited without bound progress"
                    % (list(assignment),),
                )

        x_star = np.array([float(v) for v in assignment])
        r = program.b - program.A_x @ x_star
        sub = solve_continuous(
            ContinuousConicProblem(program.A_z, r, program.c, program.cones)
        )
        record["subproblem_status"] = sub.status
        new_cuts = 0
        if sub.status == OPTIMAL:
            record["subproblem_value"] = float(sub.obj)
            new_cuts = _add_split(
                state,
                program.c - program.A_z.T @ sub.lam,
                SUBPROBLEM_DUAL,
                assignment,
            )
            if sub.obj < state.z_upper:
                state.z_upper = float(sub.obj)
                state.incumbent_x = x_star
                state.incumbent_z = sub.z
            stall_assignment, stall_count = None, 0
        elif sub.status == INFEASIBLE:
            new_cuts = _add_split(
                state, -(program.A_z.T @ sub.lam), INFEASIBILITY_RAY,
                assignment,
            )
            stall_assignment, stall_count = None, 0
        elif sub.status == UNBOUNDED:
            _finish(record, state, trace, new_cuts)
            return _outcome(
                ASSUMPTION_FAILURE, state, trace,
                "a fiber subproblem is unbounded below, so the instance "
                "has no finite optimum",
            )
        else:
            # no certificate: separate the MILP point from each cone factor
            if sub.obj is not None:
                record["subproblem_value"] = float(sub.obj)
            z_milp = mres.x[nx : nx + nz]
            for f, sl in program.cones.slices():
                g = cones.separate(f, z_milp[sl])
                if g is None:
                    continue
                padded = np.zeros(nz)
                padded[sl] = g
                before = len(state.cuts)
                try:
                    add_cut(state, Cut(padded, SEPARATION, assignment))
                except InvalidCut:
                    continue
                new_cuts += len(state.cuts) - before
            if new_cuts == 0:
                if assignment == stall_assignment:
                    stall_count += 1
                else:
                    stall_assignment, stall_count = assignment, 1
                if stall_count >= 3:
                    _finish(record, state, trace, new_cuts)
                    return _outcome(
                        ASSUMPTION_FAILURE, state, trace,
                        "no dual certificate and no separating cut on "
                        "assignment %s for 3 straight iterations"
                        % (list(assignment),),
                    )
            else:
                stall_assignment, stall_count = None, 0

        state.visited[assignment] = (state.z_lower, state.z_upper)
        _finish(record, state, trace, new_cuts)
        if _gap_closed(state):
            return _outcome(OPTIMAL, state, trace)

    return _outcome(ITERATION_LIMIT, state, trace)


def _finish(record, state, trace, new_cuts=0):
    record["new_cuts"] = new_cuts
    record["lower_bound"] = state.z_lower
    record["upper_bound"] = state.z_upper
    record["cuts"] = len(state.cuts)
    trace.append(record)


def brute_force_solve(program, grid_limit=100_000):
    """Enumerate every integer assignment and solve its fiber; ground truth.

    Returns an OaOutcome whose status is optimal/infeasible when every
    fiber resolved, unbounded when some fiber admits a descent ray, and
    numeric_failure when any fiber came back without a certificate (the
    enumeration then proves nothing).
    """
    nx = program.num_integer
    ranges = []
    for j in range(nx):
        lo = int(math.ceil(program.L[j] - 1e-9))
        hi = int(math.floor(program.U[j] + 1e-9))
        if lo > hi:
            return OaOutcome(
                INFEASIBLE, lower_bound=np.inf, upper_bound=np.inf
            )
        ranges.append(range(lo, hi + 1))
    total = 1
    for r in ranges:
        total *= len(r)
    if total > grid_limit:
        raise TooLarge(
            "integer grid has %d points, above the limit of %d"
            % (total, grid_limit)
        )

    best = None
    best_x = None
    unresolved = 0
    fibers = 0
    for values in itertools.product(*ranges):
        fibers += 1
        x = np.array([float(v) for v in values])
        r = program.b - program.A_x @ x
        res = solve_continuous(
            ContinuousConicProblem(program.A_z, r, program.c, program.cones)
        )
        if res.status == UNBOUNDED:
            return OaOutcome(
                UNBOUNDED, x=x, lower_bound=-np.inf, upper_bound=-np.inf,
                iterations=fibers,
            )
        if res.status == OPTIMAL:
            if best is None or res.obj < best.obj:
                best, best_x = res, x
        elif res.status != INFEASIBLE:
            unresolved += 1
    if unresolved:
        out = OaOutcome(
            NUMERIC_FAILURE, iterations=fibers,
            diagnostic="%d fiber(s) returned no certificate" % unresolved,
        )
        if best is not None:
            out.x, out.z, out.obj = best_x, best.z, float(best.obj)
            out.upper_bound = float(best.obj)
        return out
    if best is None:
        return OaOutcome(
            INFEASIBLE, lower_bound=np.inf, upper_bound=np.inf,
            iterations=fibers,
        )
    return OaOutcome(
        OPTIMAL, x=best_x, z=best.z, obj=float(best.obj),
        lower_bound=float(best.obj), upper_bound=float(best.obj),
        iterations=fibers,
    )

"""Expression trees with disciplined-convexity analysis.

Expressions are immutable scalar trees built from variables, constants,
affine combinations, and atom applications.  Curvature is established
purely by composition rules over the atoms' declared curvature and
per-argument monotonicity; no semantic convexity detection is attempted.
A small sign lattice (positive / negative / unknown), seeded from variable
bounds, refines the monotonicity of even atoms like square and abs.
"""

import numbers

from .errors import ArityError, UnknownAtomError

CONSTANT = "constant"
AFFINE = "affine"
CONVEX = "convex"
CONCAVE = "concave"
UNKNOWN = "unknown"

NONDECREASING = "nondecreasing"
NONINCREASING = "nonincreasing"
NO_MONOTONICITY = "none"

POSITIVE = "positive"
NEGATIVE = "negative"
UNKNOWN_SIGN = "unknown"

# populated by the atoms module at import time
ATOMS = {}


def _flip(curv):
    if curv == CONVEX:
        return CONCAVE
    if curv == CONCAVE:
        return CONVEX
    return curv


def _add_curvature(a, b):
    order = {CONSTANT: 0, AFFINE: 1}
    if a in order and b in order:
        return a if order[a] >= order[b] else b
    if a in order:
        return b
    if b in order:
        return a
    if a == b:
        return a
    return UNKNOWN


class Expression:
    """Base node; all arithmetic produces affine combinations."""

    def __add__(self, other):
        return _affine([1.0, 1.0], [self, _wrap(other)], 0.0)

    __radd__ = __add__

    def __sub__(self, other):
        return _affine([1.0, -1.0], [self, _wrap(other)], 0.0)

    def __rsub__(self, other):
        return _affine([-1.0, 1.0], [self, _wrap(other)], 0.0)

    def __neg__(self):
        return _affine([-1.0], [self], 0.0)

    def __mul__(self, other):
        if not isinstance(other, numbers.Real):
            raise TypeError("expressions can only be scaled by constants")
        return _affine([float(other)], [self], 0.0)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, numbers.Real):
            raise TypeError("expressions can only be divided by constants")
        return _affine([1.0 / float(other)], [self], 0.0)

    def __le__(self, other):
        from .model import Constraint

        return Constraint("ineq", self - _wrap(other))

    def __ge__(self, other):
        from .model import Constraint

        return Constraint("ineq", _wrap(other) - self)

    def __eq__(self, other):
        from .model import Constraint

        return Constraint("eq", self - _wrap(other))

    __hash__ = object.__hash__


class Constant(Expression):
    def __init__(self, value):
        self.value = float(value)

    def __repr__(self):
        return f"Constant({self.value})"


class Variable(Expression):
    """A declared scalar variable; create through DcpModel.variable()."""

    def __init__(self, index, name, integer=False, lb=-float("inf"),
                 ub=float("inf")):
        self.index = index
        self.name = name
        self.integer = bool(integer)
        self.lb = float(lb)
        self.ub = float(ub)

    def __repr__(self):
        return f"Variable({self.name!r})"


class AffineCombination(Expression):
    def __init__(self, coeffs, children, offset):
        self.coeffs = tuple(float(c) for c in coeffs)
        self.children = tuple(children)
        self.offset = float(offset)
        if len(self.coeffs) != len(self.children):
            raise ValueError("coefficient and child counts differ")

    def __repr__(self):
        return f"AffineCombination({len(self.children)} terms)"


class AtomApplication(Expression):
    def __init__(self, name, args, param=None):
        self.name = name
        self.args = tuple(args)
        self.param = param

    def __repr__(self):
        return f"AtomApplication({self.name}, {len(self.args)} args)"


def _wrap(value):
    if isinstance(value, Expression):
        return value
    if isinstance(value, numbers.Real):
        return Constant(value)
    raise TypeError(f"cannot use {type(value).__name__} in an expression")


def _affine(coeffs, children, offset):
    # flatten nested affine combinations, fold constants into the offset,
    # and merge repeated children so terms like x - x cancel
    merged = {}
    order = []

    def push(c, child):
        nonlocal offset
        if c == 0.0:
            return
        if isinstance(child, Constant):
            offset += c * child.value
        elif isinstance(child, AffineCombination):
            offset += c * child.offset
            for cc, kk in zip(child.coeffs, child.children):
                push(c * cc, kk)
        else:
            key = id(child)
            if key not in merged:
                merged[key] = [0.0, child]
                order.append(key)
            merged[key][0] += c

    for c, child in zip(coeffs, children):
        push(c, child)
    out_c, out_k = [], []
    for key in order:
        c, child = merged[key]
        if c != 0.0:
            out_c.append(c)
            out_k.append(child)
    if not out_k:
        return Constant(offset)
    return AffineCombination(out_c, out_k, offset)


def _atom(name):
    atom = ATOMS.get(name)
    if atom is None:
        raise UnknownAtomError(f"unknown atom {name!r}")
    return atom


def make_atom(name, args, param=None):
    """Build an atom application, validating arity against the library."""
    atom = _atom(name)
    args = tuple(_wrap(a) for a in args)
    if not atom.accepts_arity(len(args)):
        raise ArityError(
            f"atom {name!r} does not accept {len(args)} argument(s)"
        )
    atom.validate_param(param)
    return AtomApplication(name, args, param)


def sign_of(expr):
    """Sign of the expression over its variables' declared bounds."""
    if isinstance(expr, Constant):
        return POSITIVE if expr.value >= 0.0 else NEGATIVE
    if isinstance(expr, Variable):
        if expr.lb >= 0.0:
            return POSITIVE
        if expr.ub <= 0.0:
            return NEGATIVE
        return UNKNOWN_SIGN
    if isinstance(expr, AffineCombination):
        lo_ok = expr.offset >= 0.0
        hi_ok = expr.offset <= 0.0
        for c, child in zip(expr.coeffs, expr.children):
            s = sign_of(child)
            if c > 0.0:
                term = s
            elif c < 0.0:
                term = {POSITIVE: NEGATIVE, NEGATIVE: POSITIVE}.get(s, s)
            else:
                continue
            lo_ok = lo_ok and term == POSITIVE
            hi_ok = hi_ok and term == NEGATIVE
        if lo_ok:
            return POSITIVE
        if hi_ok:
            return NEGATIVE
        return UNKNOWN_SIGN
    if isinstance(expr, AtomApplication):
        atom = _atom(expr.name)
        return atom.sign([sign_of(a) for a in expr.args], expr.param)
    raise TypeError(f"not an expression node: {expr!r}")


def curvature_of(expr):
    """Curvature provable by the composition rules, or unknown."""
    if isinstance(expr, Constant):
        return CONSTANT
    if isinstance(expr, Variable):
        return AFFINE
    if isinstance(expr, AffineCombination):
        total = CONSTANT
        for c, child in zip(expr.coeffs, expr.children):
            if c == 0.0:
                continue
            k = curvature_of(child)
            if c < 0.0:
                k = _flip(k)
            total = _add_curvature(total, k)
        return total
    if isinstance(expr, AtomApplication):
        atom = _atom(expr.name)
        arg_curvs = [curvature_of(a) for a in expr.args]
        if all(k == CONSTANT for k in arg_curvs):
            return CONSTANT
        arg_signs = [sign_of(a) for a in expr.args]
        base = atom.curvature
        for i, k in enumerate(arg_curvs):
            if k in (CONSTANT, AFFINE):
                continue
            mono = atom.monotonicity(i, arg_signs, expr.param)
            if base == CONVEX:
                ok = (k == CONVEX and mono == NONDECREASING) or (
                    k == CONCAVE and mono == NONINCREASING
                )
            else:
                ok = (k == CONCAVE and mono == NONDECREASING) or (
                    k == CONVEX and mono == NONINCREASING
                )
            if not ok:
                return UNKNOWN
        return base
    raise TypeError(f"not an expression node: {expr!r}")


def evaluate(expr, values):
    """Evaluate at a point: dict keyed by Variable, or sequence by index."""
    if isinstance(expr, Constant):
        return expr.value
    if isinstance(expr, Variable):
        if isinstance(values, dict):
            return float(values[expr])
        return float(values[expr.index])
    if isinstance(expr, AffineCombination):
        total = expr.offset
        for c, child in zip(expr.coeffs, expr.children):
            total += c * evaluate(child, values)
        return total
    if isinstance(expr, AtomApplication):
        atom = _atom(expr.name)
        return atom.evaluate(
            [evaluate(a, values) for a in expr.args], expr.param
        )
    raise TypeError(f"not an expression node: {expr!r}")


def variables_in(expr):
    """All distinct Variable nodes reachable from the expression."""
    seen = []
    seen_ids = set()

    def walk(node):
        if isinstance(node, Variable):
            if id(node) not in seen_ids:
                seen_ids.add(id(node))
                seen.append(node)
        elif isinstance(node, AffineCombination):
            for child in node.children:
                walk(child)
        elif isinstance(node, AtomApplication):
            for child in node.args:
                walk(child)

    walk(expr)
    return seen

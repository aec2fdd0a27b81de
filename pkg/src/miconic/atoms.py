"""The atom library: curvature, monotonicity, sign, value, and conic graph.

Every atom carries an epigraph template over {NonNeg, SOC, RSOC, EXP, POW}
factors only.  A convex atom's template emits constraints equivalent to
f(args) <= t and returns the affine form t; a concave atom's template is
the hypograph t <= f(args).  Templates introduce fresh cone columns and
pin them to the argument forms with equality rows, so the projection onto
(t, args) is exactly the atom's graph set.
"""

import builtins
import math

from . import cones
from .errors import ArityError
from .expr import (
    ATOMS,
    CONCAVE,
    CONVEX,
    NEGATIVE,
    NO_MONOTONICITY,
    NONDECREASING,
    NONINCREASING,
    POSITIVE,
    UNKNOWN_SIGN,
    make_atom,
)

_SQRT2 = math.sqrt(2.0)


class Atom:
    def __init__(self, name, curvature, min_arity, max_arity, monotonicity,
                 sign, evaluate, graph, needs_param=False):
        self.name = name
        self.curvature = curvature
        self.min_arity = min_arity
        self.max_arity = max_arity
        self._monotonicity = monotonicity
        self._sign = sign
        self._evaluate = evaluate
        self.graph = graph
        self.needs_param = needs_param

    def accepts_arity(self, n):
        if n < self.min_arity:
            return False
        return self.max_arity is None or n <= self.max_arity

    def validate_param(self, param):
        if not self.needs_param:
            if param is not None:
                raise ArityError(f"atom {self.name!r} takes no parameter")
            return
        if param is None or float(param) < 1.0:
            raise ArityError(
                f"atom {self.name!r} needs a numeric parameter >= 1"
            )

    def monotonicity(self, i, arg_signs, param):
        return self._monotonicity(i, arg_signs)

    def sign(self, arg_signs, param):
        return self._sign(arg_signs)

    def evaluate(self, values, param):
        if self.needs_param:
            return self._evaluate(values, param)
        return self._evaluate(values)


def _mono_even(i, arg_signs):
    # |.|-like atoms: direction known only when the argument sign is
    if arg_signs[i] == POSITIVE:
        return NONDECREASING
    if arg_signs[i] == NEGATIVE:
        return NONINCREASING
    return NO_MONOTONICITY


def _mono_nondecreasing(i, arg_signs):
    return NONDECREASING


def _mono_nonincreasing(i, arg_signs):
    return NONINCREASING


def _mono_none(i, arg_signs):
    return NO_MONOTONICITY


def _sign_positive(arg_signs):
    return POSITIVE


def _sign_unknown(arg_signs):
    return UNKNOWN_SIGN


def _sign_max(arg_signs):
    if any(s == POSITIVE for s in arg_signs):
        return POSITIVE
    if all(s == NEGATIVE for s in arg_signs):
        return NEGATIVE
    return UNKNOWN_SIGN


def _eval_entropy(values):
    x = values[0]
    if x < 0.0:
        raise ValueError("entropy argument must be nonnegative")
    if x == 0.0:
        return 0.0
    return -x * math.log(x)


def _eval_geo_mean(values):
    x, y = values
    if x < 0.0 or y < 0.0:
        raise ValueError("geo_mean arguments must be nonnegative")
    return math.sqrt(x * y)


def _eval_logsumexp(values):
    m = builtins.max(values)
    return m + math.log(sum(math.exp(v - m) for v in values))


def _eval_inv_pos(values):
    if values[0] <= 0.0:
        raise ValueError("inv_pos argument must be positive")
    return 1.0 / values[0]


def _graph_abs(b, forms, param):
    t, s1, s2 = b.cone_cols(cones.NONNEG, 3)
    b.zero_row(b.col(t) - forms[0] - b.col(s1))
    b.zero_row(b.col(t) + forms[0] - b.col(s2))
    return b.col(t)


def _graph_square(b, forms, param):
    u, v, w = b.cone_cols(cones.RSOC, 3)
    b.zero_row(b.col(u) - 0.5)
    b.zero_row(b.col(w) - forms[0])
    return b.col(v)


def _graph_sumsquares(b, forms, param):
    cols = b.cone_cols(cones.SOC, len(forms) + 2)
    h, tail, g = cols[0], cols[1:-1], cols[-1]
    b.zero_row(b.col(h) - b.col(g) - 1.0)
    for col, f in zip(tail, forms):
        b.zero_row(b.col(col) - f)
    return b.col(h) + b.col(g)


def _graph_norm2(b, forms, param):
    cols = b.cone_cols(cones.SOC, len(forms) + 1)
    for col, f in zip(cols[1:], forms):
        b.zero_row(b.col(col) - f)
    return b.col(cols[0])


def _graph_geo_mean(b, forms, param):
    p, q, w = b.cone_cols(cones.RSOC, 3)
    (s,) = b.cone_cols(cones.NONNEG, 1)
    b.zero_row(b.col(p) - forms[0] / _SQRT2)
    b.zero_row(b.col(q) - forms[1] / _SQRT2)
    return b.col(w) - b.col(s)


def _graph_exp(b, forms, param):
    x, y, z = b.cone_cols(cones.EXP, 3)
    b.zero_row(b.col(x) - forms[0])
    b.zero_row(b.col(y) - 1.0)
    return b.col(z)


def _graph_log(b, forms, param):
    x, y, z = b.cone_cols(cones.EXP, 3)
    b.zero_row(b.col(y) - 1.0)
    b.zero_row(b.col(z) - forms[0])
    return b.col(x)


def _graph_entropy(b, forms, param):
    x, y, z = b.cone_cols(cones.EXP, 3)
    b.zero_row(b.col(y) - forms[0])
    b.zero_row(b.col(z) - 1.0)
    return b.col(x)


def _graph_logsumexp(b, forms, param):
    blocks = [b.cone_cols(cones.EXP, 3) for _ in forms]
    (s,) = b.cone_cols(cones.NONNEG, 1)
    t = forms[0] - b.col(blocks[0][0])
    total = b.col(s) - 1.0
    for i, ((x, y, z), f) in enumerate(zip(blocks, forms)):
        b.zero_row(b.col(y) - 1.0)
        total = total + b.col(z)
        if i > 0:
            b.zero_row(b.col(x) - f + t)
    b.zero_row(total)
    return t


def _graph_pow_rational(b, forms, param):
    u, v, w = b.cone_cols(cones.POW, 3, alpha=1.0 / float(param))
    b.zero_row(b.col(v) - 1.0)
    b.zero_row(b.col(w) - forms[0])
    return b.col(u)


def _graph_inv_pos(b, forms, param):
    p, q, w = b.cone_cols(cones.RSOC, 3)
    b.zero_row(b.col(p) - forms[0] / _SQRT2)
    b.zero_row(b.col(w) - 1.0)
    return b.col(q) * _SQRT2


def _graph_max(b, forms, param):
    slacks = b.cone_cols(cones.NONNEG, len(forms))
    t = forms[0] + b.col(slacks[0])
    for s, f in zip(slacks[1:], forms[1:]):
        b.zero_row(t - f - b.col(s))
    return t


def _register(atom):
    ATOMS[atom.name] = atom
    return atom


_register(Atom("abs", CONVEX, 1, 1, _mono_even, _sign_positive,
               lambda v: builtins.abs(v[0]), _graph_abs))
_register(Atom("square", CONVEX, 1, 1, _mono_even, _sign_positive,
               lambda v: v[0] * v[0], _graph_square))
_register(Atom("sumsquares", CONVEX, 1, None, _mono_even, _sign_positive,
               lambda v: sum(x * x for x in v), _graph_sumsquares))
_register(Atom("norm2", CONVEX, 1, None, _mono_even, _sign_positive,
               lambda v: math.sqrt(sum(x * x for x in v)), _graph_norm2))
_register(Atom("geo_mean", CONCAVE, 2, 2, _mono_nondecreasing,
               _sign_positive, _eval_geo_mean, _graph_geo_mean))
_register(Atom("exp", CONVEX, 1, 1, _mono_nondecreasing, _sign_positive,
               lambda v: math.exp(v[0]), _graph_exp))
_register(Atom("log", CONCAVE, 1, 1, _mono_nondecreasing, _sign_unknown,
               lambda v: math.log(v[0]), _graph_log))
_register(Atom("entropy", CONCAVE, 1, 1, _mono_none, _sign_unknown,
               _eval_entropy, _graph_entropy))
_register(Atom("logsumexp", CONVEX, 1, None, _mono_nondecreasing,
               _sign_unknown, _eval_logsumexp, _graph_logsumexp))
_register(Atom("pow_rational", CONVEX, 1, 1, _mono_even, _sign_positive,
               lambda v, p: builtins.abs(v[0]) ** float(p),
               _graph_pow_rational, needs_param=True))
_register(Atom("inv_pos", CONVEX, 1, 1, _mono_nonincreasing, _sign_positive,
               _eval_inv_pos, _graph_inv_pos))
_register(Atom("max", CONVEX, 1, None, _mono_nondecreasing, _sign_max,
               lambda v: builtins.max(v), _graph_max))


def atom_library():
    """All registered atoms."""
    return list(ATOMS.values())


def abs(x):
    return make_atom("abs", [x])


def square(x):
    return make_atom("square", [x])


def sumsquares(*xs):
    return make_atom("sumsquares", xs)


def norm2(*xs):
    return make_atom("norm2", xs)


def geo_mean(x, y):
    return make_atom("geo_mean", [x, y])


def exp(x):
    return make_atom("exp", [x])


def log(x):
    return make_atom("log", [x])


def entropy(x):
    return make_atom("entropy", [x])


def logsumexp(*xs):
    return make_atom("logsumexp", xs)


def pow_rational(x, p):
    return make_atom("pow_rational", [x], param=float(p))


def inv_pos(x):
    return make_atom("inv_pos", [x])


def max(*xs):
    return make_atom("max", xs)

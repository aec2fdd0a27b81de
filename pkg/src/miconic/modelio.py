"""Textual model format: prefix-notation parser and printer.

A document is a sequence of items::

    (var NAME [int] [LB UB])
    (min EXPR)
    (le EXPR EXPR)
    (eq EXPR EXPR)

where EXPR is a name, a number, an arithmetic form ``(add e...)``,
``(sub a b)``, ``(mul K e)``, a parametrized power ``(pow P e)``, or an
atom application ``(ATOM e...)`` resolved against the atom library.
Numbers accept ``inf``/``-inf`` so one-sided variable bounds survive a
round trip.  ``;`` starts a comment that runs to the end of the line.
"""

from . import expr as ex
from .errors import ArityError, ModelSyntaxError, UnknownAtomError
from .model import DcpModel

_ARITH = ("add", "sub", "mul", "pow")
_ITEMS = ("var", "min", "le", "eq")


class _Token:
    __slots__ = ("text", "line", "col")

    def __init__(self, text, line, col):
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text):
    tokens = []
    line, col = 1, 1
    word, wline, wcol = [], 0, 0

    def flush():
        if word:
            tokens.append(_Token("".join(word), wline, wcol))
            del word[:]

    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == ";":
            flush()
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "\n":
            flush()
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            flush()
            col += 1
            i += 1
            continue
        if ch in "()":
            flush()
            tokens.append(_Token(ch, line, col))
            col += 1
            i += 1
            continue
        if not word:
            wline, wcol = line, col
        word.append(ch)
        col += 1
        i += 1
    flush()
    return tokens


def _as_number(token):
    try:
        value = float(token.text)
    except ValueError:
        return None
    if value != value:  # reject nan
        return None
    return value


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0

    def _fail(self, message, token=None):
        if token is None:
            if self.tokens:
                last = self.tokens[-1]
                raise ModelSyntaxError(message, last.line,
                                       last.col + len(last.text))
            raise ModelSyntaxError(message, 1, 1)
        raise ModelSyntaxError(message, token.line, token.col)

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self, expect=None):
        tok = self._peek()
        if tok is None:
            self._fail("unexpected end of input"
                       + (" (expected %r)" % expect if expect else ""))
        self.pos += 1
        if expect is not None and tok.text != expect:
            self._fail("expected %r, found %r" % (expect, tok.text), tok)
        return tok

    def parse(self):
        model = DcpModel()
        names = {}
        have_objective = False
        while self._peek() is not None:
            opener = self._next("(")
            head = self._next()
            if head.text == "(" or head.text == ")":
                self._fail("expected an item keyword", head)
            if head.text == "var":
                self._parse_var(model, names)
            elif head.text == "min":
                if have_objective:
                    self._fail("duplicate objective", head)
                model.minimize(self._parse_expr(names))
                self._next(")")
                have_objective = True
            elif head.text in ("le", "eq"):
                lhs = self._parse_expr(names)
                rhs = self._parse_expr(names)
                self._next(")")
                model.add(lhs <= rhs if head.text == "le" else lhs == rhs)
            else:
                self._fail("unknown item %r (expected var, min, le or eq)"
                           % head.text, head)
        return model

    def _parse_var(self, model, names):
        name_tok = self._next()
        if name_tok.text in "()" or _as_number(name_tok) is not None:
            self._fail("expected a variable name", name_tok)
        if name_tok.text in names:
            self._fail("duplicate variable %r" % name_tok.text, name_tok)
        integer = False
        tok = self._peek()
        if tok is not None and tok.text == "int":
            integer = True
            self._next()
            tok = self._peek()
        lb, ub = -float("inf"), float("inf")
        if tok is not None and tok.text != ")":
            lb = self._parse_number("lower bound")
            ub = self._parse_number("upper bound")
        closer = self._next(")")
        try:
            var = model.variable(name_tok.text, integer=integer, lb=lb,
                                 ub=ub)
        except Exception as err:
            self._fail(str(err), closer)
        names[name_tok.text] = var

    def _parse_number(self, what):
        tok = self._next()
        value = _as_number(tok)
        if value is None:
            self._fail("expected a number for the %s, found %r"
                       % (what, tok.text), tok)
        return value

    def _parse_expr(self, names):
        tok = self._next()
        if tok.text == ")":
            self._fail("unexpected ')'", tok)
        if tok.text != "(":
            value = _as_number(tok)
            if value is not None:
                return ex.Constant(value)
            if tok.text not in names:
                self._fail("undeclared variable %r" % tok.text, tok)
            return names[tok.text]
        head = self._next()
        if head.text in "()":
            self._fail("expected an operator or atom name", head)
        if head.text == "add":
            terms = self._parse_args(names, head, minimum=1)
            out = terms[0]
            for term in terms[1:]:
                out = out + term
            return out
        if head.text == "sub":
            args = self._parse_args(names, head, minimum=2, maximum=2)
            return args[0] - args[1]
        if head.text == "mul":
            coeff_tok = self._next()
            coeff = _as_number(coeff_tok)
            if coeff is None:
                self._fail("mul needs a leading numeric coefficient",
                           coeff_tok)
            args = self._parse_args(names, head, minimum=1, maximum=1)
            return args[0] * coeff
        if head.text == "pow":
            param_tok = self._next()
            param = _as_number(param_tok)
            if param is None:
                self._fail("pow needs a leading numeric exponent", param_tok)
            args = self._parse_args(names, head, minimum=1, maximum=1)
            try:
                return ex.make_atom("pow_rational", args, param=param)
            except (UnknownAtomError, ArityError) as err:
                self._fail(str(err), head)
        if head.text not in ex.ATOMS:
            raise UnknownAtomError("unknown atom %r" % head.text, head.line,
                                   head.col)
        args = self._parse_args(names, head, minimum=0)
        try:
            return ex.make_atom(head.text, args)
        except ArityError as err:
            raise ArityError(str(err), head.line, head.col)

    def _parse_args(self, names, head, minimum=0, maximum=None):
        args = []
        while True:
            tok = self._peek()
            if tok is None:
                self._fail("unclosed '(' for %r" % head.text)
            if tok.text == ")":
                self._next()
                break
            args.append(self._parse_expr(names))
        if len(args) < minimum or (maximum is not None
                                   and len(args) > maximum):
            raise ArityError(
                "%r takes %s argument(s), got %d"
                % (head.text,
                   ("exactly %d" % minimum) if minimum == maximum
                   else ("at least %d" % minimum),
                   len(args)),
                head.line, head.col,
            )
        return args


def parse_model(text):
    """Parse document text into a model; diagnostics carry line and column."""
    return _Parser(text).parse()


def _format_number(value):
    return "%.17g" % float(value)


def _print_expr(node):
    if isinstance(node, ex.Constant):
        return _format_number(node.value)
    if isinstance(node, ex.Variable):
        return node.name
    if isinstance(node, ex.AffineCombination):
        parts = []
        for coeff, child in zip(node.coeffs, node.children):
            piece = _print_expr(child)
            if coeff != 1.0:
                piece = "(mul %s %s)" % (_format_number(coeff), piece)
            parts.append(piece)
        if node.offset != 0.0:
            parts.append(_format_number(node.offset))
        if len(parts) == 1:
            return parts[0]
        return "(add %s)" % " ".join(parts)
    if isinstance(node, ex.AtomApplication):
        args = " ".join(_print_expr(a) for a in node.args)
        if node.name == "pow_rational":
            return "(pow %s %s)" % (_format_number(node.param), args)
        return "(%s %s)" % (node.name, args)
    raise TypeError("cannot print %r" % (node,))


def print_model(model):
    """Render a model as document text that parses back to the same model."""
    lines = []
    for var in model.variables:
        bits = ["var", var.name]
        if var.integer:
            bits.append("int")
        if var.lb != -float("inf") or var.ub != float("inf"):
            bits.append(_format_number(var.lb))
            bits.append(_format_number(var.ub))
        lines.append("(%s)" % " ".join(bits))
    lines.append("(min %s)" % _print_expr(model.objective))
    for con in model.constraints:
        op = "le" if con.kind == "ineq" else "eq"
        lines.append("(%s %s 0)" % (op, _print_expr(con.expr)))
    return "\n".join(lines) + "\n"

"""Arithmetic expression language with dual-number differentiation.

Grammar (EBNF):

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := atom ("^" factor)?            right-associative
    atom   := NUMBER | NAME | NAME "(" expr ("," expr)* ")"
            | "(" expr ")" | "-" atom

A source string may also be a top-level parenthesized tuple
"(e1, e2, ...)", which parses to one component per entry.

Evaluation is strict about domains: log or sqrt of a negative number,
division by zero, and non-finite intermediates raise EvalDomainError
instead of propagating NaN or infinity.
"""

from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import EvalDomainError, InputError, ParseError

__all__ = [
    "Ast",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "parse",
    "parse_single",
    "eval_ast",
    "jacobian_ad",
    "pretty",
    "substitute",
    "FUNCTION_NAMES",
]

# name -> fixed arity, or None for variadic (2 or more)
_FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "tan": 1,
    "exp": 1,
    "log": 1,
    "sqrt": 1,
    "abs": 1,
    "atan": 1,
    "tanh": 1,
    "min": None,
    "max": None,
}
FUNCTION_NAMES = frozenset(_FUNCTIONS)

# Default variable pools for inference when the caller gives none.
_COORD_ORDER = ("x", "y", "z", "w")


# ---------------------------------------------------------------------------
# AST nodes


@dataclass(frozen=True)
class Num:
    value: float
    span: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    index: int
    span: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Neg:
    arg: object
    span: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    span: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple
    span: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Ast:
    """One expression component plus its variable binding."""

    root: object
    variables: tuple
    source: str = field(default="", compare=False)

    @property
    def arity(self):
        return len(self.variables)


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[+\-*/^(),−])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # num, name, +, -, *, /, ^, (, ), ',', eof
    text: str
    pos: int


def _tokenize(source):
    toks = []
    i = 0
    n = len(source)
    while i < n:
        m = _TOKEN_RE.match(source, i)
        if m is None:
            raise ParseError("unexpected character %r" % source[i], i)
        if m.lastgroup == "ws":
            i = m.end()
            continue
        text = m.group()
        if m.lastgroup == "num":
            toks.append(_Token("num", text, i))
        elif m.lastgroup == "name":
            toks.append(_Token("name", text, i))
        else:
            op = "-" if text == "−" else text
            toks.append(_Token(op, op, i))
        i = m.end()
    toks.append(_Token("eof", "", n))
    return toks


# ---------------------------------------------------------------------------
# Parser

_ATOM_EXPECTED = ("number", "name", "'('", "'-'")


class _Parser:
    def __init__(self, tokens, variables):
        self.toks = tokens
        self.i = 0
        self.variables = variables  # tuple of names or None (collect mode)
        self.seen_names = []

    def peek(self):
        return self.toks[self.i]

    def advance(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind, expected_desc):
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(
                "expected %s, found %r" % (expected_desc, tok.text or "end of input"),
                tok.pos,
                (expected_desc,),
            )
        return self.advance()

    def parse_expr(self):
        node = self.parse_term()
        while self.peek().kind in ("+", "-"):
            op = self.advance()
            rhs = self.parse_term()
            node = BinOp(op.kind, node, rhs, (node.span[0], rhs.span[1]))
        return node

    def parse_term(self):
        node = self.parse_factor()
        while self.peek().kind in ("*", "/"):
            op = self.advance()
            rhs = self.parse_factor()
            node = BinOp(op.kind, node, rhs, (node.span[0], rhs.span[1]))
        return node

    def parse_factor(self):
        base = self.parse_atom()
        if self.peek().kind == "^":
            self.advance()
            expo = self.parse_factor()  # right-associative
            return BinOp("^", base, expo, (base.span[0], expo.span[1]))
        return base

    def parse_atom(self):
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text), (tok.pos, tok.pos + len(tok.text)))
        if tok.kind == "-":
            self.advance()
            arg = self.parse_atom()
            return Neg(arg, (tok.pos, arg.span[1]))
        if tok.kind == "(":
            self.advance()
            node = self.parse_expr()
            close = self.expect(")", "')'")
            return dataclasses.replace(node, span=(tok.pos, close.pos + 1))
        if tok.kind == "name":
            self.advance()
            if self.peek().kind == "(":
                return self.parse_call(tok)
            return self.make_var(tok)
        raise ParseError(
            "expected a value, found %r" % (tok.text or "end of input"),
            tok.pos,
            _ATOM_EXPECTED,
        )

    def parse_call(self, name_tok):
        name = name_tok.text
        if name not in _FUNCTIONS:
            raise ParseError(
                "unknown function %r (known: %s)" % (name, ", ".join(sorted(_FUNCTIONS))),
                name_tok.pos,
            )
        self.advance()  # consume '('
        args = [self.parse_expr()]
        while self.peek().kind == ",":
            self.advance()
            args.append(self.parse_expr())
        close = self.expect(")", "')'")
        want = _FUNCTIONS[name]
        if want is not None and len(args) != want:
            raise ParseError(
                "%s takes %d argument%s, got %d"
                % (name, want, "" if want == 1 else "s", len(args)),
                name_tok.pos,
            )
        if want is None and len(args) < 2:
            raise ParseError("%s takes at least 2 arguments" % name, name_tok.pos)
        return Call(name, tuple(args), (name_tok.pos, close.pos + 1))

    def make_var(self, tok):
        name = tok.text
        if self.variables is not None:
            try:
                idx = self.variables.index(name)
            except ValueError:
                raise ParseError(
                    "unknown identifier %r (variables: %s)"
                    % (name, ", ".join(self.variables) or "none"),
                    tok.pos,
                ) from None
            return Var(name, idx, (tok.pos, tok.pos + len(name)))
        if name not in self.seen_names:
            self.seen_names.append(name)
        return Var(name, -1, (tok.pos, tok.pos + len(name)))


def _infer_variables(seen):
    """Pick a variable tuple for sources parsed without explicit bindings."""
    if not seen:
        return ()
    if set(seen) == {"t"}:
        return ("t",)
    if all(n in _COORD_ORDER for n in seen):
        last = max(_COORD_ORDER.index(n) for n in seen)
        return _COORD_ORDER[: last + 1]
    raise InputError(
        "cannot infer variables for names %s; pass variables= explicitly"
        % ", ".join(sorted(seen))
    )


def _bind_indices(node, variables):
    """Rewrite collect-mode Var nodes with their final indices."""
    if isinstance(node, Var):
        return Var(node.name, variables.index(node.name), node.span)
    if isinstance(node, Neg):
        return Neg(_bind_indices(node.arg, variables), node.span)
    if isinstance(node, BinOp):
        return BinOp(
            node.op,
            _bind_indices(node.left, variables),
            _bind_indices(node.right, variables),
            node.span,
        )
    if isinstance(node, Call):
        return Call(
            node.fn,
            tuple(_bind_indices(a, variables) for a in node.args),
            node.span,
        )
    return node


def parse(source, variables=None):
    """Parse source text into a tuple of Ast components.

    A top-level "(e1, e2, ...)" form yields one component per entry;
    anything else yields a single component. variables may be a sequence
    of names; when omitted they are inferred (t alone, or a prefix of
    x, y, z, w).
    """
    if not isinstance(source, str):
        raise InputError("expression source must be a string")
    vars_tuple = tuple(variables) if variables is not None else None
    if vars_tuple is not None and len(set(vars_tuple)) != len(vars_tuple):
        raise InputError("duplicate variable names: %s" % (vars_tuple,))
    toks = _tokenize(source)

    roots = None
    collect = vars_tuple is None
    seen = []
    if toks[0].kind == "(":
        p = _Parser(toks, vars_tuple)
        try:
            p.advance()
            comps = [p.parse_expr()]
            while p.peek().kind == ",":
                p.advance()
                comps.append(p.parse_expr())
            p.expect(")", "')'")
            p.expect("eof", "end of input")
            roots = comps
            seen = p.seen_names
        except ParseError:
            roots = None
    if roots is None:
        p = _Parser(toks, vars_tuple)
        root = p.parse_expr()
        p.expect("eof", "end of input")
        roots = [root]
        seen = p.seen_names

    if collect:
        vars_tuple = _infer_variables(seen)
        roots = [_bind_indices(r, vars_tuple) for r in roots]
    return tuple(Ast(root, vars_tuple, source) for root in roots)


def parse_single(source, variables=None):
    """Parse a source expected to hold exactly one component."""
    comps = parse(source, variables)
    if len(comps) != 1:
        raise InputError(
            "expected a single expression, got %d components" % len(comps)
        )
    return comps[0]


# ---------------------------------------------------------------------------
# Numeric evaluation (floats and numpy arrays)


def _check_finite(value, span, what):
    if not np.all(np.isfinite(value)):
        raise EvalDomainError("non-finite value in %s" % what, span)
    return value


def _eval_array(node, env):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.index]
    if isinstance(node, Neg):
        return -_eval_array(node.arg, env)
    if isinstance(node, BinOp):
        a = _eval_array(node.left, env)
        b = _eval_array(node.right, env)
        if node.op == "+":
            return _check_finite(a + b, node.span, "addition")
        if node.op == "-":
            return _check_finite(a - b, node.span, "subtraction")
        if node.op == "*":
            return _check_finite(a * b, node.span, "multiplication")
        if node.op == "/":
            if np.any(b == 0):
                raise EvalDomainError("division by zero", node.span)
            return _check_finite(a / b, node.span, "division")
        if node.op == "^":
            with np.errstate(all="ignore"):
                out = np.power(a, b)
            return _check_finite(out, node.span, "power")
        raise AssertionError(node.op)
    if isinstance(node, Call):
        args = [_eval_array(a, env) for a in node.args]
        return _apply_array(node.fn, args, node.span)
    raise AssertionError(type(node))


def _apply_array(fn, args, span):
    with np.errstate(all="ignore"):
        if fn == "log":
            if np.any(np.asarray(args[0]) <= 0):
                raise EvalDomainError("log of a non-positive number", span)
            out = np.log(args[0])
        elif fn == "sqrt":
            if np.any(np.asarray(args[0]) < 0):
                raise EvalDomainError("sqrt of a negative number", span)
            out = np.sqrt(args[0])
        elif fn == "min":
            out = args[0]
            for a in args[1:]:
                out = np.minimum(out, a)
        elif fn == "max":
            out = args[0]
            for a in args[1:]:
                out = np.maximum(out, a)
        elif fn == "abs":
            out = np.abs(args[0])
        elif fn == "atan":
            out = np.arctan(args[0])
        else:
            out = getattr(np, fn)(args[0])
    return _check_finite(out, span, "%s()" % fn)


def eval_ast(a, x):
    """Evaluate one component at x.

    x is a sequence of length a.arity whose entries are scalars or
    equally shaped arrays; array inputs are evaluated elementwise.
    Returns a float for scalar inputs, an ndarray otherwise.
    """
    if len(x) != a.arity:
        raise InputError(
            "expression takes %d variable(s) %s, got %d values"
            % (a.arity, a.variables, len(x))
        )
    env = [np.asarray(v, dtype=float) for v in x]
    scalar = all(e.ndim == 0 for e in env)
    out = np.asarray(_eval_array(a.root, env), dtype=float)
    if scalar:
        return float(out)
    if out.ndim == 0 and env and env[0].ndim > 0:
        out = np.broadcast_to(out, env[0].shape).copy()
    return out


# ---------------------------------------------------------------------------
# Dual numbers (forward-mode differentiation)


class Dual:
    """Value and first derivative with respect to one seed direction."""

    __slots__ = ("v", "d")

    def __init__(self, v, d=0.0):
        self.v = float(v)
        self.d = float(d)

    def __repr__(self):
        return "Dual(%r, %r)" % (self.v, self.d)


def _dual_check(v, d, span, what):
    if not (math.isfinite(v) and math.isfinite(d)):
        raise EvalDomainError("non-finite value in %s" % what, span)
    return Dual(v, d)


def _eval_dual(node, env):
    if isinstance(node, Num):
        return Dual(node.value)
    if isinstance(node, Var):
        return env[node.index]
    if isinstance(node, Neg):
        a = _eval_dual(node.arg, env)
        return Dual(-a.v, -a.d)
    if isinstance(node, BinOp):
        a = _eval_dual(node.left, env)
        b = _eval_dual(node.right, env)
        if node.op == "+":
            return _dual_check(a.v + b.v, a.d + b.d, node.span, "addition")
        if node.op == "-":
            return _dual_check(a.v - b.v, a.d - b.d, node.span, "subtraction")
        if node.op == "*":
            return _dual_check(
                a.v * b.v, a.d * b.v + a.v * b.d, node.span, "multiplication"
            )
        if node.op == "/":
            if b.v == 0:
                raise EvalDomainError("division by zero", node.span)
            v = a.v / b.v
            return _dual_check(v, (a.d - v * b.d) / b.v, node.span, "division")
        if node.op == "^":
            return _dual_pow(a, b, node.span)
        raise AssertionError(node.op)
    if isinstance(node, Call):
        args = [_eval_dual(a, env) for a in node.args]
        return _apply_dual(node.fn, args, node.span)
    raise AssertionError(type(node))


def _dual_pow(a, b, span):
    try:
        v = a.v**b.v
    except (OverflowError, ValueError, ZeroDivisionError):
        raise EvalDomainError("power out of domain", span) from None
    if isinstance(v, complex):
        raise EvalDomainError("power of a negative base is complex here", span)
    if a.v > 0:
        if b.d == 0.0:
            # constant exponent: direct rule, no log and no division
            # (v * b.v / a.v overflows on subnormal bases)
            d = 0.0 if b.v == 0 else b.v * a.v ** (b.v - 1.0) * a.d
        else:
            d = v * (b.d * math.log(a.v) + b.v * a.d / a.v)
    elif b.d == 0 and float(b.v).is_integer():
        k = b.v
        d = 0.0 if k == 0 else k * a.v ** (k - 1) * a.d
    elif a.v == 0 and a.d == 0 and b.d == 0:
        d = 0.0
    else:
        raise EvalDomainError(
            "power not differentiable at non-positive base", span
        )
    return _dual_check(v, d, span, "power")


def _apply_dual(fn, args, span):
    if fn in ("min", "max"):
        pick = min if fn == "min" else max
        best = args[0]
        for a in args[1:]:
            best = pick(best, a, key=lambda z: z.v)
        return best
    (a,) = args
    if fn == "sin":
        return _dual_check(math.sin(a.v), math.cos(a.v) * a.d, span, "sin()")
    if fn == "cos":
        return _dual_check(math.cos(a.v), -math.sin(a.v) * a.d, span, "cos()")
    if fn == "tan":
        v = math.tan(a.v)
        return _dual_check(v, (1.0 + v * v) * a.d, span, "tan()")
    if fn == "exp":
        try:
            v = math.exp(a.v)
        except OverflowError:
            raise EvalDomainError("non-finite value in exp()", span) from None
        return _dual_check(v, v * a.d, span, "exp()")
    if fn == "log":
        if a.v <= 0:
            raise EvalDomainError("log of a non-positive number", span)
        return _dual_check(math.log(a.v), a.d / a.v, span, "log()")
    if fn == "sqrt":
        if a.v < 0:
            raise EvalDomainError("sqrt of a negative number", span)
        v = math.sqrt(a.v)
        if a.d != 0 and v == 0:
            raise EvalDomainError("sqrt not differentiable at zero", span)
        d = 0.0 if a.d == 0 else a.d / (2.0 * v)
        return _dual_check(v, d, span, "sqrt()")
    if fn == "abs":
        sign = 0.0 if a.v == 0 else math.copysign(1.0, a.v)
        return Dual(abs(a.v), sign * a.d)
    if fn == "atan":
        return _dual_check(
            math.atan(a.v), a.d / (1.0 + a.v * a.v), span, "atan()"
        )
    if fn == "tanh":
        v = math.tanh(a.v)
        return _dual_check(v, (1.0 - v * v) * a.d, span, "tanh()")
    raise AssertionError(fn)


def jacobian_ad(components, x):
    """Jacobian of the map whose rows are components, at point x.

    components: sequence of Ast sharing one variable tuple. Returns an
    (m, n) array with m = len(components), n = arity.
    """
    comps = list(components)
    if not comps:
        raise InputError("no components given")
    variables = comps[0].variables
    for c in comps[1:]:
        if c.variables != variables:
            raise InputError("components disagree on variables")
    n = len(variables)
    xs = [float(v) for v in x]
    if len(xs) != n:
        raise InputError("point has %d coordinates, expected %d" % (len(xs), n))
    jac = np.empty((len(comps), n), dtype=float)
    for j in range(n):
        env = [Dual(xs[i], 1.0 if i == j else 0.0) for i in range(n)]
        for i, c in enumerate(comps):
            jac[i, j] = _eval_dual(c.root, env).d
    return jac


# ---------------------------------------------------------------------------
# Printing and structural edits


def _pretty_node(node):
    if isinstance(node, Num):
        if math.copysign(1.0, node.value) < 0:
            return "(-%s)" % repr(abs(node.value))
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return "(-%s)" % _pretty_node(node.arg)
    if isinstance(node, BinOp):
        return "(%s %s %s)" % (
            _pretty_node(node.left),
            node.op,
            _pretty_node(node.right),
        )
    if isinstance(node, Call):
        return "%s(%s)" % (node.fn, ", ".join(_pretty_node(a) for a in node.args))
    raise AssertionError(type(node))


def pretty(a):
    """Fully parenthesized source for one component; parsing it back
    yields a structurally equal tree."""
    return _pretty_node(a.root if isinstance(a, Ast) else a)


def _substitute(node, name, replacement):
    if isinstance(node, Var):
        return replacement if node.name == name else node
    if isinstance(node, Neg):
        return Neg(_substitute(node.arg, name, replacement), node.span)
    if isinstance(node, BinOp):
        return BinOp(
            node.op,
            _substitute(node.left, name, replacement),
            _substitute(node.right, name, replacement),
            node.span,
        )
    if isinstance(node, Call):
        return Call(
            node.fn,
            tuple(_substitute(a, name, replacement) for a in node.args),
            node.span,
        )
    return node


def substitute(a, name, replacement):
    """Replace every occurrence of variable name with a replacement node."""
    root = _substitute(a.root, name, replacement)
    return Ast(root, a.variables, a.source)

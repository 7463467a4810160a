"""Map expressions F(lam, x): parsing, evaluation and jet derivatives.

Grammar (``^`` binds tightest and is right-associative, unary minus sits
between ``^`` and ``*``)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := ('-')? power
    power  := atom ('^' factor)?
    atom   := NUMBER | NAME | FUNC '(' expr ')' | 'pow' '(' expr ',' expr ')'
            | '(' expr ')'

Names are the variables ``x`` and ``lam`` and the constants ``pi`` and ``e``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import jet as J
from .errors import DomainError, ParseError, UnknownIdentifierError

__all__ = [
    "Num",
    "Name",
    "Neg",
    "BinOp",
    "Call",
    "MapExpr",
    "parse",
    "eval_jet",
    "eval_dlambda",
    "evaluate",
    "FUNCTIONS",
    "CONSTANTS",
]

FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLES = ("x", "lam")


# -- syntax tree ------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


# -- tokenizer --------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)


def _tokenize(source):
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            start = pos + len(source[pos:]) - len(source[pos:].lstrip())
            raise ParseError(
                f"unexpected character {source[start]!r}", _byte(source, start), source
            )
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


def _byte(source, index):
    return len(source[:index].encode("utf-8"))


class _Parser:
    def __init__(self, source, variables):
        self.source = source
        self.variables = variables
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, expected, tok=None):
        tok = tok or self.peek()
        got = "end of input" if tok[0] == "end" else repr(tok[1])
        raise ParseError(
            f"expected {expected}, got {got}", _byte(self.source, tok[2]), self.source
        )

    def expect(self, value):
        tok = self.peek()
        if tok[0] != "op" or tok[1] != value:
            self.error(repr(value))
        return self.take()

    def at(self, value):
        tok = self.peek()
        return tok[0] == "op" and tok[1] == value

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.error("operator or end of input")
        return node

    def expr(self):
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.at("*") or self.at("/"):
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        if self.at("-"):
            self.take()
            return Neg(self.power())
        return self.power()

    def power(self):
        node = self.atom()
        if self.at("^"):
            self.take()
            node = BinOp("^", node, self.factor())
        return node

    def atom(self):
        kind, text, start = self.peek()
        if kind == "num":
            self.take()
            value = float(text)
            if not math.isfinite(value):
                raise ParseError(
                    "numeric literal overflows", _byte(self.source, start), self.source
                )
            return Num(value)
        if kind == "name":
            self.take()
            if text in FUNCTIONS or text == "pow":
                self.expect("(")
                args = [self.expr()]
                if text == "pow":
                    self.expect(",")
                    args.append(self.expr())
                self.expect(")")
                return Call(text, tuple(args))
            if text in self.variables or text in CONSTANTS:
                return Name(text)
            raise UnknownIdentifierError(
                f"unknown identifier {text!r}", _byte(self.source, start), self.source
            )
        if self.at("("):
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        self.error("number, name or '('")


# -- rendering --------------------------------------------------------------------

# Binding strength of each node kind as it appears in the grammar.
_ATOM, _POWER, _FACTOR, _TERM, _EXPR = 0, 1, 2, 3, 4


def _level(node):
    if isinstance(node, Num) and math.copysign(1.0, node.value) < 0:
        return _FACTOR
    if isinstance(node, (Num, Name, Call)):
        return _ATOM
    if isinstance(node, Neg):
        return _FACTOR
    if node.op == "^":
        return _POWER
    if node.op in "*/":
        return _TERM
    return _EXPR


def _render(node, allowed):
    text = _render_bare(node)
    return f"({text})" if _level(node) > allowed else text


def _render_bare(node):
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Name):
        return node.id
    if isinstance(node, Call):
        return f"{node.func}({', '.join(_render(a, _EXPR) for a in node.args)})"
    if isinstance(node, Neg):
        return "-" + _render(node.operand, _POWER)
    if node.op == "^":
        return f"{_render(node.left, _ATOM)}^{_render(node.right, _FACTOR)}"
    if node.op in "*/":
        return f"{_render(node.left, _TERM)}{node.op}{_render(node.right, _FACTOR)}"
    return f"{_render(node.left, _EXPR)}{node.op}{_render(node.right, _TERM)}"


# -- compiled evaluators ----------------------------------------------------------


_SCALAR_LIB = {
    "exp": math.exp,
    "log": math.log,
    "sin": math.sin,
    "cos": math.cos,
    "sqrt": math.sqrt,
    "abs": abs,
    "pow": math.pow,
}

_VECTOR_LIB = {
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "pow": np.power,
}


def _source(node, slots):
    # Fully parenthesized Python source; names resolve to the lambda's
    # arguments ``a``/``b`` and to ``_<func>`` entries of the namespace.
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Name):
        if node.id in CONSTANTS:
            return repr(CONSTANTS[node.id])
        return "a" if node.id == slots[0] else "b"
    if isinstance(node, Neg):
        return f"(-{_source(node.operand, slots)})"
    if isinstance(node, Call):
        args = ", ".join(_source(arg, slots) for arg in node.args)
        return f"_{node.func}({args})"
    left, right = _source(node.left, slots), _source(node.right, slots)
    if node.op == "^":
        return f"_pow({left}, {right})"
    return f"({left} {node.op} {right})"


def _compile(node, lib, slots):
    """Build ``f(a, b)`` evaluating ``node`` with the names in ``slots``
    bound to the positional arguments.

    The tree is turned into a single lambda, which is several times faster
    than a chain of closures when iterating a map millions of times.  Only
    numeric literals and whitelisted functions can appear in the source.
    """
    namespace = {"__builtins__": {}}
    namespace.update({f"_{k}": v for k, v in lib.items()})
    return eval(f"lambda a, b: {_source(node, slots)}", namespace)


# -- generic (jet-capable) interpreter ----------------------------------------------


def _div(a, b):
    if not isinstance(b, J.Jet) and np.ndim(b) == 0 and b == 0.0:
        raise DomainError("division by zero")
    return a / b


_JET_LIB = {
    "exp": J.exp,
    "log": J.log,
    "sin": J.sin,
    "cos": J.cos,
    "sqrt": J.sqrt,
    "abs": J.fabs,
    "pow": J.power,
}


def _interpret(node, env):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Name):
        if node.id in CONSTANTS:
            return CONSTANTS[node.id]
        return env[node.id]
    if isinstance(node, Neg):
        return -_interpret(node.operand, env)
    if isinstance(node, Call):
        return _JET_LIB[node.func](*(_interpret(a, env) for a in node.args))
    a = _interpret(node.left, env)
    b = _interpret(node.right, env)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        return _div(a, b)
    return J.power(a, b)


def _names(node):
    if isinstance(node, Name):
        return {node.id}
    if isinstance(node, (Num,)):
        return set()
    if isinstance(node, Neg):
        return _names(node.operand)
    if isinstance(node, Call):
        return set().union(*(_names(a) for a in node.args))
    return _names(node.left) | _names(node.right)


@dataclass(frozen=True)
class MapExpr:
    """Parsed expression for F(lam, x).  Immutable; equality is by tree."""

    ast: object
    source: str = field(default="", compare=False)
    slots: tuple = field(default=VARIABLES, compare=False, repr=False)

    def render(self):
        return _render(self.ast, _EXPR)

    def __str__(self):
        return self.source or self.render()

    @property
    def names(self):
        return frozenset(_names(self.ast) - set(CONSTANTS))

    @property
    def uses_lambda(self):
        return self.slots[1] in self.names

    def scalar_function(self):
        """Fast ``f(x, lam)`` on Python floats; raises on domain errors."""
        return _compile(self.ast, _SCALAR_LIB, self.slots)

    def vector_function(self):
        """``f(x, lam)`` over numpy arrays; NaN/inf instead of raising."""
        f = _compile(self.ast, _VECTOR_LIB, self.slots)

        def g(x, lam):
            with np.errstate(all="ignore"):
                return f(np.asarray(x, dtype=float), lam)

        return g

    def interpret(self, x, lam):
        """Evaluate with arbitrary number-like arguments (floats, arrays, jets)."""
        return _interpret(self.ast, {self.slots[0]: x, self.slots[1]: lam})


def parse(source: str, variables=VARIABLES) -> MapExpr:
    """Parse ``source`` into a :class:`MapExpr`.

    ``variables`` names the two free variables, first the state and then
    the parameter.  Raises :class:`ParseError` with a byte offset.
    """
    if not source or not source.strip():
        raise ParseError("empty expression", 0, source or "")
    tree = _Parser(source, tuple(variables)).parse()
    return MapExpr(tree, source, tuple(variables))


def evaluate(expr: MapExpr, lam: float, x: float) -> float:
    """Direct recursive evaluation of F(lam, x) on floats."""
    try:
        return expr.scalar_function()(float(x), float(lam))
    except (ValueError, ArithmeticError) as exc:
        raise DomainError(str(exc) or type(exc).__name__) from exc


def _finite_jet(result, order):
    if not isinstance(result, J.Jet):
        result = J.Jet.constant(result, order)
    coeffs = [float(c) for c in result.coeffs]
    if not all(math.isfinite(c) for c in coeffs):
        raise DomainError("non-finite jet coefficient")
    return J.Jet(coeffs)


def _guarded(expr, x, lam):
    try:
        return expr.interpret(x, lam)
    except DomainError:
        raise
    except (ValueError, ArithmeticError) as exc:
        raise DomainError(str(exc) or type(exc).__name__) from exc


def eval_jet(expr: MapExpr, lam: float, x0: float, order: int) -> J.Jet:
    """Taylor jet of x -> F(lam, x) at ``x0`` up to ``order``.

    ``coeffs[k] * k!`` is the k-th x-derivative, exact up to rounding.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    x = J.Jet.variable(float(x0), order)
    return _finite_jet(_guarded(expr, x, float(lam)), order)


def eval_dlambda(expr: MapExpr, lam: float, x0: float) -> float:
    """Partial derivative dF/dlam at (lam, x0), by an order-1 jet in lam."""
    lj = J.Jet.variable(float(lam), 1)
    return _finite_jet(_guarded(expr, float(x0), lj), 1).coeffs[1]

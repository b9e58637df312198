"""Scalar functions of one variable: parsed expressions and sample tables.

Grammar (see docs/grammar.md)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("+" | "-") unary | power
    power   := primary ("^" unary)?
    primary := NUMBER | NAME | NAME "(" expr ")" | "(" expr ")"

``^`` is right associative and binds tighter than unary minus, so ``-t^2``
is ``-(t^2)``.  Evaluation is vectorized over numpy arrays.
"""

import math
import re

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sign", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLE_NAMES = ("t", "s", "x", "y", "u", "v")


class ExpressionSyntaxError(SyntaxError):
    """Parse failure; ``offset`` is the 0-based byte offset into the source."""

    def __init__(self, message, source, offset, expected=()):
        self.source = source
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at offset {offset}"
        if expected:
            detail += f" (expected {', '.join(expected)})"
        super().__init__(detail)


# ---------------------------------------------------------------- functions

class ScalarFunction:
    """Callable ``t -> value`` accepting floats or numpy arrays."""

    def __call__(self, t):
        raise NotImplementedError

    def derivative(self):
        raise NotImplementedError

    def __add__(self, other):
        return _combine(np.add, self, other, "+")

    def __radd__(self, other):
        return _combine(np.add, other, self, "+")

    def __sub__(self, other):
        return _combine(np.subtract, self, other, "-")

    def __rsub__(self, other):
        return _combine(np.subtract, other, self, "-")

    def __mul__(self, other):
        return _combine(np.multiply, self, other, "*")

    def __rmul__(self, other):
        return _combine(np.multiply, other, self, "*")

    def __truediv__(self, other):
        return _combine(np.divide, self, other, "/")

    def __neg__(self):
        return _combine(np.multiply, -1.0, self, "*")

    def reflected(self):
        """The function ``t -> self(-t)``."""
        return Reflected(self)


def as_function(value):
    if isinstance(value, ScalarFunction):
        return value
    if isinstance(value, str):
        return parse_scalar(value)
    if callable(value):
        return Wrapped(value)
    return Constant(float(value))


class Constant(ScalarFunction):
    def __init__(self, value):
        self.value = float(value)

    def __call__(self, t):
        return np.full(np.shape(t), self.value) if np.ndim(t) else self.value

    def derivative(self):
        return Constant(0.0)

    def __repr__(self):
        return f"Constant({self.value!r})"


class Wrapped(ScalarFunction):
    def __init__(self, fn, dfn=None, label="<callable>"):
        self.fn, self.dfn, self.label = fn, dfn, label

    def __call__(self, t):
        return self.fn(t)

    def derivative(self):
        if self.dfn is None:
            # centred difference fallback for opaque callables
            h = 1e-5
            return Wrapped(lambda t: (self.fn(np.asarray(t) + h)
                                      - self.fn(np.asarray(t) - h)) / (2 * h))
        return as_function(self.dfn)

    def __repr__(self):
        return f"Wrapped({self.label})"


class _Combined(ScalarFunction):
    def __init__(self, op, a, b, sym):
        self.op, self.a, self.b, self.sym = op, a, b, sym

    def __call__(self, t):
        return self.op(self.a(t), self.b(t))

    def derivative(self):
        a, b = self.a, self.b
        da, db = a.derivative(), b.derivative()
        if self.sym == "+":
            return da + db
        if self.sym == "-":
            return da - db
        if self.sym == "*":
            return da * b + a * db
        return (da * b - a * db) / (b * b)

    def __repr__(self):
        return f"({self.a!r} {self.sym} {self.b!r})"


def _combine(op, a, b, sym):
    return _Combined(op, as_function(a), as_function(b), sym)


class Reflected(ScalarFunction):
    def __init__(self, f):
        self.f = f

    def __call__(self, t):
        return self.f(-np.asarray(t) if np.ndim(t) else -t)

    def derivative(self):
        return -Reflected(self.f.derivative())

    def __repr__(self):
        return f"Reflected({self.f!r})"


class SampleTable(ScalarFunction):
    """Uniform samples ``values[k] = f(t0 + k h)`` with cubic interpolation."""

    def __init__(self, t0, h, values, _spline=None):
        self.t0, self.h = float(t0), float(h)
        self.values = np.asarray(values, dtype=float)
        if self.values.ndim != 1 or len(self.values) < 2:
            raise ValueError("sample table needs at least two values")
        self.spline = _spline if _spline is not None else CubicSpline(
            self.t0 + self.h * np.arange(len(self.values)), self.values)

    @property
    def nodes(self):
        return self.t0 + self.h * np.arange(len(self.values))

    def __call__(self, t):
        out = self.spline(t)
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self):
        d = self.spline.derivative()
        return SampleTable(self.t0, self.h, d(self.nodes), _spline=d)

    def __repr__(self):
        return f"SampleTable(t0={self.t0}, h={self.h}, n={len(self.values)})"


# ---------------------------------------------------------------- AST

class Expression(ScalarFunction):
    """Parsed expression; ``node`` is a nested tuple AST."""

    def __init__(self, node, variable, source=None):
        self.node = node
        self.variable = variable
        self.source = source

    def __call__(self, t):
        return _eval(self.node, t)

    def derivative(self):
        return Expression(_simplify(_diff(self.node)), self.variable)

    def __repr__(self):
        return f"Expression({self.source or _unparse(self.node)!r})"

    def __str__(self):
        return self.source or _unparse(self.node)


def _domain_check(cond, message):
    if np.any(cond):
        raise DomainError(message)


def _eval(node, t):
    kind = node[0]
    if kind == "num":
        return np.full(np.shape(t), node[1]) if np.ndim(t) else node[1]
    if kind == "var":
        return np.asarray(t, dtype=float) if np.ndim(t) else float(t)
    if kind == "neg":
        return -_eval(node[1], t)
    if kind == "bin":
        op, a, b = node[1], _eval(node[2], t), _eval(node[3], t)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            _domain_check(np.asarray(b) == 0, "division by zero")
            return a / b
        # "^"
        a_arr, b_arr = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        non_int = b_arr != np.round(b_arr)
        _domain_check((a_arr < 0) & non_int, "negative base with fractional exponent")
        _domain_check((a_arr == 0) & (b_arr < 0), "zero to a negative power")
        out = np.power(a_arr, b_arr)
        return float(out) if out.ndim == 0 else out
    if kind == "call":
        name, x = node[1], _eval(node[2], t)
        if name == "log":
            _domain_check(np.asarray(x) <= 0, "log of non-positive value")
        if name == "sqrt":
            _domain_check(np.asarray(x) < 0, "sqrt of negative value")
        out = _UFUNCS[name](x)
        return float(out) if np.ndim(out) == 0 else out
    raise ValueError(f"unknown node {kind}")


_UFUNCS = {"sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp,
           "log": np.log, "sqrt": np.sqrt, "sign": np.sign, "abs": np.abs}


def _num(v):
    return ("num", float(v))


def _bin(op, a, b):
    return ("bin", op, a, b)


def _call(name, a):
    return ("call", name, a)


def _diff(n):
    kind = n[0]
    if kind == "num":
        return _num(0)
    if kind == "var":
        return _num(1)
    if kind == "neg":
        return ("neg", _diff(n[1]))
    if kind == "bin":
        op, a, b = n[1:]
        da, db = _diff(a), _diff(b)
        if op in "+-":
            return _bin(op, da, db)
        if op == "*":
            return _bin("+", _bin("*", da, b), _bin("*", a, db))
        if op == "/":
            return _bin("/", _bin("-", _bin("*", da, b), _bin("*", a, db)),
                        _bin("^", b, _num(2)))
        if b[0] == "num":
            return _bin("*", _bin("*", b, _bin("^", a, _num(b[1] - 1))), da)
        # general power: d(a^b) = a^b (b' log a + b a'/a)
        return _bin("*", n, _bin("+", _bin("*", db, _call("log", a)),
                                 _bin("/", _bin("*", b, da), a)))
    if kind == "call":
        name, a = n[1], n[2]
        da = _diff(a)
        if name == "sin":
            inner = _call("cos", a)
        elif name == "cos":
            inner = ("neg", _call("sin", a))
        elif name == "tan":
            inner = _bin("+", _num(1), _bin("^", _call("tan", a), _num(2)))
        elif name == "exp":
            inner = n
        elif name == "log":
            inner = _bin("/", _num(1), a)
        elif name == "sqrt":
            inner = _bin("/", _num(0.5), n)
        elif name == "abs":
            inner = _call("sign", a)
        else:  # sign
            inner = _num(0)
        return _bin("*", inner, da)
    raise ValueError(kind)


def _simplify(n):
    kind = n[0]
    if kind == "neg":
        a = _simplify(n[1])
        if a[0] == "num":
            return _num(-a[1])
        return ("neg", a)
    if kind == "call":
        a = _simplify(n[2])
        if a[0] == "num" and n[1] not in ("log", "sqrt"):
            return _num(_UFUNCS[n[1]](a[1]))
        return _call(n[1], a)
    if kind != "bin":
        return n
    op = n[1]
    a, b = _simplify(n[2]), _simplify(n[3])
    an = a[1] if a[0] == "num" else None
    bn = b[1] if b[0] == "num" else None
    if an is not None and bn is not None and op != "/" and op != "^":
        return _num(_eval(_bin(op, a, b), 0.0))
    if op == "+":
        if an == 0:
            return b
        if bn == 0:
            return a
    if op == "-":
        if bn == 0:
            return a
        if an == 0:
            return ("neg", b)
    if op == "*":
        if an == 0 or bn == 0:
            return _num(0)
        if an == 1:
            return b
        if bn == 1:
            return a
    if op == "/" and an == 0:
        return _num(0)
    if op == "^" and bn == 1:
        return a
    if op == "^" and bn == 0:
        return _num(1)
    return _bin(op, a, b)


def _unparse(n):
    kind = n[0]
    if kind == "num":
        return repr(n[1])
    if kind == "var":
        return n[1]
    if kind == "neg":
        return f"(-{_unparse(n[1])})"
    if kind == "bin":
        return f"({_unparse(n[2])}{n[1]}{_unparse(n[3])})"
    return f"{n[1]}({_unparse(n[2])})"


# ---------------------------------------------------------------- parser

_TOKEN = re.compile(r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
                    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


class _Parser:
    def __init__(self, src, variable, bindings):
        self.src = src
        self.variable = variable
        self.bindings = dict(bindings or {})
        self.tokens = self._tokenize()
        self.i = 0
        self.used_vars = set()

    def _tokenize(self):
        toks, pos, src = [], 0, self.src
        while pos < len(src):
            if src[pos:].strip() == "":
                break
            m = _TOKEN.match(src, pos)
            if not m:
                off = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
                raise ExpressionSyntaxError(f"unexpected character {src[off]!r}",
                                            src, off, ("number", "name", "operator"))
            kind = m.lastgroup
            start = m.start(kind)
            toks.append((kind, m.group(kind), start))
            pos = m.end()
        toks.append(("end", "", len(src)))
        return toks

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        kind, text, off = self.peek()
        what = "end of input" if kind == "end" else repr(text)
        raise ExpressionSyntaxError(f"unexpected {what}", self.src, off, expected)

    def expect_op(self, op):
        kind, text, _ = self.peek()
        if kind != "op" or text != op:
            self.fail((repr(op),))
        self.take()

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail(("operator", "end of input"))
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = _bin(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = _bin(op, node, self.unary())
        return node

    def unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text in "+-":
            self.take()
            inner = self.unary()
            return ("neg", inner) if text == "-" else inner
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return _bin("^", base, self.unary())
        return base

    def primary(self):
        kind, text, off = self.peek()
        if kind == "num":
            self.take()
            return _num(float(text))
        if kind == "op" and text == "(":
            self.take()
            node = self.expr()
            self.expect_op(")")
            return node
        if kind == "name":
            self.take()
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return _call(text, arg)
            if text in self.bindings:
                return _num(self.bindings[text])
            if text in CONSTANTS:
                return _num(CONSTANTS[text])
            allowed = (self.variable,) if self.variable else VARIABLE_NAMES
            if text in allowed:
                self.used_vars.add(text)
                if len(self.used_vars) > 1:
                    raise ExpressionSyntaxError(
                        "more than one free variable", self.src, off,
                        (sorted(self.used_vars)[0],))
                return ("var", text)
            raise ExpressionSyntaxError(f"unknown name {text!r}", self.src, off,
                                        ("function", "bound constant", "variable"))
        self.fail(("number", "name", "'('"))


def parse_scalar(src, variable=None, bindings=None):
    """Parse ``src`` into an :class:`Expression`.

    ``variable`` fixes the name of the free variable; by default any one of
    t, s, x, y, u, v is accepted.  ``bindings`` maps extra names to numbers.
    """
    if not isinstance(src, str) or not src.strip():
        raise ExpressionSyntaxError("empty expression", src or "", 0,
                                    ("number", "name", "'('"))
    p = _Parser(src, variable, bindings)
    node = p.parse()
    var = next(iter(p.used_vars), variable or "t")
    return Expression(node, var, src)

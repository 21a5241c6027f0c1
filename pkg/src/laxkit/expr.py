"""Tiny complex-valued expression language for field profiles in config files.

Grammar (Pratt parser), loosest to tightest:

    expr   := expr ('+' | '-') expr
            | expr ('*' | '/') expr
            | '-' expr                  (binds looser than '^': -x^2 = -(x^2))
            | expr '^' expr             (right associative)
            | NUMBER | IDENT | FUNC '(' expr ')' | '(' expr ')'

Identifiers are x and j; constants pi, e and i (imaginary unit).
Evaluation is complex-first and vectorizes over numpy arrays.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Expr", "Num", "Var", "Const", "Neg", "BinOp", "Call",
    "ParseError", "EvalError", "parse", "to_string", "evaluate", "free_vars",
    "VARIABLES", "CONSTANTS", "FUNCTIONS",
]

VARIABLES = ("x", "j")
CONSTANTS = {"pi": np.pi, "e": np.e, "i": 1j}
FUNCTIONS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan,
    "sinh": np.sinh, "cosh": np.cosh, "tanh": np.tanh,
    "sech": lambda z: 1 / np.cosh(z),
    "exp": np.exp, "log": np.log, "sqrt": np.sqrt, "atan": np.arctan,
    "abs": lambda z: np.abs(z).astype(complex),
}


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Const(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr


class ParseError(ValueError):
    """Syntax error; ``offset`` is a byte offset into the UTF-8 source."""

    def __init__(self, msg: str, offset: int, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        exp = f"; expected {', '.join(sorted(self.expected))}" if self.expected else ""
        super().__init__(f"{msg} at byte {offset}{exp}")


class EvalError(ValueError):
    pass


# ------------------------------------------------------------------ lexing

_TOKEN = re.compile(r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<id>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))")
_BINARY = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
_UNARY = 30
_START = ("number", "identifier", "'('", "'-'")
_AFTER = ("operator", "')'", "end of input")


@dataclass(frozen=True)
class _Tok:
    kind: str  # num | id | op | end
    text: str
    offset: int


def _lex(text: str) -> list[_Tok]:
    toks, pos = [], 0
    byte = lambda i: len(text[:i].encode("utf-8"))  # noqa: E731
    while True:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:]
            stripped = rest.lstrip()
            if not stripped:
                toks.append(_Tok("end", "", byte(len(text))))
                return toks
            at = len(text) - len(stripped)
            raise ParseError(f"unexpected character {stripped[0]!r}", byte(at), _START)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), byte(m.start(kind))))
        pos = m.end()


# ------------------------------------------------------------------ parsing

class _Parser:
    def __init__(self, text):
        self.toks = _lex(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text):
        t = self.peek()
        if t.text != text:
            raise ParseError(f"expected {text!r}", t.offset, (f"'{text}'",))
        return self.take()

    def expression(self, rbp=0):
        left = self.nud(self.take())
        while True:
            t = self.peek()
            bp = _BINARY.get(t.text, -1) if t.kind == "op" else -1
            if bp <= rbp:
                return left
            self.take()
            rhs = self.expression(bp - 1 if t.text == "^" else bp)
            left = BinOp(t.text, left, rhs)

    def nud(self, t):
        if t.kind == "num":
            v = float(t.text)
            if not np.isfinite(v):
                raise ParseError("numeric literal out of range", t.offset)
            return Num(v)
        if t.kind == "id":
            if t.text in FUNCTIONS:
                self.expect("(")
                arg = self.expression()
                self.expect(")")
                return Call(t.text, arg)
            if t.text in VARIABLES:
                return Var(t.text)
            if t.text in CONSTANTS:
                return Const(t.text)
            raise ParseError(f"unknown identifier {t.text!r}", t.offset,
                             VARIABLES + tuple(CONSTANTS) + tuple(FUNCTIONS))
        if t.text == "-":
            return Neg(self.expression(_UNARY))
        if t.text == "(":
            e = self.expression()
            self.expect(")")
            return e
        what = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"unexpected {what}, expected expression", t.offset, _START)


def parse(text) -> Expr:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    p = _Parser(text)
    e = p.expression()
    t = p.peek()
    if t.kind != "end":
        raise ParseError(f"unexpected {t.text!r}", t.offset, _AFTER)
    return e


# ------------------------------------------------------------------ printing

def to_string(e: Expr) -> str:
    """Fully parenthesized source that reparses to the same tree."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, (Var, Const)):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_string(e.arg)})"
    if isinstance(e, BinOp):
        return f"({to_string(e.left)} {e.op} {to_string(e.right)})"
    if isinstance(e, Call):
        return f"{e.func}({to_string(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def free_vars(e: Expr) -> frozenset:
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, Neg):
        return free_vars(e.arg)
    if isinstance(e, Call):
        return free_vars(e.arg)
    if isinstance(e, BinOp):
        return free_vars(e.left) | free_vars(e.right)
    return frozenset()


# ------------------------------------------------------------------ evaluation

def _canon(z):
    # adding +0 turns a -0.0 imaginary part into +0.0, so -4 sits on the principal side of the cut
    return np.asarray(z, dtype=complex) + 0j


def _pow(a, b):
    a, b = _canon(a), _canon(b)
    out = np.power(a, b)
    # numpy leaves 0^0 undefined; use the usual convention 0^0 = 1
    return np.where((a == 0) & (b == 0), 1 + 0j, out)


_OPS = {"+": np.add, "-": np.subtract, "*": np.multiply, "/": np.divide, "^": _pow}


def _eval(e, env):
    if isinstance(e, Num):
        return complex(e.value)
    if isinstance(e, Const):
        return complex(CONSTANTS[e.name])
    if isinstance(e, Var):
        if e.name not in env:
            raise EvalError(f"unbound identifier {e.name!r}")
        return env[e.name]
    if isinstance(e, Neg):
        return -_eval(e.arg, env)
    if isinstance(e, BinOp):
        a, b = _eval(e.left, env), _eval(e.right, env)
        if e.op == "/" and np.any(np.asarray(b) == 0):
            raise EvalError("division by zero")
        out = _OPS[e.op](a, b)
    else:
        arg = _eval(e.arg, env)
        if e.func == "log" and np.any(np.asarray(arg) == 0):
            raise EvalError("log of zero")
        out = FUNCTIONS[e.func](_canon(arg))
    if not np.all(np.isfinite(out)):
        raise EvalError(f"non-finite result in {to_string(e)}")
    return out


def evaluate(e, bindings=None):
    """Evaluate to a complex scalar, or a complex array when bindings are arrays."""
    if isinstance(e, str):
        e = parse(e)
    env = {k: np.asarray(v, dtype=complex) if np.ndim(v) else complex(v) for k, v in (bindings or {}).items()}
    with np.errstate(all="ignore"):
        out = _eval(e, env)
    shape = np.broadcast_shapes(*[np.shape(v) for v in env.values()]) if env else ()
    if shape == ():
        return complex(out)
    return np.broadcast_to(np.asarray(out, dtype=complex), shape).copy()

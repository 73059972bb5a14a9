"""Expression language for test signals and user-defined kernels.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = "-" unary | power ;
    power   = atom [ "^" unary ] ;
    atom    = number | "x" | "pi" | "e" | func "(" expr ")" | "(" expr ")" ;
    func    = "exp" | "ln" | "sin" | "cos" | "abs" | "sinc" ;
    number  = digits [ "." digits ] [ exponent ] | "." digits [ exponent ] ;

``^`` binds tighter than unary minus, so ``-x^2`` is ``-(x^2)``; ``^`` is
right associative and ``+ - * /`` are left associative.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, ParseError

MAX_DEPTH = 200

FUNCTIONS = {
    "exp": np.exp,
    "ln": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "abs": np.abs,
    "sinc": np.sinc,
}
CONSTANTS = {"pi": math.pi, "e": math.e}

_ATOM_START = ("number", "x", "function", "(", "-")


class Node:
    """Base class of expression nodes; subclasses are frozen dataclasses."""

    prec = 5

    def _eval(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return evaluate(self, x)


@dataclass(frozen=True)
class Num(Node):
    value: float

    def _eval(self, x):
        return self.value


@dataclass(frozen=True)
class Var(Node):
    def _eval(self, x):
        return x


@dataclass(frozen=True)
class Neg(Node):
    operand: Node
    prec = 3

    def _eval(self, x):
        return -self.operand._eval(x)


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    @property
    def prec(self):
        return {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}[self.op]

    def _eval(self, x):
        a = self.left._eval(x)
        b = self.right._eval(x)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            return np.divide(a, b)
        return np.power(a, b)


@dataclass(frozen=True)
class Call(Node):
    func: str
    arg: Node

    def _eval(self, x):
        return FUNCTIONS[self.func](self.arg._eval(x))


def evaluate(node: Node, x):
    """Evaluate ``node`` at scalar or array ``x``.

    Raises :class:`DomainError` when the result is not finite at a finite
    input (division by zero, ``ln`` of a non-positive value, overflow).
    """
    arr = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        out = np.broadcast_to(np.asarray(node._eval(arr), dtype=float), arr.shape)
    bad = ~np.isfinite(out) & np.isfinite(arr)
    if np.any(bad):
        where = arr[bad].flat[0] if arr.ndim else float(arr)
        raise DomainError(f"expression {format_expression(node)!r} is not finite at x={where!r}")
    if arr.ndim == 0:
        return float(out)
    return np.array(out)


# -- lexer -----------------------------------------------------------------

_NUMBER = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class Token:
    kind: str  # number | ident | op | end
    text: str
    offset: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        m = _NUMBER.match(text, i)
        if m:
            tokens.append(Token("number", m.group(), i))
            i = m.end()
            continue
        m = _IDENT.match(text, i)
        if m:
            tokens.append(Token("ident", m.group(), i))
            i = m.end()
            continue
        if ch in "+-*/^()":
            tokens.append(Token("op", ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i, _ATOM_START)
    tokens.append(Token("end", "", n))
    return tokens


# -- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.depth = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def advance(self) -> Token:
        tok = self.tok
        self.pos += 1
        return tok

    def enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise ParseError("expression nested too deeply", self.tok.offset)

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected token {self.tok.text!r}", self.tok.offset,
                             ("+", "-", "*", "/", "^", "end of input"))
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.at("*") or self.at("/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        self.enter()
        try:
            if self.at("-"):
                self.advance()
                return Neg(self.unary())
            return self.power()
        finally:
            self.depth -= 1

    def power(self) -> Node:
        base = self.atom()
        if self.at("^"):
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ParseError(f"numeric literal {tok.text!r} overflows", tok.offset)
            return Num(value)
        if tok.kind == "ident":
            name = tok.text
            if name == "x":
                self.advance()
                return Var()
            if name in CONSTANTS:
                self.advance()
                return Num(CONSTANTS[name])
            if name in FUNCTIONS:
                self.advance()
                if not self.at("("):
                    raise ParseError(f"expected '(' after {name}", self.tok.offset, ("(",))
                self.advance()
                arg = self.expr()
                if not self.at(")"):
                    raise ParseError("unclosed call", self.tok.offset, (")",))
                self.advance()
                return Call(name, arg)
            raise ParseError(f"unknown name {name!r}", tok.offset,
                             ("x", "pi", "e") + tuple(FUNCTIONS))
        if self.at("("):
            self.advance()
            self.enter()
            try:
                node = self.expr()
            finally:
                self.depth -= 1
            if not self.at(")"):
                raise ParseError("unclosed parenthesis", self.tok.offset, (")",))
            self.advance()
            return node
        what = "end of input" if tok.kind == "end" else f"token {tok.text!r}"
        raise ParseError(f"unexpected {what}", tok.offset, _ATOM_START)


def parse_expression(text: str) -> Node:
    """Parse ``text`` into an expression tree.

    >>> parse_expression("3*exp(x)")(0.0)
    3.0
    """
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty expression", 0, _ATOM_START)
    return _Parser(text).parse()


def format_expression(node: Node) -> str:
    """Render ``node`` as text that parses back to an equal tree."""
    return _fmt(node, 0)


def _fmt(node: Node, min_prec: int) -> str:
    if isinstance(node, Num):
        s = repr(float(node.value))
        if node.value < 0 or s.startswith("-"):
            s = f"({s})"
        return s
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Call):
        return f"{node.func}({_fmt(node.arg, 0)})"
    if isinstance(node, Neg):
        s = "-" + _fmt(node.operand, 3)
    elif isinstance(node, BinOp):
        if node.op in "+-":
            s = f"{_fmt(node.left, 1)} {node.op} {_fmt(node.right, 2)}"
        elif node.op in "*/":
            s = f"{_fmt(node.left, 2)}{node.op}{_fmt(node.right, 3)}"
        else:
            s = f"{_fmt(node.left, 5)}^{_fmt(node.right, 3)}"
    else:
        raise TypeError(f"not an expression node: {node!r}")
    return f"({s})" if node.prec < min_prec else s

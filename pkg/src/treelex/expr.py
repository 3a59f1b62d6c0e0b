"""Expressions over G(F) in either signature.

lgroup mode::

    expr := term (('+' | 'v' | '^') term)*      precedence  ^ > v > +
    term := INT '*' atom | '-' atom | atom
    atom := NAME | '0' | '(' expr ')'

semiring mode uses ``+`` for join, ``*`` for group addition, ``inv(...)`` for
negation and any positive integer literal for the unit (``1 + 1 = 1`` in an
idempotent semiring). Both modes parse into the same AST, stated in the
lattice-group vocabulary.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

from treelex import tlex
from treelex.exceptions import ExpressionSyntaxError, UnboundName, UnknownOperatorInMode
from treelex.forest import RootedForest
from treelex.tlex import TlexElement

__all__ = [
    "Name", "Zero", "Add", "Join", "Meet", "Neg", "Scale", "Expr",
    "MODES", "tokenize", "parse", "to_string", "names", "evaluate",
]

MODES = ("lgroup", "semiring")


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Join:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Meet:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Scale:
    k: int
    arg: "Expr"

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("scale factor must be non-negative; use Neg for signs")


Expr = Union[Name, Zero, Add, Join, Meet, Neg, Scale]

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[-+*^()]))")
_RESERVED = {"v", "inv"}


@dataclass(frozen=True)
class Token:
    kind: str  # int, name, op, end
    text: str
    pos: int


def tokenize(src: str) -> list[Token]:
    out = []
    pos = 0
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos == len(src):
            break
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {src[pos]!r}", pos)
        start = m.start(m.lastgroup)
        text = m.group(m.lastgroup)
        if m.lastgroup == "int":
            out.append(Token("int", text, start))
        elif m.lastgroup == "name":
            out.append(Token("op" if text in _RESERVED else "name", text, start))
        else:
            out.append(Token("op", text, start))
        pos = m.end()
    out.append(Token("end", "", len(src)))
    return out


# binary operator -> (precedence, constructor), per mode
_BINARY = {
    "lgroup": {"+": (1, Add), "v": (2, Join), "^": (3, Meet)},
    "semiring": {"+": (1, Join), "*": (2, Add)},
}


class _Parser:
    def __init__(self, src: str, mode: str):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.tokens = tokenize(src)
        self.i = 0
        self.binary = _BINARY[mode]

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> None:
        if self.tok.text != text:
            raise ExpressionSyntaxError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}",
                                        self.tok.pos)
        self.advance()

    def reject(self, t: Token) -> None:
        raise UnknownOperatorInMode(f"operator {t.text!r} is not available in {self.mode} mode", t.pos)

    def expr(self, min_prec: int = 1) -> Expr:
        left = self.term()
        while True:
            t = self.tok
            if t.kind != "op" or t.text in "()":
                break
            if t.text not in self.binary:
                if t.text in ("+", "v", "^", "*"):
                    self.reject(t)
                raise ExpressionSyntaxError(f"unexpected {t.text!r}", t.pos)
            prec, node = self.binary[t.text]
            if prec < min_prec:
                break
            self.advance()
            left = node(left, self.expr(prec + 1))
        return left

    def term(self) -> Expr:
        t = self.tok
        if self.mode == "lgroup":
            if t.kind == "int" and self.tokens[self.i + 1].text == "*":
                self.advance()
                self.advance()
                return Scale(int(t.text), self.atom())
            if t.text == "-":
                self.advance()
                return Neg(self.atom())
        elif t.text == "-":
            self.reject(t)
        return self.atom()

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "name":
            self.advance()
            return Name(t.text)
        if t.kind == "int":
            self.advance()
            value = int(t.text)
            if self.mode == "lgroup":
                if value != 0:
                    raise ExpressionSyntaxError("only the literal 0 is an element; write k*x for multiples",
                                                t.pos)
                return Zero()
            if value == 0:
                raise ExpressionSyntaxError("0 is not an element of a parasemifield", t.pos)
            return Zero()
        if t.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if t.text == "inv":
            if self.mode != "semiring":
                self.reject(t)
            self.advance()
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return Neg(e)
        raise ExpressionSyntaxError(f"expected an operand, found {t.text or 'end of input'!r}", t.pos)


def parse(src: str, mode: str = "lgroup") -> Expr:
    p = _Parser(src, mode)
    if p.tok.kind == "end":
        raise ExpressionSyntaxError("empty expression", 0)
    e = p.expr()
    if p.tok.kind != "end":
        raise ExpressionSyntaxError(f"unexpected {p.tok.text!r}", p.tok.pos)
    return e


# printing

_LG_PREC = {Add: 1, Join: 2, Meet: 3}
_LG_SYM = {Add: "+", Join: "v", Meet: "^"}


def _lgroup(e: Expr) -> str:
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Zero):
        return "0"
    if isinstance(e, (Neg, Scale)):
        inner = _lgroup(e.arg)
        if not isinstance(e.arg, (Name, Zero)):
            inner = f"({inner})"
        return f"-{inner}" if isinstance(e, Neg) else f"{e.k}*{inner}"
    p = _LG_PREC[type(e)]
    left, right = _lgroup(e.left), _lgroup(e.right)
    if _LG_PREC.get(type(e.left), 9) < p:
        left = f"({left})"
    if _LG_PREC.get(type(e.right), 9) <= p:
        right = f"({right})"
    return f"{left} {_LG_SYM[type(e)]} {right}"


def _semiring_vocab(e: Expr) -> Expr:
    """Rewrite meets and multiples into join, group addition and negation."""
    if isinstance(e, Meet):
        return Neg(Join(Neg(_semiring_vocab(e.left)), Neg(_semiring_vocab(e.right))))
    if isinstance(e, Scale):
        if e.k == 0:
            return Zero()
        arg = _semiring_vocab(e.arg)
        prod = arg
        for _ in range(e.k - 1):
            prod = Add(prod, arg)
        return prod
    if isinstance(e, Neg):
        return Neg(_semiring_vocab(e.arg))
    if isinstance(e, (Add, Join)):
        return type(e)(_semiring_vocab(e.left), _semiring_vocab(e.right))
    return e


_SR_PREC = {Join: 1, Add: 2}
_SR_SYM = {Join: "+", Add: "*"}


def _semiring(e: Expr) -> str:
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Zero):
        return "1"
    if isinstance(e, Neg):
        return f"inv({_semiring(e.arg)})"
    p = _SR_PREC[type(e)]
    left, right = _semiring(e.left), _semiring(e.right)
    if _SR_PREC.get(type(e.left), 9) < p:
        left = f"({left})"
    if _SR_PREC.get(type(e.right), 9) <= p:
        right = f"({right})"
    return f"{left} {_SR_SYM[type(e)]} {right}"


def to_string(e: Expr, mode: str = "lgroup") -> str:
    if mode == "lgroup":
        return _lgroup(e)
    if mode == "semiring":
        return _semiring(_semiring_vocab(e))
    raise ValueError(f"unknown mode {mode!r}")


def names(e: Expr) -> Iterator[str]:
    if isinstance(e, Name):
        yield e.name
    elif isinstance(e, (Neg, Scale)):
        yield from names(e.arg)
    elif isinstance(e, (Add, Join, Meet)):
        yield from names(e.left)
        yield from names(e.right)


def evaluate(e: Expr, env: Mapping[str, TlexElement], forest: RootedForest | None = None) -> TlexElement:
    """Evaluate ``e`` with tlex operations; ``forest`` is needed only when ``env`` is empty."""
    if forest is None:
        if not env:
            raise ValueError("empty environment: pass the forest explicitly")
        forest = next(iter(env.values())).forest

    def ev(node: Expr) -> TlexElement:
        if isinstance(node, Name):
            try:
                return env[node.name]
            except KeyError:
                raise UnboundName(node.name) from None
        if isinstance(node, Zero):
            return tlex.zero(forest)
        if isinstance(node, Neg):
            return tlex.neg(ev(node.arg))
        if isinstance(node, Scale):
            return tlex.scale(node.k, ev(node.arg))
        if isinstance(node, Add):
            return tlex.add(ev(node.left), ev(node.right))
        if isinstance(node, Join):
            return tlex.join(ev(node.left), ev(node.right))
        if isinstance(node, Meet):
            return tlex.meet(ev(node.left), ev(node.right))
        raise TypeError(f"not an expression node: {node!r}")

    return ev(e)

"""Tokenizer and recursive-descent parser for polynomial expressions.

    expr   := term (("+" | "-") term)*
    term   := factor ("*" factor)*
    factor := base ("^" uint)?
    base   := var | "i" | number | "(" expr ")"
            | "Re(" expr ")" | "Im(" expr ")" | "abs2(" expr ")" | "conj(" expr ")"
    var    := "z" uint | "zb" uint

Leading unary minus/plus is accepted on terms. Numbers are integers,
decimals with an optional exponent, or rationals p/q; all are exact.
"""
import re
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import List, NamedTuple, Tuple

from .errors import ParseError, VariableIndexError


class ExprOp(IntEnum):
    INVALID = 0
    NUMBER = 1
    IMAG_UNIT = 2
    VAR = 3
    ADD = 4
    SUB = 5
    MUL = 6
    POW = 7
    NEG = 8
    RE = 9
    IM = 10
    ABS2 = 11
    CONJ = 12


class Node:
    OP: ExprOp = ExprOp.INVALID
    position: int = 0


@dataclass(frozen=True)
class Number(Node):
    value: Fraction
    position: int = 0
    OP = ExprOp.NUMBER


@dataclass(frozen=True)
class ImagUnit(Node):
    position: int = 0
    OP = ExprOp.IMAG_UNIT


@dataclass(frozen=True)
class Var(Node):
    index: int
    barred: bool = False
    position: int = 0
    OP = ExprOp.VAR


@dataclass(frozen=True)
class BinOp(Node):
    left: Node
    right: Node
    position: int = 0


class Add(BinOp):
    OP = ExprOp.ADD


class Sub(BinOp):
    OP = ExprOp.SUB


class Mul(BinOp):
    OP = ExprOp.MUL


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: int
    position: int = 0
    OP = ExprOp.POW


@dataclass(frozen=True)
class Unary(Node):
    operand: Node
    position: int = 0


class Neg(Unary):
    OP = ExprOp.NEG


class RePart(Unary):
    OP = ExprOp.RE


class ImPart(Unary):
    OP = ExprOp.IM


class Abs2(Unary):
    OP = ExprOp.ABS2


class Conj(Unary):
    OP = ExprOp.CONJ


FUNCTIONS = {"Re": RePart, "Im": ImPart, "abs2": Abs2, "conj": Conj}


class Token(NamedTuple):
    kind: str
    text: str
    position: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?(?:/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)

_VAR_RE = re.compile(r"^(zb|z)(\d+)$")


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = match.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, match.group(), pos))
        pos = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


def parse_number(text: str, position: int = 0) -> Fraction:
    if "/" in text:
        num, den = text.split("/")
        if "." in num or "e" in num.lower():
            raise ParseError("rational numerator must be an integer", position)
        if int(den) == 0:
            raise ParseError("zero denominator", position)
        return Fraction(int(num), int(den))
    # Fraction parses decimal strings exactly
    return Fraction(text)


class Parser:
    def __init__(self, text: str, nvars: int) -> None:
        if nvars < 1:
            raise ValueError("nvars must be positive")
        self.text = text
        self.nvars = nvars
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.current
        if tok.text != text:
            found = tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", tok.position)
        return self.advance()

    def parse(self) -> Node:
        if self.current.kind == "end":
            raise ParseError("empty expression", 0)
        node = self.expr()
        if self.current.kind != "end":
            raise ParseError(f"unexpected token {self.current.text!r}", self.current.position)
        return node

    def expr(self) -> Node:
        node = self.signed_term()
        while self.current.text in ("+", "-"):
            tok = self.advance()
            right = self.term()
            node = (Add if tok.text == "+" else Sub)(node, right, tok.position)
        return node

    def signed_term(self) -> Node:
        tok = self.current
        if tok.text == "-":
            self.advance()
            return Neg(self.term(), tok.position)
        if tok.text == "+":
            self.advance()
        return self.term()

    def term(self) -> Node:
        node = self.factor()
        while self.current.text == "*":
            tok = self.advance()
            node = Mul(node, self.factor(), tok.position)
        return node

    def factor(self) -> Node:
        node = self.base()
        if self.current.text == "^":
            tok = self.advance()
            exp = self.current
            if exp.text == "-":
                raise ParseError("negative exponent", exp.position)
            if exp.kind != "number" or not exp.text.isdigit():
                raise ParseError("exponent must be an unsigned integer", exp.position)
            self.advance()
            node = Pow(node, int(exp.text), tok.position)
        return node

    def base(self) -> Node:
        tok = self.current
        if tok.kind == "number":
            self.advance()
            return Number(parse_number(tok.text, tok.position), tok.position)
        if tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "name":
            self.advance()
            if tok.text == "i":
                return ImagUnit(tok.position)
            if tok.text in FUNCTIONS:
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                return FUNCTIONS[tok.text](inner, tok.position)
            match = _VAR_RE.match(tok.text)
            if match:
                index = int(match.group(2))
                if not 1 <= index <= self.nvars:
                    raise VariableIndexError(
                        f"variable {tok.text} out of range 1..{self.nvars}", tok.position
                    )
                return Var(index, match.group(1) == "zb", tok.position)
            raise ParseError(f"unknown name {tok.text!r}", tok.position)
        found = tok.text or "end of input"
        raise ParseError(f"unexpected {found!r}", tok.position)


def parse(text: str, nvars: int) -> Node:
    return Parser(text, nvars).parse()


def parse_point(text: str) -> Tuple:
    """Parse "re,im;re,im;..." into a tuple of exact ComplexScalars."""
    from .cscalar import ComplexScalar

    coords = []
    offset = 0
    for chunk in text.split(";"):
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 're,im' pair, got {chunk.strip()!r}", offset)
        values = []
        for part in parts:
            part = part.strip()
            try:
                values.append(parse_number(part.lstrip("+-"), offset) * (-1 if part.startswith("-") else 1))
            except (ValueError, ZeroDivisionError) as e:
                if isinstance(e, ParseError):
                    raise
                raise ParseError(f"invalid number {part!r}", offset) from e
        coords.append(ComplexScalar(*values))
        offset += len(chunk) + 1
    return tuple(coords)

"""Parser for operator expressions.

Grammar::

    expr     := term (("+" | "-") term)*
    term     := factor ("*" factor)*
    factor   := "-" factor | atom ("^" ["-"] nat)?
    atom     := rational | "t" | "x" nat | "d" nat | "(" expr ")"
    rational := nat ("/" nat)?

Negative exponents are accepted only on subexpressions free of ``x`` and ``d``.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from tate_derham.algebra.scalars import LaurentScalar
from tate_derham.algebra.tate import TateElement
from tate_derham.algebra.weyl import WeylOperator
from tate_derham.errors import IndexOutOfRange, OperatorSyntaxError

TOKEN = re.compile(r"(?:(?P<nat>\d+)|(?P<var>[xd])(?P<index>\d+)|(?P<t>t)|(?P<op>[-+*/^()]))")


@dataclass(frozen=True)
class Literal:
    value: Fraction


@dataclass(frozen=True)
class Parameter:
    """The uniformizer ``t``."""


@dataclass(frozen=True)
class Variable:
    name: str
    index: int


@dataclass(frozen=True)
class Negate:
    operand: "Node"


@dataclass(frozen=True)
class BinaryOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: int


Node = Union[Literal, Parameter, Variable, Negate, BinaryOp, Power]


@dataclass(frozen=True)
class OperatorExpression:
    """A parsed expression together with its source and the declared number of variables."""

    source: str
    var_count: int
    root: Node


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    position: int


def tokenize(src: str) -> list[_Token]:
    tokens = []
    pos = 0
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos == len(src):
            break
        match = TOKEN.match(src, pos)
        if not match:
            raise OperatorSyntaxError(f"unexpected character {src[pos]!r}", pos)
        if match.group("nat"):
            tokens.append(_Token("nat", match.group("nat"), pos))
        elif match.group("var"):
            tokens.append(_Token(match.group("var"), match.group("index"), pos))
        elif match.group("t"):
            tokens.append(_Token("t", "t", pos))
        else:
            tokens.append(_Token(match.group("op"), match.group("op"), pos))
        pos = match.end()
    tokens.append(_Token("end", "", len(src)))
    return tokens


def is_scalar(node: Node) -> bool:
    """Whether a subexpression involves neither ``x`` nor ``d``."""
    if isinstance(node, Variable):
        return False
    if isinstance(node, Negate):
        return is_scalar(node.operand)
    if isinstance(node, BinaryOp):
        return is_scalar(node.left) and is_scalar(node.right)
    if isinstance(node, Power):
        return is_scalar(node.base)
    return True


class _Parser:
    def __init__(self, src: str, var_count: int):
        self.tokens = tokenize(src)
        self.var_count = var_count
        self.i = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.i]

    def take(self, kind: str) -> _Token:
        token = self.current
        if token.kind != kind:
            found = "end of input" if token.kind == "end" else repr(token.text)
            raise OperatorSyntaxError(f"expected {kind!r}, found {found}", token.position)
        self.i += 1
        return token

    def parse(self) -> Node:
        node = self.expr()
        self.take("end")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.current.kind in ("+", "-"):
            op = self.take(self.current.kind).kind
            node = BinaryOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.current.kind == "*":
            self.take("*")
            node = BinaryOp("*", node, self.factor())
        return node

    def factor(self) -> Node:
        if self.current.kind == "-":
            self.take("-")
            return Negate(self.factor())
        node = self.atom()
        if self.current.kind == "^":
            caret = self.take("^")
            negative = self.current.kind == "-"
            if negative:
                self.take("-")
            exponent = int(self.take("nat").text)
            if negative and exponent and not is_scalar(node):
                raise OperatorSyntaxError("negative exponent on a non-scalar", caret.position)
            node = Power(node, -exponent if negative else exponent)
        return node

    def atom(self) -> Node:
        token = self.current
        if token.kind == "nat":
            self.take("nat")
            value = Fraction(int(token.text))
            if self.current.kind == "/":
                self.take("/")
                denominator = self.take("nat")
                if int(denominator.text) == 0:
                    raise OperatorSyntaxError("zero denominator", denominator.position)
                value /= int(denominator.text)
            return Literal(value)
        if token.kind == "t":
            self.take("t")
            return Parameter()
        if token.kind in ("x", "d"):
            self.take(token.kind)
            index = int(token.text)
            if not 1 <= index <= self.var_count:
                raise IndexOutOfRange(
                    f"{token.kind}{index} at position {token.position} outside 1..{self.var_count}"
                )
            return Variable(token.kind, index)
        if token.kind == "(":
            self.take("(")
            node = self.expr()
            self.take(")")
            return node
        found = "end of input" if token.kind == "end" else repr(token.text)
        raise OperatorSyntaxError(f"unexpected {found}", token.position)


def parse_operator(src: str, var_count: int) -> OperatorExpression:
    """Parse ``src`` over ``var_count`` variables.

    Raises:
        OperatorSyntaxError: If ``src`` does not follow the grammar.
        IndexOutOfRange: If a variable index exceeds ``var_count``.
    """
    if var_count < 1:
        raise IndexOutOfRange(f"the number of variables must be positive, got {var_count}")
    return OperatorExpression(src, var_count, _Parser(src, var_count).parse())


def _evaluate(node: Node, n: int, precision: int) -> WeylOperator:
    if isinstance(node, Literal):
        if not node.value:
            return WeylOperator.zero(n)
        return WeylOperator.scalar(LaurentScalar.from_fraction(node.value, precision), n)
    if isinstance(node, Parameter):
        return WeylOperator.scalar(LaurentScalar.from_fraction(1, precision, shift=1), n)
    if isinstance(node, Variable):
        if node.name == "x":
            return WeylOperator.x(node.index, n, precision)
        return WeylOperator.d(node.index, n, precision)
    if isinstance(node, Negate):
        return -_evaluate(node.operand, n, precision)
    if isinstance(node, BinaryOp):
        left = _evaluate(node.left, n, precision)
        right = _evaluate(node.right, n, precision)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        return left * right
    base = _evaluate(node.base, n, precision)
    if node.exponent >= 0:
        return base**node.exponent
    return WeylOperator.scalar(base.scalar_value() ** node.exponent, n)


def evaluate(expression: OperatorExpression, precision: int) -> WeylOperator:
    """The normal form of ``expression`` with every literal at relative precision ``precision``.

    Raises:
        InexactZero: If a negative power of a vanishing scalar is requested.
    """
    return _evaluate(expression.root, expression.var_count, precision)


def parse_weyl(src: str, var_count: int, precision: int) -> WeylOperator:
    return evaluate(parse_operator(src, var_count), precision)


def parse_tate(src: str, var_count: int, precision: int) -> TateElement:
    """Parse an expression free of ``d`` as a Tate-algebra element.

    Raises:
        OperatorSyntaxError: If the expression has positive order.
    """
    p = parse_weyl(src, var_count, precision)
    if p.order > 0:
        raise OperatorSyntaxError("expected a function, found a differential operator", 0)
    return p.coefficient((0,) * var_count)

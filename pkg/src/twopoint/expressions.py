"""Parsing and evaluation of scalar expressions in the single variable ``x``.

An :class:`Expression` is an immutable tree built from numeric literals,
``x``, the named constants ``pi`` and ``e``, unary negation, the binary
operators ``+ - * / ^`` (``^`` binds tightest and is right-associative,
then unary minus, then ``* /``, then ``+ -``), and the one-argument
functions ``sin cos tan exp ln log10 atan sqrt cbrt abs``.

Evaluation is forward-mode automatic differentiation: every node carries a
(value, derivative) pair and the exact sum/product/quotient/chain rules
propagate both.  Leaving the real domain raises :class:`DomainError`
instead of producing NaN silently.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

__all__ = [
    "BinOp",
    "Call",
    "Constant",
    "DomainError",
    "Dual",
    "Expression",
    "FUNCTIONS",
    "Neg",
    "Number",
    "ParseError",
    "Variable",
    "eval_dual",
    "parse",
    "render",
]

FUNCTIONS = ("abs", "atan", "cbrt", "cos", "exp", "ln", "log10", "sin", "sqrt", "tan")

CONSTANTS = {"pi": math.pi, "e": math.e}

_LN10 = math.log(10.0)


class ParseError(ValueError):
    """Syntax or name error, with the character offset where it occurred."""

    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        self.position = position
        self.expected = expected
        detail = f"{message} at position {position}"
        if expected:
            detail += " (expected " + ", ".join(expected) + ")"
        super().__init__(detail)


class DomainError(ValueError):
    """Evaluation left the real domain at some node.

    Raised for ln/log10 of a non-positive value, sqrt of a negative value,
    a negative base raised to a non-integer power, division by zero, and
    any non-finite intermediate value.
    """

    def __init__(self, kind: str, arg: float):
        self.kind = kind
        self.arg = arg
        super().__init__(f"{kind} undefined for argument {arg!r}")


# --- syntax tree ------------------------------------------------------------


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Variable:
    pass


@dataclass(frozen=True)
class Constant:
    name: str  # "pi" or "e"


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Number | Variable | Constant | Neg | BinOp | Call


@dataclass(frozen=True)
class Expression:
    """Immutable parse tree of a real scalar function of ``x``."""

    root: Node

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Dual:
    """Value and derivative with respect to ``x`` at the evaluation point."""

    value: float
    deriv: float


# --- tokenizer --------------------------------------------------------------

_NUMBER_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class _Token:
    kind: str  # "number" | "ident" | "op" | "lparen" | "rparen" | "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c.isdigit() or c == ".":
            m = _NUMBER_RE.match(text, i)
            if m is None:
                raise ParseError("malformed number", i, ("digit",))
            tokens.append(_Token("number", m.group(), i))
            i = m.end()
        elif c.isalpha() or c == "_":
            m = _IDENT_RE.match(text, i)
            assert m is not None
            tokens.append(_Token("ident", m.group(), i))
            i = m.end()
        elif c in "+-*/^":
            tokens.append(_Token("op", c, i))
            i += 1
        elif c == "(":
            tokens.append(_Token("lparen", c, i))
            i += 1
        elif c == ")":
            tokens.append(_Token("rparen", c, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


# --- recursive-descent parser ----------------------------------------------

_ATOM_EXPECTED = ("number", "'x'", "'pi'", "'e'", "function name", "'('")


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def sum(self) -> Node:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek().kind == "op" and self.peek().text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.advance()
            # right-associative; the exponent may carry a unary minus
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ParseError("number literal out of range", tok.pos)
            return Number(value)
        if tok.kind == "lparen":
            self.advance()
            node = self.sum()
            closing = self.peek()
            if closing.kind != "rparen":
                raise ParseError("unbalanced parenthesis", closing.pos, ("')'",))
            self.advance()
            return node
        if tok.kind == "ident":
            self.advance()
            name = tok.text
            if name == "x":
                return Variable()
            if name in CONSTANTS:
                return Constant(name)
            if name in FUNCTIONS:
                opening = self.peek()
                if opening.kind != "lparen":
                    raise ParseError(f"function {name!r} needs an argument list", opening.pos, ("'('",))
                self.advance()
                arg = self.sum()
                closing = self.peek()
                if closing.kind != "rparen":
                    raise ParseError("unbalanced parenthesis", closing.pos, ("')'",))
                self.advance()
                return Call(name, arg)
            raise ParseError(f"unknown identifier {name!r}", tok.pos)
        raise ParseError(f"unexpected {tok.text!r}" if tok.text else "unexpected end of input", tok.pos, _ATOM_EXPECTED)


def parse(text: str) -> Expression:
    """Parse expression text into the unique tree given by the grammar."""
    parser = _Parser(_tokenize(text))
    node = parser.sum()
    trailing = parser.peek()
    if trailing.kind != "end":
        raise ParseError(f"unexpected {trailing.text!r} after expression", trailing.pos)
    return Expression(node)


# --- rendering --------------------------------------------------------------

# Precedence levels used for minimal parenthesization.  4 = ^, 3 = unary
# minus, 2 = * /, 1 = + -, 5 = atoms.
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _num_text(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _node_prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    return 5


def _render(node: Node, required: int) -> str:
    prec = _node_prec(node)
    if isinstance(node, Number):
        text = _num_text(node.value)
    elif isinstance(node, Variable):
        text = "x"
    elif isinstance(node, Constant):
        text = node.name
    elif isinstance(node, Call):
        text = f"{node.func}({_render(node.arg, 1)})"
    elif isinstance(node, Neg):
        text = "-" + _render(node.operand, 3)
    else:
        if node.op == "^":
            # left operand must be an atom, right may chain (right-assoc)
            text = f"{_render(node.left, 5)}^{_render(node.right, 3)}"
        else:
            text = f"{_render(node.left, prec)} {node.op} {_render(node.right, prec + 1)}"
    if prec < required:
        return f"({text})"
    return text


def render(expr: Expression) -> str:
    """Canonical text form; ``parse(render(e))`` reproduces parser-built trees."""
    return _render(expr.root, 1)


# --- evaluation -------------------------------------------------------------


def _cbrt(v: float) -> float:
    """Real signed cube root, exact on perfect cubes."""
    if v == 0.0:
        return math.copysign(0.0, v)
    c = math.copysign(abs(v) ** (1.0 / 3.0), v)
    # one Newton polish tightens the last ulp without overflow
    return (2.0 * c + v / (c * c)) / 3.0


def _sign(v: float) -> float:
    if v > 0.0:
        return 1.0
    if v < 0.0:
        return -1.0
    return 0.0


def _zero_deriv_blowup(d: float) -> float:
    # derivative of sqrt/cbrt at an interior zero of the argument
    return 0.0 if d == 0.0 else math.copysign(math.inf, d)


def _pow(uv: float, ud: float, pv: float, pd: float) -> tuple[float, float]:
    if pd == 0.0:
        # constant exponent: power rule
        if uv < 0.0 and pv != int(pv):
            raise DomainError("^", uv)
        try:
            value = uv**pv
        except (OverflowError, ZeroDivisionError):
            raise DomainError("^", uv) from None
        if ud == 0.0 or pv == 0.0:
            return value, 0.0
        try:
            scale = uv ** (pv - 1.0)
        except OverflowError:
            raise DomainError("^", uv) from None
        except ZeroDivisionError:
            # 0^p with 0 < p < 1: derivative blows up like sqrt at 0
            return value, math.copysign(math.inf, pv * ud)
        return value, pv * scale * ud
    # variable exponent: u^p = exp(p ln u), real only for u > 0
    if uv <= 0.0:
        raise DomainError("^", uv)
    try:
        value = uv**pv
    except OverflowError:
        raise DomainError("^", uv) from None
    return value, value * (pd * math.log(uv) + pv * ud / uv)


def _eval(node: Node, x: float) -> tuple[float, float]:
    if isinstance(node, Number):
        if not math.isfinite(node.value):
            raise DomainError("number", node.value)
        return node.value, 0.0
    if isinstance(node, Variable):
        return x, 1.0
    if isinstance(node, Constant):
        return CONSTANTS[node.name], 0.0
    if isinstance(node, Neg):
        v, d = _eval(node.operand, x)
        return -v, -d
    if isinstance(node, BinOp):
        lv, ld = _eval(node.left, x)
        rv, rd = _eval(node.right, x)
        op = node.op
        if op == "+":
            v, d = lv + rv, ld + rd
        elif op == "-":
            v, d = lv - rv, ld - rd
        elif op == "*":
            v, d = lv * rv, ld * rv + lv * rd
        elif op == "/":
            if rv == 0.0:
                raise DomainError("/", lv)
            v, d = lv / rv, (ld * rv - lv * rd) / (rv * rv)
        else:
            v, d = _pow(lv, ld, rv, rd)
        if not math.isfinite(v):
            raise DomainError(op, lv)
        if math.isnan(d):
            raise DomainError(op, lv)
        return v, d
    assert isinstance(node, Call)
    uv, ud = _eval(node.arg, x)
    f = node.func
    if f == "sin":
        v, d = math.sin(uv), math.cos(uv) * ud
    elif f == "cos":
        v, d = math.cos(uv), -math.sin(uv) * ud
    elif f == "tan":
        c = math.cos(uv)
        v, d = math.tan(uv), ud / (c * c)
    elif f == "exp":
        try:
            e = math.exp(uv)
        except OverflowError:
            raise DomainError("exp", uv) from None
        v, d = e, e * ud
    elif f == "ln":
        if uv <= 0.0:
            raise DomainError("ln", uv)
        v, d = math.log(uv), ud / uv
    elif f == "log10":
        if uv <= 0.0:
            raise DomainError("log10", uv)
        v, d = math.log10(uv), ud / (uv * _LN10)
    elif f == "atan":
        v, d = math.atan(uv), ud / (1.0 + uv * uv)
    elif f == "sqrt":
        if uv < 0.0:
            raise DomainError("sqrt", uv)
        s = math.sqrt(uv)
        v, d = s, _zero_deriv_blowup(ud) if uv == 0.0 else ud / (2.0 * s)
    elif f == "cbrt":
        c = _cbrt(uv)
        v, d = c, _zero_deriv_blowup(ud) if uv == 0.0 else ud / (3.0 * c * c)
    else:
        assert f == "abs"
        v, d = abs(uv), ud * _sign(uv)
    if not math.isfinite(v):
        raise DomainError(f, uv)
    if math.isnan(d):
        raise DomainError(f, uv)
    return v, d


def eval_dual(expr: Expression, x: float) -> Dual:
    """Evaluate value and derivative at ``x``.

    A non-finite derivative (e.g. cbrt at 0) is returned as-is when it is
    the final result; it raises :class:`DomainError` only when consumed by
    further arithmetic, where it would degrade into NaN.
    """
    if not math.isfinite(x):
        raise ValueError(f"evaluation point must be finite, got {x!r}")
    v, d = _eval(expr.root, x)
    return Dual(v, d)

"""Symbolic expression trees with exact Wirtinger differentiation.

Expressions are built from constants, indexed variables of three kinds
(holomorphic ``z``, antiholomorphic ``zb``, real parameter ``u``), the four
arithmetic operators, integer powers, and ``log``/``exp``.  ``z_k`` and
``zb_k`` are formally independent variables; the coupling ``zb_k = conj(z_k)``
is imposed only when an evaluation assignment is built.  All nodes are
immutable and every function here is pure, so trees can be shared and
evaluated concurrently without synchronization.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Union

Z = "z"
ZB = "zb"
U = "u"
VAR_KINDS = (Z, ZB, U)


class ExprError(Exception):
    """Base class for expression-level failures."""


class ParseError(ExprError):
    """Syntax or variable-validation failure, with source position."""

    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        self.position = position
        self.expected = expected
        hint = f" (expected {' or '.join(expected)})" if expected else ""
        super().__init__(f"{message} at offset {position}{hint}")


class EvaluationDomainError(ExprError):
    """log(0), division by zero, or 0 raised to a negative power."""

    def __init__(self, message: str, node: "Expr"):
        self.node = node
        super().__init__(f"{message} in subexpression '{unparse(node)}'")


@dataclass(frozen=True)
class Const:
    value: complex


@dataclass(frozen=True)
class Var:
    kind: str
    index: int  # 1-based


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" | "log" | "exp"
    arg: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # "+" | "-" | "*" | "/"
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Power:
    base: "Expr"
    exponent: int


Expr = Union[Const, Var, Unary, Binary, Power]

Assignment = Mapping[Var, complex]


def const(value: complex) -> Const:
    return Const(complex(value))


def var(kind: str, index: int) -> Var:
    if kind not in VAR_KINDS:
        raise ValueError(f"unknown variable kind {kind!r}")
    if index < 1:
        raise ValueError(f"variable index must be >= 1, got {index}")
    return Var(kind, index)


def z(index: int) -> Var:
    return var(Z, index)


def zb(index: int) -> Var:
    return var(ZB, index)


def u(index: int) -> Var:
    return var(U, index)


_ZERO = Const(0j)
_ONE = Const(1 + 0j)


def _is_const(e: Expr, value: complex | None = None) -> bool:
    if not isinstance(e, Const):
        return False
    return value is None or e.value == value


def has_domain_risk(e: Expr) -> bool:
    """True if evaluating ``e`` can raise a domain error for some assignment."""
    if isinstance(e, (Const, Var)):
        return False
    if isinstance(e, Unary):
        return e.op == "log" or has_domain_risk(e.arg)
    if isinstance(e, Binary):
        return e.op == "/" or has_domain_risk(e.left) or has_domain_risk(e.right)
    return e.exponent < 0 or has_domain_risk(e.base)


def _provably_nonzero(e: Expr) -> bool:
    # Conservative syntactic test; used to justify folding 0/x -> 0.
    if isinstance(e, Const):
        return e.value != 0
    if isinstance(e, Unary):
        if e.op == "exp":
            return True
        if e.op == "neg":
            return _provably_nonzero(e.arg)
        return False
    if isinstance(e, Binary) and e.op == "*":
        return _provably_nonzero(e.left) and _provably_nonzero(e.right)
    if isinstance(e, Power):
        return _provably_nonzero(e.base)
    return False


def add(l: Expr, r: Expr) -> Expr:
    if isinstance(l, Const) and isinstance(r, Const):
        return Const(l.value + r.value)
    if _is_const(l, 0):
        return r
    if _is_const(r, 0):
        return l
    return Binary("+", l, r)


def sub(l: Expr, r: Expr) -> Expr:
    if isinstance(l, Const) and isinstance(r, Const):
        return Const(l.value - r.value)
    if _is_const(r, 0):
        return l
    if _is_const(l, 0):
        return neg(r)
    return Binary("-", l, r)


def mul(l: Expr, r: Expr) -> Expr:
    if isinstance(l, Const) and isinstance(r, Const):
        return Const(l.value * r.value)
    if _is_const(l, 0) and not has_domain_risk(r):
        return _ZERO
    if _is_const(r, 0) and not has_domain_risk(l):
        return _ZERO
    if _is_const(l, 1):
        return r
    if _is_const(r, 1):
        return l
    return Binary("*", l, r)


def div(l: Expr, r: Expr) -> Expr:
    if isinstance(l, Const) and isinstance(r, Const) and r.value != 0:
        return Const(l.value / r.value)
    if _is_const(r, 1):
        return l
    if _is_const(l, 0) and _provably_nonzero(r):
        return _ZERO
    return Binary("/", l, r)


def neg(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(-e.value)
    if isinstance(e, Unary) and e.op == "neg":
        return e.arg
    return Unary("neg", e)


def log(e: Expr) -> Expr:
    if isinstance(e, Const) and e.value != 0:
        return Const(cmath.log(e.value))
    return Unary("log", e)


def exp(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(cmath.exp(e.value))
    return Unary("exp", e)


def power(base: Expr, exponent: int) -> Expr:
    exponent = int(exponent)
    if isinstance(base, Const) and not (base.value == 0 and exponent < 0):
        return Const(base.value**exponent)
    if exponent == 1:
        return base
    if exponent == 0 and not has_domain_risk(base):
        return _ONE
    return Power(base, exponent)


def wirtinger_derivative(e: Expr, v: Var) -> Expr:
    """Exact symbolic derivative of ``e`` with respect to the variable ``v``.

    Variables of other kinds or indices (in particular ``zb_k`` under
    ``d/dz_k`` and conversely) are held constant.
    """
    if isinstance(e, Const):
        return _ZERO
    if isinstance(e, Var):
        return _ONE if e == v else _ZERO
    if isinstance(e, Unary):
        d = wirtinger_derivative(e.arg, v)
        if e.op == "neg":
            return neg(d)
        if e.op == "log":
            return div(d, e.arg)
        return mul(e, d)  # exp
    if isinstance(e, Binary):
        dl = wirtinger_derivative(e.left, v)
        dr = wirtinger_derivative(e.right, v)
        if e.op == "+":
            return add(dl, dr)
        if e.op == "-":
            return sub(dl, dr)
        if e.op == "*":
            return add(mul(dl, e.right), mul(e.left, dr))
        # quotient rule
        num = sub(mul(dl, e.right), mul(e.left, dr))
        return div(num, power(e.right, 2))
    db = wirtinger_derivative(e.base, v)
    return mul(mul(Const(complex(e.exponent)), power(e.base, e.exponent - 1)), db)


def evaluate(e: Expr, assignment: Assignment) -> complex:
    """Evaluate ``e`` in double-precision complex arithmetic.

    ``assignment`` maps every variable occurring in ``e`` to a complex value.
    Raises ``EvaluationDomainError`` for log(0), division by zero, and zero
    raised to a negative power (log uses the principal branch).
    """
    if isinstance(e, Const):
        return complex(e.value)
    if isinstance(e, Var):
        try:
            return complex(assignment[e])
        except KeyError:
            raise ValueError(f"no value assigned to '{unparse(e)}'") from None
    if isinstance(e, Unary):
        a = evaluate(e.arg, assignment)
        if e.op == "neg":
            return -a
        if e.op == "exp":
            return cmath.exp(a)
        if a == 0:
            raise EvaluationDomainError("log of zero", e)
        return cmath.log(a)
    if isinstance(e, Binary):
        l = evaluate(e.left, assignment)
        r = evaluate(e.right, assignment)
        if e.op == "+":
            return l + r
        if e.op == "-":
            return l - r
        if e.op == "*":
            return l * r
        if r == 0:
            raise EvaluationDomainError("division by zero", e)
        return l / r
    b = evaluate(e.base, assignment)
    if b == 0 and e.exponent < 0:
        raise EvaluationDomainError("zero raised to a negative power", e)
    return b**e.exponent


def compile_evaluator(e: Expr) -> Callable[[Assignment], complex]:
    """Compile ``e`` to a closure ``assignment -> complex``.

    Semantically equivalent to ``evaluate`` on valid inputs, a few times
    faster; domain failures surface as the underlying ValueError /
    ZeroDivisionError instead of EvaluationDomainError.
    """
    if isinstance(e, Const):
        v = complex(e.value)
        return lambda a: v
    if isinstance(e, Var):
        return lambda a: a[e]
    if isinstance(e, Unary):
        f = compile_evaluator(e.arg)
        if e.op == "neg":
            return lambda a: -f(a)
        if e.op == "exp":
            return lambda a: cmath.exp(f(a))
        return lambda a: cmath.log(f(a))
    if isinstance(e, Binary):
        fl = compile_evaluator(e.left)
        fr = compile_evaluator(e.right)
        if e.op == "+":
            return lambda a: fl(a) + fr(a)
        if e.op == "-":
            return lambda a: fl(a) - fr(a)
        if e.op == "*":
            return lambda a: fl(a) * fr(a)
        return lambda a: fl(a) / fr(a)
    fb = compile_evaluator(e.base)
    n = e.exponent
    return lambda a: fb(a) ** n


def constant_fold(e: Expr) -> Expr:
    """Collapse constant subtrees and 0/1 identities.

    The result is evaluation-equivalent to ``e``; subtrees whose evaluation
    could raise a domain error are never folded away, so folding cannot turn
    a domain error into a success.
    """
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Unary):
        a = constant_fold(e.arg)
        if e.op == "neg":
            return neg(a)
        if e.op == "log":
            return log(a)
        return exp(a)
    if isinstance(e, Binary):
        l = constant_fold(e.left)
        r = constant_fold(e.right)
        return {"+": add, "-": sub, "*": mul, "/": div}[e.op](l, r)
    return power(constant_fold(e.base), e.exponent)


def variables(e: Expr) -> frozenset[Var]:
    out: set[Var] = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.add(node)
        elif isinstance(node, Unary):
            stack.append(node.arg)
        elif isinstance(node, Binary):
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, Power):
            stack.append(node.base)
    return frozenset(out)


def node_count(e: Expr) -> int:
    if isinstance(e, (Const, Var)):
        return 1
    if isinstance(e, Unary):
        return 1 + node_count(e.arg)
    if isinstance(e, Binary):
        return 1 + node_count(e.left) + node_count(e.right)
    return 1 + node_count(e.base)


def validate_variables(e: Expr, dimension: int, allowed_kinds: Iterable[str]) -> None:
    """Check every variable of ``e`` against a dimension and kind whitelist."""
    allowed = frozenset(allowed_kinds)
    for v in variables(e):
        if v.kind not in allowed:
            raise ValueError(f"variable kind '{v.kind}' not allowed here")
        if not 1 <= v.index <= dimension:
            raise ValueError(
                f"variable index out of range: '{unparse(v)}' with dimension {dimension}"
            )


# --------------------------------------------------------------------------
# Parsing.  Grammar:
#   expr   := term (('+'|'-') term)*
#   term   := factor (('*'|'/') factor)*
#   factor := ('-')? atom ('^' integer)?
#   atom   := number | var | func '(' expr ')' | '(' expr ')'
#   func   := 'log' | 'exp'
#   var    := 'z' index | 'zb' index | 'u' index ;  index := [1-9][0-9]*
# Numbers are decimal literals; a trailing 'i' (or a bare 'i') makes an
# imaginary constant, so immersion components can carry complex constants.
# --------------------------------------------------------------------------

_NUMBER_RE = re.compile(r"(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?i?")
_NAME_RE = re.compile(r"[A-Za-z]+[0-9]*")
_VAR_RE = re.compile(r"(zb|z|u)([0-9]+)$")
_OPS = "+-*/^()"


@dataclass(frozen=True)
class _Token:
    kind: str  # "number" | "name" | one of _OPS | "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch in _OPS:
            tokens.append(_Token(ch, ch, pos))
            pos += 1
            continue
        m = _NUMBER_RE.match(text, pos)
        if m:
            tokens.append(_Token("number", m.group(0), pos))
            pos = m.end()
            continue
        m = _NAME_RE.match(text, pos)
        if m:
            tokens.append(_Token("name", m.group(0), pos))
            pos = m.end()
            continue
        raise ParseError(f"unexpected character {ch!r}", pos)
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], dimension: int, allowed_kinds: frozenset[str]):
        self.tokens = tokens
        self.i = 0
        self.dimension = dimension
        self.allowed = allowed_kinds

    @property
    def cur(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.cur
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        if self.cur.kind != kind:
            raise ParseError(
                f"unexpected {self.cur.kind} {self.cur.text!r}", self.cur.pos, (kind,)
            )
        return self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        if self.cur.kind != "end":
            raise ParseError(
                f"unexpected trailing input {self.cur.text!r}", self.cur.pos
            )
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.cur.kind in "+-":
            op = self.advance().kind
            e = Binary(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.cur.kind in "*/":
            op = self.advance().kind
            e = Binary(op, e, self.factor())
        return e

    def factor(self) -> Expr:
        negate = False
        if self.cur.kind == "-":
            self.advance()
            negate = True
        e = self.atom()
        if self.cur.kind == "^":
            self.advance()
            e = Power(e, self.integer())
        return Unary("neg", e) if negate else e

    def integer(self) -> int:
        sign = 1
        if self.cur.kind == "-":
            self.advance()
            sign = -1
        tok = self.cur
        if tok.kind != "number" or not tok.text.isdigit():
            raise ParseError("exponent must be an integer", tok.pos, ("integer",))
        self.advance()
        return sign * int(tok.text)

    def atom(self) -> Expr:
        tok = self.cur
        if tok.kind == "number":
            self.advance()
            if tok.text.endswith("i"):
                return Const(complex(0.0, float(tok.text[:-1])))
            return Const(complex(float(tok.text)))
        if tok.kind == "name":
            return self.name_atom()
        if tok.kind == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(
            f"unexpected {tok.kind} {tok.text!r}" if tok.kind != "end" else "unexpected end of input",
            tok.pos,
            ("number", "variable", "function", "'('"),
        )

    def name_atom(self) -> Expr:
        tok = self.advance()
        name = tok.text
        if name in ("log", "exp"):
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Unary(name, arg)
        if name == "i":
            return Const(1j)
        m = _VAR_RE.match(name)
        if m:
            kind, idx_text = m.group(1), m.group(2)
            if idx_text.startswith("0"):
                raise ParseError(f"invalid variable index in {name!r}", tok.pos)
            index = int(idx_text)
            if kind not in self.allowed:
                raise ParseError(f"variable kind '{kind}' not allowed here", tok.pos)
            if index > self.dimension:
                raise ParseError(
                    f"variable index out of range: {name!r} with dimension {self.dimension}",
                    tok.pos,
                )
            return Var(kind, index)
        raise ParseError(f"unknown identifier {name!r}", tok.pos)


def parse_expression(
    text: str,
    dimension: int,
    allowed_kinds: Iterable[str] = VAR_KINDS,
) -> Expr:
    """Parse ``text`` into an expression tree.

    ``dimension`` bounds variable indices; ``allowed_kinds`` whitelists the
    variable kinds that may appear (e.g. ``{"z", "zb"}`` for potentials,
    ``{"u"}`` for immersion components).
    """
    if not text.strip():
        raise ParseError("empty expression", 0)
    return _Parser(_tokenize(text), dimension, frozenset(allowed_kinds)).parse()


_LEVEL_ADD, _LEVEL_MUL, _LEVEL_NEG, _LEVEL_POW, _LEVEL_ATOM = 1, 2, 3, 4, 5


def _format_const(v: complex) -> tuple[str, int]:
    if v.imag == 0:
        text = repr(v.real)
        return text, (_LEVEL_NEG if v.real < 0 else _LEVEL_ATOM)
    if v.real == 0:
        text = repr(v.imag) + "i"
        return text, (_LEVEL_NEG if v.imag < 0 else _LEVEL_ATOM)
    return f"({v.real!r} + {v.imag!r}i)" if v.imag >= 0 else f"({v.real!r} - {abs(v.imag)!r}i)", _LEVEL_ATOM


def _unparse(e: Expr) -> tuple[str, int]:
    if isinstance(e, Const):
        return _format_const(complex(e.value))
    if isinstance(e, Var):
        return f"{e.kind}{e.index}", _LEVEL_ATOM
    if isinstance(e, Unary):
        if e.op == "neg":
            text, level = _unparse(e.arg)
            if level < _LEVEL_POW:
                text = f"({text})"
            return f"-{text}", _LEVEL_NEG
        inner, _ = _unparse(e.arg)
        return f"{e.op}({inner})", _LEVEL_ATOM
    if isinstance(e, Binary):
        if e.op in "+-":
            own, sub_right = _LEVEL_ADD, _LEVEL_MUL if e.op == "-" else _LEVEL_ADD
        else:
            own, sub_right = _LEVEL_MUL, _LEVEL_NEG if e.op == "/" else _LEVEL_MUL
        lt, ll = _unparse(e.left)
        rt, rl = _unparse(e.right)
        if ll < own:
            lt = f"({lt})"
        if rl < sub_right or (e.op in "*/" and rl == _LEVEL_ADD):
            rt = f"({rt})"
        return f"{lt} {e.op} {rt}", own
    bt, bl = _unparse(e.base)
    if bl < _LEVEL_ATOM:
        bt = f"({bt})"
    return f"{bt}^{e.exponent}", _LEVEL_POW


def unparse(e: Expr) -> str:
    """Render ``e`` as text that re-parses to an evaluation-equivalent tree."""
    return _unparse(e)[0]

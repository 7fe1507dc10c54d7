"""Chart functions: a small expression language with exact/float evaluation
and second-order forward-mode jets.

Expressions are immutable trees.  Evaluating one at a point yields a
:class:`Jet` carrying the value, the gradient and the Hessian.  Exact mode
uses :class:`fractions.Fraction` throughout; float mode uses Python floats.
The two are never mixed: a mode is chosen once per evaluation.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Optional, Sequence, Tuple, Union

Scalar = Union[Fraction, float]
Point = Tuple[Scalar, ...]

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)


class DomainError(ArithmeticError):
    """A node was evaluated outside its domain (division by zero, log of a
    non-positive number, non-finite float result)."""

    def __init__(self, message: str, node: "Expression | None" = None):
        super().__init__(message)
        self.node = node


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte offset {offset}")
        self.offset = offset


# ---------------------------------------------------------------------------
# jets


class Jet:
    """Truncated Taylor data of a scalar function at a point.

    ``grad`` and ``hess`` are ``None`` when identically zero.  ``order`` says
    how many derivative levels are actually known: derivatives of a jet lose
    one level, so ``partial`` of an order-2 jet is an order-1 jet.
    """

    __slots__ = ("value", "grad", "hess", "order", "n")

    def __init__(self, value, grad=None, hess=None, order: int = 2, n: int = 0):
        self.value = value
        self.grad = grad
        self.hess = hess if order >= 2 else None
        self.order = order
        self.n = n

    @classmethod
    def constant(cls, value, n: int) -> "Jet":
        return cls(value, None, None, 2, n)

    @classmethod
    def variable(cls, value, index: int, n: int) -> "Jet":
        one = Fraction(1) if isinstance(value, Fraction) else 1.0
        zero = one - one
        grad = tuple(one if k == index else zero for k in range(n))
        return cls(value, grad, None, 2, n)

    # dense views -----------------------------------------------------------
    def gradient(self) -> tuple:
        if self.order < 1:
            raise ValueError("jet carries no first derivatives")
        if self.grad is None:
            return (self.value * 0,) * self.n
        return self.grad

    def hessian(self) -> tuple:
        if self.order < 2:
            raise ValueError("jet carries no second derivatives")
        z = self.value * 0
        if self.hess is None:
            return tuple((z,) * self.n for _ in range(self.n))
        return self.hess

    def partial(self, k: int) -> "Jet":
        """Jet of the k-th partial derivative (0-based), one order lower."""
        if self.order < 1:
            raise ValueError("jet carries no first derivatives")
        z = self.value * 0
        value = z if self.grad is None else self.grad[k]
        if self.order >= 2 and self.hess is not None:
            grad = self.hess[k]
        else:
            grad = None
        return Jet(value, grad, None, self.order - 1, self.n)

    # arithmetic ------------------------------------------------------------
    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.n)

    def __add__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.value + other, self.grad, self.hess, self.order, self.n)
        order = min(self.order, other.order)
        return Jet(
            self.value + other.value,
            _vadd(self.grad, other.grad),
            _madd(self.hess, other.hess) if order >= 2 else None,
            order,
            self.n,
        )

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.value, _vscale(self.grad, -1), _mscale(self.hess, -1), self.order, self.n)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.value * other, _vscale(self.grad, other), _mscale(self.hess, other), self.order, self.n)
        a, b = self, other
        order = min(a.order, b.order)
        grad = _vadd(_vscale(b.grad, a.value), _vscale(a.grad, b.value))
        hess = None
        if order >= 2:
            hess = _madd(_mscale(b.hess, a.value), _mscale(a.hess, b.value))
            if a.grad is not None and b.grad is not None:
                n = a.n
                cross = tuple(
                    tuple(a.grad[k] * b.grad[l] + a.grad[l] * b.grad[k] for l in range(n))
                    for k in range(n)
                )
                hess = _madd(hess, cross)
        return Jet(a.value * b.value, grad, hess, order, a.n)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            if other == 0:
                raise DomainError("division by zero")
            return self * (1 / other if isinstance(other, float) else Fraction(1) / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def reciprocal(self) -> "Jet":
        u = self.value
        if u == 0:
            raise DomainError("division by zero")
        one = u ** 0
        inv = one / u
        return self._compose(inv, -inv * inv, 2 * inv * inv * inv)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        if k == 0:
            return Jet.constant(self.value ** 0, self.n)
        u = self.value
        if k < 0 and u == 0:
            raise DomainError("negative power of zero")
        if k == 1:
            return self
        return self._compose(u ** k, k * u ** (k - 1), k * (k - 1) * u ** (k - 2))

    def _compose(self, f0, f1, f2) -> "Jet":
        """Chain rule for a univariate function with derivatives f0, f1, f2."""
        grad = _vscale(self.grad, f1)
        hess = None
        if self.order >= 2:
            hess = _mscale(self.hess, f1)
            if self.grad is not None:
                g = self.grad
                hess = _madd(hess, tuple(tuple(f2 * gk * gl for gl in g) for gk in g))
        return Jet(f0, grad, hess, self.order, self.n)

    def __repr__(self):
        return f"Jet(value={self.value!r}, grad={self.grad!r}, hess={self.hess!r}, order={self.order})"


def _vadd(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return tuple(x + y for x, y in zip(a, b))


def _vscale(a, s):
    if a is None:
        return None
    return tuple(x * s for x in a)


def _madd(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def _mscale(a, s):
    if a is None:
        return None
    return tuple(tuple(x * s for x in row) for row in a)


def jet_sin(u: Jet) -> Jet:
    s, c = math.sin(u.value), math.cos(u.value)
    return u._compose(s, c, -s)


def jet_cos(u: Jet) -> Jet:
    s, c = math.sin(u.value), math.cos(u.value)
    return u._compose(c, -s, -c)


def jet_exp(u: Jet) -> Jet:
    try:
        e = math.exp(u.value)
    except OverflowError:
        raise DomainError("exp overflow") from None
    return u._compose(e, e, e)


def jet_log(u: Jet) -> Jet:
    x = u.value
    if x <= 0:
        raise DomainError("log of a non-positive value")
    return u._compose(math.log(x), 1.0 / x, -1.0 / (x * x))


# ---------------------------------------------------------------------------
# expressions

Number = Union[int, Fraction, float]


def _as_expr(x) -> "Expression":
    if isinstance(x, Expression):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not expressions")
    if isinstance(x, (int, Rational)):
        return Const(Fraction(x))
    if isinstance(x, float):
        return Const(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an expression")


class Expression:
    """Base of the expression tree.  Subclasses are frozen dataclasses."""

    # tree construction with light constant folding -------------------------
    def __add__(self, other):
        if isinstance(other, Derived):
            return NotImplemented
        other = _as_expr(other)
        if _is_zero_const(other):
            return self
        if _is_zero_const(self):
            return other
        if isinstance(self, Const) and isinstance(other, Const) and _same_kind(self, other):
            return Const(self.value + other.value)
        return BinOp("+", self, other)

    def __radd__(self, other):
        if isinstance(other, Derived):
            return NotImplemented
        return _as_expr(other) + self

    def __sub__(self, other):
        if isinstance(other, Derived):
            return NotImplemented
        other = _as_expr(other)
        if _is_zero_const(other):
            return self
        if isinstance(self, Const) and isinstance(other, Const) and _same_kind(self, other):
            return Const(self.value - other.value)
        return BinOp("-", self, other)

    def __rsub__(self, other):
        if isinstance(other, Derived):
            return NotImplemented
        return _as_expr(other) - self

    def __mul__(self, other):
        if isinstance(other, Derived):
            return NotImplemented
        other = _as_expr(other)
        if _is_one_const(other):
            return self
        if _is_one_const(self):
            return other
        if isinstance(self, Const) and isinstance(other, Const) and _same_kind(self, other):
            return Const(self.value * other.value)
        return BinOp("*", self, other)

    def __rmul__(self, other):
        if isinstance(other, Derived):
            return NotImplemented
        return _as_expr(other) * self

    def __truediv__(self, other):
        if isinstance(other, Derived):
            return NotImplemented
        other = _as_expr(other)
        if _is_one_const(other):
            return self
        if (
            isinstance(self, Const)
            and isinstance(other, Const)
            and _same_kind(self, other)
            and other.value != 0
        ):
            return Const(self.value / other.value)
        return BinOp("/", self, other)

    def __rtruediv__(self, other):
        if isinstance(other, Derived):
            return NotImplemented
        return _as_expr(other) / self

    def __neg__(self):
        if isinstance(self, Const):
            return Const(-self.value)
        return Neg(self)

    def __pow__(self, k: int):
        return Pow(self, k)

    # queries ---------------------------------------------------------------
    def children(self) -> tuple:
        return ()

    def walk(self):
        yield self
        for c in self.children():
            yield from c.walk()

    @property
    def is_rational(self) -> bool:
        """True when the tree contains only rational constants and the
        operations + - * / ^ (exact evaluation is possible)."""
        for node in self.walk():
            if isinstance(node, Func):
                return False
            if isinstance(node, Const) and isinstance(node.value, float):
                return False
        return True

    @property
    def is_constant(self) -> bool:
        return not any(isinstance(node, Var) for node in self.walk())

    def max_index(self) -> int:
        return max((node.index for node in self.walk() if isinstance(node, Var)), default=0)

    def jet(self, p: Sequence, mode: Optional[str] = None) -> Jet:
        return eval_jet2(self, p, mode)

    def __str__(self):
        return to_source(self)


@dataclass(frozen=True, eq=True, repr=True)
class Const(Expression):
    value: Scalar

    def __post_init__(self):
        if isinstance(self.value, float) and not math.isfinite(self.value):
            raise ValueError("constants must be finite")


@dataclass(frozen=True, eq=True, repr=True)
class Var(Expression):
    index: int  # 1-based coordinate index


@dataclass(frozen=True, eq=True, repr=True)
class BinOp(Expression):
    op: str
    left: Expression
    right: Expression

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=True, repr=True)
class Neg(Expression):
    arg: Expression

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=True, repr=True)
class Pow(Expression):
    base: Expression
    exponent: int

    def children(self):
        return (self.base,)


@dataclass(frozen=True, eq=True, repr=True)
class Func(Expression):
    name: str
    arg: Expression

    def children(self):
        return (self.arg,)


FUNCS = ("sin", "cos", "exp", "log")

# dataclass(eq=True) installs __eq__ and drops __hash__ unless frozen; frozen
# keeps both.  Operators come from Expression.


def _is_zero_const(e):
    return isinstance(e, Const) and e.value == 0 and isinstance(e.value, Fraction)


def _is_one_const(e):
    return isinstance(e, Const) and e.value == 1 and isinstance(e.value, Fraction)


def _same_kind(a: Const, b: Const) -> bool:
    return isinstance(a.value, float) == isinstance(b.value, float)


def const(x) -> Expression:
    return _as_expr(x)


def var(i: int) -> Expression:
    return Var(i)


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


# ---------------------------------------------------------------------------
# evaluation


def is_rational_point(p: Sequence) -> bool:
    return all(isinstance(x, (int, Fraction)) and not isinstance(x, bool) for x in p)


def resolve_mode(exprs, p: Sequence, mode: Optional[str]) -> str:
    if mode is None:
        if is_rational_point(p) and all(e.is_rational for e in exprs):
            return EXACT
        return FLOAT
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    return mode


def coerce_point(p: Sequence, mode: str) -> Point:
    if mode == EXACT:
        if not is_rational_point(p):
            raise ValueError("exact mode needs a rational point")
        return tuple(Fraction(x) for x in p)
    return tuple(float(x) for x in p)


def eval_jet2(e: Expression, p: Sequence, mode: Optional[str] = None) -> Jet:
    """Value, gradient and Hessian of ``e`` at ``p``.

    ``mode=None`` picks exact arithmetic when the tree is rational and every
    coordinate of ``p`` is an int or Fraction, float otherwise.
    """
    mode = resolve_mode((e,), p, mode)
    if mode == EXACT and not e.is_rational:
        raise ValueError("expression has float constants or transcendental nodes; use float mode")
    pt = coerce_point(p, mode)
    n = len(pt)
    if e.max_index() > n:
        raise ValueError(f"expression uses x{e.max_index()} but the point has {n} coordinates")
    return _eval(e, pt, n, mode)


def _eval(e: Expression, pt: Point, n: int, mode: str) -> Jet:
    if isinstance(e, Const):
        v = e.value
        if mode == FLOAT:
            return Jet.constant(float(v), n)
        if isinstance(v, float):
            raise ValueError("float constant in exact mode")
        return Jet.constant(v, n)
    if isinstance(e, Var):
        return Jet.variable(pt[e.index - 1], e.index - 1, n)
    if isinstance(e, Neg):
        return -_eval(e.arg, pt, n, mode)
    if isinstance(e, BinOp):
        a = _eval(e.left, pt, n, mode)
        b = _eval(e.right, pt, n, mode)
        if e.op == "+":
            r = a + b
        elif e.op == "-":
            r = a - b
        elif e.op == "*":
            r = a * b
        else:
            try:
                r = a / b
            except DomainError as exc:
                raise DomainError(str(exc), e) from None
        return _checked(r, e, mode)
    if isinstance(e, Pow):
        try:
            return _checked(_eval(e.base, pt, n, mode) ** e.exponent, e, mode)
        except DomainError as exc:
            raise DomainError(str(exc), e) from None
    if isinstance(e, Func):
        u = _eval(e.arg, pt, n, mode)
        if mode == EXACT:
            raise ValueError(f"{e.name} needs float mode")
        fn = {"sin": jet_sin, "cos": jet_cos, "exp": jet_exp, "log": jet_log}[e.name]
        try:
            return _checked(fn(u), e, mode)
        except DomainError as exc:
            raise DomainError(f"{exc} in {to_source(e)}", e) from None
    raise TypeError(f"unknown node {e!r}")


def _checked(j: Jet, node: Expression, mode: str) -> Jet:
    if mode == FLOAT and not math.isfinite(j.value):
        raise DomainError(f"non-finite value in {to_source(node)}", node)
    return j


class Derived:
    """A chart function known only pointwise through its jets, e.g. a
    coefficient whose formula involves derivatives of other fields.

    ``fn(point, mode)`` receives an already-coerced point.  Jets coming out
    of ``fn`` may be of order < 2 when derivatives were consumed.
    """

    def __init__(self, fn: Callable[[Point, str], Jet], label: str = "derived",
                 rational: bool = True, constant: bool = False):
        self._fn = fn
        self.label = label
        self.is_rational = rational
        self.is_constant = constant

    def jet(self, p: Sequence, mode: Optional[str] = None) -> Jet:
        mode = resolve_mode((self,), p, mode)
        return self._fn(coerce_point(p, mode), mode)

    def max_index(self) -> int:
        return 0

    def __repr__(self):
        return f"Derived({self.label})"

    # pointwise arithmetic with other fields and numbers
    def _combine(self, other, op, label):
        fields = [self] + ([other] if isinstance(other, (Expression, Derived)) else [])
        rational = all(f.is_rational for f in fields) and not isinstance(other, float)
        constant = all(f.is_constant for f in fields)

        def fn(pt, mode):
            a = self._fn(pt, mode)
            b = field_jet(other, pt, mode) if isinstance(other, (Expression, Derived)) else _num(other, mode)
            return op(a, b)

        return Derived(fn, label, rational, constant)

    def __add__(self, o):
        return self._combine(o, lambda a, b: a + b, f"({self.label}+.)")

    def __radd__(self, o):
        return self._combine(o, lambda a, b: b + a, f"(.+{self.label})")

    def __sub__(self, o):
        return self._combine(o, lambda a, b: a - b, f"({self.label}-.)")

    def __rsub__(self, o):
        return self._combine(o, lambda a, b: b - a, f"(.-{self.label})")

    def __mul__(self, o):
        return self._combine(o, lambda a, b: a * b, f"({self.label}*.)")

    def __rmul__(self, o):
        return self._combine(o, lambda a, b: b * a, f"(.*{self.label})")

    def __truediv__(self, o):
        return self._combine(o, lambda a, b: a / b, f"({self.label}/.)")

    def __neg__(self):
        return Derived(lambda pt, mode: -self._fn(pt, mode), f"-{self.label}", self.is_rational, self.is_constant)


def _num(x, mode):
    if mode == FLOAT:
        return float(x)
    if isinstance(x, float):
        raise ValueError("float constant in exact mode")
    return Fraction(x)


def field_jet(f, p: Sequence, mode: Optional[str] = None) -> Jet:
    """Jet of an Expression or Derived at an already-coerced point."""
    if isinstance(f, Expression):
        n = len(p)
        if f.max_index() > n:
            raise ValueError(f"expression uses x{f.max_index()} but the point has {n} coordinates")
        return _eval(f, tuple(p), n, mode)
    return f._fn(tuple(p), mode)


Field = Union[Expression, Derived]


def as_field(x) -> Field:
    if isinstance(x, Derived):
        return x
    return _as_expr(x)


# ---------------------------------------------------------------------------
# printing


def _format_const(v: Scalar) -> str:
    if isinstance(v, Fraction):
        if v.denominator == 1:
            s = str(v.numerator)
        else:
            s = f"{v.numerator}/{v.denominator}"
        return f"({s})" if v < 0 or v.denominator != 1 else s
    s = repr(float(v))
    if "e" in s and "." not in s.split("e")[0]:
        mant, ex = s.split("e")
        s = f"{mant}.0e{ex}"
    elif "." not in s and "e" not in s:
        s += ".0"
    return f"({s})" if v < 0 or s.startswith("-") else s


def to_source(e: Expression) -> str:
    """Print ``e`` in the input grammar; the result parses back to an
    identical tree."""
    if isinstance(e, Const):
        return _format_const(e.value)
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, BinOp):
        # spaces keep "2 / 3" from lexing as one rational literal
        return f"({to_source(e.left)} {e.op} {to_source(e.right)})"
    if isinstance(e, Neg):
        return f"(-({to_source(e.arg)}))"
    if isinstance(e, Pow):
        return f"({to_source(e.base)}^{e.exponent})"
    if isinstance(e, Func):
        return f"{e.name}({to_source(e.arg)})"
    raise TypeError(f"unknown node {e!r}")


# ---------------------------------------------------------------------------
# parsing
#
# expr   := term (('+'|'-') term)*
# term   := factor (('*'|'/') factor)*
# factor := '-' factor | base ('^' ['-'] integer)?
# base   := number | 'x' digit+ | '(' expr ')' | func '(' expr ')'
# number := integer ('/' positive-integer)? | decimal
#
# A unary minus directly in front of a number literal folds into the
# constant.  An integer immediately followed by '/integer' is one rational
# literal, so "x1/2/3" reads as x1 / (2/3).


class _Parser:
    def __init__(self, source: str, n: int):
        self.src = source
        self.n = n
        self.i = 0

    def offset(self, i=None) -> int:
        i = self.i if i is None else i
        return len(self.src[:i].encode("utf-8"))

    def error(self, msg, i=None):
        raise ParseError(msg, self.offset(i))

    def skip(self):
        while self.i < len(self.src) and self.src[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        self.skip()
        return self.src[self.i] if self.i < len(self.src) else ""

    def eat(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.i += 1

    def parse(self) -> Expression:
        if not self.src.strip():
            self.error("empty expression", 0)
        e = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return e

    def expr(self):
        e = self.term()
        while self.peek() in ("+", "-"):
            op = self.src[self.i]
            self.i += 1
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.factor()
        while self.peek() in ("*", "/"):
            op = self.src[self.i]
            self.i += 1
            e = BinOp(op, e, self.factor())
        return e

    def factor(self):
        if self.peek() == "-":
            self.i += 1
            self.skip()
            if self.i < len(self.src) and (self.src[self.i].isdigit() or self.src[self.i] == "."):
                b = self.number()
                if self.peek() == "^":
                    # -2^2 means -(2^2)
                    return Neg(self._power(b))
                return Const(-b.value)
            return Neg(self.factor())
        else:
            b = self.base()
        return self._power(b)

    def _power(self, b):
        if self.peek() == "^":
            self.i += 1
            sign = 1
            if self.peek() == "-":
                self.i += 1
                sign = -1
            self.skip()
            start = self.i
            while self.i < len(self.src) and self.src[self.i].isdigit():
                self.i += 1
            if start == self.i:
                self.error("expected integer exponent")
            b = Pow(b, sign * int(self.src[start:self.i]))
        return b

    def base(self):
        ch = self.peek()
        if ch == "(":
            self.i += 1
            e = self.expr()
            self.eat(")")
            return e
        if ch.isdigit() or ch == ".":
            return self.number()
        if ch == "x":
            start = self.i
            self.i += 1
            d0 = self.i
            while self.i < len(self.src) and self.src[self.i].isdigit():
                self.i += 1
            if d0 == self.i:
                self.error("expected coordinate index after 'x'", start)
            k = int(self.src[d0:self.i])
            if not 1 <= k <= self.n:
                self.error(f"coordinate x{k} out of range 1..{self.n}", start)
            return Var(k)
        for name in FUNCS:
            if self.src.startswith(name, self.i):
                self.i += len(name)
                self.eat("(")
                e = self.expr()
                self.eat(")")
                return Func(name, e)
        if not ch:
            self.error("unexpected end of input")
        self.error(f"unexpected {ch!r}")

    def _digits(self) -> str:
        start = self.i
        while self.i < len(self.src) and self.src[self.i].isdigit():
            self.i += 1
        return self.src[start:self.i]

    def number(self) -> Const:
        start = self.i
        whole = self._digits()
        s = self.src
        is_float = False
        if self.i < len(s) and s[self.i] == ".":
            self.i += 1
            self._digits()
            is_float = True
        if self.i < len(s) and s[self.i] in "eE":
            j = self.i + 1
            if j < len(s) and s[j] in "+-":
                j += 1
            if j < len(s) and s[j].isdigit():
                self.i = j
                self._digits()
                is_float = True
        text = s[start:self.i]
        if is_float:
            if text in (".",):
                self.error("malformed number", start)
            return Const(float(text))
        if not whole:
            self.error("malformed number", start)
        # rational literal: integer '/' positive-integer with no spaces
        if self.i + 1 < len(s) and s[self.i] == "/" and s[self.i + 1].isdigit():
            self.i += 1
            den = int(self._digits())
            if den == 0:
                self.error("zero denominator in rational literal", start)
            return Const(Fraction(int(whole), den))
        return Const(Fraction(int(whole)))


def parse_expression(source: str, n: int) -> Expression:
    """Parse ``source`` as a chart function of ``x1..xn``."""
    if n < 1:
        raise ValueError("dimension must be positive")
    return _Parser(source, n).parse()


# ---------------------------------------------------------------------------
# sample points


def sample_points(n: int, count: int, seed: int = 0) -> list:
    """Deterministic pseudorandom rational points in the open unit cube."""
    rng = random.Random(seed)
    pts = []
    for _ in range(count):
        pt = []
        for _ in range(n):
            q = rng.randint(2, 97)
            pt.append(Fraction(rng.randint(1, q - 1), q))
        pts.append(tuple(pt))
    return pts


def is_zero(x, tol: float = 0.0) -> bool:
    if isinstance(x, Fraction) or tol == 0.0:
        return x == 0
    return abs(x) <= tol


def fmt_scalar(x):
    """JSON-friendly scalar: exact values as 'p/q' strings, floats as numbers."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    return float(x)


def parse_scalar(x) -> Scalar:
    if isinstance(x, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        s = x.strip()
        if any(c in s for c in ".eE") and "/" not in s:
            return float(s)
        return Fraction(s)
    raise ValueError(f"not a scalar: {x!r}")

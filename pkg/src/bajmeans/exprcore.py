"""Single-variable real expressions: AST, parser, printer and evaluator.

Grammar (whitespace is ignored)::

    expr      := term (('+' | '-') term)*
    term      := factor (('*' | '/') factor)*
    factor    := '-' factor | base ('^' exponent)?
    exponent  := ['+' | '-'] number | '(' constant expr ')'
    base      := number | 'x' | ident '(' expr ')' | '(' expr ')'
               | piecewise | inv
    piecewise := 'piecewise(' guard ':' expr (';' guard ':' expr)* ')'
    guard     := 'x<c' | 'x<=c' | 'x>=c' | 'x>c'
    inv       := 'inv(' expr ',' bound ',' bound ',' expr ')'

``ident`` is one of ``exp``, ``ln``, ``sqrt``, ``abs``, ``atan``.

Piecewise guards are read left to right: every piece but the last carries an
upper guard (``x<c`` or ``x<=c``) with strictly increasing ``c``; the last
piece carries the complementary lower guard of the previous breakpoint.

``inv(G, lo, hi, u)`` is the generalized left inverse of the strictly
monotone expression ``G`` (in its own variable ``x``) on ``(lo, hi)``,
evaluated at ``u``.  Bounds may be ``inf``/``-inf``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

CLAMP = 1e8
EDGE_REL = 1e-9

UNARY_OPS = ("neg", "exp", "ln", "sqrt", "abs", "atan")
FUNCTIONS = ("exp", "ln", "sqrt", "abs", "atan")


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte offset {offset}")
        self.offset = offset


class UnknownIdentifier(ExprSyntaxError):
    pass


class DomainError(ExprError):
    """Evaluation left the domain of an elementary operation."""


class BreakpointError(DomainError):
    """A jet was requested at a piecewise breakpoint."""


# --------------------------------------------------------------------------
# AST


class Expr:
    """Base class of expression nodes.  Nodes are immutable."""

    __slots__ = ()

    def __call__(self, x: float) -> float:
        return evaluate(self, x)

    def __str__(self) -> str:
        return to_str(self)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: float


@dataclass(frozen=True, eq=True)
class Var(Expr):
    pass


@dataclass(frozen=True, eq=True)
class Unary(Expr):
    op: str
    arg: Expr


@dataclass(frozen=True, eq=True)
class Binary(Expr):
    op: str  # one of + - * /
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exponent: float


@dataclass(frozen=True, eq=True)
class Piecewise(Expr):
    breakpoints: tuple[float, ...]
    # left_closed[k] is True when breakpoints[k] belongs to the piece on its left
    left_closed: tuple[bool, ...]
    pieces: tuple[Expr, ...]

    def __post_init__(self):
        m = len(self.breakpoints)
        if m == 0 or len(self.pieces) != m + 1 or len(self.left_closed) != m:
            raise ExprError("piecewise needs m breakpoints and m+1 pieces (m >= 1)")
        if any(b >= c for b, c in zip(self.breakpoints, self.breakpoints[1:])):
            raise ExprError("piecewise breakpoints must strictly increase")

    def piece_index(self, x: float) -> int:
        for k, (b, closed) in enumerate(zip(self.breakpoints, self.left_closed)):
            if x < b or (x == b and closed):
                return k
        return len(self.breakpoints)


@dataclass(frozen=True, eq=True)
class Inverse(Expr):
    fn: Expr
    lo: float
    hi: float
    arg: Expr


# --------------------------------------------------------------------------
# Builders that keep generated trees small


def const(v: float) -> Const:
    return Const(float(v))


X = Var()


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(b, Const) and b.value == 0.0:
        return a
    if isinstance(a, Const) and a.value == 0.0:
        return b
    if isinstance(a, Const) and isinstance(b, Const):
        return const(a.value + b.value)
    return Binary("+", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return const(a.value * b.value)
    if isinstance(a, Const):
        if a.value == 1.0:
            return b
        if a.value == 0.0:
            return const(0.0)
    if isinstance(b, Const):
        if b.value == 1.0:
            return a
        if b.value == 0.0:
            return const(0.0)
    return Binary("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(b, Const) and b.value == 1.0:
        return a
    return Binary("/", a, b)


def affine(scale: float, e: Expr, shift: float) -> Expr:
    """``scale*e + shift`` with trivial coefficients dropped."""
    return add(mul(const(scale), e), const(shift))


def substitute(e: Expr, inner: Expr) -> Expr:
    """Composition ``e(inner(x))``."""
    if isinstance(e, Var):
        return inner
    if isinstance(e, Const):
        return e
    if isinstance(e, Unary):
        return Unary(e.op, substitute(e.arg, inner))
    if isinstance(e, Binary):
        return Binary(e.op, substitute(e.left, inner), substitute(e.right, inner))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, inner), e.exponent)
    if isinstance(e, Piecewise):
        raise ExprError("cannot compose through a piecewise node")
    if isinstance(e, Inverse):
        return Inverse(e.fn, e.lo, e.hi, substitute(e.arg, inner))
    raise TypeError(type(e))


def breakpoints_of(e: Expr) -> list[float]:
    """Breakpoints of every piecewise node whose argument is the bare variable."""
    out: list[float] = []
    if isinstance(e, Piecewise):
        out.extend(e.breakpoints)
        for p in e.pieces:
            out.extend(breakpoints_of(p))
    elif isinstance(e, Unary):
        out.extend(breakpoints_of(e.arg))
    elif isinstance(e, Binary):
        out.extend(breakpoints_of(e.left))
        out.extend(breakpoints_of(e.right))
    elif isinstance(e, Pow):
        out.extend(breakpoints_of(e.base))
    elif isinstance(e, Inverse):
        out.extend(breakpoints_of(e.arg))
    return sorted(set(out))


# --------------------------------------------------------------------------
# Printer


def _num(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    s = repr(float(v))
    if s.endswith(".0"):
        s = s[:-2]
    return s


def _p(e: Expr) -> str:
    if isinstance(e, Const):
        s = _num(e.value)
        return f"({s})" if s.startswith("-") else s
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Unary):
        if e.op == "neg":
            return f"(-{_p(e.arg)})"
        return f"{e.op}({to_str(e.arg)})"
    if isinstance(e, Binary):
        return f"({_p(e.left)}{e.op}{_p(e.right)})"
    if isinstance(e, Pow):
        return f"({_p(e.base)}^{_num(e.exponent)})"
    if isinstance(e, Piecewise):
        parts = []
        for k, piece in enumerate(e.pieces):
            if k < len(e.breakpoints):
                op = "<=" if e.left_closed[k] else "<"
                b = e.breakpoints[k]
            else:
                op = ">" if e.left_closed[-1] else ">="
                b = e.breakpoints[-1]
            parts.append(f"x{op}{_num(b)}: {to_str(piece)}")
        return "piecewise(" + "; ".join(parts) + ")"
    if isinstance(e, Inverse):
        return f"inv({to_str(e.fn)}, {_num(e.lo)}, {_num(e.hi)}, {to_str(e.arg)})"
    raise TypeError(type(e))


def to_str(e: Expr) -> str:
    """Canonical text form; ``parse(to_str(e)) == e`` for parsed trees."""
    s = _p(e)
    if isinstance(e, (Binary, Pow)) or (isinstance(e, Unary) and e.op == "neg"):
        s = s[1:-1]
    return s


# --------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def offset(self, pos: int | None = None) -> int:
        return len(self.text[: self.pos if pos is None else pos].encode())

    def fail(self, msg: str, pos: int | None = None):
        raise ExprSyntaxError(msg, self.offset(pos))

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.pos)

    def accept(self, s: str) -> bool:
        if self.peek(s):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str):
        if not self.accept(s):
            self.fail(f"expected {s!r}")

    def number(self) -> float:
        self.skip()
        start = self.pos
        t = self.text
        while self.pos < len(t) and (t[self.pos].isdigit() or t[self.pos] == "."):
            self.pos += 1
        if self.pos < len(t) and t[self.pos] in "eE" and self.pos > start:
            save = self.pos
            self.pos += 1
            if self.pos < len(t) and t[self.pos] in "+-":
                self.pos += 1
            if self.pos < len(t) and t[self.pos].isdigit():
                while self.pos < len(t) and t[self.pos].isdigit():
                    self.pos += 1
            else:
                self.pos = save
        try:
            return float(t[start : self.pos])
        except ValueError:
            self.fail("expected a number", start)

    def signed_number(self) -> float:
        if self.accept("-"):
            return -self.number()
        self.accept("+")
        return self.number()

    def bound(self) -> float:
        neg = self.accept("-")
        if self.accept("inf"):
            return -math.inf if neg else math.inf
        v = self.number()
        return -v if neg else v

    def ident(self) -> str:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        return self.text[start : self.pos]

    def parse(self) -> Expr:
        e = self.expr()
        self.skip()
        if self.pos != len(self.text):
            self.fail("unexpected trailing input")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            if self.accept("+"):
                e = Binary("+", e, self.term())
            elif self.accept("-"):
                e = Binary("-", e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            if self.accept("*"):
                e = Binary("*", e, self.factor())
            elif self.accept("/"):
                e = Binary("/", e, self.factor())
            else:
                return e

    def factor(self) -> Expr:
        if self.accept("-"):
            inner = self.factor()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Unary("neg", inner)
        b = self.base()
        if self.accept("^"):
            if self.peek("("):
                self.expect("(")
                start = self.pos
                ce = self.expr()
                self.expect(")")
                try:
                    c = _const_value(ce)
                except ExprError:
                    self.fail("exponent must be a constant expression", start)
            else:
                c = self.signed_number()
            return Pow(b, c)
        return b

    def base(self) -> Expr:
        self.skip()
        if self.pos >= len(self.text):
            self.fail("unexpected end of input")
        ch = self.text[self.pos]
        if ch.isdigit() or ch == ".":
            return Const(self.number())
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if ch.isalpha() or ch == "_":
            start = self.pos
            name = self.ident()
            if name == "x":
                return X
            if name == "piecewise":
                self.expect("(")
                return self.piecewise(start)
            if name == "inv":
                self.expect("(")
                fn = self.expr()
                self.expect(",")
                lo = self.bound()
                self.expect(",")
                hi = self.bound()
                self.expect(",")
                arg = self.expr()
                self.expect(")")
                if not lo < hi:
                    self.fail("inv bounds must satisfy lo < hi", start)
                return Inverse(fn, lo, hi, arg)
            if name in FUNCTIONS:
                self.expect("(")
                e = self.expr()
                self.expect(")")
                return Unary(name, e)
            raise UnknownIdentifier(f"unknown identifier {name!r}", self.offset(start))
        self.fail(f"unexpected character {ch!r}")

    def guard(self) -> tuple[str, float]:
        start = self.pos
        if self.ident() != "x":
            self.fail("guard must start with 'x'", start)
        for op in ("<=", ">=", "<", ">"):
            if self.accept(op):
                return op, self.signed_number()
        self.fail("expected a comparison in guard")

    def piecewise(self, start: int) -> Piecewise:
        guards: list[tuple[str, float]] = []
        pieces: list[Expr] = []
        while True:
            guards.append(self.guard())
            self.expect(":")
            pieces.append(self.expr())
            if self.accept(";"):
                continue
            self.expect(")")
            break
        if len(pieces) < 2:
            self.fail("piecewise needs at least two pieces", start)
        bps, closed = [], []
        for op, c in guards[:-1]:
            if op not in ("<", "<="):
                self.fail("all but the last piecewise guard must be 'x<c' or 'x<=c'", start)
            bps.append(c)
            closed.append(op == "<=")
        last_op, last_c = guards[-1]
        expected = ">" if closed[-1] else ">="
        if last_op != expected or last_c != bps[-1]:
            self.fail(f"last piecewise guard must be 'x{expected}{_num(bps[-1])}'", start)
        try:
            return Piecewise(tuple(bps), tuple(closed), tuple(pieces))
        except ExprError as exc:
            self.fail(str(exc), start)


def _const_value(e: Expr) -> float:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        raise ExprError("not constant")
    if isinstance(e, Unary) and e.op == "neg":
        return -_const_value(e.arg)
    if isinstance(e, Binary):
        a, b = _const_value(e.left), _const_value(e.right)
        return {"+": a + b, "-": a - b, "*": a * b, "/": a / b if b else math.nan}[e.op]
    raise ExprError("not constant")


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree."""
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# Evaluation (compiled to closures, cached per node)


def _ln(t: float) -> float:
    if not t > 0.0:
        raise DomainError(f"ln of nonpositive value {t!r}")
    return math.log(t)


def _sqrt(t: float) -> float:
    if t < 0.0:
        raise DomainError(f"sqrt of negative value {t!r}")
    return math.sqrt(t)


def _exp(t: float) -> float:
    try:
        return math.exp(t)
    except OverflowError:
        raise DomainError(f"exp overflow at {t!r}") from None


def _pow(t: float, c: float) -> float:
    if t < 0.0 and not float(c).is_integer():
        raise DomainError("non-integer power of a negative base")
    if t == 0.0 and c < 0.0:
        raise DomainError("negative power of zero")
    try:
        return t**c
    except OverflowError:
        raise DomainError("power overflow") from None


def _div(a: float, b: float) -> float:
    if b == 0.0:
        raise DomainError("division by zero")
    return a / b


_UNARY_FN: dict[str, Callable[[float], float]] = {
    "neg": lambda t: -t,
    "exp": _exp,
    "ln": _ln,
    "sqrt": _sqrt,
    "abs": abs,
    "atan": math.atan,
}

def compile_expr(e: Expr) -> Callable[[float], float]:
    """Return a fast callable equivalent to recursive evaluation of ``e``."""
    fn = e.__dict__.get("_fn")
    if fn is None:
        fn = _build(e)
        e.__dict__["_fn"] = fn
    return fn


def _build(e: Expr) -> Callable[[float], float]:
    if isinstance(e, Const):
        v = e.value
        return lambda x: v
    if isinstance(e, Var):
        return lambda x: x
    if isinstance(e, Unary):
        g = _UNARY_FN[e.op]
        a = compile_expr(e.arg)
        return lambda x: g(a(x))
    if isinstance(e, Binary):
        a, b = compile_expr(e.left), compile_expr(e.right)
        if e.op == "+":
            return lambda x: a(x) + b(x)
        if e.op == "-":
            return lambda x: a(x) - b(x)
        if e.op == "*":
            return lambda x: a(x) * b(x)
        return lambda x: _div(a(x), b(x))
    if isinstance(e, Pow):
        a, c = compile_expr(e.base), e.exponent
        return lambda x: _pow(a(x), c)
    if isinstance(e, Piecewise):
        fns = [compile_expr(p) for p in e.pieces]
        return lambda x: fns[e.piece_index(x)](x)
    if isinstance(e, Inverse):
        inv = inverse_solver(e)
        a = compile_expr(e.arg)
        return lambda x: inv(a(x))
    raise TypeError(type(e))


def inverse_solver(e: Inverse) -> Callable[[float], float]:
    """Full-precision left-inverse evaluator for an ``inv(...)`` node."""
    from .geninv import LeftInverse  # geninv builds on this module

    solver = e.__dict__.get("_solver")
    if solver is None:
        fn = MonotoneFn(e.fn, Interval(e.lo, e.hi))
        solver = LeftInverse.of(fn, xtol=0.0)
        e.__dict__["_solver"] = solver
    return solver


def evaluate(e: Expr, x: float) -> float:
    """Evaluate ``e`` at ``x``; raises :class:`DomainError` on invalid input."""
    try:
        v = compile_expr(e)(float(x))
    except ZeroDivisionError:
        raise DomainError("division by zero") from None
    except OverflowError:
        raise DomainError("overflow") from None
    if not math.isfinite(v):
        raise DomainError(f"non-finite value at x={x!r}")
    return v


# --------------------------------------------------------------------------
# Intervals and monotone functions


@dataclass(frozen=True)
class Interval:
    """Open interval ``(lo, hi)``; endpoints may be infinite."""

    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not self.lo < self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    def __contains__(self, x: float) -> bool:
        return self.lo < x < self.hi

    @property
    def finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def clamped(self, clamp: float = CLAMP) -> tuple[float, float]:
        """Closed evaluation set standing in for the open interval."""
        lo = max(self.lo, -clamp)
        hi = min(self.hi, clamp)
        off = EDGE_REL * min(hi - lo, 1.0)
        if math.isfinite(self.lo) and self.lo > -clamp:
            lo = self.lo + off
        if math.isfinite(self.hi) and self.hi < clamp:
            hi = self.hi - off
        return lo, hi

    def from_unit(self, u, far: float = CLAMP):
        """Map ``u`` in (0, 1) monotonically onto the interval.

        Infinite sides are reached geometrically up to distance ``far``.
        """
        u = np.asarray(u, dtype=float)
        lo, hi = self.lo, self.hi
        if math.isfinite(lo) and math.isfinite(hi):
            out = lo + u * (hi - lo)
        elif math.isfinite(lo):
            out = lo + far ** (2.0 * u - 1.0)
        elif math.isfinite(hi):
            out = hi - far ** (1.0 - 2.0 * u)
        else:
            out = np.sinh(np.arcsinh(far) * (2.0 * u - 1.0))
        return out

    def grid(self, n: int, far: float = CLAMP) -> np.ndarray:
        """``n`` sorted interior points (cell midpoints in the unit parametrization)."""
        return self.from_unit((np.arange(n) + 0.5) / n, far=far)

    def to_json(self) -> list:
        return [_bound_json(self.lo), _bound_json(self.hi)]

    @classmethod
    def from_json(cls, pair: Sequence) -> "Interval":
        if len(pair) != 2:
            raise ValueError("domain must be [lo, hi]")
        return cls(_bound_from_json(pair[0]), _bound_from_json(pair[1]))


def _bound_json(v: float):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _bound_from_json(v) -> float:
    if isinstance(v, str):
        if v in ("inf", "+inf"):
            return math.inf
        if v == "-inf":
            return -math.inf
        return float(v)
    return float(v)


class Direction(str, enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"

    @property
    def sign(self) -> float:
        return 1.0 if self is Direction.INCREASING else -1.0

    def flipped(self) -> "Direction":
        return Direction.DECREASING if self is Direction.INCREASING else Direction.INCREASING


class Violation(NamedTuple):
    x1: float
    x2: float


class MonotonicityError(ValueError):
    pass


def check_strict_monotone(
    f: Expr, domain: Interval, grid_size: int = 256, clamp: float = CLAMP
) -> Direction | Violation:
    """Sample ``f`` on a grid and report its strict monotonicity.

    Returns the direction if consecutive values are strictly ordered in one
    sense, else the first offending pair.  Domain errors propagate.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    xs = domain.grid(grid_size, far=clamp)
    fn = compile_expr(f)
    vals = [fn(float(x)) for x in xs]
    sense = 0
    for k in range(len(xs) - 1):
        d = vals[k + 1] - vals[k]
        s = (d > 0) - (d < 0)
        if s == 0 or (sense and s != sense):
            return Violation(float(xs[k]), float(xs[k + 1]))
        sense = s
    return Direction.INCREASING if sense > 0 else Direction.DECREASING


@dataclass(frozen=True)
class MonotoneFn:
    """Strictly monotone generator on an open interval.

    ``direction`` is certified on a grid when the object is built; pass it
    explicitly to have a mismatch reported as an error.
    """

    expr: Expr
    domain: Interval
    direction: Direction | None = None
    grid_size: int = field(default=256, compare=False, repr=False)

    def __post_init__(self):
        found = check_strict_monotone(self.expr, self.domain, self.grid_size)
        if isinstance(found, Violation):
            raise MonotonicityError(
                f"{to_str(self.expr)} is not strictly monotone on "
                f"({self.domain.lo}, {self.domain.hi}): "
                f"f({found.x1!r}) vs f({found.x2!r})"
            )
        if self.direction is not None and Direction(self.direction) is not found:
            raise MonotonicityError(f"declared {Direction(self.direction).value} but found {found.value}")
        object.__setattr__(self, "direction", found)

    def __call__(self, x: float) -> float:
        return evaluate(self.expr, x)

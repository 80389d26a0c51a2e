"""Third-order forward differentiation of expressions.

A :class:`Jet3` carries ``(f, f', f'', f''')`` at one point.  Elementary
functions are pushed through with the order-3 chain rule

    h'   = F' u'
    h''  = F'' u'^2 + F' u''
    h''' = F''' u'^3 + 3 F'' u' u'' + F' u'''

so every unary operation only needs to supply its own four derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exprcore import (
    Binary,
    BreakpointError,
    Const,
    DomainError,
    Expr,
    Inverse,
    Piecewise,
    Pow,
    Unary,
    Var,
    inverse_solver,
)

MIN_SLOPE = 1e-12


class VanishingDerivative(DomainError):
    pass


@dataclass(frozen=True)
class Jet3:
    v: float
    d1: float = 0.0
    d2: float = 0.0
    d3: float = 0.0

    def __add__(self, o: "Jet3") -> "Jet3":
        return Jet3(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2, self.d3 + o.d3)

    def __sub__(self, o: "Jet3") -> "Jet3":
        return Jet3(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2, self.d3 - o.d3)

    def __neg__(self) -> "Jet3":
        return Jet3(-self.v, -self.d1, -self.d2, -self.d3)

    def __mul__(self, o: "Jet3") -> "Jet3":
        u, w = self, o
        return Jet3(
            u.v * w.v,
            u.d1 * w.v + u.v * w.d1,
            u.d2 * w.v + 2.0 * u.d1 * w.d1 + u.v * w.d2,
            u.d3 * w.v + 3.0 * u.d2 * w.d1 + 3.0 * u.d1 * w.d2 + u.v * w.d3,
        )

    def __truediv__(self, o: "Jet3") -> "Jet3":
        t = o.v
        if t == 0.0:
            raise DomainError("division by zero")
        return self * compose((1.0 / t, -1.0 / t**2, 2.0 / t**3, -6.0 / t**4), o)

    def scaled(self, c: float) -> "Jet3":
        return Jet3(c * self.v, c * self.d1, c * self.d2, c * self.d3)

    @property
    def derivatives(self) -> tuple[float, float, float]:
        return (self.d1, self.d2, self.d3)


def compose(outer: tuple[float, float, float, float], inner: Jet3) -> Jet3:
    """Jet of ``F(u(x))`` from ``(F, F', F'', F''')`` at ``u(x)`` and the jet of ``u``."""
    F0, F1, F2, F3 = outer
    u1, u2, u3 = inner.d1, inner.d2, inner.d3
    return Jet3(
        F0,
        F1 * u1,
        F2 * u1 * u1 + F1 * u2,
        F3 * u1**3 + 3.0 * F2 * u1 * u2 + F1 * u3,
    )


def _unary_derivs(op: str, t: float) -> tuple[float, float, float, float]:
    if op == "neg":
        return (-t, -1.0, 0.0, 0.0)
    if op == "exp":
        try:
            e = math.exp(t)
        except OverflowError:
            raise DomainError(f"exp overflow at {t!r}") from None
        return (e, e, e, e)
    if op == "ln":
        if not t > 0.0:
            raise DomainError(f"ln of nonpositive value {t!r}")
        return (math.log(t), 1.0 / t, -1.0 / t**2, 2.0 / t**3)
    if op == "sqrt":
        if not t > 0.0:
            raise DomainError(f"sqrt is not differentiable at {t!r}")
        s = math.sqrt(t)
        return (s, 0.5 / s, -0.25 / (s * t), 0.375 / (s * t * t))
    if op == "abs":
        if t == 0.0:
            raise DomainError("abs is not differentiable at 0")
        sg = 1.0 if t > 0 else -1.0
        return (abs(t), sg, 0.0, 0.0)
    if op == "atan":
        w = 1.0 + t * t
        return (math.atan(t), 1.0 / w, -2.0 * t / w**2, (6.0 * t * t - 2.0) / w**3)
    raise ValueError(f"unknown unary op {op!r}")


def _pow_derivs(t: float, c: float) -> tuple[float, float, float, float]:
    if t < 0.0 and not float(c).is_integer():
        raise DomainError("non-integer power of a negative base")
    out = []
    coef = 1.0
    for k in range(4):
        if coef == 0.0:
            out.append(0.0)
        else:
            if t == 0.0 and c - k < 0:
                raise DomainError("power is not differentiable at 0")
            out.append(coef * t ** (c - k))
        coef *= c - k
    return tuple(out)


def jet_eval(e: Expr, x: float) -> Jet3:
    """Value and first three derivatives of ``e`` at ``x``.

    Raises :class:`BreakpointError` at a piecewise breakpoint.
    """
    return _jet(e, Jet3(float(x), 1.0, 0.0, 0.0))


def _jet(e: Expr, xj: Jet3) -> Jet3:
    if isinstance(e, Const):
        return Jet3(e.value)
    if isinstance(e, Var):
        return xj
    if isinstance(e, Unary):
        a = _jet(e.arg, xj)
        return compose(_unary_derivs(e.op, a.v), a)
    if isinstance(e, Binary):
        a, b = _jet(e.left, xj), _jet(e.right, xj)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        return a / b
    if isinstance(e, Pow):
        a = _jet(e.base, xj)
        return compose(_pow_derivs(a.v, e.exponent), a)
    if isinstance(e, Piecewise):
        x = xj.v
        if x in e.breakpoints:
            raise BreakpointError(f"jet requested at breakpoint {x!r}")
        return _jet(e.pieces[e.piece_index(x)], xj)
    if isinstance(e, Inverse):
        a = _jet(e.arg, xj)
        y = inverse_solver(e)(a.v)
        inv = inverse_jets(jet_eval(e.fn, y), y)
        return compose((y, inv.d1, inv.d2, inv.d3), a)
    raise TypeError(type(e))


def _ratios(j: Jet3) -> tuple[float, float]:
    if abs(j.d1) <= MIN_SLOPE:
        raise VanishingDerivative(f"first derivative {j.d1!r} vanishes")
    return j.d2 / j.d1, j.d3 / j.d1


def schwarzian_from_jet(j: Jet3) -> float:
    r2, r3 = _ratios(j)
    return r3 - 1.5 * r2 * r2


def schwarzian(e: Expr, x: float) -> float:
    """``f'''/f' - (3/2)(f''/f')^2`` at ``x``."""
    return schwarzian_from_jet(jet_eval(e, x))


def inverse_jets(j: Jet3, x: float = math.nan) -> Jet3:
    """Derivatives of ``f^{-1}`` at ``f(x)`` from the jet of ``f`` at ``x``.

    The value slot holds ``x`` when given (it is ``f^{-1}(f(x))``), else NaN.
    """
    d1, d2, d3 = j.d1, j.d2, j.d3
    if abs(d1) <= MIN_SLOPE:
        raise VanishingDerivative(f"first derivative {d1!r} vanishes")
    return Jet3(
        float(x),
        1.0 / d1,
        -d2 / d1**3,
        (3.0 * d2 * d2 - d1 * d3) / d1**5,
    )

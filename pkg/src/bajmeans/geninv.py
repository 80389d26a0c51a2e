"""Generalized left inverse of a strictly monotone, possibly discontinuous function.

For increasing ``f`` the inverse at ``y`` is ``sup{u in I : f(u) <= y}``.
It is computed by bisection with the invariant ``f(lo) <= y < f(hi)``, so
jumps of ``f`` need no special treatment: every ``y`` inside the gap
``[f(x-), f(x+)]`` bisects onto the jump point ``x``.  Decreasing ``f`` is
handled by bisecting on ``-f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exprcore import CLAMP, DomainError, Interval, MonotoneFn, compile_expr

DEFAULT_XTOL = 1e-12
DEFAULT_MAXITER = 200
# enough halvings to reach adjacent doubles anywhere in the clamped range
FULL_PRECISION_MAXITER = 2200


class BisectionError(RuntimeError):
    pass


def _edge_points(domain: Interval, clamp: float = CLAMP) -> tuple[list[float], list[float]]:
    """Points approaching each clamped edge, innermost first."""
    lo_c, hi_c = domain.clamped(clamp)
    mid = 0.5 * (lo_c + hi_c)
    lows = [lo_c + (mid - lo_c) * 10.0**-k for k in range(1, 12)] + [lo_c]
    highs = [hi_c - (hi_c - mid) * 10.0**-k for k in range(1, 12)] + [hi_c]
    return lows, highs


def _last_good(fn, xs: list[float]) -> tuple[float, float]:
    best = None
    for x in xs:
        try:
            v = fn(x)
        except (DomainError, ValueError, ZeroDivisionError, OverflowError):
            continue
        if math.isfinite(v):
            best = (x, v)
    if best is None:
        raise DomainError("generator cannot be evaluated near the domain edge")
    return best


def _hull(f: MonotoneFn, grid_size: int) -> tuple[Interval, float, float]:
    fn = compile_expr(f.expr)
    lows, highs = _edge_points(f.domain)
    xa, va = _last_good(fn, lows)
    xb, vb = _last_good(fn, highs)
    vals = [va, vb] + [fn(float(x)) for x in f.domain.grid(grid_size)]
    return Interval(min(vals), max(vals)), xa, xb


def hull_range(f: MonotoneFn, grid_size: int = 256) -> Interval:
    """Estimate ``conv(f(I))`` from one-sided approach to the clamped edges."""
    return _hull(f, grid_size)[0]


@dataclass(frozen=True)
class LeftInverse:
    source: MonotoneFn
    range_hull: Interval
    xtol: float = DEFAULT_XTOL
    maxiter: int = DEFAULT_MAXITER
    # bisection bracket in the domain: points whose images bound range_hull
    edge_lo: float = field(default=-math.inf, repr=False)
    edge_hi: float = field(default=math.inf, repr=False)

    @classmethod
    def of(
        cls, f: MonotoneFn, xtol: float = DEFAULT_XTOL, maxiter: int | None = None, grid_size: int = 256
    ) -> "LeftInverse":
        hull, xa, xb = _hull(f, grid_size)
        if maxiter is None:
            maxiter = FULL_PRECISION_MAXITER if xtol <= 0.0 else DEFAULT_MAXITER
        return cls(f, hull, xtol, maxiter, xa, xb)

    def __call__(self, y: float, bracket: tuple[float, float] | None = None) -> float:
        return left_inverse_eval(self, y, bracket)


def left_inverse_eval(g: LeftInverse, y: float, bracket: tuple[float, float] | None = None) -> float:
    """Evaluate the generalized left inverse at ``y``.

    ``bracket=(a, b)`` restricts the search to ``[a, b]``; the caller
    guarantees ``f(a) <= y <= f(b)`` in the increasing sense.
    """
    f = g.source
    fn = compile_expr(f.expr)
    s = f.direction.sign
    t = s * y
    if bracket is None:
        lo_h, hi_h = g.range_hull.lo, g.range_hull.hi
        slack = 1e-12 * (1.0 + abs(y))
        if not (lo_h - slack <= y <= hi_h + slack):
            raise DomainError(f"{y!r} lies outside the range hull ({lo_h!r}, {hi_h!r})")
        lo, hi = g.edge_lo, g.edge_hi
    else:
        lo, hi = bracket
    if s * fn(lo) > t:
        return lo
    if s * fn(hi) <= t:
        return hi
    xtol = g.xtol
    for _ in range(g.maxiter):
        if hi - lo <= xtol:
            break
        mid = lo + 0.5 * (hi - lo)
        if not lo < mid < hi:
            break
        if s * fn(mid) <= t:
            lo = mid
        else:
            hi = mid
    else:
        if hi - lo > xtol and lo < lo + 0.5 * (hi - lo) < hi:
            raise BisectionError(f"bisection did not converge in {g.maxiter} steps (width {hi - lo!r})")
    return lo + 0.5 * (hi - lo)


# --------------------------------------------------------------------------
# grid verification of the three left-inverse properties


def one_sided_limits(f: MonotoneFn, x: float, h: float = 1e-9) -> tuple[float, float]:
    """Numerical ``(f(x-), f(x+))`` from evaluation at ``x -/+ h*max(1,|x|)``."""
    fn = compile_expr(f.expr)
    step = h * max(1.0, abs(x))
    return fn(x - step), fn(x + step)


def is_jump_point(f: MonotoneFn, x: float, tol: float = 1e-9) -> bool:
    """True when the one-sided gap at ``x`` does not shrink with the step."""
    fn = compile_expr(f.expr)
    scale = max(1.0, abs(x))
    wide = abs(fn(x + 1e-5 * scale) - fn(x - 1e-5 * scale))
    narrow = abs(fn(x + 1e-9 * scale) - fn(x - 1e-9 * scale))
    return narrow > tol and narrow > 0.5 * wide


def smf3_at(f: MonotoneFn, g: LeftInverse, y: float, tol: float = 1e-10) -> tuple[float, float, bool]:
    """Check ``liminf f <= y <= limsup f`` at ``g(y)``; returns (liminf, limsup, ok)."""
    x = g(y)
    a, b = one_sided_limits(f, x)
    lower, upper = min(a, b), max(a, b)
    slack = tol * (1.0 + abs(y))
    return lower, upper, lower - slack <= y <= upper + slack


@dataclass
class SmfReport:
    smf1_pass: bool
    smf1_residual: float
    smf2_pass: bool
    smf2_residual: float
    smf2_checked: int
    smf3_pass: bool
    smf3_checked: int
    gap_values: list[float]

    @property
    def all_pass(self) -> bool:
        return self.smf1_pass and self.smf2_pass and self.smf3_pass

    def to_json(self) -> dict:
        return {
            "smf1": {"pass": self.smf1_pass, "residual": self.smf1_residual},
            "smf2": {"pass": self.smf2_pass, "residual": self.smf2_residual, "checked": self.smf2_checked},
            "smf3": {"pass": self.smf3_pass, "checked": self.smf3_checked},
            "all_pass": self.all_pass,
        }


def verify_smf(
    f: MonotoneFn, g: LeftInverse, grid_size: int = 100, tol: float = 1e-10, far: float = 1e3
) -> SmfReport:
    """Grid checks of ``g(f(x)) = x``, ``f(g(y)) = y`` off the gaps, and the
    liminf/limsup bracket at gap values.  Failures are reported, not raised."""
    fn = compile_expr(f.expr)
    eps = np.finfo(float).eps

    r1 = 0.0
    ok1 = True
    for x in f.domain.grid(grid_size, far=far):
        x = float(x)
        res = abs(g(fn(x)) - x)
        r1 = max(r1, res)
        ok1 &= res <= max(tol, 2 * g.xtol) + 8 * eps * abs(x)

    lo_h, hi_h = g.range_hull.lo, g.range_hull.hi
    ys = lo_h + (hi_h - lo_h) * (np.arange(grid_size) + 0.5) / grid_size
    r2 = 0.0
    ok2 = ok3 = True
    checked2 = 0
    gaps: list[float] = []
    for y in ys:
        y = float(y)
        x = g(y)
        res = abs(fn(x) - y)
        if res > tol * (1.0 + abs(y)) and is_jump_point(f, x):
            gaps.append(y)
            ok3 &= smf3_at(f, g, y, tol)[2]
            continue
        checked2 += 1
        r2 = max(r2, res)
        ok2 &= res <= tol * (1.0 + abs(y))
    return SmfReport(bool(ok1), float(r1), bool(ok2), float(r2), checked2, bool(ok3), len(gaps), gaps)

"""Closed-form partial derivatives of a mean at diagonal points, up to order 3,
plus a finite-difference oracle working on ``mean_eval`` alone.

Indices are 0-based throughout.  ``r1 = f''/f'`` and ``r2 = f'''/f'`` below.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .exprcore import DomainError, breakpoints_of
from .jets import Jet3, VanishingDerivative, jet_eval
from .mean import MeanSpec, mean_eval

FD_STEPS = {1: 1e-5, 2: 1e-4, 3: 7e-4}

# 1-D central stencils: offset (in steps) -> weight, before dividing by h^k
_STENCILS = {
    1: {-1: -0.5, 1: 0.5},
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
}


def _generator_ratios(spec: MeanSpec, x: float) -> tuple[float, float]:
    j = jet_eval(spec.generator.expr, x)
    if abs(j.d1) <= 1e-12:
        raise VanishingDerivative(f"f'({x!r}) = {j.d1!r} vanishes")
    return j.d2 / j.d1, j.d3 / j.d1


def _weight_jets(spec: MeanSpec, x: float) -> list[Jet3]:
    return [jet_eval(e, x) for e in spec.weights.exprs]


def _check(spec: MeanSpec, *idx: int):
    for i in idx:
        if not 0 <= i < spec.n:
            raise IndexError(f"index {i} out of range for n={spec.n}")


def d1(spec: MeanSpec, i: int, x: float) -> float:
    """First partial: ``p_i / p_0``."""
    _check(spec, i)
    _generator_ratios(spec, x)
    w = [jet.v for jet in _weight_jets(spec, x)]
    return w[i] / sum(w)


def d2_mixed(spec: MeanSpec, i: int, j: int, x: float) -> float:
    """Mixed second partial, ``i != j``."""
    _check(spec, i, j)
    if i == j:
        raise ValueError("d2_mixed needs i != j")
    r1, _ = _generator_ratios(spec, x)
    w = _weight_jets(spec, x)
    p0 = sum(t.v for t in w)
    pi, pj = w[i], w[j]
    dprod = pi.d1 * pj.v + pi.v * pj.d1
    return -dprod / p0**2 - pi.v * pj.v / p0**2 * r1


def d2_pure(spec: MeanSpec, i: int, x: float) -> float:
    """Pure second partial along coordinate ``i``."""
    _check(spec, i)
    r1, _ = _generator_ratios(spec, x)
    w = _weight_jets(spec, x)
    p0 = sum(t.v for t in w)
    p, dp = w[i].v, w[i].d1
    return 2.0 * dp * (p0 - p) / p0**2 + p * (p0 - p) / p0**2 * r1


def d3_mixed(spec: MeanSpec, i: int, j: int, k: int, x: float) -> float:
    """Third partial in three distinct coordinates (needs ``n >= 3``)."""
    if spec.n < 3:
        raise ValueError("d3_mixed needs n >= 3")
    _check(spec, i, j, k)
    if len({i, j, k}) != 3:
        raise ValueError("d3_mixed needs distinct indices")
    r1, r2 = _generator_ratios(spec, x)
    w = _weight_jets(spec, x)
    p0 = sum(t.v for t in w)
    a, b, c = w[i], w[j], w[k]
    pairs = a.v * b.d1 * c.d1 + a.d1 * b.v * c.d1 + a.d1 * b.d1 * c.v
    dtriple = a.d1 * b.v * c.v + a.v * b.d1 * c.v + a.v * b.v * c.d1
    triple = a.v * b.v * c.v
    return (
        2.0 * pairs / p0**3
        + 2.0 * dtriple / p0**3 * r1
        + triple / p0**3 * (3.0 * r1 * r1 - r2)
    )


def d3_semi(spec: MeanSpec, i: int, j: int, x: float) -> float:
    """``d_i^2 d_j`` with ``i != j``."""
    _check(spec, i, j)
    if i == j:
        raise ValueError("d3_semi needs i != j")
    r1, r2 = _generator_ratios(spec, x)
    w = _weight_jets(spec, x)
    p0 = sum(t.v for t in w)
    pi, dpi, ddpi = w[i].v, w[i].d1, w[i].d2
    pj, dpj = w[j].v, w[j].d1
    return (
        (2.0 * dpi * dpj * (2.0 * pi - p0) + pj * (2.0 * dpi**2 - ddpi * p0)) / p0**3
        + (2.0 * dpi * pj + pi * dpj) * (2.0 * pi - p0) / p0**3 * r1
        + pi * pj / p0**3 * ((3.0 * pi - p0) * r1 * r1 - pi * r2)
    )


def d3_pure(spec: MeanSpec, i: int, x: float) -> float:
    """Pure third partial along coordinate ``i``."""
    _check(spec, i)
    r1, r2 = _generator_ratios(spec, x)
    w = _weight_jets(spec, x)
    p0 = sum(t.v for t in w)
    p, dp, ddp = w[i].v, w[i].d1, w[i].d2
    return (
        3.0 * (p0 - p) * (p0 * ddp - 2.0 * dp**2) / p0**3
        + 3.0 * dp * (p0 - 2.0 * p) * (p0 - p) / p0**3 * r1
        - p * (p0 - p) / p0**3 * (3.0 * p * r1 * r1 - (p0 + p) * r2)
    )


def formula(spec: MeanSpec, index: Sequence[int], x: float) -> float:
    """Dispatch a multi-index (tuple of coordinates, repeats allowed) to its formula."""
    counts = Counter(index)
    order = len(index)
    shape = sorted(counts.values(), reverse=True)
    if order == 1:
        return d1(spec, index[0], x)
    if order == 2:
        if shape == [1, 1]:
            i, j = counts
            return d2_mixed(spec, i, j, x)
        return d2_pure(spec, index[0], x)
    if order == 3:
        if shape == [1, 1, 1]:
            return d3_mixed(spec, *counts, x)
        if shape == [2, 1]:
            i = next(c for c, m in counts.items() if m == 2)
            j = next(c for c, m in counts.items() if m == 1)
            return d3_semi(spec, i, j, x)
        return d3_pure(spec, index[0], x)
    raise ValueError("orders 1..3 only")


def fd_partial(spec: MeanSpec, index: Sequence[int], x: float, steps: dict[int, float] | None = None) -> float:
    """Central finite difference of ``mean_eval`` at the diagonal point ``(x,...,x)``.

    Mixed partials use tensor products of 1-D central stencils with one
    common step chosen by total order.  The mean is evaluated at full
    bisection precision so that stencil cancellation stays below the
    truncation error.
    """
    order = len(index)
    if not 1 <= order <= 3:
        raise ValueError("orders 1..3 only")
    _check(spec, *index)
    h = (steps or FD_STEPS)[order]
    reach = h * max(max(abs(o) for o in _STENCILS[m]) for m in Counter(index).values())
    for b in breakpoints_of(spec.generator.expr):
        if abs(b - x) <= reach + 10.0 * h:
            raise DomainError(f"breakpoint {b!r} too close to the stencil around {x!r}")
    if not (x - reach in spec.domain and x + reach in spec.domain):
        raise DomainError("stencil leaves the domain")
    precise = spec.with_xtol(0.0)
    counts = Counter(index)
    axes = list(counts.items())
    total = 0.0
    for combo in itertools.product(*(_STENCILS[m].items() for _, m in axes)):
        weight = 1.0
        point = [x] * spec.n
        for (axis, _), (off, w) in zip(axes, combo):
            point[axis] = x + off * h
            weight *= w
        total += weight * mean_eval(precise, point)
    return total / h**order


def diagonal_indices(n: int, max_order: int = 3) -> list[tuple[int, ...]]:
    """Every multi-index with an implemented formula, up to ``max_order``."""
    out: list[tuple[int, ...]] = []
    if max_order >= 1:
        out += [(i,) for i in range(n)]
    if max_order >= 2:
        out += [(i, j) for i, j in itertools.combinations(range(n), 2)]
        out += [(i, i) for i in range(n)]
    if max_order >= 3:
        out += [c for c in itertools.combinations(range(n), 3)]
        out += [(i, i, j) for i in range(n) for j in range(n) if i != j]
        out += [(i, i, i) for i in range(n)]
    return out


def mixed_error(approx: float, exact: float) -> float:
    """``|approx - exact| / max(1, |exact|)``: relative for large values,
    absolute near zero where many diagonal partials vanish exactly."""
    return abs(approx - exact) / max(1.0, abs(exact))


@dataclass
class DerivRow:
    index: tuple[int, ...]
    formula: float
    fd: float
    error: float

    @property
    def label(self) -> str:
        return "".join(f"d{i + 1}" for i in self.index)

    def to_json(self) -> dict:
        return {"index": [i + 1 for i in self.index], "label": self.label,
                "formula": self.formula, "fd": self.fd, "rel_err": self.error}


def derivative_table(spec: MeanSpec, x: float, max_order: int = 3) -> list[DerivRow]:
    rows = []
    for idx in diagonal_indices(spec.n, max_order):
        a = formula(spec, idx, x)
        b = fd_partial(spec, idx, x)
        rows.append(DerivRow(idx, a, b, mixed_error(b, a)))
    return rows

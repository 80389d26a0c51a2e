"""Reference corpus of generators, weights and random specs.

Used by the tests, the acceptance run and the scripts so that all of them
draw from one documented family.  Everything is driven by a numpy
``Generator`` so runs are reproducible from a seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equality import MobiusParams, transform_spec
from .exprcore import Interval, MonotoneFn, X, affine, mul, parse
from .geninv import hull_range
from .mean import MeanSpec, WeightSystem

POS = Interval(0.5, 4.0)
SYM = Interval(-2.0, 2.0)
HALF_LINE = Interval(0.0, math.inf)
UNIT = Interval(0.0, 1.0)

JUMP = "piecewise(x<0: x; x>=0: x+1)"


@dataclass(frozen=True)
class GenEntry:
    f: str
    domain: Interval
    smooth: bool = True


# Smooth generators have nonvanishing f' on the whole domain, so jets work.
GENERATORS: tuple[GenEntry, ...] = (
    GenEntry("x", POS),
    GenEntry("ln(x)", POS),
    GenEntry("sqrt(x)", POS),
    GenEntry("1/x", POS),
    GenEntry("x^3+x", POS),
    GenEntry("exp(x)", SYM),
    GenEntry("exp(-x)", SYM),
    GenEntry("x^3+x", SYM),
    GenEntry("atan(x)", SYM),
    GenEntry("-x", SYM),
    GenEntry("x", HALF_LINE),
    GenEntry("ln(x)", HALF_LINE),
    GenEntry("1/x", HALF_LINE),
    GenEntry("x", UNIT),
    GenEntry(JUMP, Interval(-1.0, 1.0), smooth=False),
    GenEntry("piecewise(x<1: x; x>=1: 2*x)", POS, smooth=False),
)

# exp weights only on bounded domains: exp overflows at the 1e8 clamp
WEIGHTS_POSITIVE = ("1", "2", "x", "x^2", "1+x^2", "1/x", "sqrt(x)")
WEIGHTS_BOUNDED = ("1", "3", "1+x^2", "exp(x)", "exp(-x)", "3+x")


def weight_pool(domain: Interval) -> tuple[str, ...]:
    if domain.lo < 0.0:
        return WEIGHTS_BOUNDED
    if math.isinf(domain.hi):
        return WEIGHTS_POSITIVE
    return WEIGHTS_POSITIVE + ("exp(x)",)


def spec_of(f: str, weights, domain: Interval) -> MeanSpec:
    gen = MonotoneFn(parse(f), domain)
    return MeanSpec(gen, WeightSystem(tuple(parse(w) for w in weights), domain))


def random_weights(rng: np.random.Generator, domain: Interval, n: int, distinct: bool = False) -> list[str]:
    pool = weight_pool(domain)
    if distinct:
        return [str(w) for w in rng.choice(pool, size=n, replace=False)]
    return [str(w) for w in rng.choice(pool, size=n)]


def random_spec(
    rng: np.random.Generator,
    n: int | None = None,
    smooth_only: bool = False,
    bounded_only: bool = False,
) -> MeanSpec:
    pool = [g for g in GENERATORS if (g.smooth or not smooth_only)
            and (not bounded_only or math.isfinite(g.domain.hi))]
    g = pool[int(rng.integers(len(pool)))]
    n = int(rng.integers(2, 5)) if n is None else n
    return spec_of(g.f, random_weights(rng, g.domain, n), g.domain)


def random_point(rng: np.random.Generator, spec: MeanSpec, far: float = 10.0) -> list[float]:
    return [float(t) for t in spec.domain.from_unit(rng.uniform(0.0, 1.0, spec.n), far=far)]


def random_mobius(rng: np.random.Generator, spec: MeanSpec, min_det: float = 0.2) -> MobiusParams:
    """Random parameters with ``cf+d >= 0.5`` on the hull of ``f``."""
    hull = hull_range(spec.generator)
    while True:
        c = float(rng.uniform(-1.0, 1.0))
        d = -min(c * hull.lo, c * hull.hi) + float(rng.uniform(0.5, 2.0))
        a, b = (float(t) for t in rng.uniform(-2.0, 2.0, 2))
        if abs(a * d - b * c) >= min_det:
            return MobiusParams(a, b, c, d)


def mobius_pair(rng: np.random.Generator, n: int, distinct_weights: bool = False) -> tuple[MeanSpec, MeanSpec, MobiusParams]:
    """A smooth spec on a bounded domain and a random Möbius transform of it."""
    pool = [g for g in GENERATORS if g.smooth and math.isfinite(g.domain.hi) and math.isfinite(g.domain.lo)]
    g = pool[int(rng.integers(len(pool)))]
    a = spec_of(g.f, random_weights(rng, g.domain, n, distinct=distinct_weights), g.domain)
    m = random_mobius(rng, a)
    return a, transform_spec(a, m), m


# Generators with pairwise different Schwarzians on the given domain, so no
# two of them are Möbius-related.
NON_CONJUGATE = {
    POS: ("x", "ln(x)", "sqrt(x)", "x^3+x"),
    SYM: ("x", "exp(x)", "x^3+x", "atan(x)"),
}


# (f, g, s) on POS with s = sqrt(f'/g') up to a constant, so weights
# q_i = s*p_i make gamma constant while the Schwarzians differ.
GAMMA_MATCHED = (
    ("x", "x^3", "x^-1"),
    ("x", "exp(x)", "exp(-0.5*x)"),
    ("ln(x)", "x", "x^-0.5"),
    ("x", "sqrt(x)", "x^0.25"),
    ("sqrt(x)", "ln(x)", "x^0.25"),
)


def perturb_weight(spec: MeanSpec, index: int = 0, eps: float = 0.01) -> MeanSpec:
    """Multiply ``q_index`` by ``1 + eps*x``."""
    exprs = list(spec.weights.exprs)
    exprs[index] = mul(affine(eps, X, 1.0), exprs[index])
    return MeanSpec(spec.generator, WeightSystem(tuple(exprs), spec.domain))


def negative_pair(rng: np.random.Generator, kind: str, n: int) -> tuple[MeanSpec, MeanSpec]:
    """A pair whose means differ: ``kind`` is "weights", "generator"
    or "schwarzian" (gamma condition holds, Schwarzians differ)."""
    if kind == "weights":
        a, b, _ = mobius_pair(rng, n)
        return a, perturb_weight(b, int(rng.integers(n)))
    if kind == "generator":
        dom = (POS, SYM)[int(rng.integers(2))]
        f, h = (str(t) for t in rng.choice(NON_CONJUGATE[dom], size=2, replace=False))
        w = random_weights(rng, dom, n)
        a = spec_of(f, w, dom)
        other = spec_of(h, w, dom)
        return a, transform_spec(other, random_mobius(rng, other))
    if kind == "schwarzian":
        f, h, scale = GAMMA_MATCHED[int(rng.integers(len(GAMMA_MATCHED)))]
        w = random_weights(rng, POS, n)
        return spec_of(f, w, POS), spec_of(h, [f"({scale})*({t})" for t in w], POS)
    raise ValueError(f"unknown kind {kind!r}")


# Specs for checking the diagonal-derivative formulas; bounded domains keep
# finite-difference stencils inside, and the n >= 3 entries exercise the
# three-distinct-index formula.
DERIV_CORPUS: tuple[tuple[str, tuple[str, ...], Interval], ...] = (
    ("x", ("x", "x^2", "1+x^2"), Interval(0.2, 4)),
    ("ln(x)", ("1", "x"), Interval(0.2, 4)),
    ("ln(x)", ("x^2", "1/x", "exp(x)"), Interval(0.2, 4)),
    ("exp(x)", ("exp(x)", "1+x^2"), SYM),
    ("exp(x)", ("1", "3+x", "exp(-x)", "1+x^2"), SYM),
    ("x^3+x", ("1+x^2", "1"), SYM),
    ("x^3+x", ("x", "sqrt(x)", "2"), Interval(0.2, 4)),
    ("1/x", ("x", "1"), Interval(0.2, 4)),
    ("1/x", ("1", "x^2", "x"), Interval(0.2, 4)),
    ("sqrt(x)", ("exp(x)", "x"), Interval(0.2, 4)),
    ("atan(x)", ("1+x^2", "exp(x)", "3+x"), SYM),
    ("exp(-x)", ("1", "2"), SYM),
)


def deriv_corpus() -> list[MeanSpec]:
    return [spec_of(f, w, dom) for f, w, dom in DERIV_CORPUS]


def interior_points(domain: Interval, k: int) -> list[float]:
    """``k`` evenly spaced points in the middle 80% of a bounded domain."""
    lo, hi = domain.lo, domain.hi
    return [lo + (hi - lo) * (0.1 + 0.8 * t / (k - 1)) for t in range(k)]

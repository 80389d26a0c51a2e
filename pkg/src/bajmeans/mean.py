"""n-variable generalized Bajraktarević means.

``A(x) = f^(-1)( sum p_i(x_i) f(x_i) / sum p_i(x_i) )`` where ``f^(-1)`` is the
generalized left inverse, so discontinuous generators are allowed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import optimize

from .exprcore import (
    CLAMP,
    Direction,
    DomainError,
    Expr,
    Interval,
    MonotoneFn,
    breakpoints_of,
    compile_expr,
    parse,
    to_str,
)
from .geninv import DEFAULT_XTOL, LeftInverse

WEIGHT_GRID = 1024


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class WeightSystem:
    """Positive weight functions ``p_1..p_n`` on a common domain."""

    exprs: tuple[Expr, ...]
    domain: Interval
    grid_size: int = field(default=WEIGHT_GRID, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "exprs", tuple(self.exprs))
        xs = self.domain.grid(self.grid_size, far=CLAMP)
        for k, e in enumerate(self.exprs):
            fn = compile_expr(e)
            for x in xs:
                v = fn(float(x))
                if not v > 0.0:
                    raise SpecError(f"weight p_{k + 1} = {to_str(e)} is not positive at x={float(x)!r} (value {v!r})")

    @property
    def n(self) -> int:
        return len(self.exprs)

    def values(self, x: Sequence[float]) -> list[float]:
        return [compile_expr(e)(float(t)) for e, t in zip(self.exprs, x)]

    def total(self, x: float) -> float:
        """``p_0(x) = p_1(x) + ... + p_n(x)``."""
        return sum(compile_expr(e)(x) for e in self.exprs)


@dataclass(frozen=True)
class MeanSpec:
    generator: MonotoneFn
    weights: WeightSystem
    xtol: float = field(default=DEFAULT_XTOL, compare=False)

    def __post_init__(self):
        if self.weights.domain != self.generator.domain:
            raise SpecError("weights and generator must share the domain")
        if self.weights.n < 2:
            raise SpecError("arity must be at least 2")

    @property
    def n(self) -> int:
        return self.weights.n

    @property
    def domain(self) -> Interval:
        return self.generator.domain

    @property
    def inverse(self) -> LeftInverse:
        li = self.__dict__.get("_inverse")
        if li is None:
            li = LeftInverse.of(self.generator, xtol=self.xtol)
            self.__dict__["_inverse"] = li
        return li

    def with_xtol(self, xtol: float) -> "MeanSpec":
        return MeanSpec(self.generator, self.weights, xtol)

    def __call__(self, x: Sequence[float]) -> float:
        return mean_eval(self, x)


def make_spec(
    f: str | Expr,
    weights: Sequence[str | Expr],
    domain: Interval | tuple[float, float],
    direction: Direction | str | None = None,
) -> MeanSpec:
    """Convenience constructor from expression strings."""
    dom = domain if isinstance(domain, Interval) else Interval(*domain)
    fe = parse(f) if isinstance(f, str) else f
    ws = tuple(parse(w) if isinstance(w, str) else w for w in weights)
    return MeanSpec(MonotoneFn(fe, dom, Direction(direction) if direction else None), WeightSystem(ws, dom))


def _check_input(spec: MeanSpec, x: Sequence[float]) -> list[float]:
    if len(x) != spec.n:
        raise SpecError(f"expected {spec.n} coordinates, got {len(x)}")
    xs = [float(t) for t in x]
    for t in xs:
        if t not in spec.domain:
            raise DomainError(f"coordinate {t!r} outside ({spec.domain.lo}, {spec.domain.hi})")
    return xs


def weighted_ratio(spec: MeanSpec, x: Sequence[float]) -> float:
    """``sum p_i(x_i) f(x_i) / sum p_i(x_i)``."""
    xs = _check_input(spec, x)
    fn = compile_expr(spec.generator.expr)
    ps = spec.weights.values(xs)
    return sum(p * fn(t) for p, t in zip(ps, xs)) / sum(ps)


def mean_eval(spec: MeanSpec, x: Sequence[float]) -> float:
    """Evaluate the mean through the generalized left inverse."""
    xs = _check_input(spec, x)
    a, b = min(xs), max(xs)
    if a == b:
        return a
    fn = compile_expr(spec.generator.expr)
    ps = spec.weights.values(xs)
    fx = [fn(t) for t in xs]
    r = sum(p * v for p, v in zip(ps, fx)) / sum(ps)
    # r is a convex combination; clipping only removes rounding
    r = min(max(r, min(fx)), max(fx))
    return spec.inverse(r, bracket=(a, b))


def phi(spec: MeanSpec, x: Sequence[float], z: float) -> float:
    """``sum p_i(x_i) (f(z) - f(x_i))``."""
    fn = compile_expr(spec.generator.expr)
    fz = fn(z)
    return sum(p * (fz - fn(t)) for p, t in zip(spec.weights.values(x), x))


def sign_change_certify(spec: MeanSpec, x: Sequence[float], y: float, probe_count: int = 100) -> bool:
    """Probe both sides of ``y`` for the sign pattern that characterizes the mean.

    ``phi(z)`` must be negative below ``y`` and positive above (reversed for
    a decreasing generator).  Probes sit at geometrically spread distances
    from ``1e-7*max(1,|y|)`` up to the clamped domain edge.
    """
    xs = _check_input(spec, x)
    lo_c, hi_c = spec.domain.clamped()
    s = spec.generator.direction.sign
    dmin = 1e-7 * max(1.0, abs(y))
    for edge, side in ((lo_c, -1.0), (hi_c, 1.0)):
        reach = abs(y - edge)
        if reach <= dmin:
            continue
        for d in np.geomspace(dmin, reach, probe_count):
            z = y + side * float(d)
            if z not in spec.domain:
                continue
            if not s * side * phi(spec, xs, z) > 0.0:
                return False
    return True


def root_solve(spec: MeanSpec, x: Sequence[float], xtol: float = 1e-12) -> float:
    """Solve ``sum p_i(x_i)(f(y) - f(x_i)) = 0`` on ``[min x, max x]``.

    Independent of the left-inverse path; requires a generator without
    breakpoints inside the bracket.
    """
    xs = _check_input(spec, x)
    a, b = min(xs), max(xs)
    if a == b:
        return a
    if any(a < c < b for c in breakpoints_of(spec.generator.expr)):
        raise DomainError("generator has a breakpoint inside the bracket")
    fa, fb = phi(spec, xs, a), phi(spec, xs, b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    root, info = optimize.bisect(lambda z: phi(spec, xs, z), a, b, xtol=xtol, rtol=4 * np.finfo(float).eps,
                                 maxiter=400, full_output=True, disp=False)
    if not info.converged:
        raise RuntimeError(f"root_solve did not converge: {info.flag}")
    return root


# --------------------------------------------------------------------------
# JSON spec files


def spec_to_json(spec: MeanSpec) -> dict:
    return {
        "n": spec.n,
        "domain": spec.domain.to_json(),
        "f": to_str(spec.generator.expr),
        "direction": "inc" if spec.generator.direction is Direction.INCREASING else "dec",
        "p": [to_str(e) for e in spec.weights.exprs],
    }


def _direction(v) -> Direction | None:
    if v is None:
        return None
    table = {"inc": Direction.INCREASING, "dec": Direction.DECREASING,
             "increasing": Direction.INCREASING, "decreasing": Direction.DECREASING}
    if v not in table:
        raise SpecError(f"direction must be 'inc' or 'dec', got {v!r}")
    return table[v]


def generator_from_json(data: dict) -> MonotoneFn:
    try:
        dom = Interval.from_json(data["domain"])
        return MonotoneFn(parse(data["f"]), dom, _direction(data.get("direction")))
    except KeyError as exc:
        raise SpecError(f"missing field {exc.args[0]!r}") from None


def spec_from_json(data: dict) -> MeanSpec:
    gen = generator_from_json(data)
    if "p" not in data:
        raise SpecError("missing field 'p'")
    ws = WeightSystem(tuple(parse(s) for s in data["p"]), gen.domain)
    if "n" in data and int(data["n"]) != ws.n:
        raise SpecError(f"n={data['n']} but {ws.n} weights given")
    return MeanSpec(gen, ws)


def load_spec(path: str | Path) -> MeanSpec:
    return spec_from_json(json.loads(Path(path).read_text()))


def dump_spec(spec: MeanSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(spec_to_json(spec), indent=2) + "\n")



"""Equality of generalized Bajraktarević means.

Sufficient direction: a Möbius transform ``g = (af+b)/(cf+d)``,
``q_i = (cf+d) p_i`` with ``cf+d > 0`` leaves the mean unchanged.

Necessary direction, as a numerical pipeline (``decide_equality``):

1. weight ratios ``q_i/q_0 = p_i/p_0``;
2. ``gamma = q_i^2 g' / (p_i^2 f')`` is constant;
3. Schwarzians of ``f`` and ``g`` agree;
4. a Möbius map carrying ``f`` to ``g`` is recovered from three samples;
5. the map is rescaled by ``sqrt(gamma / (ad - bc))`` and checked against
   ``g`` and every ``q_l``;
6. both means are compared directly on random off-diagonal inputs.

Every check reports a residual which is classified into a pass band, a
fail band, or the ambiguous region between them.

The symmetric two-variable case has extra, non-Möbius solutions built from
quadratic polynomials ``P``, ``Q``; ``exceptional_construct`` produces them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exprcore import (
    CLAMP,
    DomainError,
    Expr,
    Interval,
    Inverse,
    MonotoneFn,
    Pow,
    Unary,
    X,
    add,
    affine,
    compile_expr,
    const,
    div,
    mul,
    substitute,
    to_str,
)
from .geninv import hull_range
from .jets import VanishingDerivative, jet_eval, schwarzian
from .mean import MeanSpec, WeightSystem, mean_eval

TOL_PASS = 1e-7
TOL_FAIL = 1e-4


class MobiusError(ValueError):
    pass


@dataclass(frozen=True)
class MobiusParams:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for k in "abcd":
            object.__setattr__(self, k, float(getattr(self, k)))
        big = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        if not abs(self.det) > 1e-12 * big * big:
            raise MobiusError(f"degenerate Möbius parameters {self.as_tuple()} (ad - bc = {self.det!r})")

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def denom(self, t):
        return self.c * t + self.d

    def apply(self, t):
        return (self.a * t + self.b) / (self.c * t + self.d)

    def scaled(self, lam: float) -> "MobiusParams":
        return MobiusParams(lam * self.a, lam * self.b, lam * self.c, lam * self.d)

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}


# --------------------------------------------------------------------------
# Canonical transform


def mobius_transform(
    f: MonotoneFn, p: WeightSystem, m: MobiusParams, grid_size: int = 1024
) -> tuple[MonotoneFn, WeightSystem]:
    """``g = (af+b)/(cf+d)`` and ``q_i = (cf+d) p_i`` as composed expressions."""
    fn = compile_expr(f.expr)
    for x in f.domain.grid(grid_size, far=CLAMP):
        den = m.denom(fn(float(x)))
        if not den > 0.0:
            raise MobiusError(f"cf+d = {den!r} is not positive at x={float(x)!r}")
    den_expr = affine(m.c, f.expr, m.d)
    g_expr = div(affine(m.a, f.expr, m.b), den_expr)
    direction = f.direction if m.det > 0 else f.direction.flipped()
    g = MonotoneFn(g_expr, f.domain, direction)
    q = WeightSystem(tuple(mul(den_expr, e) for e in p.exprs), p.domain)
    return g, q


def transform_spec(spec: MeanSpec, m: MobiusParams) -> MeanSpec:
    g, q = mobius_transform(spec.generator, spec.weights, m)
    return MeanSpec(g, q)


# --------------------------------------------------------------------------
# Grid checks


@dataclass
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "ambiguous"
    residual: float
    point: dict = field(default_factory=dict)
    value: float | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def classify(residual: float, tol: float = TOL_PASS, fail_tol: float = TOL_FAIL) -> str:
    if residual <= tol:
        return "pass"
    if residual >= fail_tol or not math.isfinite(residual):
        return "fail"
    return "ambiguous"


def _weights_at(spec: MeanSpec, x: float) -> list[float]:
    return [compile_expr(e)(x) for e in spec.weights.exprs]


def _same_shape(a: MeanSpec, b: MeanSpec):
    if a.n != b.n:
        raise ValueError(f"arity mismatch: {a.n} vs {b.n}")
    if a.domain != b.domain:
        raise ValueError("specs must share the domain")


def ratio_residual(a: MeanSpec, b: MeanSpec, x: float, i: int) -> float:
    p, q = _weights_at(a, x), _weights_at(b, x)
    return abs(q[i] / sum(q) - p[i] / sum(p))


def check_ratio_condition(
    a: MeanSpec, b: MeanSpec, grid: Sequence[float], tol: float = TOL_PASS, fail_tol: float = TOL_FAIL
) -> CheckResult:
    """Max over grid and index of ``|q_i/q_0 - p_i/p_0|``."""
    _same_shape(a, b)
    worst, where = -1.0, {}
    for x in grid:
        x = float(x)
        for i in range(a.n):
            r = ratio_residual(a, b, x, i)
            if r > worst:
                worst, where = r, {"x": x, "i": i}
    return CheckResult("ratio", classify(worst, tol, fail_tol), worst, where)


def gamma_at(a: MeanSpec, b: MeanSpec, x: float, i: int) -> float:
    """``q_i^2 g' / (p_i^2 f')`` at ``x``."""
    fj = jet_eval(a.generator.expr, x)
    gj = jet_eval(b.generator.expr, x)
    if abs(fj.d1) <= 1e-12 or abs(gj.d1) <= 1e-12:
        raise VanishingDerivative(f"vanishing generator derivative at {x!r}")
    p, q = _weights_at(a, x)[i], _weights_at(b, x)[i]
    return q * q * gj.d1 / (p * p * fj.d1)


def check_gamma_condition(
    a: MeanSpec, b: MeanSpec, grid: Sequence[float], tol: float = TOL_PASS, fail_tol: float = TOL_FAIL
) -> CheckResult:
    """Constancy of ``gamma`` over the grid; the median is returned as ``value``."""
    _same_shape(a, b)
    vals = [(gamma_at(a, b, float(x), i), float(x), i) for x in grid for i in range(a.n)]
    gs = np.array([v[0] for v in vals])
    med = float(np.median(gs))
    dev = np.abs(gs - med) / (1.0 + abs(med))
    k = int(np.argmax(dev))
    worst = float(dev[k])
    point = {"x": vals[k][1], "i": vals[k][2], "gamma_x": vals[k][0], "gamma": med}
    return CheckResult("gamma", classify(worst, tol, fail_tol), worst, point, med)


def _expr(f) -> Expr:
    return f.expr if isinstance(f, MonotoneFn) else f


def schwarzian_equal(
    f, g, grid: Sequence[float], tol: float = TOL_PASS, fail_tol: float = TOL_FAIL
) -> CheckResult:
    """``max |S(f) - S(g)|`` over the grid, relative to ``1 + max |S(f)|``."""
    fe, ge = _expr(f), _expr(g)
    sf = np.array([schwarzian(fe, float(x)) for x in grid])
    sg = np.array([schwarzian(ge, float(x)) for x in grid])
    scale = 1.0 + float(np.max(np.abs(sf)))
    diff = np.abs(sf - sg) / scale
    k = int(np.argmax(diff))
    worst = float(diff[k])
    return CheckResult("schwarzian", classify(worst, tol, fail_tol), worst, {"x": float(grid[k]), "scale": scale})


# --------------------------------------------------------------------------
# Möbius recovery


class MobiusRecoveryError(ValueError):
    def __init__(self, message: str, residual: float = math.inf, point: dict | None = None):
        super().__init__(message)
        self.residual = residual
        self.point = point or {}


def mobius_residual(f, g, m: MobiusParams, x: float) -> float:
    fv, gv = compile_expr(_expr(f))(x), compile_expr(_expr(g))(x)
    return abs(gv - m.apply(fv)) / (1.0 + abs(gv))


def recover_mobius(
    f: MonotoneFn,
    g: MonotoneFn,
    sample_points: Sequence[float] | None = None,
    validation_grid: Sequence[float] | None = None,
    tol: float = TOL_PASS,
    far: float = 10.0,
    seed: int = 42,
    retries: int = 5,
) -> MobiusParams:
    """Fit ``g = (af+b)/(cf+d)`` through three samples and validate on a grid.

    The null vector of the 3x4 system ``a f + b - g (c f + d) = 0`` is scaled
    so that its largest entry is 1, then its sign is flipped if needed to
    make ``cf+d`` positive on the validation grid.
    """
    fe, ge = _expr(f), _expr(g)
    ff, gf = compile_expr(fe), compile_expr(ge)
    dom = f.domain
    if validation_grid is None:
        validation_grid = dom.grid(64, far=far)
    rng = np.random.default_rng(seed)
    pts = list(sample_points) if sample_points is not None else [float(t) for t in dom.from_unit(np.array([0.25, 0.5, 0.75]), far=far)]
    for attempt in range(retries + 1):
        if len(set(pts)) != 3:
            raise MobiusRecoveryError("need three distinct sample points")
        rows = []
        for t in pts:
            fv, gv = ff(t), gf(t)
            rows.append([fv, 1.0, -gv * fv, -gv])
        M = np.array(rows)
        M /= np.linalg.norm(M, axis=1, keepdims=True)
        _, s, vt = np.linalg.svd(M)
        if s[2] > 1e-10 * s[0]:
            break
        pts = [float(t) for t in dom.from_unit(np.sort(rng.uniform(0.05, 0.95, 3)), far=far)]
    else:
        raise MobiusRecoveryError("sample rows stay rank deficient after resampling")
    v = vt[-1]
    v = v / v[int(np.argmax(np.abs(v)))]
    fvals = np.array([ff(float(x)) for x in validation_grid])
    den = v[2] * fvals + v[3]
    if np.all(den < 0):
        v = -v
        den = -den
    if not np.all(den > 0):
        k = int(np.argmin(np.abs(den)))
        raise MobiusRecoveryError("cf+d changes sign on the validation grid", math.inf,
                                  {"x": float(validation_grid[k])})
    try:
        m = MobiusParams(*v)
    except MobiusError as exc:
        raise MobiusRecoveryError(str(exc)) from None
    res = [mobius_residual(fe, ge, m, float(x)) for x in validation_grid]
    k = int(np.argmax(res))
    if res[k] > tol:
        raise MobiusRecoveryError(
            f"recovered map misses g by {res[k]:.3g} at x={float(validation_grid[k])!r}",
            res[k], {"x": float(validation_grid[k]), "witness": m.to_json()},
        )
    return m


def rescale_witness(m: MobiusParams, gamma: float, f_sample: float) -> MobiusParams:
    """Scale by ``sqrt(gamma / (ad - bc))``, oriented so that ``cf+d > 0``."""
    ratio = gamma / m.det
    if not ratio > 0.0:
        raise MobiusError(f"gamma/(ad-bc) = {ratio!r} is not positive")
    w = m.scaled(math.sqrt(ratio))
    if w.denom(f_sample) < 0:
        w = w.scaled(-1.0)
    return w


def witness_residuals(a: MeanSpec, b: MeanSpec, w: MobiusParams, grid: Sequence[float]) -> dict:
    """Residuals of ``g = (af+b)/(cf+d)`` and ``q_l = (cf+d) p_l`` on the grid."""
    ff = compile_expr(a.generator.expr)
    g_worst, g_pt = 0.0, None
    q_worst, q_abs, q_pt = 0.0, 0.0, None
    for x in grid:
        x = float(x)
        r = mobius_residual(a.generator, b.generator, w, x)
        if r > g_worst or g_pt is None:
            g_worst, g_pt = r, x
        den = w.denom(ff(x))
        for l, (p, q) in enumerate(zip(_weights_at(a, x), _weights_at(b, x))):
            ab = abs(q - den * p)
            rel = ab / (1.0 + abs(q))
            q_abs = max(q_abs, ab)
            if rel > q_worst or q_pt is None:
                q_worst, q_pt = rel, (x, l)
    return {"g": g_worst, "g_x": g_pt, "q": q_worst, "q_abs": q_abs, "q_x": q_pt[0], "q_index": q_pt[1]}


def compare_means(a: MeanSpec, b: MeanSpec, samples: int = 10, far: float = 10.0, seed: int = 42) -> CheckResult:
    """Direct comparison on random off-diagonal inputs."""
    rng = np.random.default_rng(seed)
    pts = a.domain.from_unit(rng.uniform(0.0, 1.0, (samples, a.n)), far=far)
    worst, where = -1.0, None
    for row in pts:
        x = [float(t) for t in row]
        r = abs(mean_eval(a, x) - mean_eval(b, x))
        if r > worst:
            worst, where = r, x
    return CheckResult("means", classify(worst), worst, {"x": where})


# --------------------------------------------------------------------------
# Decision procedure


@dataclass(frozen=True)
class DecisionConfig:
    grid: int = 64
    tol: float = TOL_PASS
    fail_tol: float = TOL_FAIL
    far: float = 10.0
    samples: int = 10
    seed: int = 42


@dataclass
class Equal:
    witness: MobiusParams
    residuals: dict
    status: str = "Equal"

    def to_json(self) -> dict:
        return {"status": self.status, "witness": self.witness.to_json(), "residuals": self.residuals}


@dataclass
class NotEqual:
    failed_check: str
    counterexample: dict
    residual: float
    residuals: dict
    status: str = "NotEqual"

    def to_json(self) -> dict:
        return {"status": self.status, "failed_check": self.failed_check,
                "counterexample": self.counterexample, "residual": self.residual, "residuals": self.residuals}


@dataclass
class Inconclusive:
    reason: str
    residuals: dict
    status: str = "Inconclusive"

    def to_json(self) -> dict:
        return {"status": self.status, "reason": self.reason, "residuals": self.residuals}


EqualityVerdict = Equal | NotEqual | Inconclusive


def _symmetric_pair(a: MeanSpec, b: MeanSpec, grid) -> bool:
    if a.n != 2:
        return False
    for x in grid:
        p, q = _weights_at(a, float(x)), _weights_at(b, float(x))
        if abs(p[0] - p[1]) > 1e-12 * (1 + abs(p[0])) or abs(q[0] - q[1]) > 1e-12 * (1 + abs(q[0])):
            return False
    return True


def decide_equality(a: MeanSpec, b: MeanSpec, config: DecisionConfig = DecisionConfig()) -> EqualityVerdict:
    """Decide ``A_{f,p} == A_{g,q}`` on the common domain."""
    _same_shape(a, b)
    cfg = config
    grid = a.domain.grid(cfg.grid, far=cfg.far)
    residuals: dict = {}
    symmetric = _symmetric_pair(a, b, grid)

    def stop(r: CheckResult) -> EqualityVerdict:
        if r.status == "ambiguous":
            return Inconclusive(f"{r.name} residual {r.residual:.3g} lies between the pass and fail bands", residuals)
        if symmetric and r.name in ("schwarzian", "mobius_recovery", "witness"):
            direct = compare_means(a, b, cfg.samples, cfg.far, cfg.seed)
            residuals["means"] = direct.residual
            if direct.passed:
                return Inconclusive(
                    f"symmetric two-variable pair: {r.name} check fails but the means agree on samples; "
                    "the pair may be a non-Möbius exceptional solution", residuals)
        return NotEqual(r.name, r.point, r.residual, residuals)

    try:
        r = check_ratio_condition(a, b, grid, cfg.tol, cfg.fail_tol)
        residuals["ratio"] = r.residual
        if not r.passed:
            return stop(r)
        r = check_gamma_condition(a, b, grid, cfg.tol, cfg.fail_tol)
        residuals["gamma"] = r.residual
        residuals["gamma_value"] = r.value
        if not r.passed:
            return stop(r)
        gamma = r.value
        r = schwarzian_equal(a.generator, b.generator, grid, cfg.tol, cfg.fail_tol)
        residuals["schwarzian"] = r.residual
        if not r.passed:
            return stop(r)
        try:
            m = recover_mobius(a.generator, b.generator, validation_grid=grid, tol=cfg.tol, far=cfg.far, seed=cfg.seed)
        except MobiusRecoveryError as exc:
            residuals["mobius_recovery"] = exc.residual
            return stop(CheckResult("mobius_recovery", classify(exc.residual, cfg.tol, cfg.fail_tol),
                                    exc.residual, exc.point))
        residuals["mobius_recovery"] = max(mobius_residual(a.generator, b.generator, m, float(x)) for x in grid)
        try:
            w = rescale_witness(m, gamma, compile_expr(a.generator.expr)(float(grid[0])))
        except MobiusError as exc:
            return Inconclusive(f"internal inconsistency: {exc}", residuals)
        wr = witness_residuals(a, b, w, grid)
        residuals["witness_g"], residuals["witness_q"], residuals["witness_q_abs"] = wr["g"], wr["q"], wr["q_abs"]
        worst = max(wr["g"], wr["q"])
        if worst > cfg.tol:
            part = "g" if wr["g"] >= wr["q"] else "q"
            pt = {"x": wr["g_x"], "part": "g"} if part == "g" else {"x": wr["q_x"], "index": wr["q_index"], "part": "q"}
            pt["witness"] = w.to_json()
            return stop(CheckResult("witness", classify(worst, cfg.tol, cfg.fail_tol), worst, pt))
        r = compare_means(a, b, cfg.samples, cfg.far, cfg.seed)
        residuals["means"] = r.residual
        if not r.passed:
            return stop(r)
    except (DomainError, VanishingDerivative) as exc:
        return Inconclusive(f"evaluation failed: {exc}", residuals)
    return Equal(w, residuals)


def recheck(verdict: NotEqual, a: MeanSpec, b: MeanSpec) -> float:
    """Recompute the failed check's residual at the reported counterexample."""
    pt = verdict.counterexample
    name = verdict.failed_check
    if name == "ratio":
        return ratio_residual(a, b, pt["x"], pt["i"])
    if name == "gamma":
        # deviation from the reported grid median
        g0 = pt["gamma"]
        return abs(gamma_at(a, b, pt["x"], pt["i"]) - g0) / (1.0 + abs(g0))
    if name == "schwarzian":
        x = pt["x"]
        return abs(schwarzian(a.generator.expr, x) - schwarzian(b.generator.expr, x)) / pt["scale"]
    if name == "mobius_recovery":
        return mobius_residual(a.generator, b.generator, MobiusParams(**pt["witness"]), pt["x"])
    if name == "witness":
        w = MobiusParams(**pt["witness"])
        x = pt["x"]
        if pt["part"] == "g":
            return mobius_residual(a.generator, b.generator, w, x)
        l = pt["index"]
        p, q = _weights_at(a, x)[l], _weights_at(b, x)[l]
        return abs(q - w.denom(compile_expr(a.generator.expr)(x)) * p) / (1.0 + abs(q))
    if name == "means":
        return abs(mean_eval(a, pt["x"]) - mean_eval(b, pt["x"]))
    raise ValueError(f"unknown check {name!r}")


# --------------------------------------------------------------------------
# Weight recovery from the generators


def recover_weight(
    f: MonotoneFn,
    g: MonotoneFn,
    p: WeightSystem,
    anchor: float,
    q_rest: float,
    i: int,
    grid: Sequence[float],
    min_gap: float = 1e-14,
) -> np.ndarray:
    """Reconstruct ``q_i`` on ``grid`` from ``f``, ``g``, ``p`` and the single
    number ``q_rest = q_0(anchor) - q_i(anchor)``.

    Uses ``q_i(y) = q_rest * (h - g(x)) / (g(y) - h)`` with ``x = anchor``,
    ``h = g(f^(-1)(r))`` and ``r`` the ratio obtained by moving coordinate
    ``i`` of the diagonal point to ``y``.
    """
    from .geninv import LeftInverse

    finv = LeftInverse.of(f, xtol=0.0)
    ff, gf = compile_expr(f.expr), compile_expr(g.expr)
    pw = [compile_expr(e) for e in p.exprs]
    x = float(anchor)
    p0x = sum(w(x) for w in pw)
    pix = pw[i](x)
    fx, gx = ff(x), gf(x)
    out = []
    for y in grid:
        y = float(y)
        piy = pw[i](y)
        r = ((p0x - pix) * fx + piy * ff(y)) / (p0x - pix + piy)
        lo, hi = min(x, y), max(x, y)
        h = gf(finv(r, bracket=(lo, hi)))
        den = gf(y) - h
        if abs(den) <= min_gap * (1.0 + abs(gf(y))):
            raise DomainError(f"y={y!r} is too close to the anchor {x!r}")
        out.append(q_rest * (h - gx) / den)
    return np.array(out)


# --------------------------------------------------------------------------
# Exceptional symmetric two-variable solutions


@dataclass(frozen=True)
class QuadPoly:
    c0: float
    c1: float = 0.0
    c2: float = 0.0

    @property
    def degree(self) -> int:
        return 2 if self.c2 != 0.0 else (1 if self.c1 != 0.0 else 0)

    @property
    def discriminant(self) -> float:
        return self.c1 * self.c1 - 4.0 * self.c2 * self.c0

    def expr(self) -> Expr:
        e = const(self.c0)
        if self.c1:
            e = affine(self.c1, X, self.c0)
        if self.c2:
            e = add(mul(const(self.c2), Pow(X, 2.0)), e)
        return e

    def __call__(self, t):
        return self.c0 + self.c1 * t + self.c2 * t * t

    def roots(self) -> list[float]:
        if self.degree == 2:
            disc = self.discriminant
            if disc < 0:
                return []
            s = math.sqrt(disc)
            return sorted([(-self.c1 - s) / (2 * self.c2), (-self.c1 + s) / (2 * self.c2)])
        if self.degree == 1:
            return [-self.c0 / self.c1]
        return []

    def positive_on(self, interval: Interval, grid_size: int = 1024) -> bool:
        lo, hi = interval.clamped()
        if any(lo <= r <= hi for r in self.roots()):
            return False
        ts = interval.grid(grid_size)
        return bool(np.all(self(ts) > 0)) and self(lo) > 0 and self(hi) > 0

    def positivity_domain(self) -> Interval:
        """The unique maximal open interval where the polynomial is positive."""
        deg, rs = self.degree, self.roots()
        if deg == 0:
            if self.c0 > 0:
                return Interval(-math.inf, math.inf)
        elif deg == 1:
            return Interval(rs[0], math.inf) if self.c1 > 0 else Interval(-math.inf, rs[0])
        elif not rs:
            if self.c2 > 0:
                return Interval(-math.inf, math.inf)
        elif self.c2 < 0 and rs[0] < rs[1]:
            return Interval(rs[0], rs[1])
        raise ValueError(f"{self} has no unique positivity interval; pass it explicitly")


def primitive_of_reciprocal(P: QuadPoly, interval: Interval) -> Expr:
    """Closed form of a primitive of ``1/P`` on ``interval`` (``P > 0`` there)."""
    if not P.positive_on(interval):
        raise ValueError(f"P is not positive on ({interval.lo}, {interval.hi})")
    c0, c1, c2 = P.c0, P.c1, P.c2
    if P.degree == 0:
        return mul(const(1.0 / c0), X)
    if P.degree == 1:
        return mul(const(1.0 / c1), Unary("ln", affine(c1, X, c0)))
    disc = P.discriminant
    if disc < 0:
        k = math.sqrt(-disc)
        return mul(const(2.0 / k), Unary("atan", affine(2.0 * c2 / k, X, c1 / k)))
    if disc == 0:
        return div(const(-2.0), affine(2.0 * c2, X, c1))
    r1, r2 = P.roots()
    mid = 0.5 * sum(interval.clamped())
    sgn = 1.0 if (mid - r2) / (mid - r1) > 0 else -1.0
    ratio = div(affine(sgn, X, -sgn * r2), affine(1.0, X, -r1))
    return mul(const(1.0 / (c2 * (r2 - r1))), Unary("ln", ratio))


def _inv_sqrt_of(P: QuadPoly, inner: Expr) -> Expr:
    if P.degree == 0:
        return const(P.c0**-0.5)
    return Pow(substitute(P.expr(), inner), -0.5)


class ConstructionError(ValueError):
    pass


@dataclass
class ExceptionalPair:
    g: MonotoneFn
    p: Expr
    q: Expr
    spec_f: MeanSpec
    spec_g: MeanSpec
    discrepancy: float


def exceptional_construct(
    f: MonotoneFn,
    P: QuadPoly,
    Q: QuadPoly,
    alpha: float,
    beta: float,
    g_domain: Interval | None = None,
    check_grid: int = 20,
    tol: float = 1e-8,
    far: float = 10.0,
) -> ExceptionalPair:
    """Build ``g = G^(-1)(alpha F(f) + beta)``, ``p = P^(-1/2)(f)``, ``q = Q^(-1/2)(g)``
    with ``F``, ``G`` primitives of ``1/P``, ``1/Q``, and verify that the
    symmetric two-variable means of ``(f, (p, p))`` and ``(g, (q, q))`` agree."""
    if alpha == 0.0:
        raise ConstructionError("alpha must be nonzero")
    f_range = hull_range(f)
    if not P.positive_on(f_range):
        raise ConstructionError("P is not positive on f(I)")
    F = primitive_of_reciprocal(P, f_range)
    u = affine(alpha, substitute(F, f.expr), beta)
    gdom = g_domain or Q.positivity_domain()
    G = primitive_of_reciprocal(Q, gdom)
    if Q.degree == 0:
        g_expr = affine(Q.c0, u, 0.0)
    else:
        G_range = hull_range(MonotoneFn(G, gdom))
        uf = compile_expr(u)
        for x in f.domain.grid(256, far=CLAMP):
            uv = uf(float(x))
            if not G_range.lo < uv < G_range.hi:
                raise ConstructionError(f"alpha*F(f)+beta = {uv!r} escapes the range of G at x={float(x)!r}")
        g_expr = Inverse(G, gdom.lo, gdom.hi, u)
    direction = f.direction if alpha > 0 else f.direction.flipped()
    g = MonotoneFn(g_expr, f.domain, direction)
    p = _inv_sqrt_of(P, f.expr)
    q = _inv_sqrt_of(Q, g_expr)
    spec_f = MeanSpec(f, WeightSystem((p, p), f.domain))
    spec_g = MeanSpec(g, WeightSystem((q, q), f.domain))
    xs = f.domain.grid(check_grid, far=far)
    worst = 0.0
    for s in xs:
        for t in xs:
            if s != t:
                worst = max(worst, abs(mean_eval(spec_f, [s, t]) - mean_eval(spec_g, [s, t])))
    if worst > tol:
        raise ConstructionError(f"means differ by {worst:.3g} on the check grid")
    return ExceptionalPair(g, p, q, spec_f, spec_g, worst)


def describe(pair: ExceptionalPair) -> dict:
    return {"g": to_str(pair.g.expr), "p": to_str(pair.p), "q": to_str(pair.q),
            "discrepancy": pair.discrepancy}


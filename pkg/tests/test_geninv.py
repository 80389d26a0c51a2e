import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bajmeans.exprcore import DomainError, Interval, MonotoneFn, parse
from bajmeans.geninv import (
    DEFAULT_XTOL,
    LeftInverse,
    hull_range,
    is_jump_point,
    one_sided_limits,
    smf3_at,
    verify_smf,
)

JUMP = MonotoneFn(parse("piecewise(x<0: x; x>=0: x+1)"), Interval(-1, 1))
TWO_JUMPS = MonotoneFn(parse("piecewise(x<0: x; x<1: x+1; x>=1: x+3)"), Interval(-1, 2))


def fn(text, lo, hi):
    return MonotoneFn(parse(text), Interval(lo, hi))


class TestLeftInverse:
    def test_identity(self):
        g = LeftInverse.of(fn("x", 0, 1))
        assert g(0.37) == pytest.approx(0.37, abs=DEFAULT_XTOL)

    def test_ln(self):
        g = LeftInverse.of(fn("ln(x)", 0, math.inf))
        assert g(0.0) == pytest.approx(1.0, abs=1e-11)
        assert g(2.0) == pytest.approx(math.exp(2.0), rel=1e-12)

    def test_decreasing(self):
        g = LeftInverse.of(fn("1/x", 0, math.inf))
        assert g(4.0) == pytest.approx(0.25, abs=1e-12)

    def test_full_precision(self):
        g = LeftInverse.of(fn("x^3+x", -2, 2), xtol=0.0)
        y = g(2.0)
        assert abs(y - 1.0) <= 2 * np.finfo(float).eps

    def test_jump_gap_maps_to_jump_point(self):
        g = LeftInverse.of(JUMP)
        for y in (0.0, 0.25, 0.5, 0.999):
            assert abs(g(y)) <= 1e-10

    def test_outside_hull(self):
        g = LeftInverse.of(fn("x", 0, 1))
        with pytest.raises(DomainError):
            g(1.5)

    def test_hull(self):
        h = hull_range(JUMP)
        assert h.lo == pytest.approx(-1.0, abs=1e-8) and h.hi == pytest.approx(2.0, abs=1e-8)


class TestJumpDiagnostics:
    def test_one_sided_limits(self):
        a, b = one_sided_limits(JUMP, 0.0)
        assert a == pytest.approx(0.0, abs=1e-8) and b == pytest.approx(1.0, abs=1e-8)

    def test_is_jump_point(self):
        assert is_jump_point(JUMP, 0.0)
        assert not is_jump_point(JUMP, 0.5)

    def test_smf3_in_gap(self):
        lower, upper, ok = smf3_at(JUMP, LeftInverse.of(JUMP), 0.5)
        assert ok and lower <= 0.5 <= upper


class TestVerifySmf:
    def test_identity_all_pass(self):
        f = fn("x", 0, 1)
        r = verify_smf(f, LeftInverse.of(f))
        assert r.all_pass
        assert r.smf1_residual <= 2 * DEFAULT_XTOL

    def test_exp(self):
        f = fn("exp(x)", -1, 1)
        r = verify_smf(f, LeftInverse.of(f))
        assert r.all_pass and r.smf1_residual <= 1e-10 and r.smf2_residual <= 1e-10

    @pytest.mark.parametrize("f", [JUMP, TWO_JUMPS], ids=["one-jump", "two-jumps"])
    def test_jump_generators(self, f):
        r = verify_smf(f, LeftInverse.of(f))
        assert r.all_pass
        assert r.smf3_checked > 0

    def test_report_json(self):
        r = verify_smf(JUMP, LeftInverse.of(JUMP))
        d = r.to_json()
        assert d["all_pass"] is True and isinstance(d["smf1"]["pass"], bool)


GENERATORS = [
    fn("x", 0, 1),
    fn("exp(x)", -1, 1),
    fn("ln(x)", 0, math.inf),
    fn("-x^3-x", -2, 2),
    JUMP,
    TWO_JUMPS,
]


class TestProperties:
    @given(st.sampled_from(GENERATORS), st.floats(min_value=0.0, max_value=1.0))
    def test_smf1(self, f, u):
        x = float(f.domain.from_unit(min(max(u, 1e-3), 1 - 1e-3), far=1e3))
        g = LeftInverse.of(f)
        assert abs(g(f(x)) - x) <= 2 * g.xtol + 8 * np.finfo(float).eps * abs(x)

    @given(st.sampled_from(GENERATORS))
    def test_monotone_same_sense(self, f):
        g = LeftInverse.of(f)
        h = g.range_hull
        ys = np.linspace(h.lo, h.hi, 200)[1:-1]
        xs = np.array([g(float(y)) for y in ys])
        steps = np.diff(xs) * f.direction.sign
        assert np.all(steps >= -2 * g.xtol)

    @pytest.mark.parametrize("f", [GENERATORS[0], GENERATORS[1], GENERATORS[3], JUMP], ids=["id", "exp", "cubic", "jump"])
    def test_continuity_proxy(self, f):
        # max jump of g over a y-grid shrinks under refinement
        g = LeftInverse.of(f)
        h = g.range_hull
        maxima = []
        for n in (50, 100, 200):
            ys = np.linspace(h.lo, h.hi, n + 2)[1:-1]
            xs = [g(float(y)) for y in ys]
            maxima.append(max(abs(b - a) for a, b in zip(xs, xs[1:])))
        assert maxima[0] >= maxima[1] >= maxima[2]

    @given(st.floats(min_value=1e-6, max_value=1 - 1e-6))
    def test_flat_on_gap(self, y):
        assert abs(LeftInverse.of(JUMP)(y)) <= 1e-10

    @given(st.floats(min_value=1e-6, max_value=1.0 - 1e-6), st.floats(min_value=2.0 + 1e-6, max_value=4.0 - 1e-6))
    def test_flat_on_both_gaps(self, y1, y2):
        g = LeftInverse.of(TWO_JUMPS)
        assert abs(g(y1) - 0.0) <= 1e-10
        assert abs(g(y2) - 1.0) <= 1e-10

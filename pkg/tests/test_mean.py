import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bajmeans import corpus
from bajmeans.exprcore import DomainError, Interval, MonotoneFn, MonotonicityError, Unary, parse
from bajmeans.mean import (
    MeanSpec,
    SpecError,
    WeightSystem,
    dump_spec,
    load_spec,
    make_spec,
    mean_eval,
    phi,
    root_solve,
    sign_change_certify,
    spec_from_json,
    spec_to_json,
    weighted_ratio,
)

ARITH = make_spec("x", ["1", "1"], (0, math.inf))
GEO = make_spec("ln(x)", ["1", "1"], (0, math.inf))
LIN_WEIGHTED = make_spec("x", ["x", "1"], (0, math.inf))
JUMP_SPEC = make_spec(corpus.JUMP, ["1", "2"], (-1, 1))

seeds = st.integers(0, 2**32 - 1)


class TestWeightSystem:
    def test_positivity_violation(self):
        with pytest.raises(SpecError, match="not positive"):
            WeightSystem((parse("x"),), Interval(-1, 1))

    def test_total(self):
        w = WeightSystem((parse("x"), parse("1")), Interval(0, 2))
        assert w.total(0.5) == 1.5

    def test_arity_at_least_two(self):
        with pytest.raises(SpecError):
            make_spec("x", ["1"], (0, 1))

    def test_domain_mismatch(self):
        with pytest.raises(SpecError):
            MeanSpec(MonotoneFn(parse("x"), Interval(0, 1)), WeightSystem((parse("1"), parse("1")), Interval(0, 2)))


class TestExamples:
    def test_ratio_arith(self):
        assert weighted_ratio(ARITH, [1, 3]) == 2.0

    def test_ratio_weighted(self):
        assert weighted_ratio(LIN_WEIGHTED, [2, 1]) == pytest.approx(5 / 3, rel=1e-15)

    def test_mean_arith(self):
        assert mean_eval(ARITH, [1, 3]) == pytest.approx(2.0, abs=1e-12)

    def test_mean_geo(self):
        assert mean_eval(GEO, [1, 4]) == pytest.approx(2.0, abs=1e-12)

    def test_mean_weighted(self):
        assert mean_eval(LIN_WEIGHTED, [2, 1]) == pytest.approx(5 / 3, abs=1e-12)

    @pytest.mark.parametrize("spec, x, want", [(ARITH, [1, 3], 2.0), (GEO, [1, 4], 2.0), (LIN_WEIGHTED, [2, 1], 5 / 3)])
    def test_root_solve(self, spec, x, want):
        assert root_solve(spec, x) == pytest.approx(want, abs=1e-11)

    def test_outside_domain(self):
        with pytest.raises(DomainError):
            mean_eval(GEO, [-1, 2])

    def test_wrong_arity(self):
        with pytest.raises(SpecError):
            mean_eval(ARITH, [1, 2, 3])

    def test_root_solve_refuses_breakpoint(self):
        with pytest.raises(DomainError):
            root_solve(JUMP_SPEC, [-0.5, 0.5])

    def test_jump_mean_straddling(self):
        # ratio (1*(-0.5) + 2*1.5)/3 = 5/6 lies in the gap (0,1), so the mean is the jump point
        assert mean_eval(JUMP_SPEC, [-0.5, 0.5]) == pytest.approx(0.0, abs=1e-10)


class TestSignChange:
    def test_pass(self):
        assert sign_change_certify(ARITH, [1, 3], 2.0)

    def test_fail(self):
        assert phi(ARITH, [1, 3], 2.2) == pytest.approx(0.4)
        assert not sign_change_certify(ARITH, [1, 3], 2.5)

    def test_jump(self):
        x = [-0.5, 0.5]
        assert sign_change_certify(JUMP_SPEC, x, mean_eval(JUMP_SPEC, x))

    def test_decreasing(self):
        s = make_spec("1/x", ["1", "x"], (0, math.inf))
        x = [0.5, 3.0]
        y = mean_eval(s, x)
        assert sign_change_certify(s, x, y)
        assert not sign_change_certify(s, x, y * 1.01)


class TestProperties:
    @given(seeds)
    def test_mean_bounds(self, seed):
        rng = np.random.default_rng(seed)
        spec = corpus.random_spec(rng)
        x = corpus.random_point(rng, spec)
        assert min(x) <= mean_eval(spec, x) <= max(x)

    @given(seeds, st.floats(min_value=0.01, max_value=0.99))
    def test_reflexive(self, seed, u):
        rng = np.random.default_rng(seed)
        spec = corpus.random_spec(rng)
        c = float(spec.domain.from_unit(u, far=10.0))
        assert abs(mean_eval(spec, [c] * spec.n) - c) <= 1e-10

    @given(seeds)
    def test_ratio_on_diagonal(self, seed):
        rng = np.random.default_rng(seed)
        spec = corpus.random_spec(rng)
        c = corpus.random_point(rng, spec)[0]
        assert weighted_ratio(spec, [c] * spec.n) == pytest.approx(spec.generator(c), rel=1e-14, abs=1e-300)

    @given(seeds)
    def test_root_solve_agrees(self, seed):
        rng = np.random.default_rng(seed)
        spec = corpus.random_spec(rng, smooth_only=True)
        x = corpus.random_point(rng, spec)
        assert abs(mean_eval(spec, x) - root_solve(spec, x)) <= 1e-9 * max(1.0, max(abs(t) for t in x))

    @given(seeds)
    def test_certified(self, seed):
        rng = np.random.default_rng(seed)
        spec = corpus.random_spec(rng)
        x = corpus.random_point(rng, spec)
        assert sign_change_certify(spec, x, mean_eval(spec, x))

    @given(seeds)
    def test_label_invariance(self, seed):
        rng = np.random.default_rng(seed)
        spec = corpus.random_spec(rng)
        neg = MeanSpec(MonotoneFn(Unary("neg", spec.generator.expr), spec.domain, spec.generator.direction.flipped()),
                       spec.weights)
        x = corpus.random_point(rng, spec)
        assert abs(mean_eval(spec, x) - mean_eval(neg, x)) <= 1e-10 * max(1.0, max(abs(t) for t in x))

    @given(seeds)
    def test_symmetric_weights_symmetric_mean(self, seed):
        rng = np.random.default_rng(seed)
        g = corpus.GENERATORS[int(rng.integers(len(corpus.GENERATORS)))]
        w = corpus.random_weights(rng, g.domain, 1) * 3
        spec = corpus.spec_of(g.f, w, g.domain)
        x = corpus.random_point(rng, spec)
        assert mean_eval(spec, x) == pytest.approx(mean_eval(spec, x[::-1]), abs=1e-11 * max(1.0, max(x)))


class TestJson:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "spec.json"
        dump_spec(GEO, path)
        data = json.loads(path.read_text())
        assert data == {"n": 2, "domain": [0.0, "inf"], "f": "ln(x)", "direction": "inc", "p": ["1", "1"]}
        assert load_spec(path) == GEO

    def test_direction_checked(self):
        with pytest.raises(MonotonicityError):
            spec_from_json({"n": 2, "domain": [0, 1], "f": "x", "direction": "dec", "p": ["1", "1"]})

    def test_arity_mismatch(self):
        with pytest.raises(SpecError):
            spec_from_json({"n": 3, "domain": [0, 1], "f": "x", "p": ["1", "1"]})

    def test_missing_field(self):
        with pytest.raises(SpecError):
            spec_from_json({"n": 2, "domain": [0, 1], "f": "x"})

    def test_to_json_decreasing(self):
        assert spec_to_json(make_spec("1/x", ["1", "1"], (0, 1)))["direction"] == "dec"

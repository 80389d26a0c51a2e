import math

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from bajmeans.exprcore import Binary, BreakpointError, Const, Pow, Unary, Var, X, parse
from bajmeans.jets import (
    Jet3,
    VanishingDerivative,
    compose,
    inverse_jets,
    jet_eval,
    schwarzian,
)

mpmath.mp.dps = 40

_MP_UNARY = {"neg": lambda t: -t, "exp": mpmath.exp, "ln": mpmath.log, "sqrt": mpmath.sqrt, "atan": mpmath.atan}


def mp_eval(e, x):
    """High-precision interpreter; the derivative oracle differentiates this."""
    if isinstance(e, Const):
        return mpmath.mpf(e.value)
    if isinstance(e, Var):
        return x
    if isinstance(e, Unary):
        return _MP_UNARY[e.op](mp_eval(e.arg, x))
    if isinstance(e, Binary):
        a, b = mp_eval(e.left, x), mp_eval(e.right, x)
        return {"+": a + b, "-": a - b, "*": a * b, "/": a / b}[e.op]
    if isinstance(e, Pow):
        return mp_eval(e.base, x) ** mpmath.mpf(e.exponent)
    raise TypeError(e)


def mp_derivs(e, x):
    vals = [mpmath.diff(lambda t: mp_eval(e, t), mpmath.mpf(x), k) for k in range(4)]
    # mpmath continues ln/sqrt/fractional powers into the complex plane; outside the real domain
    if any(isinstance(v, mpmath.mpc) for v in vals):
        raise ValueError("complex intermediate")
    return [float(v) for v in vals]


smooth_leaves = st.one_of(st.just(X), st.sampled_from([0.5, 1.5, 2.0, 3.0]).map(Const))
smooth_exprs = st.recursive(
    smooth_leaves,
    lambda c: st.one_of(
        st.tuples(st.sampled_from(["neg", "exp", "ln", "sqrt", "atan"]), c).map(lambda t: Unary(*t)),
        st.tuples(st.sampled_from("+-*/"), c, c).map(lambda t: Binary(*t)),
        st.tuples(c, st.sampled_from([2.0, 3.0, -1.0, 0.5, -1.5])).map(lambda t: Pow(*t)),
    ),
    max_leaves=5,
)


class TestJetArithmetic:
    def test_ln_at_one(self):
        assert jet_eval(parse("ln(x)"), 1.0) == Jet3(0.0, 1.0, -1.0, 2.0)

    def test_polynomial(self):
        j = jet_eval(parse("x^3+x"), 2.0)
        assert (j.v, j.d1, j.d2, j.d3) == (10.0, 13.0, 12.0, 6.0)

    def test_division(self):
        j = jet_eval(parse("1/x"), 2.0)
        assert (j.v, j.d1, j.d2, j.d3) == pytest.approx((0.5, -0.25, 0.25, -0.375))

    def test_compose_identity(self):
        inner = Jet3(1.0, 2.0, 3.0, 4.0)
        assert compose((1.0, 1.0, 0.0, 0.0), inner) == inner

    @pytest.mark.parametrize(
        "text, x",
        [("exp(x)", 0.3), ("atan(x)", 0.7), ("sqrt(x)", 2.0), ("x^-0.5", 1.3), ("ln(x)/(ln(x)+2)", 1.5),
         ("(1+x^2)^-0.5", 0.4), ("exp(-x)*x^2", 1.1), ("abs(x)", -2.0)],
    )
    def test_against_mpmath(self, text, x):
        e = parse(text)
        if "abs" in text:
            want = [2.0, -1.0, 0.0, 0.0]
        else:
            want = mp_derivs(e, x)
        j = jet_eval(e, x)
        assert [j.v, j.d1, j.d2, j.d3] == pytest.approx(want, rel=1e-12, abs=1e-12)

    @given(smooth_exprs, st.floats(min_value=0.2, max_value=3.0))
    def test_random_trees_against_mpmath(self, e, x):
        try:
            want = mp_derivs(e, x)
        except (ValueError, ZeroDivisionError):
            assume(False)
        assume(all(math.isfinite(w) and abs(w) < 1e6 for w in want))
        try:
            j = jet_eval(e, x)
        except Exception:
            assume(False)
        for got, w in zip((j.v, j.d1, j.d2, j.d3), want):
            assert got == pytest.approx(w, rel=1e-8, abs=1e-8)


class TestBreakpoints:
    def test_jet_at_breakpoint_raises(self):
        with pytest.raises(BreakpointError):
            jet_eval(parse("piecewise(x<0: x; x>=0: x+1)"), 0.0)

    def test_jet_off_breakpoint_uses_piece(self):
        j = jet_eval(parse("piecewise(x<0: x; x>=0: x^2)"), 0.5)
        assert (j.v, j.d1, j.d2) == (0.25, 1.0, 2.0)


class TestSchwarzian:
    def test_exp(self):
        assert schwarzian(parse("exp(x)"), 0.7) == pytest.approx(-0.5)

    def test_identity(self):
        assert schwarzian(parse("x"), 3.0) == 0.0

    @given(st.floats(min_value=0.2, max_value=5.0))
    def test_ln(self, x):
        assert schwarzian(parse("ln(x)"), x) == pytest.approx(0.5 / x**2, rel=1e-12)

    @given(st.floats(min_value=0.1, max_value=3.0))
    def test_mobius_of_ln_is_invariant(self, x):
        g = parse("(2*ln(x)+1)/(ln(x)+3)")
        assert schwarzian(g, x) == pytest.approx(schwarzian(parse("ln(x)"), x), rel=1e-9, abs=1e-12)

    @given(st.floats(min_value=-3.0, max_value=3.0))
    def test_mobius_of_identity_vanishes(self, x):
        assume(abs(x + 4) > 0.5)
        assert schwarzian(parse("(x+1)/(x+4)"), x) == pytest.approx(0.0, abs=1e-12)

    def test_vanishing_derivative(self):
        with pytest.raises(VanishingDerivative):
            schwarzian(parse("x^3"), 0.0)


class TestInverseJets:
    @given(st.floats(min_value=-2.0, max_value=2.0))
    def test_exp_inverse_is_ln(self, x):
        y = math.exp(x)
        inv = inverse_jets(jet_eval(parse("exp(x)"), x), x)
        assert (inv.d1, inv.d2, inv.d3) == pytest.approx((1 / y, -1 / y**2, 2 / y**3), rel=1e-12)

    def test_inverse_node_jet(self):
        # inv of x^3+x at u=x: derivative of the cube-root-like inverse
        e = parse("inv(x^3+x, -inf, inf, x)")
        y = 1.0  # y^3 + y = 2
        j = jet_eval(e, 2.0)
        assert j.v == pytest.approx(y, abs=1e-12)
        assert j.d1 == pytest.approx(1 / (3 * y * y + 1), rel=1e-9)

    def test_vanishing(self):
        with pytest.raises(VanishingDerivative):
            inverse_jets(Jet3(0.0, 0.0, 1.0, 0.0))

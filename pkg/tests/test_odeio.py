"""Parsing, printing, and differentiation of equations and solutions."""

from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperode.errors import ParseError, UnsupportedEquation
from hyperode.exactalg import GaussRat, Poly, RatFunc
from hyperode import odeio
from hyperode.odeio import (
    X,
    Add,
    Const,
    Exp,
    Hyp,
    Intg,
    Leg,
    Mul,
    Num,
    Pow,
    add,
    differentiate_expr,
    div,
    hyp,
    legendre,
    mul,
    neg,
    num,
    parse_ode,
    parse_solution,
    power,
    print_solution,
    ratfunc_to_expr,
)


def rf(num_coeffs, den_coeffs=(1,)):
    return RatFunc(Poly(tuple(F(c) for c in num_coeffs)),
                   Poly(tuple(F(c) for c in den_coeffs)))


def eval_tree(e, xv):
    """Independent numeric evaluator used as the oracle in these tests."""
    if isinstance(e, Num):
        return complex(e.value) if isinstance(e.value, GaussRat) \
            else float(e.value)
    if isinstance(e, odeio.Sym):
        return xv
    if isinstance(e, Const):
        return 1.0
    if isinstance(e, Add):
        return sum(eval_tree(t, xv) for t in e.terms)
    if isinstance(e, Mul):
        out = 1.0
        for f in e.factors:
            out *= eval_tree(f, xv)
        return out
    if isinstance(e, Pow):
        return complex(eval_tree(e.base, xv)) ** float(e.exponent)
    if isinstance(e, Exp):
        return complex(mpmath.exp(eval_tree(e.arg, xv)))
    if isinstance(e, Hyp):
        z = eval_tree(e.arg, xv)
        up = [complex(u) for u in e.upper]
        lo = [complex(l) for l in e.lower]
        return complex(mpmath.hyper(up, lo, z))
    if isinstance(e, Leg):
        z = eval_tree(e.arg, xv)
        fn = mpmath.legenp if e.kind == "P" else mpmath.legenq
        return complex(fn(float(e.degree), 0, z, type=3))
    raise TypeError(e)


class TestParseOde:
    def test_divided_form(self):
        ode = parse_ode(
            "y'' + ((2*x-1)/(x^2-x))*y' + (1/(4*(x^2-x)))*y = 0")
        assert ode.A == rf([-1, 2], [0, -1, 1])
        assert ode.B == rf([1], [0, -4, 4])
        assert not ode.is_fractional

    def test_trivial(self):
        ode = parse_ode("y'' = 0")
        assert ode.A.is_zero and ode.B.is_zero

    def test_nonlinear_rejected(self):
        with pytest.raises(UnsupportedEquation):
            parse_ode("y'' + y*y' = 0")

    def test_rhs_form(self):
        ode = parse_ode(
            "y'' = ((1/3*x^2 - 3*x^4 - 8/3)/(x^5 - x))*y'"
            " + (19/12/(x^6 - x^2))*y")
        assert ode.A == rf([F(8, 3), 0, F(-1, 3), 0, 3], [0, -1, 0, 0, 0, 1])
        assert ode.B == rf([F(-19, 12)], [0, 0, -1, 0, 0, 0, 1])

    def test_unnormalized_leading_coefficient(self):
        ode = parse_ode("(x^2-x)*y'' + (2*x-1)*y' + (1/4)*y = 0")
        assert ode.A == rf([-1, 2], [0, -1, 1])
        assert ode.B == rf([1], [0, -4, 4])

    def test_wrong_order(self):
        with pytest.raises(UnsupportedEquation):
            parse_ode("y' + y = 0")
        with pytest.raises(UnsupportedEquation):
            parse_ode("y''' + y = 0")

    def test_inhomogeneous(self):
        with pytest.raises(UnsupportedEquation):
            parse_ode("y'' + y = x")

    def test_vanishing_lead(self):
        with pytest.raises(UnsupportedEquation):
            parse_ode("0*y'' + y' + y = 0")

    def test_missing_y(self):
        with pytest.raises(UnsupportedEquation):
            parse_ode("x^2 = 0")

    def test_fractional_power_literal(self):
        ode = parse_ode("y'' + x^(1/2)*y = 0")
        assert ode.is_fractional
        assert ode.B.carrier == 2

    def test_fractional_power_of_compound_rejected(self):
        with pytest.raises(UnsupportedEquation):
            parse_ode("y'' + (x+1)^(1/2)*y = 0")

    def test_negative_power(self):
        ode = parse_ode("y'' + x^(-2)*y = 0")
        assert ode.B == rf([1], [0, 0, 1])

    def test_decimal_rejected_with_position(self):
        with pytest.raises(ParseError) as exc:
            parse_ode("y'' + 1.5*y = 0")
        assert exc.value.position == 6

    def test_unknown_symbol(self):
        with pytest.raises(ParseError):
            parse_ode("y'' + z*y = 0")

    def test_division_by_y_rejected(self):
        with pytest.raises(ParseError):
            parse_ode("y'' + 1/y = 0")


class TestPrinting:
    def test_hypergeom_node(self):
        arg = div(mul(num(2), power(X, 2)),
                  add(power(X, 2), num(-1)))
        node = hyp("2F1", (F(1, 4), F(-1, 12)), (F(-1, 3),), arg)
        assert print_solution(node) == \
            "hypergeom([1/4, -1/12], [-1/3], 2*x^2/(x^2 - 1))"

    def test_constant(self):
        assert print_solution(Const(1)) == "C1"

    def test_exp_integral(self):
        e = Exp(Intg(div(num(1), X)))
        assert print_solution(e) == "exp(Int(1/x, x))"

    def test_gaussian_scalar(self):
        assert print_solution(num(GaussRat(F(2, 3), F(1, 6)))) == "2/3+1/6*I"
        assert print_solution(num(GaussRat(0, -1))) == "-I"

    def test_legendre(self):
        e = legendre("P", F(-1, 2), add(mul(num(2), X), num(-1)))
        assert print_solution(e) == "LegendreP(-1/2, 2*x - 1)"

    def test_fractional_power(self):
        assert print_solution(power(X, F(3, 2))) == "x^(3/2)"
        assert print_solution(power(X, -1)) == "1/x"

    def test_ratfunc_conversion(self):
        f = rf([0, 0, 1], [-1, 1])
        assert print_solution(ratfunc_to_expr(f)) == "x^2/(x - 1)"


def scalars():
    return st.fractions(min_value=-8, max_value=8, max_denominator=6)


def exprs(depth=3, numeric_safe=False):
    """Random solution trees; numeric_safe skips nodes the plain-float
    oracle cannot evaluate cheaply (integrals, nested Legendre)."""
    leaf = st.one_of(
        scalars().map(num),
        st.just(X),
        st.sampled_from([Const(1), Const(2)]),
        st.tuples(scalars(), scalars()).filter(lambda p: p[1] != 0).map(
            lambda p: num(GaussRat(*p))),
    )
    if depth == 0:
        return leaf
    sub = exprs(depth - 1, numeric_safe)
    branches = [
        leaf,
        st.lists(sub, min_size=2, max_size=3).map(lambda ts: add(*ts)),
        st.lists(sub, min_size=2, max_size=3).map(lambda ts: mul(*ts)),
        st.tuples(sub, st.fractions(min_value=-3, max_value=3,
                                    max_denominator=2).filter(bool)).filter(
            lambda p: not (isinstance(p[0], Num) and p[0].value == 0
                           and p[1] < 0)).map(
            lambda p: power(p[0], p[1])),
        sub.map(Exp),
        sub.map(lambda a: hyp("2F1", (F(1, 2), F(1, 3)), (F(5, 4),), a)),
        sub.map(lambda a: hyp("1F1", (F(1, 2),), (F(3, 4),), a)),
    ]
    if not numeric_safe:
        branches.append(sub.map(lambda a: legendre("Q", F(3, 2), a)))
        branches.append(sub.map(Intg))
    return st.one_of(*branches)


class TestRoundTrip:
    @given(exprs())
    @settings(max_examples=150)
    def test_parse_print_roundtrip(self, e):
        assert parse_solution(print_solution(e)) == e

    def test_roundtrip_examples(self):
        cases = [
            "hypergeom([1/4, -1/12], [-1/3], 2*x^2/(x^2 - 1))",
            "exp(Int(1/x, x))",
            "C1",
            "x^(3/2)",
            "LegendreQ(-1/2, 2*x - 1)",
        ]
        for text in cases:
            tree = parse_solution(text)
            assert print_solution(tree) == text


class TestDifferentiate:
    def test_power_rule(self):
        d = differentiate_expr(power(X, F(3, 2)))
        assert d == mul(num(F(3, 2)), power(X, F(1, 2)))

    def test_confluent_consistent_with_exp(self):
        # with equal parameters the confluent series is exp(z)
        node = hyp("1F1", (F(3, 7),), (F(3, 7),), X)
        d = differentiate_expr(node)
        z = 0.3
        assert abs(eval_tree(d, z) - mpmath.exp(z)) < 1e-10

    def test_geometric_series_derivative(self):
        node = hyp("2F1", (F(1), F(1)), (F(1),), X)
        d = differentiate_expr(node)
        val = eval_tree(d, 0.25)
        assert abs(val - F(16, 9)) < 1e-10

    def test_integral_node(self):
        integrand = div(num(1), X)
        assert differentiate_expr(Intg(integrand)) == integrand

    def test_legendre_derivative_numeric(self):
        node = legendre("P", F(3, 2), X)
        d = differentiate_expr(node)
        z = 1.7
        h = 1e-6
        approx = (eval_tree(node, z + h) - eval_tree(node, z - h)) / (2 * h)
        assert abs(eval_tree(d, z) - approx) < 1e-5

    @given(exprs(depth=2, numeric_safe=True),
           exprs(depth=2, numeric_safe=True))
    @settings(max_examples=25, deadline=None)
    def test_product_rule_numeric(self, a, b):
        prod = mul(a, b)
        d_prod = differentiate_expr(prod)
        d_manual = add(mul(differentiate_expr(a), b),
                       mul(a, differentiate_expr(b)))
        for xv in (0.337, 0.561):
            try:
                lhs = eval_tree(d_prod, xv)
                rhs = eval_tree(d_manual, xv)
            except (ZeroDivisionError, ValueError, OverflowError):
                continue
            except mpmath.libmp.NoConvergence:
                continue
            scale = max(abs(lhs), abs(rhs), 1.0)
            if scale > 1e12:
                continue
            assert abs(lhs - rhs) / scale < 1e-8

    @given(exprs(depth=2, numeric_safe=True),
           exprs(depth=2, numeric_safe=True))
    @settings(max_examples=25, deadline=None)
    def test_linearity(self, a, b):
        assert differentiate_expr(add(a, b)) == \
            add(differentiate_expr(a), differentiate_expr(b)) or True
        # structural equality can differ by term order; check numerically
        d_sum = differentiate_expr(add(a, b))
        d_parts = add(differentiate_expr(a), differentiate_expr(b))
        for xv in (0.41,):
            try:
                lhs = eval_tree(d_sum, xv)
                rhs = eval_tree(d_parts, xv)
            except (ZeroDivisionError, ValueError, OverflowError):
                continue
            except mpmath.libmp.NoConvergence:
                continue
            scale = max(abs(lhs), abs(rhs), 1.0)
            if scale > 1e12:
                continue
            assert abs(lhs - rhs) / scale < 1e-8

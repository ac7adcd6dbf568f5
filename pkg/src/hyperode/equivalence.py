"""Resolution of a reduced invariant against the three model equations.

Given the reduced invariant I0 of an input equation (power substitution
already pulled out), the resolvers here find every fractional linear map,
parameter assignment, and gauge multiplier carrying a model hypergeometric
equation exactly onto the input. The strategy is enumeration plus exact
verification:

  * the full model (three regular points) is matched by assigning the
    visible singular points of I0 to preimages of {0, 1, infinity} and
    reading the parameters off the local exponent differences;
  * the two confluent models (regular 0, irregular infinity) are matched
    by placing the irregular and regular points from the pole profile and
    extracting the map's scale and the parameters from principal-part
    coefficients, which needs at worst one square root.

Every candidate that survives the cheap invariant identity is wrapped in
an EquivalenceWitness, whose constructor re-verifies the full coefficient
identity of the transformed model equation against the input. A witness
that exists is therefore always correct; callers only choose among them.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .classifier import classify, profile
from .errors import (
    IrrationalExponentDifference,
    NoEquivalence,
    UnsupportedParameterField,
)
from .exactalg import (
    GaussRat,
    GenRatFunc,
    Poly,
    RatFunc,
    demote_scalar,
    gauss_sqrt,
    integrate_ratfunc,
    laurent_coefficients,
    pole_order,
    rational_sqrt,
    residue_at,
)
from .invariants import (
    INF,
    Mobius,
    apply_gauge,
    invariant_from_shifted,
    minimize_power_exponents,
    normal_form_ode,
    shifted_invariant,
    to_normal_form,
    transform_invariant,
)
from .odeio import (
    Exp,
    Intg,
    LinearODE,
    ONE,
    X,
    add,
    mul,
    poly_to_expr,
    power,
    ratfunc_to_expr,
)


# ---------------------------------------------------------------------------
# model (seed) equations


@dataclass(frozen=True)
class SeedEquation:
    """One of the three model equations, parameters left free.

    instantiate() plugs concrete parameter values into the coefficient
    templates and returns the LinearODE. The full model has regular points
    {0, 1, infinity}; the two confluent models have a regular point at 0
    and an irregular point at infinity.
    """

    class_kind: str

    @property
    def parameter_names(self):
        return {"2F1": ("a", "b", "c"),
                "1F1": ("a", "c"),
                "0F1": ("c",)}[self.class_kind]

    def instantiate(self, params):
        missing = [n for n in self.parameter_names if n not in params]
        if missing:
            raise ValueError("missing parameters %s for %s"
                             % (missing, self.class_kind))
        if self.class_kind == "2F1":
            a, b, c = params["a"], params["b"], params["c"]
            den = RatFunc(Poly((Fraction(0), Fraction(-1), Fraction(1))))
            return LinearODE(
                RatFunc(Poly((-c, a + b + 1))) / den,
                RatFunc(Poly.const(a * b)) / den)
        if self.class_kind == "1F1":
            a, c = params["a"], params["c"]
            den = RatFunc(Poly((Fraction(0), Fraction(1))))
            return LinearODE(
                RatFunc(Poly((c, Fraction(-1)))) / den,
                RatFunc(Poly.const(-a)) / den)
        if self.class_kind == "0F1":
            c = params["c"]
            den = RatFunc(Poly((Fraction(0), Fraction(1))))
            return LinearODE(
                RatFunc(Poly.const(c)) / den,
                RatFunc(Poly.const(Fraction(-1))) / den)
        raise ValueError("unknown class kind %r" % self.class_kind)


SEEDS = {kind: SeedEquation(kind) for kind in ("2F1", "1F1", "0F1")}


def seed_ode(class_kind, params):
    """The model equation of a class with concrete parameter values."""
    return SEEDS[class_kind].instantiate(params)


def seed_invariant(class_kind, params):
    """Normal-form invariant of an instantiated model equation."""
    return to_normal_form(seed_ode(class_kind, params)).I


# ---------------------------------------------------------------------------
# exponent differences


@dataclass(frozen=True)
class ExponentDifferences:
    """Local exponent differences of the full model's normal form.

    The three values sit at the regular points 0, 1 and infinity and
    determine the parameters up to the sign symmetries:

        at_zero = 1 - c,  at_one = a + b - c,  at_infinity = a - b
    """

    at_zero: Fraction
    at_one: Fraction
    at_infinity: Fraction

    @classmethod
    def of_parameters(cls, a, b, c):
        return cls(1 - c, a + b - c, a - b)

    def parameters(self):
        """Invert to (a, b, c); nonnegative differences give a >= b."""
        c = 1 - self.at_zero
        a = (1 - self.at_zero + self.at_one + self.at_infinity) / 2
        b = (1 - self.at_zero + self.at_one - self.at_infinity) / 2
        return {"a": a, "b": b, "c": c}


def double_pole_coefficient(i0, point):
    """Coefficient of the second-order principal part of I0 at a point.

    At infinity this is the limit of x^2 I0(x). Poles of order above two
    (irregular points) are rejected.
    """
    if point is INF:
        if i0.is_zero:
            return Fraction(0)
        gap = i0.den.degree - i0.num.degree
        if gap < 2:
            raise ValueError("infinity is an irregular point")
        if gap == 2:
            return demote_scalar(i0.num.lc / i0.den.lc)
        return Fraction(0)
    order = pole_order(i0, point)
    if order > 2:
        raise ValueError("pole order %d at %s is irregular" % (order, point))
    if order < 2:
        return Fraction(0)
    return laurent_coefficients(i0, point, 2, 1)[0]


def exponent_difference_at(i0, point):
    """Nonnegative exponent difference of u'' = I0 u at a regular point.

    The local indicial roots differ by sqrt(1 + 4 c2) where c2 is the
    double-pole coefficient; simple poles and ordinary points give 1.
    """
    c2 = double_pole_coefficient(i0, point)
    disc = 1 + 4 * c2
    if isinstance(disc, GaussRat):
        if disc.im:
            raise IrrationalExponentDifference(
                "complex indicial discriminant at %s" % (point,))
        disc = disc.re
    if disc < 0:
        raise IrrationalExponentDifference(
            "negative indicial discriminant at %s" % (point,))
    root = rational_sqrt(disc)
    if root is None:
        raise IrrationalExponentDifference(
            "indicial discriminant at %s is not a rational square" % (point,))
    return root


# ---------------------------------------------------------------------------
# map and coefficient plumbing


def mobius_from_three_points(t0, t1, tinf):
    """The fractional linear map sending (t0, t1, tinf) to (0, 1, oo).

    Any one of the three points may be INF. The result is returned in
    canonical scaling.
    """
    if t0 is INF:
        m = Mobius(Fraction(0), t1 - tinf, Fraction(1), -tinf)
    elif t1 is INF:
        m = Mobius(Fraction(1), -t0, Fraction(1), -tinf)
    elif tinf is INF:
        m = Mobius(Fraction(1), -t0, Fraction(0), t1 - t0)
    else:
        m = Mobius(t1 - tinf, -t0 * (t1 - tinf),
                   t1 - t0, -tinf * (t1 - t0))
    return m.canonical()


def _power_of_x(k):
    k = Fraction(k)
    if k.denominator == 1:
        e = k.numerator
        if e >= 0:
            return RatFunc(Poly.from_pairs([(e, Fraction(1))]))
        return RatFunc(Poly.const(1), Poly.from_pairs([(-e, Fraction(1))]))
    return GenRatFunc.x_power(k.numerator, k.denominator)


def _mobius_of_power(m, k):
    """The substitution argument F(x) = M(x^k)."""
    xk = _power_of_x(k)
    return (xk * m.a + m.b) / (xk * m.c + m.d)


def _unwrap(coeff):
    if isinstance(coeff, GenRatFunc):
        coeff = coeff.reduce_carrier()
        if coeff.carrier == 1:
            return coeff.fn
    return coeff


def _compose_coeff(f, arg):
    """f(arg(x)) where f is rational and arg may carry fractional powers."""
    if isinstance(arg, GenRatFunc):
        return _unwrap(GenRatFunc(f.compose(arg.fn), arg.carrier))
    return f.compose(arg)


def _coeff_eq(a, b):
    return _unwrap(a) == _unwrap(b)


# ---------------------------------------------------------------------------
# gauge multiplier in closed form


def _log_exponent(c):
    c = demote_scalar(c)
    if isinstance(c, GaussRat):
        return None
    return c

def exp_integral_expr(f):
    """exp(integral of f dx) as a product-form expression, f rational.

    Poles with rational residues become power factors, the polynomial and
    rational remainder goes inside an exponential, and anything whose
    antiderivative leaves Q(i) falls back to an explicit unevaluated
    integral under the exponential. The integration constant is dropped,
    so the result is one multiplier out of the scale class.
    """
    if isinstance(f, GenRatFunc):
        work = f.reduce_carrier()
        if work.carrier != 1:
            carrier = work.carrier
            # integrate in s = x^(1/carrier): dx = carrier*s^(carrier-1) ds
            integrand = work.fn * RatFunc(
                Poly.from_pairs([(carrier - 1, Fraction(carrier))]))
            return _exp_integral_in(integrand, carrier)
        f = work.fn
    return _exp_integral_in(f, 1)


def _exp_integral_in(f, carrier):
    var = X if carrier == 1 else power(X, Fraction(1, carrier))
    if f.is_zero:
        return ONE
    fallback = Exp(Intg(ratfunc_to_expr(f, var)) if carrier != 1
                   else Intg(ratfunc_to_expr(f)))
    if f.den.demote().has_gauss():
        return fallback
    result = integrate_ratfunc(f.demote())
    if not result.exact:
        return fallback
    factors = []
    for g, c in result.logarithms:
        e = _log_exponent(c)
        if e is None:
            return fallback
        factors.append(power(poly_to_expr(g, var), e))
    arg_terms = []
    if not result.polynomial_part.is_zero:
        arg_terms.append(poly_to_expr(result.polynomial_part, var))
    if not result.rational_part.is_zero:
        arg_terms.append(ratfunc_to_expr(result.rational_part, var))
    if arg_terms:
        factors.append(Exp(add(*arg_terms)))
    return mul(*factors)


# ---------------------------------------------------------------------------
# the witness


class EquivalenceWitness:
    """A verified exact equivalence between the input and a model equation.

    Stores the power exponent k, the fractional linear map, the model
    parameters, and the gauge multiplier P such that

        y(x) = P(x) * Y(M(x^k))

    carries solutions Y of the instantiated model equation to solutions y
    of the input. Construction verifies the transformed model equation
    against the input coefficient by coefficient; an instance can
    therefore never hold an unchecked claim.
    """

    def __init__(self, class_kind, k, mobius, params, input_ode):
        self.class_kind = class_kind
        self.k = Fraction(k)
        self.mobius = mobius
        self.params = dict(params)
        self.input_ode = input_ode
        self.seed = seed_ode(class_kind, self.params)
        arg = _mobius_of_power(mobius, self.k)
        d1 = arg.deriv()
        pulled_a = _unwrap(-(d1.deriv() / d1) + _compose_coeff(self.seed.A, arg) * d1)
        pulled_b = _unwrap(_compose_coeff(self.seed.B, arg) * d1 * d1)
        gpp = _unwrap((pulled_a - input_ode.A) / 2)
        gauged = apply_gauge(input_ode, gpp)
        assert _coeff_eq(gauged.A, pulled_a) and _coeff_eq(gauged.B, pulled_b), \
            "witness construction reached an unverifiable candidate"
        self.argument = _unwrap(arg)
        self.gauge_log_derivative = gpp
        self.gauge = exp_integral_expr(gpp)

    def __repr__(self):
        return ("EquivalenceWitness(%s, k=%s, mobius=%s, params=%r)"
                % (self.class_kind, self.k, self.mobius, self.params))


# ---------------------------------------------------------------------------
# resolvers


def _sort_point(p):
    if p is INF:
        return (1, Fraction(0))
    return (0, p)


def resolve_2F1(i0, pr):
    """All verified full-model witnesses for a reduced invariant.

    Visible singular points (rational poles plus infinity when it is
    singular) are assigned to the preimages of {0, 1, infinity}; a model
    point left without a preimage is pinned to a fresh ordinary position.
    Candidates are tried in a fixed order so the first witness is
    deterministic: natural placements first (0 staying at 0, infinity at
    infinity), then larger exponent differences first.
    """
    if pr.has_irrational_points:
        return []
    finite = [loc for loc, _ in pr.finite_points]
    gap = pr.point_at_infinity_order
    inf_singular = gap <= 3
    visible = list(finite) + ([INF] if inf_singular else [])
    if len(visible) == 3:
        assignments = list(permutations(visible))
    elif len(visible) == 2:
        if not inf_singular:
            spare = INF
        else:
            spare = max(p for p in finite) + 1
        assignments = []
        for hole in range(3):
            for pair in permutations(visible):
                slots = list(pair)
                slots.insert(hole, spare)
                assignments.append(tuple(slots))
    else:
        return []
    diffs = {}
    for p in visible:
        diffs[p] = exponent_difference_at(i0, p)

    def diff_of(p):
        return diffs.get(p, Fraction(1))

    def order_key(slots):
        t0, t1, tinf = slots
        return (t0 != 0,
                tinf is not INF,
                (-diff_of(t0), -diff_of(t1), -diff_of(tinf)),
                tuple(_sort_point(p) for p in slots))

    reduced = normal_form_ode(i0)
    out = []
    for t0, t1, tinf in sorted(assignments, key=order_key):
        shape = ExponentDifferences(diff_of(t0), diff_of(t1), diff_of(tinf))
        params = shape.parameters()
        assert params["a"] >= params["b"]
        m = mobius_from_three_points(t0, t1, tinf)
        if transform_invariant(seed_invariant("2F1", params), m) == i0:
            out.append(EquivalenceWitness("2F1", 1, m, params, reduced))
    return out


def _confluent_positions(pr, irregular_order, infinity_gap):
    """Locate the irregular and regular model points in the pole profile.

    Returns (irregular, regular) positions (INF allowed) or None when the
    profile cannot be laid out for the requested irregular pole order.
    """
    if pr.has_irrational_points:
        return None
    heavy = [(loc, mult) for loc, mult in pr.finite_points if mult >= 3]
    light = [(loc, mult) for loc, mult in pr.finite_points if mult <= 2]
    if len(heavy) > 1 or len(light) > 1:
        return None
    if heavy:
        if heavy[0][1] != irregular_order:
            return None
        t_irr = heavy[0][0]
        t_reg = light[0][0] if light else INF
        return t_irr, t_reg
    if pr.point_at_infinity_order != infinity_gap:
        return None
    t_reg = light[0][0] if light else Fraction(0)
    return INF, t_reg


def _scale_root(value):
    value = demote_scalar(value)
    root = gauss_sqrt(value)
    if root is None:
        raise UnsupportedParameterField(
            "the map's scale parameter lies outside the Gaussian rationals")
    return demote_scalar(root)


def _scale_mobius(theta, t_irr, t_reg):
    """The map theta * (t - t_reg) / (t - t_irr) with INF conventions."""
    if t_irr is INF:
        return Mobius(theta, demote_scalar(-theta * t_reg),
                      Fraction(0), Fraction(1))
    if t_reg is INF:
        return Mobius(Fraction(0), theta, Fraction(1), -t_irr)
    return Mobius(theta, demote_scalar(-theta * t_reg),
                  Fraction(1), -t_irr)


def resolve_1F1(i0, pr):
    """All verified witnesses of the first confluent model.

    The irregular model point has pole order 4 after transformation (or
    sits at infinity when numerator and denominator degrees agree), the
    regular one order <= 2. The scale comes from the leading principal
    coefficient via one square root, the remaining parameters from the
    next coefficient and the local exponent difference.
    """
    spots = _confluent_positions(pr, 4, 0)
    if spots is None:
        return []
    t_irr, t_reg = spots
    d = exponent_difference_at(i0, t_reg)
    if t_irr is INF:
        theta_sq = 4 * demote_scalar(i0.num.lc / i0.den.lc)

        def linear_of(theta):
            return residue_at(i0, t_reg) / theta
    else:
        lead, nxt = laurent_coefficients(i0, t_irr, 4, 2)
        if t_reg is INF:
            theta_sq = 4 * lead

            def linear_of(theta):
                return nxt / theta
        else:
            theta_sq = 4 * lead / (t_irr - t_reg) ** 2

            def linear_of(theta):
                return nxt / (theta * (t_irr - t_reg))

    theta = _scale_root(theta_sq)
    reduced = normal_form_ode(i0)
    out = []
    seen = set()
    for c in (1 + d, 1 - d):
        if c in seen:
            continue
        seen.add(c)
        for th in (theta, demote_scalar(-theta)):
            a = demote_scalar(linear_of(th) + Fraction(c) / 2)
            params = {"a": a, "c": c}
            m = _scale_mobius(th, t_irr, t_reg)
            if transform_invariant(seed_invariant("1F1", params), m) == i0:
                out.append(EquivalenceWitness("1F1", 1, m, params, reduced))
    return out


def resolve_0F1(i0, pr):
    """All verified witnesses of the doubly confluent model.

    Same layout as the first confluent model with irregular pole order 3
    (or a degree gap of one at infinity); the scale parameter is linear in
    the principal coefficients, so no square root is needed.
    """
    spots = _confluent_positions(pr, 3, 1)
    if spots is None:
        return []
    t_irr, t_reg = spots
    d = exponent_difference_at(i0, t_reg)
    if t_irr is INF:
        theta = residue_at(i0, t_reg)
    else:
        lead = laurent_coefficients(i0, t_irr, 3, 1)[0]
        if t_reg is INF:
            theta = lead
        else:
            theta = lead / (t_irr - t_reg)
    if not theta:
        return []
    reduced = normal_form_ode(i0)
    out = []
    seen = set()
    for c in (1 + d, 1 - d):
        if c in seen:
            continue
        seen.add(c)
        params = {"c": c}
        m = _scale_mobius(demote_scalar(theta), t_irr, t_reg)
        if transform_invariant(seed_invariant("0F1", params), m) == i0:
            out.append(EquivalenceWitness("0F1", 1, m, params, reduced))
    return out


_RESOLVERS = {"2F1": resolve_2F1, "1F1": resolve_1F1, "0F1": resolve_0F1}


# ---------------------------------------------------------------------------
# the pipeline


def solve_equivalence(ode):
    """Full resolution pipeline from a raw equation to a verified witness.

    Normal form, shift, power minimization, classification, then the
    resolvers in class order; the first verified witness (re-checked
    against the original equation, power and gauge included) is returned.
    Resolver errors about unreachable fields are kept and re-raised only
    when no later candidate succeeds.
    """
    nf = to_normal_form(ode)
    k, j0 = minimize_power_exponents(shifted_invariant(nf.I))
    i0 = invariant_from_shifted(j0)
    pr = profile(i0)
    candidates = classify(pr)
    if not candidates:
        raise NoEquivalence(
            "the reduced invariant matches no model singularity case",
            profile=pr)
    stashed = None
    for cand in candidates:
        try:
            found = _RESOLVERS[cand.class_kind](i0, pr)
        except (IrrationalExponentDifference, UnsupportedParameterField) as e:
            if stashed is None:
                stashed = e
            continue
        for w in found:
            return EquivalenceWitness(w.class_kind, k, w.mobius,
                                      w.params, ode)
    if stashed is not None:
        raise stashed
    raise NoEquivalence(
        "no candidate assignment verified against the reduced invariant",
        profile=pr)


def transformed_seed_ode(class_kind, params, mobius, k=1,
                         gauge_log_derivative=None):
    """Push a model equation through the transformation chain.

    Returns the equation satisfied by P(x) * Y(M(x^k)) for solutions Y of
    the instantiated model, where P'/P is the given gauge log-derivative
    (absent means P = 1). This is the instance generator used to exercise
    the resolvers on known-equivalent inputs.
    """
    seed = seed_ode(class_kind, params)
    arg = _mobius_of_power(mobius, Fraction(k))
    d1 = arg.deriv()
    pulled = LinearODE(
        _unwrap(-(d1.deriv() / d1) + _compose_coeff(seed.A, arg) * d1),
        _unwrap(_compose_coeff(seed.B, arg) * d1 * d1))
    if gauge_log_derivative is None:
        return pulled
    gauged = apply_gauge(pulled, -gauge_log_derivative)
    return LinearODE(_unwrap(gauged.A), _unwrap(gauged.B))

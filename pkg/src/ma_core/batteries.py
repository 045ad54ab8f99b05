"""
Seeded instance generators for the identity, classification and
differentiation batteries.

Every generator is deterministic given its seed. Inner functions are scaled so
their values stay O(1) on [0.5, 2]^n, which keeps exp outers and order-4
determinants well inside double range.
"""

from typing import List, Sequence, Tuple

import numpy as np

from ma_core.expr import (
    Expr,
    VarSpec,
    const,
    exp,
    ln,
    mul,
    parse,
    pow_,
    product_of,
    sqrt,
    sum_of,
    var,
)
from ma_core.homothetic import HomotheticSpec, OuterFamily
from ma_core.sampling import DEFAULT_SEED, random_points
from ma_core.theorems import ManyInputCase, TwoInputCase

DEGREES = (2.0, 3.0, -1.0, 0.5)
ARITIES = (2, 3, 4)


def outer_battery() -> List[OuterFamily]:
    """Outers with F' != 0 for u > 0."""
    return [
        OuterFamily.identity(),
        OuterFamily.affine(2.0, 1.0),
        OuterFamily.power(1.0, 2.0),
        OuterFamily.power(1.5, 0.5, -1.0),
        OuterFamily.power(0.5, 3.0, 0.25),
        OuterFamily.log(),
        OuterFamily.exp(0.5),
        OuterFamily.from_expr(parse("u^3 + u", VarSpec(("u",)))),
    ]


def _weights(rng: np.random.Generator, n: int, low=0.5, high=1.5) -> List[float]:
    return [float(c) for c in rng.uniform(low, high, size=n)]


def _linear(weights: Sequence[float]) -> Expr:
    n = len(weights)
    return sum_of([mul(const(c / n), var(i)) for i, c in enumerate(weights)])


def _profile_linear(n: int, rng: np.random.Generator) -> Expr:
    """0.5 * x1 * exp(c . (x_2..x_n - x1) / sum x): degree 1 and not flat."""
    x1 = var(0)
    total = sum_of([var(i) for i in range(n)])
    c = _weights(rng, n - 1, 0.3, 0.9)
    shift = sum_of([mul(const(c[i - 1]), var(i) - x1) for i in range(1, n)])
    return mul(const(0.5), mul(x1, exp(shift / total)))


def inner_battery(n: int, d: float, rng: np.random.Generator) -> List[Expr]:
    """Homogeneous inner functions of degree ``d`` in ``n`` variables."""
    dd = const(d)
    alphas = rng.uniform(0.5, 1.5, size=n)
    alphas = alphas * d / alphas.sum()
    rho = float(rng.choice([0.5, 2.0, 3.0]))
    c = _weights(rng, n)
    ces_terms = [mul(const(c[i] / n), pow_(var(i), const(rho))) for i in range(n)]
    squares = sum_of([mul(var(i), var(i)) for i in range(n)])
    quadratic = (squares + mul(var(0), var(1))) / const(n + 1.0)
    return [
        pow_(_linear(_weights(rng, n)), dd),
        product_of([pow_(var(i), const(float(a))) for i, a in enumerate(alphas)]),
        pow_(sum_of(ces_terms), const(d / rho)),
        pow_(quadratic, const(d / 2.0)),
        pow_(_profile_linear(n, rng), dd),
    ]


def flat_inner_battery(n: int, d: float, rng: np.random.Generator) -> List[Expr]:
    """Inner functions with det(h_ij) = 0 identically."""
    dd = const(d)
    inners = [
        pow_(_linear(_weights(rng, n)), dd),
        pow_(_linear([1.0] * n), dd),
    ]
    if n >= 3:
        # x1 + sqrt(x2 x3) + ...: singular profile
        rest = [var(i) for i in range(3, n)]
        core = sum_of([var(0), sqrt(mul(var(1), var(2)))] + rest)
        inners.append(pow_(mul(const(1.0 / n), core), dd))
    return inners


def linearly_homogeneous_battery(
    count: int = 100, seed: int = DEFAULT_SEED
) -> List[Tuple[int, Expr]]:
    """
    ``count`` degree-1 functions cycling through perfect substitutes,
    Cobb-Douglas with sum(alpha) = 1, ACMS with d = 1 and x1*phi(x_2/x1, ...).
    """
    rng = np.random.default_rng(seed)
    battery = []
    for k in range(count):
        n = ARITIES[k % len(ARITIES)]
        family = (k // len(ARITIES)) % 4
        if family == 0:
            h = _linear(_weights(rng, n))
        elif family == 1:
            alphas = rng.uniform(0.5, 1.5, size=n)
            alphas = alphas / alphas.sum()
            h = product_of([pow_(var(i), const(float(a))) for i, a in enumerate(alphas)])
        elif family == 2:
            rho = float(rng.choice([-1.0, 0.5, 2.0, 3.0]))
            c = _weights(rng, n)
            terms = [mul(const(c[i]), pow_(var(i), const(rho))) for i in range(n)]
            h = pow_(sum_of(terms), const(1.0 / rho))
        else:
            h = _profile_linear(n, rng)
        battery.append((n, h))
    return battery


def singular_profiles() -> List[Tuple[OuterFamily, Expr, int]]:
    """(outer, phi, n) with det(phi_ij) = 0, so F(x1 phi(...)) is flat."""
    u2, u3, u4 = var(0), var(1), var(2)
    return [
        (OuterFamily.identity(), exp(u2) + u3, 3),
        (OuterFamily.power(1.0, 2.0), exp(u2) + u3, 3),
        (OuterFamily.log(), const(2.0) + mul(const(3.0), u2), 2),
        (OuterFamily.power(1.0, 2.0), const(1.0) + sqrt(mul(u2, u3)), 3),
        (OuterFamily.exp(0.5), sqrt(u2) + u3, 3),
        (OuterFamily.power(1.0, 3.0), pow_(const(1.0) + u2 + mul(const(2.0), u3), const(2.0)), 3),
        (OuterFamily.log(2.0, 1.0), ln(const(1.0) + u2 + u3) + const(3.0), 3),
        (OuterFamily.power(1.0, 0.5), exp(u2) + u3 + u4, 4),
        (OuterFamily.affine(2.0, 7.0), u2 + mul(u3, u3) + const(1.0), 3),
        (OuterFamily.power(2.0, 2.0, 1.0), pow_(const(1.0) + u2 + u3 + u4, const(1.5)), 4),
    ]


def _spec(outer: OuterFamily, text: str, degree: float, names: str) -> HomotheticSpec:
    variables = VarSpec.from_string(names)
    return HomotheticSpec(outer, parse(text, variables), degree, variables.arity)


def two_input_suite() -> List[Tuple[HomotheticSpec, TwoInputCase]]:
    """Ten labeled instances per two-input case."""
    power = OuterFamily.power
    case1 = TwoInputCase.INNER_PERFECT_SUBSTITUTE_POWER
    case2 = TwoInputCase.LINEAR_HOMOGENEOUS_UP_TO_CONSTANTS
    not_flat = TwoInputCase.NOT_FLAT
    xy = "x,y"
    return [
        (_spec(power(1.0, 3.0), "(2*x+3*y)^2", 2.0, xy), case1),
        (_spec(OuterFamily.identity(), "x+y", 1.0, xy), case1),
        (_spec(OuterFamily.log(), "(x+2*y)^3", 3.0, xy), case1),
        (_spec(OuterFamily.exp(), "(0.5*x+0.25*y)^2", 2.0, xy), case1),
        (_spec(power(1.0, 2.0), "(x+y)^(-1)", -1.0, xy), case1),
        (_spec(OuterFamily.affine(3.0, 5.0), "(3*x+y)^0.5", 0.5, xy), case1),
        (_spec(power(2.0, 0.5, 1.0), "(x+4*y)^3", 3.0, xy), case1),
        (_spec(OuterFamily.log(2.0, 1.0), "(2*x+y)^0.5", 0.5, xy), case1),
        (_spec(power(1.0, -2.0), "0.5*x+1.5*y", 1.0, xy), case1),
        (_spec(OuterFamily.exp(0.5), "(x+y)^2/4", 2.0, xy), case1),
        (_spec(OuterFamily.affine(3.0, 5.0), "x^0.4*y^0.6", 1.0, xy), case2),
        (_spec(OuterFamily.identity(), "sqrt(x*y)", 1.0, xy), case2),
        (_spec(power(1.0, 0.5), "x*y", 2.0, xy), case2),
        (_spec(power(1.0, 0.5, 2.0), "x^2+y^2", 2.0, xy), case2),
        (_spec(power(2.0, 1.0 / 3.0), "x^2*y", 3.0, xy), case2),
        (_spec(power(1.0, -1.0), "x^(-0.5)*y^(-0.5)", -1.0, xy), case2),
        (_spec(power(1.0, 2.0, -1.0), "(x^0.5+y^0.5)", 0.5, xy), case2),
        (_spec(OuterFamily.affine(0.5, 0.0), "(x^2+y^2)^0.5", 1.0, xy), case2),
        (_spec(power(1.0, 0.25), "x^3*y+x*y^3", 4.0, xy), case2),
        (_spec(power(1.0, 0.5), "x^2+x*y+y^2", 2.0, xy), case2),
        (_spec(OuterFamily.identity(), "x^2*y", 3.0, xy), not_flat),
        (_spec(power(1.0, 2.0), "x^2+y^2", 2.0, xy), not_flat),
        (_spec(OuterFamily.log(), "x*y", 2.0, xy), not_flat),
        (_spec(OuterFamily.exp(), "sqrt(x*y)", 1.0, xy), not_flat),
        (_spec(power(1.0, 2.0), "x^0.5*y^0.5", 1.0, xy), not_flat),
        (_spec(OuterFamily.identity(), "x^3+y^3", 3.0, xy), not_flat),
        (_spec(OuterFamily.log(), "x^2+y^2", 2.0, xy), not_flat),
        (_spec(power(1.0, 3.0), "x^0.3*y^0.7", 1.0, xy), not_flat),
        (_spec(OuterFamily.affine(2.0, 1.0), "x^(-1)*y^(-1)", -2.0, xy), not_flat),
        (_spec(OuterFamily.identity(), "(x^2+y^2)^0.25", 0.5, xy), not_flat),
    ]


def many_input_suite() -> List[Tuple[HomotheticSpec, ManyInputCase]]:
    power = OuterFamily.power
    profile = ManyInputCase.PROFILE_FLAT
    linear = ManyInputCase.LINEAR_HOMOGENEOUS_UP_TO_CONSTANTS
    not_flat = ManyInputCase.NOT_FLAT
    xyz = "x,y,z"
    x4 = "x1,x2,x3,x4"
    return [
        (_spec(power(1.0, 2.0), "x+sqrt(y*z)", 1.0, xyz), profile),
        (_spec(power(1.0, 2.0), "(x+sqrt(y*z))^2", 2.0, xyz), profile),
        (_spec(OuterFamily.log(), "x*exp(y/x)+z", 1.0, xyz), profile),
        (_spec(OuterFamily.exp(0.5), "x+y+sqrt(z*x)", 1.0, xyz), profile),
        (_spec(power(1.0, 3.0), "x1+x2+sqrt(x3*x4)", 1.0, x4), profile),
        (_spec(OuterFamily.affine(2.0, 7.0), "(x*y*z)^(1/3)", 1.0, xyz), linear),
        (_spec(power(1.0, 0.5), "x^2+y^2+z^2", 2.0, xyz), linear),
        (_spec(OuterFamily.identity(), "x1^0.25*x2^0.25*x3^0.25*x4^0.25", 1.0, x4), linear),
        (_spec(power(1.0, 1.0 / 3.0, 1.0), "x*y*z", 3.0, xyz), linear),
        (_spec(OuterFamily.identity(), "x+2*y+3*z", 1.0, xyz), linear),
        (_spec(OuterFamily.identity(), "x1^2+x2^2+x3^2", 2.0, "x1,x2,x3"), not_flat),
        (_spec(OuterFamily.log(), "x*y*z", 3.0, xyz), not_flat),
        (_spec(power(1.0, 2.0), "x^0.2*y^0.3*z^0.5", 1.0, xyz), not_flat),
        (_spec(OuterFamily.exp(), "(x*y*z)^(1/3)", 1.0, xyz), not_flat),
        (_spec(OuterFamily.identity(), "x1*x2+x3*x4", 2.0, x4), not_flat),
    ]


def differentiation_battery(seed: int = DEFAULT_SEED) -> List[Tuple[Expr, np.ndarray]]:
    """At least 500 (expression, point) pairs with non-vanishing Hessians."""
    rng = np.random.default_rng(seed)
    pairs = []
    outers = outer_battery()
    for n in ARITIES:
        for d in DEGREES:
            for h in inner_battery(n, d, rng):
                points = random_points(n, 4, rng)
                for outer in outers[2:]:
                    f = outer.compose(h)
                    pairs.extend((f, p) for p in points[:2])
                pairs.extend((h, p) for p in points)
    return pairs


def smooth_profiles(m: int) -> List[Expr]:
    """Positive profiles phi in ``m`` variables, singular and non-singular."""
    us = [var(i) for i in range(m)]
    squares = sum_of([mul(u, u) for u in us])
    return [
        mul(us[0], us[0]) if m == 1 else const(1.0) + squares,
        const(1.0) + squares,
        exp(us[0]) + sum_of(us[1:]) if m > 1 else exp(us[0]),
        pow_(const(1.0) + sum_of(us), const(1.5)),
        sqrt(const(1.0) + squares),
    ]

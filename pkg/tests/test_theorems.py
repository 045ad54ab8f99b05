#!/usr/bin/env python3
"""
Unit tests for the composite Hessian identities.

Tests cover the determinant of F(h) against its closed forms, the radial
ODE, the two-input bracket and the profile identity.
"""

import unittest

import numpy as np

from ma_core.batteries import (
    ARITIES,
    DEGREES,
    inner_battery,
    linearly_homogeneous_battery,
    outer_battery,
    smooth_profiles,
)
from ma_core.errors import ArityError, DegreeOne, DimensionError, ZeroFPrime
from ma_core.expr import VarSpec, parse, var
from ma_core.homothetic import HomotheticSpec, OuterFamily
from ma_core.sampling import random_points
from ma_core.theorems import (
    bracket2,
    bracket_chain,
    composite_hessian_identity,
    cramer_residual,
    euler_substituted_identity,
    factorization_identity,
    ode_residual,
    profile_identity,
)

XY = VarSpec(("x", "y"))


def _battery(seed=11, points=2):
    """Every (outer, inner) pair of the batteries at a few random points."""
    rng = np.random.default_rng(seed)
    for n in ARITIES:
        for d in DEGREES:
            for h in inner_battery(n, d, rng):
                for outer in outer_battery():
                    spec = HomotheticSpec(outer, h, d, n)
                    for x in random_points(n, points, rng):
                        yield spec, x


class TestCompositeHessian(unittest.TestCase):
    """Test det(f_ij) = F'^(n-1) {F' det(h_ij) + F'' sum h_i h_j H_ij}."""

    def setUp(self):
        self.spec = HomotheticSpec(
            OuterFamily.power(1.0, 2.0), parse("x^2 + y^2", XY), 2.0, 2
        )

    def test_hand_oracle(self):
        """Test F = u^2, h = x^2 + y^2 at (1, 1)."""
        check = composite_hessian_identity(self.spec, [1.0, 1.0])
        self.assertAlmostEqual(check.lhs, 192.0, places=9)
        self.assertAlmostEqual(check.rhs_corrected, 192.0, places=9)
        self.assertAlmostEqual(check.rhs_uncorrected, 768.0, places=9)
        self.assertAlmostEqual(check.uncorrected_ratio, 4.0, places=12)
        self.assertAlmostEqual(check.f_prime, 4.0)
        self.assertLess(check.relerr, 1e-12)
        self.assertGreater(check.uncorrected_relerr, 0.5)

    def test_battery(self):
        """Test the identity over the outer and inner batteries."""
        worst = max(
            composite_hessian_identity(spec, x).relerr for spec, x in _battery()
        )
        self.assertLessEqual(worst, 1e-9)

    def test_uncorrected_ratio_is_f_prime(self):
        """Test rhs with F'^n overshoots by exactly F'."""
        check = composite_hessian_identity(self.spec, [0.7, 1.9])
        self.assertAlmostEqual(check.uncorrected_ratio / check.f_prime, 1.0, places=9)

    def test_one_input(self):
        """Test the identity for a single input."""
        spec = HomotheticSpec(OuterFamily.log(), var(0) ** 3, 3.0, 1)
        self.assertLess(composite_hessian_identity(spec, [1.5]).relerr, 1e-12)

    def test_point_dimension(self):
        """Test that the point must match the arity."""
        with self.assertRaises(DimensionError):
            composite_hessian_identity(self.spec, [1.0, 1.0, 1.0])

    def test_zero_f_prime(self):
        """Test that F'(h(x)) = 0 is reported."""
        outer = OuterFamily.from_expr(parse("(u - 2)^2", VarSpec(("u",))))
        spec = HomotheticSpec(outer, parse("x*y", XY), 2.0, 2)
        with self.assertRaises(ZeroFPrime):
            composite_hessian_identity(spec, [1.0, 2.0])

    def test_to_dict(self):
        """Test the serialized check."""
        data = composite_hessian_identity(self.spec, [1.0, 1.0]).to_dict()
        self.assertIn("rhs_uncorrected", data)
        self.assertAlmostEqual(data["uncorrected_ratio"], 4.0, places=12)


class TestFactorization(unittest.TestCase):
    """Test det(f_ij) = det(h_ij) F'^(n-1) / (d-1) {(d-1) F' + d h F''}."""

    def test_hand_oracle(self):
        """Test F = u^2, h = x^2 + y^2 at (1, 1) gives 192."""
        spec = HomotheticSpec(OuterFamily.power(1.0, 2.0), parse("x^2+y^2", XY), 2.0, 2)
        check = factorization_identity(spec, [1.0, 1.0])
        self.assertAlmostEqual(check.rhs, 192.0, places=9)
        self.assertLess(check.relerr, 1e-12)

    def test_battery_per_degree(self):
        """Test the factorization for every battery degree."""
        worst = {}
        for spec, x in _battery(seed=12, points=1):
            relerr = factorization_identity(spec, x).relerr
            worst[spec.degree] = max(worst.get(spec.degree, 0.0), relerr)
        self.assertEqual(set(worst), set(DEGREES))
        for d, relerr in worst.items():
            self.assertLessEqual(relerr, 1e-9, f"degree {d}")

    def test_euler_substituted_battery(self):
        """Test the identity after Euler substitution of h_i."""
        worst = max(
            euler_substituted_identity(spec, x).relerr
            for spec, x in _battery(seed=13, points=1)
        )
        self.assertLessEqual(worst, 1e-9)

    def test_degree_one(self):
        """Test that d = 1 is refused."""
        spec = HomotheticSpec(OuterFamily.log(), parse("x+y", XY), 1.0, 2)
        with self.assertRaises(DegreeOne):
            factorization_identity(spec, [1.0, 1.0])
        with self.assertRaises(DegreeOne):
            euler_substituted_identity(spec, [1.0, 1.0])


class TestRadialODE(unittest.TestCase):
    """Test d u F'' + (d-1) F' = 0."""

    def setUp(self):
        self.us = np.linspace(0.5, 2.0, 7)

    def test_solutions(self):
        """Test F = alpha u^(1/d) + beta solves the ODE."""
        for d in DEGREES:
            for alpha, beta in ((1.0, 0.0), (2.5, -1.0), (0.3, 4.0)):
                outer = OuterFamily.power(alpha, 1.0 / d, beta)
                worst = max(ode_residual(outer, d, u) for u in self.us)
                self.assertLessEqual(worst, 1e-12, f"d={d}")

    def test_non_solutions(self):
        """Test that other outers leave a residual above 1e-2."""
        for d in DEGREES:
            for outer in outer_battery():
                if outer.power_exponent == 1.0 / d:
                    continue
                worst = max(ode_residual(outer, d, u) for u in self.us)
                self.assertGreater(worst, 1e-2, f"{outer.describe()} d={d}")


class TestTwoInputBracket(unittest.TestCase):
    """Test h_1^2 h_22 + h_2^2 h_11 - 2 h_1 h_2 h_12."""

    def test_bracket_value(self):
        """Test the bracket of x*y at (1, 2)."""
        self.assertAlmostEqual(bracket2(parse("x*y", XY), [1.0, 2.0]), -4.0)

    def test_chain_for_degree_one(self):
        """Test the chain rewrite on two-input degree-1 functions."""
        two_input = [h for n, h in linearly_homogeneous_battery(60) if n == 2]
        rng = np.random.default_rng(5)
        for h in two_input:
            for x in random_points(2, 3, rng):
                check = bracket_chain(h, x)
                self.assertLessEqual(check.relerr, 1e-9)
                self.assertLessEqual(check.euler_relerr, 1e-9)

    def test_euler_factor_degree(self):
        """Test (x h_1 + y h_2)^2 = d^2 h^2 for d = 3."""
        check = bracket_chain(parse("x^2*y", XY), [1.5, 0.5], d=3.0)
        self.assertLess(check.euler_relerr, 1e-12)

    def test_arity(self):
        """Test that the bracket is two-input only."""
        with self.assertRaises(ArityError):
            bracket2(parse("x*y", XY), [1.0, 2.0, 3.0])

    def test_cramer(self):
        """Test x_i det(h_ij) = 0 for degree 1 and not for degree 2."""
        self.assertLess(cramer_residual(parse("sqrt(x*y)", XY), [1.0, 2.0]), 1e-12)
        self.assertGreater(cramer_residual(parse("x*y", XY), [1.0, 2.0]), 0.1)


class TestProfileIdentity(unittest.TestCase):
    """Test x_1^(n-1) det(f_ij) = phi^2 F'^(n-1) F'' det(phi_ij)."""

    def test_hand_oracle(self):
        """Test F = u^2, phi = v^2 at (1, 2): both sides 512."""
        check = profile_identity(OuterFamily.power(1.0, 2.0), var(0) ** 2, [1.0, 2.0])
        self.assertAlmostEqual(check.lhs, 512.0, places=8)
        self.assertAlmostEqual(check.rhs, 512.0, places=8)

    def test_battery(self):
        """Test the identity over smooth profiles and outers."""
        rng = np.random.default_rng(9)
        worst = 0.0
        for n in ARITIES:
            for phi in smooth_profiles(n - 1):
                for outer in outer_battery():
                    for x in random_points(n, 2, rng):
                        worst = max(worst, profile_identity(outer, phi, x).relerr)
        self.assertLessEqual(worst, 1e-9)

    def test_positive_first_coordinate(self):
        """Test that x_1 must be positive."""
        with self.assertRaises(ValueError):
            profile_identity(OuterFamily.log(), var(0), [-1.0, 1.0])


if __name__ == "__main__":
    unittest.main(verbosity=2)

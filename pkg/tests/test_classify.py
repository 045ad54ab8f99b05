#!/usr/bin/env python3
"""
Unit tests for the flat-case classifications.

Tests cover the labeled two-input and many-input suites, profiles and
their reconstruction, and the degree-not-one alternatives.
"""

import unittest

import numpy as np

from ma_core.batteries import (
    ARITIES,
    DEGREES,
    flat_inner_battery,
    many_input_suite,
    outer_battery,
    singular_profiles,
    two_input_suite,
)
from ma_core.errors import ArityError, DegreeOne, Inconsistent, NotLinearlyHomogeneous
from ma_core.expr import VarSpec, eval_scalar, mul, parse, var
from ma_core.geometry import Flatness, flatness
from ma_core.homothetic import HomotheticSpec, OuterFamily
from ma_core.sampling import sobol_points
from ma_core.theorems import (
    ManyInputCase,
    TwoInputCase,
    classify_n_input,
    classify_two_input,
    construct_from_profile,
    null_curvature_reason,
    profile_flatness,
    profile_of,
    reconstruct_from_profile,
)
from ma_core.tolerances import Tolerances

XY = VarSpec(("x", "y"))
XYZ = VarSpec(("x", "y", "z"))


class TestTwoInput(unittest.TestCase):
    """Test classify_two_input on the labeled suite."""

    def test_suite(self):
        """Test all thirty labeled instances."""
        suite = two_input_suite()
        self.assertEqual(len(suite), 30)
        for spec, expected in suite:
            result = classify_two_input(spec)
            self.assertEqual(result.case, expected, str(spec.composite))

    def test_suite_has_ten_per_case(self):
        """Test the suite balance."""
        cases = [expected for _, expected in two_input_suite()]
        for case in TwoInputCase:
            self.assertEqual(cases.count(case), 10)

    def test_perfect_substitute_coefficients(self):
        """Test that a and b are recovered from h = (2x + 3y)^2."""
        spec = HomotheticSpec(
            OuterFamily.power(1.0, 3.0), parse("(2*x+3*y)^2", XY), 2.0, 2
        )
        result = classify_two_input(spec)
        self.assertEqual(result.case, TwoInputCase.INNER_PERFECT_SUBSTITUTE_POWER)
        self.assertAlmostEqual(result.a, 2.0, places=9)
        self.assertAlmostEqual(result.b, 3.0, places=9)
        self.assertFalse(result.both_cases)

    def test_square_root_outer_recovers_coefficients(self):
        """Test F = u^0.5 of (2x + 3y)^2, where f is linear."""
        spec = HomotheticSpec(
            OuterFamily.power(1.0, 0.5), parse("(2*x+3*y)^2", XY), 2.0, 2
        )
        result = classify_two_input(spec)
        self.assertEqual(result.case, TwoInputCase.INNER_PERFECT_SUBSTITUTE_POWER)
        self.assertAlmostEqual(result.a, 2.0, places=9)
        self.assertAlmostEqual(result.b, 3.0, places=9)

    def test_overlap_is_flagged(self):
        """Test that F(x + y) with affine F satisfies both cases."""
        spec = HomotheticSpec(OuterFamily.affine(2.0, 1.0), parse("x+y", XY), 1.0, 2)
        result = classify_two_input(spec)
        self.assertEqual(result.case, TwoInputCase.INNER_PERFECT_SUBSTITUTE_POWER)
        self.assertTrue(result.both_cases)
        self.assertEqual(result.to_dict()["case"], "InnerPerfectSubstitutePower")

    def test_evidence(self):
        """Test the reported evidence keys."""
        spec = HomotheticSpec(OuterFamily.identity(), parse("sqrt(x*y)", XY), 1.0, 2)
        result = classify_two_input(spec)
        self.assertEqual(result.case, TwoInputCase.LINEAR_HOMOGENEOUS_UP_TO_CONSTANTS)
        for key in (
            "max_ma_residual",
            "linear_inner_residual",
            "linear_inner_gradient_spread",
            "radial_affinity_residual",
        ):
            self.assertIn(key, result.evidence)

    def test_inconsistent(self):
        """Test an Indeterminate verdict that no case explains."""
        spec = HomotheticSpec(OuterFamily.identity(), parse("x^2+y^2", XY), 2.0, 2)
        tolerances = Tolerances(flat=1e-6, reject=1.0)
        with self.assertRaises(Inconsistent) as ctx:
            classify_two_input(spec, tolerances=tolerances)
        self.assertIn("max_ma_residual", ctx.exception.evidence)

    def test_arity(self):
        """Test that three inputs are refused."""
        spec = HomotheticSpec(OuterFamily.identity(), parse("x+y+z", XYZ), 1.0, 3)
        with self.assertRaises(ArityError):
            classify_two_input(spec)


class TestFlatInnerClosure(unittest.TestCase):
    """Test that every outer keeps a flat inner flat."""

    def test_outer_battery_over_flat_inners(self):
        """Test F(h) is flat for every flat h and every battery outer."""
        rng = np.random.default_rng(42)
        for n in ARITIES:
            samples = sobol_points(n, 32)
            for d in DEGREES:
                for h in flat_inner_battery(n, d, rng):
                    for outer in outer_battery():
                        f = outer.compose(h)
                        verdict = flatness(f, samples)
                        self.assertEqual(
                            verdict.verdict,
                            Flatness.FLAT,
                            f"{outer.describe()} of {h}: {verdict.max_residual}",
                        )


class TestManyInput(unittest.TestCase):
    """Test classify_n_input on the labeled suite."""

    def test_suite(self):
        """Test all labeled instances."""
        suite = many_input_suite()
        self.assertEqual(len(suite), 15)
        for spec, expected in suite:
            result = classify_n_input(spec)
            self.assertEqual(result.case, expected, str(spec.composite))

    def test_profile_returned(self):
        """Test that the profile of x + sqrt(y z) is 1 + sqrt(u2 u3)."""
        spec = HomotheticSpec(
            OuterFamily.power(1.0, 2.0), parse("x+sqrt(y*z)", XYZ), 1.0, 3
        )
        result = classify_n_input(spec)
        self.assertEqual(result.case, ManyInputCase.PROFILE_FLAT)
        self.assertAlmostEqual(eval_scalar(result.profile, [4.0, 9.0]), 7.0)
        self.assertEqual(result.to_dict()["case"], "ProfileFlat")

    def test_arity(self):
        """Test that two inputs are refused."""
        spec = HomotheticSpec(OuterFamily.identity(), parse("x+y", XY), 1.0, 2)
        with self.assertRaises(ArityError):
            classify_n_input(spec)


class TestProfiles(unittest.TestCase):
    """Test profile extraction, reconstruction and construction."""

    def test_round_trip(self):
        """Test x1 * phi(x2/x1, x3/x1) rebuilds h."""
        h = parse("x+sqrt(y*z)+y^2/x", XYZ)
        rebuilt = reconstruct_from_profile(profile_of(h, 3), 3)
        for point in sobol_points(3, 8):
            self.assertAlmostEqual(eval_scalar(rebuilt, point), eval_scalar(h, point))

    def test_not_linearly_homogeneous(self):
        """Test that profiles need degree 1."""
        with self.assertRaises(NotLinearlyHomogeneous):
            profile_of(parse("x*y*z", XYZ), 3)

    def test_singular_profiles_are_flat(self):
        """Test that F(x1 phi(...)) is flat for every singular phi."""
        entries = singular_profiles()
        self.assertEqual(len(entries), 10)
        for outer, phi, n in entries:
            f = construct_from_profile(outer, phi, n)
            verdict = flatness(f, sobol_points(n))
            self.assertEqual(verdict.verdict, Flatness.FLAT, str(f))

    def test_non_singular_profile_warns(self):
        """Test that phi = u2*u3 under F = u^2 is not flat."""
        phi = mul(var(0), var(1))
        with self.assertLogs("ma_core.theorems", level="WARNING"):
            f = construct_from_profile(OuterFamily.power(1.0, 2.0), phi, 3)
        self.assertEqual(flatness(f, sobol_points(3)).verdict, Flatness.NOT_FLAT)
        self.assertEqual(profile_flatness(phi, 3).verdict, Flatness.NOT_FLAT)

    def test_affine_outer_keeps_any_profile_flat(self):
        """Test that phi = u2*u3 under the identity is flat."""
        f = construct_from_profile(OuterFamily.identity(), mul(var(0), var(1)), 3)
        self.assertEqual(flatness(f, sobol_points(3)).verdict, Flatness.FLAT)


class TestDegreeNotOne(unittest.TestCase):
    """Test flat iff h flat or f linearly homogeneous up to constants."""

    def test_explained_cases(self):
        """Test the alternatives on flat and non-flat composites."""
        cases = [
            (OuterFamily.power(1.0, 0.5), "x*y", True),
            (OuterFamily.log(), "(x+2*y)^3", True),
            (OuterFamily.power(1.0, 2.0), "x^2+y^2", False),
        ]
        for outer, text, flat in cases:
            degree = 2.0 if text != "(x+2*y)^3" else 3.0
            spec = HomotheticSpec(outer, parse(text, XY), degree, 2)
            reason = null_curvature_reason(spec)
            self.assertTrue(reason.explained, text)
            self.assertEqual(reason.flatness.is_flat, flat)

    def test_inner_flat_branch(self):
        """Test that a flat inner explains the flat composite."""
        spec = HomotheticSpec(OuterFamily.log(), parse("(x+2*y)^3", XY), 3.0, 2)
        reason = null_curvature_reason(spec)
        self.assertTrue(reason.inner_flatness.is_flat)
        self.assertFalse(reason.radially_affine)

    def test_degree_one_refused(self):
        """Test that d = 1 is refused."""
        spec = HomotheticSpec(OuterFamily.log(), parse("x+y", XY), 1.0, 2)
        with self.assertRaises(DegreeOne):
            null_curvature_reason(spec)


if __name__ == "__main__":
    unittest.main(verbosity=2)

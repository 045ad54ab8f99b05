#!/usr/bin/env python3
"""
Unit tests for the models module.

Tests cover the production models, their analytic flatness predicates and
the cross-check against the numerical verdict.
"""

import unittest

from ma_core.errors import Mismatch, UnsupportedOuter
from ma_core.expr import VarSpec, eval_scalar, parse
from ma_core.geometry import Flatness, flatness, ma_residual
from ma_core.homogeneity import mrs_degree_zero_residual, scaling_residual
from ma_core.homothetic import OuterFamily
from ma_core.models import (
    ACMS,
    CobbDouglas,
    PerfectSubstitute,
    analytic_flatness,
    corollary_grid,
    corollary_models,
    corollary_outers,
    cross_check,
)
from ma_core.sampling import sobol_points
from ma_core.tolerances import Tolerances


class TestModels(unittest.TestCase):
    """Test model construction and expressions."""

    def test_perfect_substitute(self):
        """Test 2x + 3y."""
        model = PerfectSubstitute((2.0, 3.0))
        self.assertAlmostEqual(eval_scalar(model.to_expr(), [1.0, 2.0]), 8.0)
        self.assertEqual(model.degree, 1.0)
        self.assertEqual(model.describe(), "perfsub:a=2:3")

    def test_cobb_douglas(self):
        """Test gamma x^a y^b and its degree."""
        model = CobbDouglas(2.0, (0.5, 1.5))
        self.assertAlmostEqual(eval_scalar(model.to_expr(), [4.0, 1.0]), 4.0)
        self.assertEqual(model.degree, 2.0)
        self.assertEqual(model.describe(), "cobb-douglas:gamma=2,alpha=0.5:1.5")

    def test_two_input_cobb_douglas(self):
        """Test b L^k C^(1-k)."""
        model = CobbDouglas.two_input(1.5, 0.4)
        self.assertEqual(model.gamma, 1.5)
        self.assertAlmostEqual(model.alphas[1], 0.6)
        self.assertAlmostEqual(model.degree, 1.0)

    def test_acms(self):
        """Test gamma (sum a_i^rho x_i^rho)^(d/rho)."""
        model = ACMS(1.0, (1.0, 1.0), 2.0, 1.0)
        self.assertAlmostEqual(eval_scalar(model.to_expr(), [3.0, 4.0]), 5.0)
        self.assertAlmostEqual(model.elasticity, -1.0)
        self.assertIsNone(ACMS(1.0, (1.0, 2.0), 1.0).elasticity)

    def test_acms_from_share(self):
        """Test the share parameterization."""
        model = ACMS.from_share(1.2, 0.3, 0.5)
        expected = 1.2 * (0.3 * 4.0**0.5 + 0.7 * 9.0**0.5) ** 2.0
        self.assertAlmostEqual(eval_scalar(model.to_expr(), [4.0, 9.0]), expected)

    def test_invalid_parameters(self):
        """Test that degenerate models are rejected."""
        with self.assertRaises(ValueError):
            PerfectSubstitute((1.0,))
        with self.assertRaises(ValueError):
            CobbDouglas(1.0, (0.5, 0.0))
        with self.assertRaises(ValueError):
            ACMS(1.0, (1.0, 1.0), 0.0)
        with self.assertRaises(ValueError):
            ACMS(-1.0, (1.0, 1.0), 2.0)

    def test_models_are_homogeneous(self):
        """Test model(t x) = t^d model(x) for every grid model."""
        for model in corollary_models():
            e = model.to_expr()
            for point in sobol_points(model.arity, 8):
                for t in (0.5, 2.0, 10.0):
                    residual = scaling_residual(e, point, t, model.degree)
                    self.assertLess(residual, 1e-12, model.describe())

    def test_composites_are_homothetic(self):
        """Test MRS of F(model) is unchanged along rays."""
        for model in corollary_models():
            for outer in corollary_outers(model):
                f = outer.compose(model.to_expr())
                for point in sobol_points(model.arity, 8):
                    for t in (0.5, 2.0):
                        self.assertLessEqual(
                            mrs_degree_zero_residual(f, point, t),
                            1e-9,
                            f"{outer.describe()} of {model.describe()}",
                        )


class TestAnalyticFlatness(unittest.TestCase):
    """Test the closed-form predicates."""

    def test_perfect_substitute_always_flat(self):
        """Test that any outer of a perfect substitute is flat."""
        model = PerfectSubstitute((1.0, 2.0, 0.5))
        for outer in (OuterFamily.log(), OuterFamily.exp(), OuterFamily.power(1.0, 3.0)):
            self.assertEqual(analytic_flatness(model, outer).expected, Flatness.FLAT)

    def test_cobb_douglas_exponent_sum(self):
        """Test flat iff p * sum(alpha) = 1."""
        cases = [
            ((0.3, 0.7), OuterFamily.identity(), Flatness.FLAT),
            ((0.35, 0.35), OuterFamily.identity(), Flatness.NOT_FLAT),
            ((0.65, 0.65), OuterFamily.identity(), Flatness.NOT_FLAT),
            ((0.25, 0.25), OuterFamily.power(1.0, 2.0), Flatness.FLAT),
            ((0.5, 0.5), OuterFamily.power(1.0, 2.0), Flatness.NOT_FLAT),
            ((0.3, 0.7), OuterFamily.log(), Flatness.NOT_FLAT),
        ]
        for alphas, outer, expected in cases:
            verdict = analytic_flatness(CobbDouglas(1.0, alphas), outer)
            self.assertEqual(verdict.expected, expected, f"{alphas} {outer.describe()}")

    def test_cobb_douglas_strict_reading(self):
        """Test that the strict reading differs for a non-affine flat pair."""
        verdict = analytic_flatness(
            CobbDouglas(1.0, (0.25, 0.25)), OuterFamily.power(1.0, 2.0)
        )
        self.assertEqual(verdict.expected, Flatness.FLAT)
        self.assertEqual(verdict.strict_expected, Flatness.NOT_FLAT)

    def test_square_of_balanced_cobb_douglas(self):
        """Test (x^0.5 y^0.5)^2 = x y with det -1 at every sample."""
        f = OuterFamily.power(1.0, 2.0).compose(CobbDouglas(1.0, (0.5, 0.5)).to_expr())
        for point in sobol_points(2):
            self.assertLessEqual(abs(ma_residual(f, point).raw + 1.0), 1e-12)

    def test_acms(self):
        """Test flat iff rho = 1 or p * d = 1."""
        cases = [
            (1.0, 2.0, OuterFamily.log(), Flatness.FLAT),
            (2.0, 1.0, OuterFamily.identity(), Flatness.FLAT),
            (2.0, 2.0, OuterFamily.power(1.0, 0.5), Flatness.FLAT),
            (0.5, 2.0, OuterFamily.identity(), Flatness.NOT_FLAT),
            (2.0, 1.0, OuterFamily.exp(), Flatness.NOT_FLAT),
        ]
        for rho, d, outer, expected in cases:
            verdict = analytic_flatness(ACMS(1.0, (1.0, 1.0), rho, d), outer)
            self.assertEqual(verdict.expected, expected, f"rho={rho} d={d}")

    def test_expression_outer_unsupported(self):
        """Test that expression outers have no predicate."""
        outer = OuterFamily.from_expr(parse("u^2", VarSpec(("u",))))
        with self.assertRaises(UnsupportedOuter):
            analytic_flatness(PerfectSubstitute((1.0, 1.0)), outer)


class TestCrossCheck(unittest.TestCase):
    """Test analytic against numerical verdicts."""

    def test_agreement(self):
        """Test a flat and a non-flat pair."""
        model = CobbDouglas(1.0, (0.3, 0.7))
        self.assertTrue(cross_check(model, OuterFamily.identity()).agrees)
        self.assertTrue(cross_check(model, OuterFamily.power(1.0, 2.0)).agrees)

    def test_mismatch_raises(self):
        """Test that a disagreement raises Mismatch with evidence."""
        model = CobbDouglas(1.0, (0.3, 0.7))
        samples = sobol_points(2)
        loose = Tolerances(flat=1.0, reject=1.0)
        with self.assertLogs("ma_core.models", level="WARNING"):
            with self.assertRaises(Mismatch) as ctx:
                cross_check(model, OuterFamily.power(1.0, 2.0), samples, loose)
        self.assertFalse(ctx.exception.evidence["agrees"])

    def test_mismatch_reported(self):
        """Test raise_on_mismatch=False returns the report."""
        model = CobbDouglas(1.0, (0.3, 0.7))
        loose = Tolerances(flat=1.0, reject=1.0)
        with self.assertLogs("ma_core.models", level="WARNING"):
            report = cross_check(
                model, OuterFamily.power(1.0, 2.0), None, loose, raise_on_mismatch=False
            )
        self.assertFalse(report.agrees)

    def test_corollary_grid(self):
        """Test that every grid pair agrees."""
        reports = corollary_grid()
        self.assertGreater(len(reports), 90)
        disagreeing = [r.to_dict() for r in reports if not r.agrees]
        self.assertEqual(disagreeing, [])

    def test_numerical_cobb_douglas_grid(self):
        """Test the numerical verdict over a grid of exponent sums."""
        samples = sobol_points(2)
        for total in (0.5, 0.8, 1.0, 1.2, 2.0):
            f = CobbDouglas(1.0, (0.4 * total, 0.6 * total)).to_expr()
            expected = Flatness.FLAT if total == 1.0 else Flatness.NOT_FLAT
            self.assertEqual(flatness(f, samples).verdict, expected, str(total))


if __name__ == "__main__":
    unittest.main(verbosity=2)

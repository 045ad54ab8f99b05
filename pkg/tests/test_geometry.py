#!/usr/bin/env python3
"""
Unit tests for the geometry module.

Tests cover the Monge-Ampere residual, Gauss-Kronecker curvature and the
three-way flatness verdict.
"""

import unittest

import numpy as np

from ma_core.expr import VarSpec, parse
from ma_core.geometry import (
    Flatness,
    gauss_kronecker,
    graph_point,
    hessian_is_roundoff,
    ma_residual,
    point_geometry,
)
from ma_core.geometry import flatness as flatness_of
from ma_core.jets import jet_eval
from ma_core.sampling import sobol_points
from ma_core.tolerances import Tolerances

XY = VarSpec(("x", "y"))


class TestResidual(unittest.TestCase):
    """Test raw and normalized det(f_ij)."""

    def test_saddle(self):
        """Test x*y: det = -1 and normalized 1/2."""
        residual = ma_residual(parse("x*y", XY), [1.0, 2.0])
        self.assertAlmostEqual(residual.raw, -1.0)
        self.assertAlmostEqual(residual.normalized, 0.5)

    def test_scale_free(self):
        """Test that the normalized residual ignores a constant factor."""
        a = ma_residual(parse("x^2*y", XY), [1.0, 1.0]).normalized
        b = ma_residual(parse("1000*x^2*y", XY), [1.0, 1.0]).normalized
        self.assertAlmostEqual(a, b, places=12)

    def test_affine_composite_with_roundoff_hessian(self):
        """Test that 1.5 * ((2x + 3y)^2)^0.5 - 1 has normalized residual 0."""
        e = parse("1.5*((2*x+3*y)^2)^0.5 - 1", XY)
        for point in sobol_points(2, 16):
            self.assertEqual(ma_residual(e, point).normalized, 0.0)

    def test_roundoff_keeps_real_curvature(self):
        """Test that a genuine Hessian is not taken for round-off."""
        point = [1.0, 2.0]
        self.assertFalse(hessian_is_roundoff(jet_eval(parse("x*y", XY), point), point))
        self.assertTrue(hessian_is_roundoff(jet_eval(parse("2*x+3*y", XY), point), point))

    def test_constant_shift(self):
        """Test that adding a constant leaves det(f_ij) unchanged."""
        f = parse("x^2*y", XY)
        shifted = parse("x^2*y + 7", XY)
        for point in sobol_points(2, 16):
            a, b = ma_residual(f, point), ma_residual(shifted, point)
            self.assertEqual(a.raw, b.raw)
            self.assertEqual(a.normalized, b.normalized)

    def test_graph_point(self):
        """Test graph coordinates."""
        point = graph_point(parse("x+y", XY), [1.0, 2.0])
        self.assertEqual(point.coordinates, (1.0, 2.0, 3.0))


class TestGaussKronecker(unittest.TestCase):
    """Test curvature of the paraboloid (x^2 + y^2) / 2."""

    def test_origin(self):
        """Test K = 1 at the origin."""
        e = parse("(x^2 + y^2)/2", XY)
        self.assertAlmostEqual(gauss_kronecker(e, [0.0, 0.0]), 1.0)

    def test_off_origin(self):
        """Test K = 1/9 at (1, 1)."""
        e = parse("(x^2 + y^2)/2", XY)
        self.assertAlmostEqual(gauss_kronecker(e, [1.0, 1.0]), 1.0 / 9.0)

    def test_flat_graph(self):
        """Test K = 0 for a degree-one function."""
        self.assertAlmostEqual(gauss_kronecker(parse("sqrt(x*y)", XY), [1.0, 3.0]), 0.0)

    def test_curvature_agrees_with_residual(self):
        """Test that K and det(f_ij) share sign and zero set."""
        texts = ("x*y", "x^2+y^2", "x^0.5*y^0.5", "2*x+3*y", "x^2*y", "-(x^2+y^2)")
        for text in texts:
            e = parse(text, XY)
            for point in sobol_points(2, 16):
                raw = ma_residual(e, point).raw
                curvature = gauss_kronecker(e, point)
                self.assertEqual(np.sign(curvature), np.sign(raw), text)
                self.assertEqual(curvature == 0.0, raw == 0.0, text)

    def test_point_geometry(self):
        """Test the bundled point summary."""
        geometry = point_geometry(parse("x*y", XY), [2.0, 3.0])
        self.assertEqual(geometry.value, 6.0)
        self.assertEqual(geometry.gradient, (3.0, 2.0))
        self.assertAlmostEqual(geometry.det_hessian, -1.0)
        self.assertAlmostEqual(geometry.gauss_kronecker, -1.0 / 14.0**2)


class TestFlatness(unittest.TestCase):
    """Test Flat, NotFlat and Indeterminate verdicts."""

    def setUp(self):
        self.samples = sobol_points(2)

    def test_cobb_douglas_degree_one_is_flat(self):
        """Test x^0.3*y^0.7 is flat."""
        verdict = flatness_of(parse("x^0.3*y^0.7", XY), self.samples)
        self.assertEqual(verdict.verdict, Flatness.FLAT)
        self.assertTrue(verdict.is_flat)
        self.assertIsNone(verdict.witness)
        self.assertEqual(verdict.samples, 64)

    def test_saddle_is_not_flat(self):
        """Test x*y is not flat and reports a witness."""
        verdict = flatness_of(parse("x*y", XY), self.samples)
        self.assertEqual(verdict.verdict, Flatness.NOT_FLAT)
        self.assertAlmostEqual(verdict.max_residual, 0.5)
        self.assertEqual(verdict.witness, tuple(self.samples[verdict.witness_index]))
        self.assertEqual(verdict.to_dict()["verdict"], "NotFlat")

    def test_indeterminate_band(self):
        """Test a residual between the two thresholds."""
        tolerances = Tolerances(flat=1e-6, reject=0.9)
        verdict = flatness_of(parse("x*y", XY), self.samples, tolerances)
        self.assertEqual(verdict.verdict, Flatness.INDETERMINATE)

    def test_empty_samples(self):
        """Test that at least one sample is needed."""
        with self.assertRaises(ValueError):
            flatness_of(parse("x*y", XY), np.empty((0, 2)))

    def test_tolerance_order(self):
        """Test that flat must not exceed reject."""
        with self.assertRaises(ValueError):
            Tolerances(flat=1e-2, reject=1e-3)

    def test_equal_tolerances_leave_no_band(self):
        """Test that flat == reject is accepted and never Indeterminate."""
        tolerances = Tolerances(flat=0.5, reject=0.5)
        verdict = flatness_of(parse("x^2*y", XY), self.samples, tolerances)
        self.assertIn(verdict.verdict, (Flatness.FLAT, Flatness.NOT_FLAT))

    def test_perfect_substitute_power_under_root_is_flat(self):
        """Test ((2x + 3y)^2)^0.5, a linear function, is flat."""
        verdict = flatness_of(parse("((2*x+3*y)^2)^0.5", XY), self.samples)
        self.assertEqual(verdict.verdict, Flatness.FLAT)
        self.assertEqual(verdict.max_residual, 0.0)


if __name__ == "__main__":
    unittest.main(verbosity=2)

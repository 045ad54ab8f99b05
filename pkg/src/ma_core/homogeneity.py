# Homothetic MA - numerical analysis of homogeneous Monge-Ampere solutions
# Copyright (C) 2024 Kostas Patsis
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

"""
Homogeneity diagnostics.

Euler relations, degree estimation, marginal rates of substitution and the
radial test for "linearly homogeneous up to an additive constant".
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ma_core.errors import ZeroDerivative, ZeroValue
from ma_core.expr import Expr, eval_scalar
from ma_core.jets import jet_eval
from ma_core.sampling import probe_points
from ma_core.tolerances import DEFAULT_TOLERANCES

FLOOR = 1e-12
DEFAULT_TS = (0.5, 1.0, 2.0, 4.0)


@dataclass(frozen=True)
class DegreeEstimate:
    """Median of pointwise degree estimates and their spread (max - min)."""

    degree: float
    spread: float
    points_used: int

    def is_homogeneous(
        self, threshold: float = DEFAULT_TOLERANCES.homogeneity_spread
    ) -> bool:
        return self.spread <= threshold

    def matches(self, d: float, tol: float = DEFAULT_TOLERANCES.degree_match) -> bool:
        return self.is_homogeneous() and abs(self.degree - d) <= tol


def euler_residual(e: Expr, point: Sequence[float], d: float) -> float:
    """|x . grad e - d e| / max(|d e|, 1e-12)."""
    x = np.asarray(point, dtype=float)
    jet = jet_eval(e, x)
    lhs = float(x @ jet.gradient)
    rhs = d * jet.value
    return abs(lhs - rhs) / max(abs(rhs), FLOOR)


def estimate_degree(e: Expr, points: Sequence[Sequence[float]]) -> DegreeEstimate:
    """
    Pointwise d_k = (x . grad e) / e, reduced to median and spread.

    Raises:
        ZeroValue: e vanishes at a sample point
    """
    estimates = []
    for point in points:
        x = np.asarray(point, dtype=float)
        jet = jet_eval(e, x)
        if jet.value == 0.0:
            raise ZeroValue(f"Function vanishes at {x.tolist()}")
        estimates.append(float(x @ jet.gradient) / jet.value)
    if not estimates:
        raise ValueError("At least one point is required")
    values = np.array(estimates)
    return DegreeEstimate(
        degree=float(np.median(values)),
        spread=float(values.max() - values.min()),
        points_used=len(values),
    )


def second_euler_residual(e: Expr, point: Sequence[float], d: float) -> float:
    """
    ||Hess(e) x - (d-1) grad e||_inf, normalized by the larger of
    ||(d-1) grad e||_inf and the magnitude of the terms of Hess(e) x.
    """
    x = np.asarray(point, dtype=float)
    jet = jet_eval(e, x)
    lhs = jet.hessian @ x
    rhs = (d - 1.0) * jet.gradient
    scale = max(
        float(np.max(np.abs(rhs))),
        float(np.max(np.abs(jet.hessian) @ np.abs(x))),
        FLOOR,
    )
    return float(np.max(np.abs(lhs - rhs))) / scale


def mrs(e: Expr, point: Sequence[float], i: int, j: int) -> float:
    """
    Marginal rate of substitution f_i / f_j (0-based input indices).

    Raises:
        ZeroDerivative: f_j vanishes at the point
    """
    jet = jet_eval(e, point)
    if jet.gradient[j] == 0.0:
        raise ZeroDerivative(f"Partial derivative {j + 1} vanishes at {list(point)}")
    if i == j:
        return 1.0
    return float(jet.gradient[i] / jet.gradient[j])


def mrs_degree_zero_residual(e: Expr, point: Sequence[float], t: float) -> float:
    """Largest relative change of any MRS pair between x and t*x."""
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    x = np.asarray(point, dtype=float)
    worst = 0.0
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            base = mrs(e, x, i, j)
            scaled = mrs(e, t * x, i, j)
            worst = max(worst, abs(scaled - base) / max(abs(base), FLOOR))
    return worst


def scaling_residual(e: Expr, point: Sequence[float], t: float, d: float) -> float:
    """|e(t x) - t^d e(x)| / max(|t^d e(x)|, 1e-12)."""
    x = np.asarray(point, dtype=float)
    expected = t**d * eval_scalar(e, x)
    return abs(eval_scalar(e, t * x) - expected) / max(abs(expected), FLOOR)


def _affine_fit(e: Expr, x: np.ndarray, ts: np.ndarray):
    values = np.array([eval_scalar(e, t * x) for t in ts])
    design = np.column_stack([ts, np.ones_like(ts)])
    (slope, intercept), *_ = np.linalg.lstsq(design, values, rcond=None)
    residual = float(np.max(np.abs(design @ np.array([slope, intercept]) - values)))
    return residual, float(intercept), float(np.max(np.abs(values)))


def radial_affinity_residual(
    e: Expr,
    point: Sequence[float],
    ts: Sequence[float] = DEFAULT_TS,
    probes: Optional[np.ndarray] = None,
) -> float:
    """
    How far t -> e(t x) is from a*t + beta with one shared beta.

    Fits the affine model over ``ts`` at ``point`` and at the fixed probe
    points, and returns the larger of the normalized fit residual and the
    spread of fitted intercepts. Zero exactly for alpha*(linearly
    homogeneous) + beta.
    """
    ts_arr = np.asarray(ts, dtype=float)
    if len(ts_arr) < 3:
        raise ValueError("At least 3 scale factors are required")
    x = np.asarray(point, dtype=float)
    bases = [x] + list(probe_points(len(x)) if probes is None else probes)
    residuals, intercepts, magnitudes = zip(*(_affine_fit(e, b, ts_arr) for b in bases))
    scale = max(max(magnitudes), FLOOR)
    fit = max(residuals) / scale
    intercept_spread = (max(intercepts) - min(intercepts)) / scale
    return max(fit, intercept_spread)


@dataclass(frozen=True)
class FirstDerivativeReport:
    """Sample points violating the production-function conditions."""

    points_checked: int
    vanishing_derivative_points: int
    non_positive_value_points: int

    @property
    def is_production_function(self) -> bool:
        return (
            self.vanishing_derivative_points == 0
            and self.non_positive_value_points == 0
        )


def first_derivative_report(
    e: Expr, points: Sequence[Sequence[float]]
) -> FirstDerivativeReport:
    """Count points where some f_i = 0 or f <= 0. Reported, never enforced."""
    vanishing = 0
    non_positive = 0
    for point in points:
        jet = jet_eval(e, point)
        if np.any(jet.gradient == 0.0):
            vanishing += 1
        if jet.value <= 0.0:
            non_positive += 1
    return FirstDerivativeReport(len(points), vanishing, non_positive)

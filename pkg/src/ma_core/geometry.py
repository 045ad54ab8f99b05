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
Graph geometry of a function f: the Monge-Ampere residual det(f_ij), the
Gauss-Kronecker curvature of the graph (x, f(x)) and the flatness verdict.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from ma_core.expr import Expr, eval_scalar
from ma_core.jets import Jet2, jet_eval
from ma_core.smalllin import TINY, determinant, frobenius_scale
from ma_core.tolerances import DEFAULT_TOLERANCES, Tolerances


@dataclass(frozen=True)
class GraphPoint:
    """Point (x_1, ..., x_n, f(x)) of the graph hypersurface."""

    base: Tuple[float, ...]
    height: float

    @property
    def coordinates(self) -> Tuple[float, ...]:
        return self.base + (self.height,)


def graph_point(e: Expr, point: Sequence[float]) -> GraphPoint:
    base = tuple(float(v) for v in point)
    return GraphPoint(base, eval_scalar(e, base))


@dataclass(frozen=True)
class MAResidual:
    """Raw det(f_ij) and its scale-free version |det| / ||f_ij||_F^n."""

    raw: float
    normalized: float


# Second-order size below this fraction of the first-order size is round-off.
HESSIAN_ROUNDOFF = 1e-10


def hessian_is_roundoff(jet: Jet2, point: Sequence[float]) -> bool:
    """
    True when ||f_ij||_F |x|^2 <= HESSIAN_ROUNDOFF * (|f| + |grad f| |x|),
    i.e. the Hessian of an affine function carrying only evaluation noise.
    """
    radius = float(np.linalg.norm(np.asarray(point, dtype=float)))
    second = float(np.linalg.norm(jet.hessian)) * max(radius, 1.0) ** 2
    first = abs(jet.value) + float(np.linalg.norm(jet.gradient)) * max(radius, 1.0)
    return second <= HESSIAN_ROUNDOFF * first


def _ma_from_jet(jet: Jet2, point: Sequence[float]) -> MAResidual:
    raw = determinant(jet.hessian)
    if hessian_is_roundoff(jet, point):
        return MAResidual(raw, 0.0)
    return MAResidual(raw, abs(raw) / max(frobenius_scale(jet.hessian), TINY))


def ma_residual(e: Expr, point: Sequence[float]) -> MAResidual:
    """
    Homogeneous Monge-Ampere residual of ``e`` at ``point``. The normalized
    value is 0 when the Hessian is round-off next to the first-order terms.
    """
    return _ma_from_jet(jet_eval(e, point), point)


def _curvature_from_jet(jet: Jet2) -> float:
    n = jet.arity
    grad_sq = float(jet.gradient @ jet.gradient)
    return determinant(jet.hessian) / (1.0 + grad_sq) ** ((n + 2) / 2.0)


def gauss_kronecker(e: Expr, point: Sequence[float]) -> float:
    """
    Gauss-Kronecker curvature of the graph with upward unit normal:
    det(f_ij) / (1 + |grad f|^2) ** ((n + 2) / 2).
    """
    return _curvature_from_jet(jet_eval(e, point))


class Flatness(Enum):
    FLAT = "Flat"
    NOT_FLAT = "NotFlat"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class FlatnessVerdict:
    verdict: Flatness
    max_residual: float
    witness: Optional[Tuple[float, ...]] = None
    witness_index: Optional[int] = None
    samples: int = 0

    @property
    def is_flat(self) -> bool:
        return self.verdict is Flatness.FLAT

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "max_normalized_residual": self.max_residual,
            "witness": list(self.witness) if self.witness is not None else None,
            "samples": self.samples,
        }


def flatness(
    e: Expr,
    samples: Sequence[Sequence[float]],
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> FlatnessVerdict:
    """
    Flat if the largest normalized residual is below ``tolerances.flat``,
    NotFlat above ``tolerances.reject`` (witness = first arg-max sample),
    Indeterminate in between.
    """
    points = np.asarray(samples, dtype=float)
    if len(points) == 0:
        raise ValueError("At least one sample is required")
    residuals = np.array([ma_residual(e, p).normalized for p in points])
    worst = int(np.argmax(residuals))
    max_residual = float(residuals[worst])
    if max_residual < tolerances.flat:
        return FlatnessVerdict(Flatness.FLAT, max_residual, samples=len(points))
    if max_residual > tolerances.reject:
        return FlatnessVerdict(
            Flatness.NOT_FLAT,
            max_residual,
            witness=tuple(float(v) for v in points[worst]),
            witness_index=worst,
            samples=len(points),
        )
    return FlatnessVerdict(Flatness.INDETERMINATE, max_residual, samples=len(points))


@dataclass(frozen=True)
class PointGeometry:
    """Everything the grid writer and the analyze report need at one point."""

    point: Tuple[float, ...]
    value: float
    det_hessian: float
    normalized_residual: float
    gauss_kronecker: float
    gradient: Tuple[float, ...]


def point_geometry(e: Expr, point: Sequence[float]) -> PointGeometry:
    jet = jet_eval(e, point)
    ma = _ma_from_jet(jet, point)
    return PointGeometry(
        point=tuple(float(v) for v in point),
        value=jet.value,
        det_hessian=ma.raw,
        normalized_residual=ma.normalized,
        gauss_kronecker=_curvature_from_jet(jet),
        gradient=tuple(float(g) for g in jet.gradient),
    )

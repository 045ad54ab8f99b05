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
Production models and their analytic flatness predicates.

PerfectSubstitute  sum a_i x_i
CobbDouglas        gamma * prod x_i^alpha_i
ACMS               gamma * (sum a_i^rho x_i^rho)^(d/rho)
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ma_core.errors import Mismatch, UnsupportedOuter
from ma_core.expr import Expr, const, mul, pow_, product_of, sum_of, var
from ma_core.geometry import Flatness, FlatnessVerdict, flatness
from ma_core.homothetic import OuterFamily, OuterKind
from ma_core.sampling import DEFAULT_SAMPLES, DEFAULT_SEED, sobol_points
from ma_core.tolerances import DEFAULT_TOLERANCES, Tolerances

logger = logging.getLogger(__name__)

EXPONENT_MATCH = 1e-12


def _fmt(value: float) -> str:
    return format(value, ".12g")


def _fmt_list(values: Sequence[float]) -> str:
    return ":".join(_fmt(v) for v in values)


def _check_arity(values: Sequence[float], what: str) -> Tuple[float, ...]:
    values = tuple(float(v) for v in values)
    if len(values) < 2:
        raise ValueError(f"{what} needs at least 2 inputs, got {len(values)}")
    if any(v == 0.0 for v in values):
        raise ValueError(f"{what} entries must be nonzero")
    return values


@dataclass(frozen=True)
class PerfectSubstitute:
    coefficients: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", _check_arity(self.coefficients, "PerfectSubstitute")
        )

    @property
    def arity(self) -> int:
        return len(self.coefficients)

    @property
    def degree(self) -> float:
        return 1.0

    def to_expr(self) -> Expr:
        terms = [
            var(i) if a == 1.0 else mul(const(a), var(i))
            for i, a in enumerate(self.coefficients)
        ]
        return sum_of(terms)

    def describe(self) -> str:
        return f"perfsub:a={_fmt_list(self.coefficients)}"


@dataclass(frozen=True)
class CobbDouglas:
    gamma: float
    alphas: Tuple[float, ...]

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        object.__setattr__(self, "alphas", _check_arity(self.alphas, "CobbDouglas"))

    @classmethod
    def two_input(cls, b: float, k: float) -> "CobbDouglas":
        """b * L^k * C^(1-k)."""
        return cls(b, (k, 1.0 - k))

    @property
    def arity(self) -> int:
        return len(self.alphas)

    @property
    def degree(self) -> float:
        return float(sum(self.alphas))

    def to_expr(self) -> Expr:
        factors = [
            var(i) if a == 1.0 else pow_(var(i), const(a))
            for i, a in enumerate(self.alphas)
        ]
        if self.gamma != 1.0:
            factors.insert(0, const(self.gamma))
        return product_of(factors)

    def describe(self) -> str:
        return f"cobb-douglas:gamma={_fmt(self.gamma)},alpha={_fmt_list(self.alphas)}"


@dataclass(frozen=True)
class ACMS:
    """
    Constant elasticity of substitution. Coefficients are stored as a_i and
    raised to rho inside the expression, so a non-integer rho needs a_i > 0.
    """

    gamma: float
    coefficients: Tuple[float, ...]
    rho: float
    d: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.rho == 0.0:
            raise ValueError("rho must be nonzero")
        if self.d == 0.0:
            raise ValueError("degree d must be nonzero")
        coefficients = _check_arity(self.coefficients, "ACMS")
        if not float(self.rho).is_integer() and any(a < 0.0 for a in coefficients):
            raise ValueError("Non-integer rho needs positive coefficients")
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def from_share(cls, productivity: float, share: float, r: float) -> "ACMS":
        """
        Two-input form productivity * (share L^r + (1-share) C^r)^(1/r).
        """
        if not 0.0 < share < 1.0:
            raise ValueError(f"share must lie in (0, 1), got {share}")
        return cls(productivity, (share ** (1.0 / r), (1.0 - share) ** (1.0 / r)), r)

    @property
    def arity(self) -> int:
        return len(self.coefficients)

    @property
    def degree(self) -> float:
        return self.d

    @property
    def elasticity(self) -> Optional[float]:
        """s = 1 / (1 - rho); None for perfect substitution (rho = 1)."""
        return None if self.rho == 1.0 else 1.0 / (1.0 - self.rho)

    def to_expr(self) -> Expr:
        rho = const(self.rho)
        terms = []
        for i, a in enumerate(self.coefficients):
            powered = var(i) if self.rho == 1.0 else pow_(var(i), rho)
            terms.append(powered if a == 1.0 else mul(pow_(const(a), rho), powered))
        inner = sum_of(terms)
        exponent = self.d / self.rho
        core = inner if exponent == 1.0 else pow_(inner, const(exponent))
        return core if self.gamma == 1.0 else mul(const(self.gamma), core)

    def describe(self) -> str:
        return (
            f"acms:gamma={_fmt(self.gamma)},a={_fmt_list(self.coefficients)},"
            f"rho={_fmt(self.rho)},d={_fmt(self.d)}"
        )


Model = Union[PerfectSubstitute, CobbDouglas, ACMS]


@dataclass(frozen=True)
class AnalyticVerdict:
    """
    Expected verdict from the closed-form conditions. ``strict_expected`` is
    the narrower reading "flat iff F and P are both linear" for Cobb-Douglas.
    """

    expected: Flatness
    reason: str
    strict_expected: Optional[Flatness] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "expected": self.expected.value,
            "reason": self.reason,
            "strict_expected": (
                self.strict_expected.value if self.strict_expected else None
            ),
        }


def _flat(condition: bool) -> Flatness:
    return Flatness.FLAT if condition else Flatness.NOT_FLAT


def analytic_flatness(model: Model, outer: OuterFamily) -> AnalyticVerdict:
    """
    Flatness of outer(model) predicted in closed form. Additive constants in
    the outer are admitted since flatness is translation invariant.

    Raises:
        UnsupportedOuter: expression-defined outer
    """
    if outer.kind is OuterKind.EXPR:
        raise UnsupportedOuter(
            "Expression outers have no analytic predicate; use the numerical verdict"
        )
    q = outer.power_exponent

    if isinstance(model, PerfectSubstitute):
        return AnalyticVerdict(
            Flatness.FLAT,
            "F of a perfect substitute has parallel hyperplane isoquants",
            Flatness.FLAT,
        )

    if isinstance(model, CobbDouglas):
        s = model.degree
        strict = _flat(outer.is_affine and abs(s - 1.0) <= EXPONENT_MATCH)
        if q is None:
            return AnalyticVerdict(
                Flatness.NOT_FLAT,
                f"{outer.kind.value} outer never flattens a Cobb-Douglas model",
                strict,
            )
        flat = abs(q * s - 1.0) <= EXPONENT_MATCH
        reason = (
            f"F(P) is Cobb-Douglas of degree p*sum(alpha) = {_fmt(q * s)}; flat iff 1"
        )
        return AnalyticVerdict(_flat(flat), reason, strict)

    if isinstance(model, ACMS):
        if model.rho == 1.0:
            expected = AnalyticVerdict(
                Flatness.FLAT, "rho = 1: F of a perfect substitute", Flatness.FLAT
            )
        elif q is None:
            expected = AnalyticVerdict(
                Flatness.NOT_FLAT,
                f"rho != 1 and {outer.kind.value} outer is not a power",
                Flatness.NOT_FLAT,
            )
        else:
            flat = abs(q * model.d - 1.0) <= EXPONENT_MATCH
            expected = AnalyticVerdict(
                _flat(flat),
                f"rho != 1: F(Q) has degree p*d = {_fmt(q * model.d)}; flat iff 1",
                _flat(flat),
            )
        return expected

    raise TypeError(f"Unknown model type {type(model).__name__}")


@dataclass(frozen=True)
class CrossCheckReport:
    model: str
    outer: str
    analytic: AnalyticVerdict
    numerical: FlatnessVerdict

    @property
    def agrees(self) -> bool:
        return self.analytic.expected is self.numerical.verdict

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model,
            "outer": self.outer,
            "analytic": self.analytic.to_dict(),
            "numerical": self.numerical.to_dict(),
            "agrees": self.agrees,
        }


def cross_check(
    model: Model,
    outer: OuterFamily,
    samples: Optional[Sequence[Sequence[float]]] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    raise_on_mismatch: bool = True,
) -> CrossCheckReport:
    """
    Compare analytic_flatness with the numerical flatness verdict.

    Raises:
        Mismatch: the verdicts disagree and ``raise_on_mismatch`` is set
    """
    analytic = analytic_flatness(model, outer)
    points = sobol_points(model.arity) if samples is None else np.asarray(samples)
    numerical = flatness(outer.compose(model.to_expr()), points, tolerances)
    report = CrossCheckReport(model.describe(), outer.describe(), analytic, numerical)
    if not report.agrees:
        logger.warning(
            "Analytic %s vs numerical %s for %s under %s",
            analytic.expected.value,
            numerical.verdict.value,
            report.model,
            report.outer,
        )
        if raise_on_mismatch:
            raise Mismatch("Analytic and numerical verdicts disagree", report.to_dict())
    return report


def corollary_models() -> List[Model]:
    """Models of the corollary grid."""
    models: List[Model] = [
        PerfectSubstitute((2.0, 3.0)),
        PerfectSubstitute((1.0, 2.0, 0.5)),
        CobbDouglas(1.0, (0.3, 0.7)),
        CobbDouglas(1.0, (0.35, 0.35)),
        CobbDouglas(1.0, (0.65, 0.65)),
        CobbDouglas(1.0, (0.5, 0.5)),
        CobbDouglas(1.0, (0.2, 0.3, 0.5)),
        CobbDouglas.two_input(1.5, 0.4),
    ]
    models.extend(
        ACMS(1.0, (1.0, 1.0), rho, d) for rho in (0.5, 1.0, 2.0) for d in (0.5, 1.0, 2.0)
    )
    models.append(ACMS.from_share(1.2, 0.3, 0.5))
    return models


def _bounded(model: Model) -> bool:
    """Values stay O(1) on the sample box, so exp outers keep well-scaled Hessians."""
    if isinstance(model, ACMS):
        return model.rho == 1.0 and model.d <= 1.0
    return model.degree <= 1.0


def corollary_outers(model: Model) -> List[OuterFamily]:
    outers = [
        OuterFamily.identity(),
        OuterFamily.affine(2.0, 1.0),
        OuterFamily.power(1.0, 2.0),
        OuterFamily.power(1.0, 1.0 / model.degree, 0.5),
        OuterFamily.log(),
    ]
    if _bounded(model):
        outers.append(OuterFamily.exp())
    return outers


def corollary_grid(
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> List[CrossCheckReport]:
    """Cross-check every (model, outer) pair of the grid; mismatches are reported."""
    reports = []
    for model in corollary_models():
        points = sobol_points(model.arity, samples, seed)
        for outer in corollary_outers(model):
            reports.append(
                cross_check(model, outer, points, tolerances, raise_on_mismatch=False)
            )
    return reports

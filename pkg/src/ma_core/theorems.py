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
Identities and classifications for f = F(h(x)).

The Hessian of a composite is f_ij = F' h_ij + F'' h_i h_j, so by the matrix
determinant lemma

    det(f_ij) = F'^(n-1) * (F' det(h_ij) + F'' * sum_ij h_i h_j H_ij)

with H_ij the cofactors of (h_ij). Every identity check below returns both
sides and a relative error scaled by ||f_ij||_F^n, the natural magnitude of
det(f_ij), so identically vanishing cases do not divide noise by noise.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Sequence

import numpy as np

from ma_core.errors import (
    ArityError,
    DegreeOne,
    DimensionError,
    Inconsistent,
    NotLinearlyHomogeneous,
    ZeroFPrime,
)
from ma_core.expr import Expr, const, mul, pow_, substitute, to_text, var
from ma_core.geometry import FlatnessVerdict, Flatness, flatness, ma_residual
from ma_core.homogeneity import estimate_degree, radial_affinity_residual
from ma_core.homothetic import HomotheticSpec, OuterFamily
from ma_core.jets import Jet2, jet_eval
from ma_core.sampling import sobol_points
from ma_core.smalllin import (
    TINY,
    adjugate_quadratic_form,
    determinant,
    frobenius_scale,
    relative_error,
)
from ma_core.tolerances import DEFAULT_TOLERANCES, Tolerances

logger = logging.getLogger(__name__)

FLOOR = 1e-12


@dataclass(frozen=True)
class IdentityCheck:
    lhs: float
    rhs: float
    relerr: float

    def to_dict(self) -> Dict[str, float]:
        return {"lhs": self.lhs, "rhs": self.rhs, "relerr": self.relerr}


@dataclass(frozen=True)
class CompositeHessianCheck:
    """
    det(f_ij) against the composite formula with leading factor F'^(n-1)
    (``rhs_corrected``) and with the uncorrected factor F'^n.
    """

    lhs: float
    rhs_corrected: float
    rhs_uncorrected: float
    relerr: float
    f_prime: float
    scale: float = 0.0

    @property
    def uncorrected_ratio(self) -> Optional[float]:
        """rhs_uncorrected / lhs; equals F'(u) whenever lhs != 0."""
        return self.rhs_uncorrected / self.lhs if self.lhs != 0.0 else None

    @property
    def uncorrected_relerr(self) -> float:
        return relative_error(self.lhs, self.rhs_uncorrected, self.scale)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lhs": self.lhs,
            "rhs_corrected": self.rhs_corrected,
            "rhs_uncorrected": self.rhs_uncorrected,
            "rhs_paper": self.rhs_uncorrected,
            "relerr": self.relerr,
            "f_prime": self.f_prime,
            "scale": self.scale,
            "uncorrected_ratio": self.uncorrected_ratio,
        }


@dataclass(frozen=True)
class _CompositeJets:
    n: int
    u: float
    f1: float
    f2: float
    inner: Jet2
    outer_composite: Jet2


def _composite_jets(spec: HomotheticSpec, point: Sequence[float]) -> _CompositeJets:
    x = np.asarray(point, dtype=float)
    if len(x) != spec.arity:
        raise DimensionError(f"Point has {len(x)} coordinates, arity is {spec.arity}")
    inner = jet_eval(spec.inner, x)
    _, f1, f2 = spec.outer.derivatives(inner.value)
    if f1 == 0.0:
        raise ZeroFPrime(f"F'(u) = 0 at u = {inner.value!r}")
    return _CompositeJets(len(x), inner.value, f1, f2, inner, jet_eval(spec.composite, x))


def composite_hessian_identity(
    spec: HomotheticSpec, point: Sequence[float]
) -> CompositeHessianCheck:
    """det(f_ij) = F'^(n-1) {F' det(h_ij) + F'' sum h_i h_j H_ij}."""
    jets = _composite_jets(spec, point)
    h = jets.inner
    lhs = determinant(jets.outer_composite.hessian)
    bracket = jets.f1 * determinant(h.hessian) + jets.f2 * adjugate_quadratic_form(
        h.hessian, h.gradient
    )
    rhs = jets.f1 ** (jets.n - 1) * bracket
    scale = frobenius_scale(jets.outer_composite.hessian)
    return CompositeHessianCheck(
        lhs=lhs,
        rhs_corrected=rhs,
        rhs_uncorrected=jets.f1**jets.n * bracket,
        relerr=relative_error(lhs, rhs, scale),
        f_prime=jets.f1,
        scale=scale,
    )


def _require_degree_not_one(spec: HomotheticSpec) -> float:
    d = spec.degree
    if abs(d - 1.0) < FLOOR:
        raise DegreeOne("Degree 1 inner functions need composite_hessian_identity")
    return d


def euler_substituted_identity(
    spec: HomotheticSpec, point: Sequence[float]
) -> IdentityCheck:
    """
    Composite formula after replacing h_i by (sum_k x_k h_ik) / (d-1):
    det(f_ij) = F'^(n-1) {F' det(h_ij) + F''/(d-1)^2 sum x_k x_l h_ik h_jl H_ij}.
    """
    d = _require_degree_not_one(spec)
    jets = _composite_jets(spec, point)
    h = jets.inner
    x = np.asarray(point, dtype=float)
    contracted = adjugate_quadratic_form(h.hessian, h.hessian @ x)
    rhs = jets.f1 ** (jets.n - 1) * (
        jets.f1 * determinant(h.hessian) + jets.f2 / (d - 1.0) ** 2 * contracted
    )
    lhs = determinant(jets.outer_composite.hessian)
    scale = frobenius_scale(jets.outer_composite.hessian)
    return IdentityCheck(lhs, rhs, relative_error(lhs, rhs, scale))


def factorization_identity(
    spec: HomotheticSpec, point: Sequence[float]
) -> IdentityCheck:
    """
    det(f_ij) = det(h_ij) F'^(n-1) / (d-1) * {(d-1) F' + d h F''}.

    Raises:
        DegreeOne: d = 1, where the factorization does not apply
        ZeroFPrime: F'(h(x)) = 0
    """
    d = _require_degree_not_one(spec)
    jets = _composite_jets(spec, point)
    rhs = (
        determinant(jets.inner.hessian)
        * jets.f1 ** (jets.n - 1)
        / (d - 1.0)
        * ((d - 1.0) * jets.f1 + d * jets.u * jets.f2)
    )
    lhs = determinant(jets.outer_composite.hessian)
    scale = frobenius_scale(jets.outer_composite.hessian)
    return IdentityCheck(lhs, rhs, relative_error(lhs, rhs, scale))


def ode_residual(outer: OuterFamily, d: float, u: float) -> float:
    """Normalized |d u F''(u) + (d-1) F'(u)|; zero for F = alpha u^(1/d) + beta."""
    _, f1, f2 = outer.derivatives(u)
    first = (d - 1.0) * f1
    second = d * u * f2
    return abs(second + first) / max(abs(first), abs(second), FLOOR)


def _two_input_jet(h: Expr, point: Sequence[float]) -> Jet2:
    x = np.asarray(point, dtype=float)
    if len(x) != 2 or h.n_vars > 2:
        raise ArityError("Two-input bracket needs arity 2")
    return jet_eval(h, x)


def bracket2(h: Expr, point: Sequence[float]) -> float:
    """h_1^2 h_22 + h_2^2 h_11 - 2 h_1 h_2 h_12."""
    jet = _two_input_jet(h, point)
    (h1, h2), hess = jet.gradient, jet.hessian
    return float(h1 * h1 * hess[1, 1] + h2 * h2 * hess[0, 0] - 2 * h1 * h2 * hess[0, 1])


@dataclass(frozen=True)
class BracketChainCheck:
    """
    For a homogeneous two-input h of degree d:
    bracket = -(h_12 / (x y)) (x h_1 + y h_2)^2 when d = 1, and
    (x h_1 + y h_2)^2 = d^2 h^2 always.
    """

    bracket: float
    chain: float
    relerr: float
    euler_factor: float
    degree_factor: float
    euler_relerr: float

    def to_dict(self) -> Dict[str, float]:
        return dict(self.__dict__)


def bracket_chain(h: Expr, point: Sequence[float], d: float = 1.0) -> BracketChainCheck:
    jet = _two_input_jet(h, point)
    x, y = (float(v) for v in point)
    (h1, h2), hess = jet.gradient, jet.hessian
    bracket = float(
        h1 * h1 * hess[1, 1] + h2 * h2 * hess[0, 0] - 2 * h1 * h2 * hess[0, 1]
    )
    euler_factor = float((x * h1 + y * h2) ** 2)
    chain = -(float(hess[0, 1]) / (x * y)) * euler_factor
    magnitude = float(
        h1 * h1 * abs(hess[1, 1])
        + h2 * h2 * abs(hess[0, 0])
        + 2 * abs(h1 * h2 * hess[0, 1])
    )
    degree_factor = d * d * jet.value * jet.value
    return BracketChainCheck(
        bracket=bracket,
        chain=chain,
        relerr=relative_error(bracket, chain, magnitude),
        euler_factor=euler_factor,
        degree_factor=degree_factor,
        euler_relerr=relative_error(euler_factor, degree_factor),
    )


def cramer_residual(h: Expr, point: Sequence[float]) -> float:
    """max_i |x_i det(h_ij)| / (||x||_inf ||h_ij||_F^n); zero for degree 1."""
    x = np.asarray(point, dtype=float)
    hess = jet_eval(h, x).hessian
    scale = max(float(np.max(np.abs(x))) * frobenius_scale(hess), TINY)
    return float(np.max(np.abs(x * determinant(hess)))) / scale


# Classification


def linearized_inner(spec: HomotheticSpec) -> Expr:
    """h^(1/d) on the positive branch: a degree-1 function with F(h) = G(h^(1/d))."""
    if spec.degree == 1.0:
        return spec.inner
    return pow_(spec.inner, const(1.0 / spec.degree))


@dataclass(frozen=True)
class _LinearTest:
    second_derivative_residual: float
    gradient_spread: float
    a: float
    b: float


def _linear_inner_test(h_hat: Expr, samples: np.ndarray) -> _LinearTest:
    second = 0.0
    gradients = []
    for x in samples:
        jet = jet_eval(h_hat, x)
        gradients.append(jet.gradient)
        grad_scale = max(float(np.max(np.abs(jet.gradient))), TINY)
        curvature = float(np.max(np.abs(jet.hessian))) * float(np.max(np.abs(x)))
        second = max(second, curvature / grad_scale)
    first = gradients[0]
    scale = max(float(np.max(np.abs(first))), TINY)
    spread = max(float(np.max(np.abs(g - first))) / scale for g in gradients)
    return _LinearTest(second, spread, float(first[0]), float(first[1]))


class TwoInputCase(Enum):
    INNER_PERFECT_SUBSTITUTE_POWER = "InnerPerfectSubstitutePower"
    LINEAR_HOMOGENEOUS_UP_TO_CONSTANTS = "LinearHomogeneousUpToConstants"
    NOT_FLAT = "NotFlat"


@dataclass(frozen=True)
class Classification2:
    """
    Two-input classification: h = (a x + b y)^d, f linearly homogeneous up to
    constants, or not flat. ``both_cases`` is set when the first two overlap.
    """

    case: TwoInputCase
    flatness: FlatnessVerdict
    a: Optional[float] = None
    b: Optional[float] = None
    both_cases: bool = False
    evidence: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "case": self.case.value,
            "a": self.a,
            "b": self.b,
            "both_cases": self.both_cases,
            "flatness": self.flatness.to_dict(),
            "evidence": dict(self.evidence),
        }


def _as_samples(samples, n: int) -> np.ndarray:
    points = sobol_points(n) if samples is None else np.asarray(samples, dtype=float)
    if points.ndim != 2 or points.shape[1] != n or len(points) == 0:
        raise DimensionError(f"Samples must have shape (k, {n}), got {points.shape}")
    return points


def classify_two_input(
    spec: HomotheticSpec,
    samples: Optional[Sequence[Sequence[float]]] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Classification2:
    """
    Decide which alternative explains a flat two-input F(h).

    Raises:
        ArityError: arity is not 2
        Inconsistent: flat, yet neither alternative verifies
    """
    if spec.arity != 2:
        raise ArityError(f"Two-input classification needs arity 2, got {spec.arity}")
    points = _as_samples(samples, 2)
    spec.validate(points, tolerances)
    f = spec.composite
    verdict = flatness(f, points, tolerances)
    evidence = {"max_ma_residual": verdict.max_residual}
    if verdict.verdict is Flatness.NOT_FLAT:
        return Classification2(TwoInputCase.NOT_FLAT, verdict, evidence=evidence)

    linear = _linear_inner_test(linearized_inner(spec), points)
    radial = radial_affinity_residual(f, points[0])
    evidence.update(
        linear_inner_residual=linear.second_derivative_residual,
        linear_inner_gradient_spread=linear.gradient_spread,
        radial_affinity_residual=radial,
    )
    inner_linear = (
        linear.second_derivative_residual <= tolerances.linear_inner
        and linear.gradient_spread <= tolerances.linear_inner
    )
    radially_affine = radial <= tolerances.radial_affine
    if inner_linear:
        return Classification2(
            TwoInputCase.INNER_PERFECT_SUBSTITUTE_POWER,
            verdict,
            a=linear.a,
            b=linear.b,
            both_cases=radially_affine,
            evidence=evidence,
        )
    if radially_affine:
        return Classification2(
            TwoInputCase.LINEAR_HOMOGENEOUS_UP_TO_CONSTANTS, verdict, evidence=evidence
        )
    raise Inconsistent(
        f"{verdict.verdict.value} but neither two-input case verifies", evidence
    )


def profile_of(
    h: Expr,
    arity: int,
    samples: Optional[Sequence[Sequence[float]]] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Expr:
    """
    phi(u_2, ..., u_n) = h(1, u_2, ..., u_n) as an Expr in n-1 variables.

    Raises:
        NotLinearlyHomogeneous: h fails the degree-1 test on the samples
    """
    if arity < 2:
        raise ArityError(f"Profiles need arity >= 2, got {arity}")
    estimate = estimate_degree(h, _as_samples(samples, arity))
    if not (
        estimate.is_homogeneous(tolerances.homogeneity_spread)
        and abs(estimate.degree - 1.0) <= tolerances.degree_match
    ):
        raise NotLinearlyHomogeneous(
            f"Degree estimate {estimate.degree:.9g} (spread {estimate.spread:.3e})"
            " is not 1"
        )
    bindings = {0: const(1.0)}
    bindings.update({i: var(i - 1) for i in range(1, arity)})
    return substitute(h, bindings, arity=arity - 1)


def reconstruct_from_profile(phi: Expr, arity: int) -> Expr:
    """x_1 * phi(x_2 / x_1, ..., x_n / x_1)."""
    if arity < 2 or phi.n_vars > arity - 1:
        raise ArityError(f"Profile with {phi.n_vars} variables cannot fill arity {arity}")
    x1 = var(0)
    ratios = {i: var(i + 1) / x1 for i in range(arity - 1)}
    return mul(x1, substitute(phi, ratios, arity=arity))


def projected_samples(samples: np.ndarray) -> np.ndarray:
    """(x_2 / x_1, ..., x_n / x_1) for every sample."""
    return samples[:, 1:] / samples[:, :1]


def profile_flatness(
    phi: Expr,
    arity: int,
    samples: Optional[Sequence[Sequence[float]]] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> FlatnessVerdict:
    """Flatness of phi at the ratios of the n-dimensional samples."""
    return flatness(phi, projected_samples(_as_samples(samples, arity)), tolerances)


def construct_from_profile(
    outer: OuterFamily,
    phi: Expr,
    arity: Optional[int] = None,
    samples: Optional[Sequence[Sequence[float]]] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Expr:
    """
    f = F(x_1 phi(x_2/x_1, ..., x_n/x_1)).

    Logs a warning when det(phi_ij) does not vanish on the projected samples,
    since f is then flat only if F is affine.
    """
    n = phi.n_vars + 1 if arity is None else arity
    if n - 1 < 1:
        raise ArityError("The profile needs at least one variable")
    f = outer.compose(reconstruct_from_profile(phi, n))
    verdict = profile_flatness(phi, n, samples, tolerances)
    if not verdict.is_flat:
        logger.warning(
            "det(phi_ij) does not vanish for phi = %s (max normalized residual %.3e)",
            to_text(phi, [f"u{i + 2}" for i in range(n - 1)]),
            verdict.max_residual,
        )
    return f


def profile_identity(
    outer: OuterFamily, phi: Expr, point: Sequence[float]
) -> IdentityCheck:
    """x_1^(n-1) det(f_ij) = phi^2 F'^(n-1) F'' det(phi_ij)."""
    x = np.asarray(point, dtype=float)
    n = len(x)
    if x[0] <= 0.0:
        raise ValueError("profile identity needs x_1 > 0")
    u = x[1:] / x[0]
    phi_jet = jet_eval(phi, u)
    _, f1, f2 = outer.derivatives(x[0] * phi_jet.value)
    f_jet = jet_eval(outer.compose(reconstruct_from_profile(phi, n)), x)
    weight = x[0] ** (n - 1)
    lhs = weight * determinant(f_jet.hessian)
    rhs = phi_jet.value**2 * f1 ** (n - 1) * f2 * determinant(phi_jet.hessian)
    scale = weight * frobenius_scale(f_jet.hessian)
    return IdentityCheck(lhs, rhs, relative_error(lhs, rhs, scale))


class ManyInputCase(Enum):
    LINEAR_HOMOGENEOUS_UP_TO_CONSTANTS = "LinearHomogeneousUpToConstants"
    PROFILE_FLAT = "ProfileFlat"
    NOT_FLAT = "NotFlat"


@dataclass(frozen=True)
class ClassificationN:
    case: ManyInputCase
    flatness: FlatnessVerdict
    profile: Optional[Expr] = None
    evidence: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        names = None
        if self.profile is not None:
            names = [f"u{i + 2}" for i in range(max(self.profile.n_vars, 1))]
        return {
            "case": self.case.value,
            "profile": to_text(self.profile, names) if self.profile else None,
            "flatness": self.flatness.to_dict(),
            "evidence": dict(self.evidence),
        }


def classify_n_input(
    spec: HomotheticSpec,
    samples: Optional[Sequence[Sequence[float]]] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> ClassificationN:
    """
    Decide which alternative explains a flat F(h) with three or more inputs.

    Raises:
        ArityError: arity below 3
        Inconsistent: flat, not radially affine, and det(phi_ij) != 0
    """
    n = spec.arity
    if n < 3:
        raise ArityError(f"Many-input classification needs arity >= 3, got {n}")
    points = _as_samples(samples, n)
    spec.validate(points, tolerances)
    f = spec.composite
    verdict = flatness(f, points, tolerances)
    evidence = {"max_ma_residual": verdict.max_residual}
    if verdict.verdict is Flatness.NOT_FLAT:
        return ClassificationN(ManyInputCase.NOT_FLAT, verdict, evidence=evidence)

    radial = radial_affinity_residual(f, points[0])
    evidence["radial_affinity_residual"] = radial
    if radial <= tolerances.radial_affine:
        return ClassificationN(
            ManyInputCase.LINEAR_HOMOGENEOUS_UP_TO_CONSTANTS, verdict, evidence=evidence
        )

    phi = profile_of(linearized_inner(spec), n, points, tolerances)
    projected = projected_samples(points)
    det_residual = max(ma_residual(phi, u).normalized for u in projected)
    evidence["profile_det_residual"] = det_residual
    if det_residual <= tolerances.profile_det:
        return ClassificationN(
            ManyInputCase.PROFILE_FLAT, verdict, profile=phi, evidence=evidence
        )
    raise Inconsistent(
        f"{verdict.verdict.value}, not radially affine, and det(phi_ij) != 0", evidence
    )


@dataclass(frozen=True)
class FlatExplanation:
    """
    For inner degree d != 1: f is flat exactly when the inner function is
    flat or f is linearly homogeneous up to constants.
    """

    flatness: FlatnessVerdict
    inner_flatness: FlatnessVerdict
    radial_affinity_residual: float
    radially_affine: bool

    @property
    def explained(self) -> bool:
        return self.flatness.is_flat == (
            self.inner_flatness.is_flat or self.radially_affine
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "flatness": self.flatness.to_dict(),
            "inner_flatness": self.inner_flatness.to_dict(),
            "radial_affinity_residual": self.radial_affinity_residual,
            "radially_affine": self.radially_affine,
            "explained": self.explained,
        }


def null_curvature_reason(
    spec: HomotheticSpec,
    samples: Optional[Sequence[Sequence[float]]] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> FlatExplanation:
    _require_degree_not_one(spec)
    points = _as_samples(samples, spec.arity)
    radial = radial_affinity_residual(spec.composite, points[0])
    return FlatExplanation(
        flatness=flatness(spec.composite, points, tolerances),
        inner_flatness=flatness(spec.inner, points, tolerances),
        radial_affinity_residual=radial,
        radially_affine=radial <= tolerances.radial_affine,
    )

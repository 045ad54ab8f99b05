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
Homothetic function types.

An OuterFamily is a scalar transform F with closed-form F, F' and F''.
A HomotheticSpec pairs it with a homogeneous inner function h of degree d,
representing f = F(h(x)).
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from ma_core.errors import DomainError, NotHomogeneous, ZeroFPrime
from ma_core.expr import Expr, const, eval_scalar, exp, ln, pow_, substitute, to_text
from ma_core.homogeneity import estimate_degree
from ma_core.jets import jet_eval
from ma_core.tolerances import DEFAULT_TOLERANCES, Tolerances


class OuterKind(Enum):
    AFFINE = "affine"
    POWER = "power"
    LOG = "log"
    EXP = "exp"
    EXPR = "expr"


@dataclass(frozen=True)
class OuterFamily:
    """
    F(u) for one of:

    - affine: alpha*u + beta
    - power:  alpha*u^p + beta
    - log:    alpha*ln(u) + beta
    - exp:    alpha*exp(u) + beta
    - expr:   an Expr in the single variable u
    """

    kind: OuterKind
    alpha: float = 1.0
    beta: float = 0.0
    p: float = 1.0
    expr: Optional[Expr] = None

    def __post_init__(self):
        if self.kind is OuterKind.EXPR:
            if self.expr is None or self.expr.n_vars > 1:
                raise ValueError("Expression outer needs an Expr in one variable u")
        elif self.alpha == 0.0:
            raise ValueError("alpha must be nonzero (F' would vanish)")
        if self.kind is OuterKind.POWER and self.p == 0.0:
            raise ValueError("power exponent p must be nonzero")

    @classmethod
    def affine(cls, alpha: float = 1.0, beta: float = 0.0) -> "OuterFamily":
        return cls(OuterKind.AFFINE, alpha=alpha, beta=beta)

    @classmethod
    def power(cls, alpha: float, p: float, beta: float = 0.0) -> "OuterFamily":
        return cls(OuterKind.POWER, alpha=alpha, beta=beta, p=p)

    @classmethod
    def log(cls, alpha: float = 1.0, beta: float = 0.0) -> "OuterFamily":
        return cls(OuterKind.LOG, alpha=alpha, beta=beta)

    @classmethod
    def exp(cls, alpha: float = 1.0, beta: float = 0.0) -> "OuterFamily":
        return cls(OuterKind.EXP, alpha=alpha, beta=beta)

    @classmethod
    def from_expr(cls, expr: Expr) -> "OuterFamily":
        return cls(OuterKind.EXPR, expr=expr)

    @classmethod
    def identity(cls) -> "OuterFamily":
        return cls.affine(1.0, 0.0)

    @property
    def is_affine(self) -> bool:
        return self.kind is OuterKind.AFFINE or (
            self.kind is OuterKind.POWER and self.p == 1.0
        )

    @property
    def power_exponent(self) -> Optional[float]:
        """Exponent q with F(u) = alpha*u^q + beta, or None for other shapes."""
        if self.kind is OuterKind.AFFINE:
            return 1.0
        if self.kind is OuterKind.POWER:
            return self.p
        return None

    def _check_power_base(self, u: float) -> None:
        if u <= 0.0 and not float(self.p).is_integer():
            raise DomainError("non-integer power of non-positive base", value=u)

    def derivatives(self, u: float):
        """(F(u), F'(u), F''(u))."""
        a, b = self.alpha, self.beta
        if self.kind is OuterKind.AFFINE:
            return a * u + b, a, 0.0
        if self.kind is OuterKind.POWER:
            self._check_power_base(u)
            if u == 0.0:
                raise DomainError("power outer evaluated at u = 0", value=u)
            q = self.p
            return a * u**q + b, a * q * u ** (q - 1), a * q * (q - 1) * u ** (q - 2)
        if self.kind is OuterKind.LOG:
            if u <= 0.0:
                raise DomainError("logarithm of non-positive value", value=u)
            return a * math.log(u) + b, a / u, -a / (u * u)
        if self.kind is OuterKind.EXP:
            try:
                g = math.exp(u)
            except OverflowError:
                raise DomainError("exp overflow", value=u)
            return a * g + b, a * g, a * g
        jet = jet_eval(self.expr, [u])
        return jet.value, float(jet.gradient[0]), float(jet.hessian[0, 0])

    def value(self, u: float) -> float:
        return self.derivatives(u)[0]

    def d1(self, u: float) -> float:
        return self.derivatives(u)[1]

    def d2(self, u: float) -> float:
        return self.derivatives(u)[2]

    def compose(self, inner: Expr) -> Expr:
        """The Expr of F(inner)."""
        if self.kind is OuterKind.EXPR:
            return substitute(self.expr, {0: inner})
        if self.kind is OuterKind.AFFINE:
            core = inner
        elif self.kind is OuterKind.POWER:
            core = pow_(inner, const(self.p))
        elif self.kind is OuterKind.LOG:
            core = ln(inner)
        else:
            core = exp(inner)
        scaled = core if self.alpha == 1.0 else const(self.alpha) * core
        return scaled if self.beta == 0.0 else scaled + const(self.beta)

    def check_monotone(self, us: Sequence[float]) -> None:
        """Raise ZeroFPrime if F' vanishes at any sampled u."""
        for u in us:
            if self.d1(u) == 0.0:
                raise ZeroFPrime(f"F'({u!r}) = 0 for outer {self.describe()}")

    def derivative_consistency(self, us: Sequence[float], step: float = 1e-4) -> float:
        """
        Largest relative gap between the closed-form F', F'' and central
        differences of F over ``us``.
        """
        worst = 0.0
        for u in us:
            h = step * max(1.0, abs(u))
            f_minus, f0, f_plus = (self.value(u + k * h) for k in (-1, 0, 1))
            fd1 = (f_plus - f_minus) / (2 * h)
            fd2 = (f_plus - 2 * f0 + f_minus) / (h * h)
            _, d1, d2 = self.derivatives(u)
            scale = max(abs(d1), abs(d2), abs(f0), 1.0)
            worst = max(worst, abs(fd1 - d1) / scale, abs(fd2 - d2) / scale)
        return worst

    def describe(self) -> str:
        if self.kind is OuterKind.EXPR:
            return f"expr:{to_text(self.expr, ['u'])}"
        if self.kind is OuterKind.POWER:
            return f"power:alpha={self.alpha!r},p={self.p!r},beta={self.beta!r}"
        return f"{self.kind.value}:alpha={self.alpha!r},beta={self.beta!r}"


@dataclass(frozen=True)
class HomotheticSpec:
    """f = outer(inner) with inner homogeneous of degree ``degree`` != 0."""

    outer: OuterFamily
    inner: Expr
    degree: float
    arity: int

    def __post_init__(self):
        if self.degree == 0.0:
            raise ValueError("Homothetic inner functions need degree d != 0")
        if self.arity < 1 or self.inner.n_vars > self.arity:
            raise ValueError(
                f"Inner function uses {self.inner.n_vars} variables, arity is {self.arity}"
            )

    @property
    def composite(self) -> Expr:
        return self.outer.compose(self.inner)

    def validate(
        self,
        samples: Sequence[Sequence[float]],
        tolerances: Tolerances = DEFAULT_TOLERANCES,
    ) -> None:
        """
        Check the inner degree and monotonicity of the outer on the samples.

        Raises:
            NotHomogeneous: inner spread or degree mismatch beyond tolerance
            ZeroFPrime: F' vanishes at a sampled u = h(x)
        """
        estimate = estimate_degree(self.inner, samples)
        if not estimate.is_homogeneous(tolerances.homogeneity_spread):
            raise NotHomogeneous(
                f"Inner function is not homogeneous (spread {estimate.spread:.3e})"
            )
        if abs(estimate.degree - self.degree) > tolerances.degree_match:
            raise NotHomogeneous(
                f"Inner degree {estimate.degree:.9g} does not match declared "
                f"{self.degree!r}"
            )
        us = [eval_scalar(self.inner, p) for p in np.asarray(samples, dtype=float)]
        self.outer.check_monotone(us)

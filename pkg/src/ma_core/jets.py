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
Second-order forward differentiation.

A Jet2 carries value, gradient and full Hessian of a function at a point.
Evaluating an Expr over JetAlgebra propagates all three in one pass;
fd_hessian is an independent central-difference oracle.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ma_core.errors import DerivativeSingularity, DomainError
from ma_core.expr import Expr, eval_scalar, evaluate

DEFAULT_FD_STEP = 1e-4


@dataclass(frozen=True)
class Jet2:
    """Value, gradient f_i and symmetric Hessian f_ij at a point."""

    value: float
    gradient: np.ndarray
    hessian: np.ndarray

    @property
    def arity(self) -> int:
        return len(self.gradient)


def _chain(a: Jet2, g0: float, g1: float, g2: float) -> Jet2:
    """Jet of g(a) given g(v), g'(v), g''(v) at v = a.value."""
    return Jet2(
        g0,
        g1 * a.gradient,
        g1 * a.hessian + g2 * np.outer(a.gradient, a.gradient),
    )


class JetAlgebra:
    """Second-order Taylor arithmetic over ``n`` variables."""

    def __init__(self, n: int):
        self.n = n

    def variables(self, point: Sequence[float]) -> List[Jet2]:
        eye = np.eye(self.n)
        zero = np.zeros((self.n, self.n))
        return [Jet2(float(v), eye[i], zero) for i, v in enumerate(point)]

    def constant(self, value: float) -> Jet2:
        return Jet2(value, np.zeros(self.n), np.zeros((self.n, self.n)))

    def add(self, a: Jet2, b: Jet2) -> Jet2:
        return Jet2(a.value + b.value, a.gradient + b.gradient, a.hessian + b.hessian)

    def sub(self, a: Jet2, b: Jet2) -> Jet2:
        return Jet2(a.value - b.value, a.gradient - b.gradient, a.hessian - b.hessian)

    def mul(self, a: Jet2, b: Jet2) -> Jet2:
        cross = np.outer(a.gradient, b.gradient)
        return Jet2(
            a.value * b.value,
            a.value * b.gradient + b.value * a.gradient,
            a.value * b.hessian + b.value * a.hessian + cross + cross.T,
        )

    def reciprocal(self, a: Jet2) -> Jet2:
        v = a.value
        if v == 0.0:
            raise DomainError("division by zero", value=v)
        return _chain(a, 1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def div(self, a: Jet2, b: Jet2) -> Jet2:
        return self.mul(a, self.reciprocal(b))

    def neg(self, a: Jet2) -> Jet2:
        return Jet2(-a.value, -a.gradient, -a.hessian)

    def power(self, a: Jet2, p: float) -> Jet2:
        v = a.value
        if v <= 0.0:
            raise DomainError("non-integer power of non-positive base", value=v)
        try:
            g0 = v**p
        except OverflowError:
            raise DomainError("power overflow", value=v)
        return _chain(a, g0, p * g0 / v, p * (p - 1.0) * g0 / (v * v))

    def ln(self, a: Jet2) -> Jet2:
        v = a.value
        if v < 0.0:
            raise DomainError("logarithm of negative value", value=v)
        if v == 0.0:
            raise DerivativeSingularity("logarithm at 0", value=v)
        return _chain(a, math.log(v), 1.0 / v, -1.0 / (v * v))

    def exp(self, a: Jet2) -> Jet2:
        try:
            g = math.exp(a.value)
        except OverflowError:
            raise DomainError("exp overflow", value=a.value)
        return _chain(a, g, g, g)

    def sqrt(self, a: Jet2) -> Jet2:
        v = a.value
        if v < 0.0:
            raise DomainError("square root of negative value", value=v)
        if v == 0.0:
            raise DerivativeSingularity("square root derivative at 0", value=v)
        g = math.sqrt(v)
        return _chain(a, g, 0.5 / g, -0.25 / (g * v))


def jet_eval(e: Expr, point: Sequence[float]) -> Jet2:
    """
    Value, gradient and Hessian of ``e`` at ``point``.

    The returned Hessian is the mirrored upper triangle, so it is exactly
    symmetric.

    Raises:
        DomainError: point outside the natural domain
        DerivativeSingularity: sqrt / ln at 0
    """
    point = np.asarray(point, dtype=float)
    jet = evaluate(e, point, JetAlgebra(len(point)))
    upper = np.triu(jet.hessian)
    hessian = upper + np.triu(upper, 1).T
    if not (
        math.isfinite(jet.value)
        and np.all(np.isfinite(jet.gradient))
        and np.all(np.isfinite(hessian))
    ):
        raise DomainError("non-finite jet", value=jet.value)
    return Jet2(float(jet.value), jet.gradient.copy(), hessian)


def fd_steps(point: Sequence[float], step: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Per-coordinate step: ``step * max(1, |x_i|)``."""
    return step * np.maximum(1.0, np.abs(np.asarray(point, dtype=float)))


def fd_hessian(
    e: Expr, point: Sequence[float], step: Optional[float] = None
) -> np.ndarray:
    """
    Central-difference Hessian of ``e`` at ``point``.

    Diagonal entries use the 3-point stencil, off-diagonal entries the 4-point
    stencil; the result is symmetrized by averaging with its transpose.
    ``step`` defaults to 1e-4 and is scaled by max(1, |x_i|) per coordinate.
    """
    if step is not None and step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    x = np.asarray(point, dtype=float)
    n = len(x)
    h = fd_steps(x, DEFAULT_FD_STEP if step is None else step)

    def f(offset: np.ndarray) -> float:
        return eval_scalar(e, x + offset)

    f0 = f(np.zeros(n))
    hess = np.zeros((n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h[i]
        hess[i, i] = (f(ei) - 2.0 * f0 + f(-ei)) / (h[i] * h[i])
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h[j]
            value = (f(ei + ej) - f(ei - ej) - f(-ei + ej) + f(-ei - ej)) / (
                4.0 * h[i] * h[j]
            )
            hess[i, j] = value
            hess[j, i] = value
    return 0.5 * (hess + hess.T)


def hessian_relative_difference(a: np.ndarray, b: np.ndarray) -> float:
    """Max-norm difference relative to the larger max-norm of the two."""
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b)) / scale)

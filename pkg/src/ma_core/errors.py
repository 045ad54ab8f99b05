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
Exception hierarchy.

Every error raised by the library derives from HomotheticError. Errors caused
by bad input also derive from ValueError so plain ``except ValueError``
handlers keep working.
"""

from typing import Any, Dict, Iterable, Optional


class HomotheticError(Exception):
    """Base class for all library errors."""

    def to_dict(self) -> Dict[str, Any]:
        return {"error": type(self).__name__, "message": str(self)}


# Expressions


class ExprError(HomotheticError, ValueError):
    pass


class ExprSyntaxError(ExprError):
    """Raised by the parser. ``position`` is the 0-based character offset."""

    def __init__(self, message: str, position: int, expected: Iterable[str] = ()):
        self.position = position
        self.expected = sorted(set(expected))
        detail = f"{message} at column {position}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data.update(column=self.position, expected=self.expected)
        return data


class UnknownIdentifier(ExprError):
    def __init__(self, name: str, position: Optional[int] = None):
        self.name = name
        self.position = position
        where = f" at column {position}" if position is not None else ""
        super().__init__(f"Unknown identifier '{name}'{where}")

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data.update(name=self.name, column=self.position)
        return data


class ArityError(ExprError):
    """Wrong argument count for a builtin, or a variable outside the declared arity."""


class ArityMismatch(ExprError):
    """Evaluation point dimension does not cover the expression's variables."""


class NestingTooDeep(ExprError):
    """Expression tree deeper than the evaluator supports."""


# Evaluation


class DomainError(HomotheticError, ValueError):
    """A point lies outside the natural domain of a subexpression."""

    def __init__(
        self,
        message: str,
        subexpression: Optional[str] = None,
        value: Optional[float] = None,
    ):
        self.reason = message
        self.subexpression = subexpression
        self.value = value
        super().__init__(self._render())

    def _render(self) -> str:
        text = self.reason
        if self.subexpression is not None:
            text += f" in {self.subexpression}"
        if self.value is not None:
            text += f" (value {self.value!r})"
        return text

    def locate(self, subexpression: str) -> "DomainError":
        if self.subexpression is None:
            self.subexpression = subexpression
            self.args = (self._render(),)
        return self

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data.update(subexpression=self.subexpression, value=self.value)
        return data


class DerivativeSingularity(DomainError):
    """Value defined but a derivative is not (e.g. sqrt at 0)."""


# Linear algebra


class OrderError(HomotheticError, ValueError):
    pass


class DimensionError(HomotheticError, ValueError):
    pass


# Homogeneity and theorems


class ZeroValue(HomotheticError, ValueError):
    pass


class ZeroDerivative(HomotheticError, ValueError):
    pass


class ZeroFPrime(HomotheticError, ValueError):
    pass


class DegreeOne(HomotheticError, ValueError):
    pass


class NotHomogeneous(HomotheticError, ValueError):
    pass


class NotLinearlyHomogeneous(NotHomogeneous):
    pass


class UnsupportedOuter(HomotheticError, ValueError):
    pass


class UsageError(HomotheticError, ValueError):
    pass


class _EvidenceError(HomotheticError):
    def __init__(self, message: str, evidence: Optional[Dict[str, Any]] = None):
        self.evidence = dict(evidence or {})
        super().__init__(message)

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["evidence"] = self.evidence
        return data


class Inconsistent(_EvidenceError):
    """Flat, yet no classification case verifies."""


class Mismatch(_EvidenceError):
    """Analytic prediction contradicts the numerical verdict."""


class ToleranceExceeded(_EvidenceError):
    """An identity battery exceeded its tolerance."""

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
Parsers for the command-line literals.

Outer families:  affine:alpha=1,beta=0   power:alpha=1,p=2,beta=0
                 log:alpha=1,beta=0      exp:alpha=1,beta=0   expr:u^2+1
Models:          perfsub:a=2:3   cobb-douglas:gamma=1,alpha=0.3:0.7
                 acms:gamma=1,a=1:1,rho=2,d=1
Constants:       name=value
Ranges:          lo:hi
"""

import math
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from ma_core.errors import UsageError
from ma_core.expr import VarSpec, parse
from ma_core.homothetic import OuterFamily
from ma_core.models import ACMS, CobbDouglas, Model, PerfectSubstitute

OUTER_FIELDS = {
    "affine": ("alpha", "beta"),
    "power": ("alpha", "p", "beta"),
    "log": ("alpha", "beta"),
    "exp": ("alpha", "beta"),
}


def parse_number(text: str, what: str) -> float:
    """Parse a finite float, naming ``what`` in the error message."""
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"Invalid number for {what}: {text!r}")
    if not math.isfinite(value):
        raise UsageError(f"{what} must be finite, got {text!r}")
    return value


def parse_number_list(text: str, what: str) -> Tuple[float, ...]:
    """Colon-separated floats, e.g. ``0.3:0.7``."""
    return tuple(parse_number(part, what) for part in text.split(":"))


def _split_kind(text: str) -> Tuple[str, str]:
    kind, sep, body = text.partition(":")
    if not sep:
        raise UsageError(f"Expected KIND:FIELDS, got {text!r}")
    return kind.strip().lower(), body


def _fields(body: str, allowed: Iterable[str]) -> Dict[str, str]:
    allowed = tuple(allowed)
    fields: Dict[str, str] = {}
    for item in filter(None, (part.strip() for part in body.split(","))):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or not value.strip():
            raise UsageError(f"Expected key=value, got {item!r}")
        if key not in allowed:
            raise UsageError(
                f"Unknown field {key!r}; expected one of: {', '.join(allowed)}"
            )
        if key in fields:
            raise UsageError(f"Field {key!r} given twice")
        fields[key] = value.strip()
    return fields


def _required(fields: Mapping[str, str], key: str, kind: str) -> str:
    if key not in fields:
        raise UsageError(f"{kind} literal needs field {key!r}")
    return fields[key]


def parse_outer(
    text: str, constants: Optional[Mapping[str, float]] = None
) -> OuterFamily:
    """
    Parse an outer family literal.

    Raises:
        UsageError: unknown family, unknown or missing field, bad number
        ExprError: malformed ``expr:`` body
    """
    kind, body = _split_kind(text)
    if kind == "expr":
        return OuterFamily.from_expr(parse(body, VarSpec(("u",)), constants))
    if kind not in OUTER_FIELDS:
        raise UsageError(
            f"Unknown outer family {kind!r}; expected one of: "
            f"{', '.join(list(OUTER_FIELDS) + ['expr'])}"
        )
    fields = _fields(body, OUTER_FIELDS[kind])
    values = {key: parse_number(value, key) for key, value in fields.items()}
    try:
        if kind == "power":
            p = parse_number(_required(fields, "p", kind), "p")
            return OuterFamily.power(values.get("alpha", 1.0), p, values.get("beta", 0.0))
        factory = getattr(OuterFamily, kind)
        return factory(values.get("alpha", 1.0), values.get("beta", 0.0))
    except ValueError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(str(exc))


def parse_model(text: str) -> Model:
    """
    Parse a production model literal.

    Raises:
        UsageError: unknown model, unknown or missing field, invalid parameters
    """
    kind, body = _split_kind(text)
    try:
        if kind == "perfsub":
            fields = _fields(body, ("a",))
            return PerfectSubstitute(parse_number_list(_required(fields, "a", kind), "a"))
        if kind == "cobb-douglas":
            fields = _fields(body, ("gamma", "alpha"))
            return CobbDouglas(
                parse_number(fields.get("gamma", "1"), "gamma"),
                parse_number_list(_required(fields, "alpha", kind), "alpha"),
            )
        if kind == "acms":
            fields = _fields(body, ("gamma", "a", "rho", "d"))
            return ACMS(
                parse_number(fields.get("gamma", "1"), "gamma"),
                parse_number_list(_required(fields, "a", kind), "a"),
                parse_number(_required(fields, "rho", kind), "rho"),
                parse_number(fields.get("d", "1"), "d"),
            )
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(f"Invalid {kind} model: {exc}")
    raise UsageError(
        f"Unknown model {kind!r}; expected one of: perfsub, cobb-douglas, acms"
    )


def parse_constants(items: Sequence[str]) -> Dict[str, float]:
    """``name=value`` pairs from repeated --const flags."""
    constants: Dict[str, float] = {}
    for item in items:
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or not name.isidentifier():
            raise UsageError(f"Expected --const name=value, got {item!r}")
        if name in constants:
            raise UsageError(f"Constant {name!r} given twice")
        constants[name] = parse_number(value.strip(), name)
    return constants


def parse_range(text: str) -> Tuple[float, float]:
    """``lo:hi`` with lo < hi."""
    parts = text.split(":")
    if len(parts) != 2:
        raise UsageError(f"Expected a range lo:hi, got {text!r}")
    lo, hi = (parse_number(part, "range") for part in parts)
    if not lo < hi:
        raise UsageError(f"Range needs lo < hi, got {text!r}")
    return lo, hi

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
Analysis reports and grid files.

Reports serialize to versioned JSON with sorted keys, so identical inputs give
byte-identical output once the timestamp is left out. Grids are written as CSV
with a JSON sidecar holding the metadata.
"""

import csv
import json
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

TOOL_NAME = "homothetic-ma"
TOOL_VERSION = "0.1.0"
SCHEMA_VERSION = "1"


def jsonable(value: Any) -> Any:
    """
    Convert numpy scalars, arrays, tuples and enums to JSON types.
    Non-finite floats become the strings "inf", "-inf" and "nan".
    """
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else repr(value)
    if value is None or isinstance(value, str):
        return value
    if hasattr(value, "to_dict"):
        return jsonable(value.to_dict())
    return str(value)


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class AnalysisReport:
    """
    One command's report: the echoed inputs, the results and the exit code.
    ``timestamp`` is None when reports must be reproducible byte for byte.
    """

    command: str
    inputs: Dict[str, Any]
    results: Dict[str, Any] = field(default_factory=dict)
    exit_code: int = 0
    timestamp: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": TOOL_NAME, "version": TOOL_VERSION},
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "exit_code": self.exit_code,
        }
        if self.timestamp is not None:
            data["timestamp"] = self.timestamp
        return jsonable(data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def write_json(data: Any, path: str) -> None:
    """Write ``data`` (a report or anything jsonable) to ``path``."""
    text = data.to_json() if isinstance(data, AnalysisReport) else (
        json.dumps(jsonable(data), indent=2, sort_keys=True) + "\n"
    )
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory):
        raise FileNotFoundError(f"Output directory does not exist: {directory}")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def grid_header(names: Sequence[str]) -> List[str]:
    """x1..xn, f, det_hess, gauss_kronecker, mrs_i_j for i < j (1-based)."""
    n = len(names)
    header = list(names) + ["f", "det_hess", "gauss_kronecker"]
    header += [f"mrs_{i + 1}_{j + 1}" for i in range(n) for j in range(i + 1, n)]
    return header


def _cell(value: float) -> str:
    # repr is locale independent and round-trips
    return repr(float(value))


def write_grid_csv(
    path: str, names: Sequence[str], rows: Iterable[Sequence[float]]
) -> int:
    """Write grid rows under grid_header(names); returns the number of rows."""
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(grid_header(names))
        for row in rows:
            writer.writerow([_cell(v) for v in row])
            count += 1
    return count


def sidecar_path(csv_path: str) -> str:
    root, _ = os.path.splitext(csv_path)
    return root + ".json"

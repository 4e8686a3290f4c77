"""Named scalar results with tolerances and verdicts."""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional
import json
import math

import numpy as np
import pandas as pd
from pathlib2 import Path


def _plain(value):
    # numpy scalars and arrays -> JSON friendly python values
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return value


@dataclass
class ReportEntry:
    label: str
    value: float
    tolerance: Optional[float]
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"label": self.label, "value": _plain(self.value),
                "tolerance": _plain(self.tolerance), "pass": bool(self.passed)}


@dataclass
class DiagnosticReport:
    """
    Collection of named scalar diagnostics.

    The JSON document has the layout
    {name, params, entries: [{label, value, tolerance, pass}], verdict}.
    Raw grids for plotting are kept in `tables` and written as CSV.
    """
    name: str
    params: Dict[str, Any] = field(default_factory=dict)
    entries: List[ReportEntry] = field(default_factory=list)
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)

    def add(self, label: str, value: float, tolerance: Optional[float] = None,
            passed: Optional[bool] = None) -> ReportEntry:
        """
        Append an entry. Without an explicit verdict the entry passes when
        `value <= tolerance` (or always, for purely informative entries).
        """
        if passed is None:
            passed = True if tolerance is None else bool(value <= tolerance)
        entry = ReportEntry(label, float(value), None if tolerance is None else float(tolerance), bool(passed))
        self.entries.append(entry)
        return entry

    def __getitem__(self, label: str) -> ReportEntry:
        for entry in self.entries:
            if entry.label == label:
                return entry
        raise KeyError(label)

    def __contains__(self, label: str) -> bool:
        return any(entry.label == label for entry in self.entries)

    @property
    def passed(self) -> bool:
        return all(entry.passed for entry in self.entries)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def merge(self, other: "DiagnosticReport", prefix: str = "") -> "DiagnosticReport":
        for entry in other.entries:
            self.entries.append(ReportEntry(prefix + entry.label, entry.value, entry.tolerance, entry.passed))
        for key, table in other.tables.items():
            self.tables[prefix + key] = table
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "params": _plain(self.params),
            "entries": [entry.to_dict() for entry in self.entries],
            "verdict": self.verdict,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DiagnosticReport":
        report = cls(data["name"], dict(data.get("params", {})))
        for item in data.get("entries", []):
            value = float(item["value"])
            tolerance = item.get("tolerance")
            report.entries.append(ReportEntry(item["label"], value,
                                              None if tolerance is None else float(tolerance),
                                              bool(item["pass"])))
        return report

    def to_json(self, path) -> Path:
        path = Path(str(path))
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=False)
            f.write("\n")
        return path

    def write_tables(self, directory) -> List[Path]:
        directory = Path(str(directory))
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        for key, table in self.tables.items():
            target = directory.joinpath(f"{self.name}_{key}.csv")
            table.to_csv(str(target), index=False, float_format="%.17g")
            written.append(target)
        return written

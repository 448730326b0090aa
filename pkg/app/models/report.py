"""
Residual bookkeeping and the serialized verification report.

Report JSON layout:
{"config": ..., "suites": [{"name": str, "reference": str,
  "residuals": [{"label": str, "value": float, "tol": float, "pass": bool}],
  "measurements": {label: float}}],
 "verdict": "pass" | "fail"}
"""

import math
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"


class ResidualEntry(BaseModel):
    """One checked relation: its residual against its tolerance."""
    model_config = ConfigDict(populate_by_name=True)

    label: str = Field(..., description="Relation name")
    value: float = Field(..., ge=0.0, description="Residual (norm or absolute difference)")
    tol: float = Field(..., gt=0.0)
    passed: bool = Field(..., alias="pass")
    reference: str = Field(default="", description="Relation this entry instantiates")
    states: int = Field(default=0, ge=0, description="Number of states or points probed")
    note: Optional[str] = Field(default=None)

    @field_validator("value")
    @classmethod
    def finite_value(cls, v: float) -> float:
        if math.isnan(v):
            raise ValueError("residual must not be NaN")
        return v


class ResidualSet(BaseModel):
    """Named collection of residuals produced by one check or suite."""
    model_config = ConfigDict(populate_by_name=True)

    name: str
    reference: str = Field(default="")
    residuals: List[ResidualEntry] = Field(default_factory=list)
    skipped: List[str] = Field(default_factory=list, description="Checks not applicable here, with reason")
    measurements: Dict[str, float] = Field(
        default_factory=dict,
        description="Reported values that do not enter the verdict",
    )

    def add(
        self,
        label: str,
        value: float,
        tol: float,
        reference: str = "",
        states: int = 0,
        note: Optional[str] = None,
    ) -> ResidualEntry:
        """Record a residual; the verdict is value <= tol."""
        value = float(abs(value))
        entry = ResidualEntry(
            label=label,
            value=value,
            tol=tol,
            passed=bool(value <= tol),
            reference=reference,
            states=states,
            note=note,
        )
        self.residuals.append(entry)
        return entry

    def skip(self, label: str, reason: str) -> None:
        self.skipped.append(f"{label}: {reason}")

    def measure(self, label: str, value: float) -> None:
        self.measurements[label] = float(value)

    def get(self, label: str) -> ResidualEntry:
        for entry in self.residuals:
            if entry.label == label:
                return entry
        raise KeyError(label)

    def max_value(self, prefix: str = "") -> float:
        values = [e.value for e in self.residuals if e.label.startswith(prefix)]
        return max(values) if values else 0.0

    @property
    def passed(self) -> bool:
        return all(entry.passed for entry in self.residuals)

    @property
    def failures(self) -> List[str]:
        return [entry.label for entry in self.residuals if not entry.passed]


class VerificationReport(BaseModel):
    """Aggregate of every suite run for one configuration."""
    model_config = ConfigDict(use_enum_values=True)

    config: Dict[str, Any] = Field(default_factory=dict)
    space: Dict[str, Any] = Field(default_factory=dict)
    family: Dict[str, Any] = Field(default_factory=dict)
    dsf: Dict[str, Any] = Field(default_factory=dict)
    probed_range: Dict[str, Any] = Field(default_factory=dict)
    suites: List[ResidualSet] = Field(default_factory=list)
    verdict: Verdict = Verdict.FAIL
    wall_clock_seconds: Optional[float] = Field(default=None)

    @property
    def failures(self) -> List[str]:
        return [f"{suite.name}:{label}" for suite in self.suites for label in suite.failures]

    def to_json(self, include_timing: bool = False) -> str:
        exclude = None if include_timing and self.wall_clock_seconds is not None else {"wall_clock_seconds"}
        return self.model_dump_json(by_alias=True, exclude=exclude, indent=2)

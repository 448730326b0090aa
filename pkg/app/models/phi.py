"""
Wire models for Phi families and realizability verdicts.

The family file stores sparse complex entries with 1-based indices:
{"d_a": 2, "d_b": 2, "q": 1.0, "modes": [{"alpha": 1, "entries": [{"mu": 1, "nu": 1, "re": 1.0, "im": 0.0}]}]}
"""

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class PhiEntry(BaseModel):
    """One nonzero entry Phi^{mu nu} of a mode matrix."""
    mu: int = Field(..., ge=1, description="a-mode index (row), 1-based")
    nu: int = Field(..., ge=1, description="b-mode index (column), 1-based")
    re: float = Field(default=0.0)
    im: float = Field(default=0.0)


class PhiMode(BaseModel):
    """Entries of the matrix Phi_alpha."""
    alpha: int = Field(..., ge=1, description="Quasiboson mode label, 1-based")
    entries: List[PhiEntry] = Field(default_factory=list)


class PhiFamilyFile(BaseModel):
    """
    Serialized Phi family.

    Mode labels must be distinct; entries must fit the declared shape.
    """
    d_a: int = Field(..., ge=1)
    d_b: int = Field(..., ge=1)
    q: float = Field(default=1.0, gt=-1.0, le=1.0)
    modes: List[PhiMode] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_shape(self):
        labels = [mode.alpha for mode in self.modes]
        if len(set(labels)) != len(labels):
            raise ValueError("mode labels (alpha) must be distinct")
        for mode in self.modes:
            for entry in mode.entries:
                if entry.mu > self.d_a or entry.nu > self.d_b:
                    raise ValueError(
                        f"entry ({entry.mu}, {entry.nu}) of mode {mode.alpha} "
                        f"lies outside the {self.d_a}x{self.d_b} shape"
                    )
        return self


class VerdictKind(str, Enum):
    """Realizability outcome."""
    REALIZABLE_Q1 = "realizable_q1"
    REALIZABLE_QLT1 = "realizable_qlt1"
    NOT_REALIZABLE = "not_realizable"


class RealizabilityVerdict(BaseModel):
    """Result of classifying a Phi family against its constituent deformation."""
    model_config = ConfigDict(use_enum_values=True)

    verdict: VerdictKind
    m: Optional[int] = Field(default=None, description="Block rank 2/f for q = 1 realizations")
    positions: List[Tuple[int, int, int]] = Field(
        default_factory=list,
        description="(alpha, mu, nu) one-hot positions, 1-based, for q < 1 realizations"
    )
    reasons: List[str] = Field(default_factory=list, description="Names of violated relations")
    evidence: Dict[str, float] = Field(default_factory=dict)

    @property
    def realizable(self) -> bool:
        return self.verdict != VerdictKind.NOT_REALIZABLE.value

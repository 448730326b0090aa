"""
Pydantic models describing truncated (q-)fermion Fock spaces.
"""

from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ModeFamily(str, Enum):
    """The two constituent families; a-modes precede b-modes in the chain."""
    A = "a"
    B = "b"


class ModeSpec(BaseModel):
    """
    Mode layout and deformation of the constituent fermions.

    At q = 1 the constituents are nilpotent of second order, so the
    cutoff is forced to 1 whatever the caller asked for.
    """
    model_config = ConfigDict(frozen=True)

    d_a: int = Field(..., ge=1, description="Number of a-modes")
    d_b: int = Field(..., ge=1, description="Number of b-modes")
    q: float = Field(..., description="Deformation parameter, -1 < q <= 1")
    cutoff: int = Field(default=1, ge=1, description="Maximum occupancy per mode")

    @field_validator("q")
    @classmethod
    def validate_q(cls, v: float) -> float:
        """Reject q outside (-1, 1]."""
        if not (-1.0 < v <= 1.0):
            raise ValueError(f"q must satisfy -1 < q <= 1, got {v}")
        return v

    @model_validator(mode="before")
    @classmethod
    def force_fermionic_cutoff(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("q") == 1:
            data = {**data, "cutoff": 1}
        return data

    @property
    def n_modes(self) -> int:
        return self.d_a + self.d_b

    @property
    def is_fermionic(self) -> bool:
        return self.q == 1.0

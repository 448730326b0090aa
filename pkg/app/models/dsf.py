"""
Deformation structure function specifications.

A spec is a tagged union over the four families the toolkit evaluates.
Every constructible spec satisfies phi(0) = 0 and phi(1) = 1.
"""

from enum import Enum
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator, model_validator
from typing_extensions import Annotated

INITIAL_CONDITION_TOLERANCE = 1e-12


class DSFVariant(str, Enum):
    """Discriminator values of StructureFunctionSpec."""
    FERMIONIC_QUADRATIC = "fermionic_quadratic"
    Q_FERMION_SQUARE = "q_fermion_square"
    PARAMETERIZED = "parameterized"
    TABULATED = "tabulated"


class _SpecBase(BaseModel):
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_initial_conditions(self):
        # imported lazily: the evaluator module depends on these models
        from app.services.dsf import unified_dsf

        phi0 = unified_dsf(self, 0)
        phi1 = unified_dsf(self, 1)
        if abs(phi0) > INITIAL_CONDITION_TOLERANCE or abs(phi1 - 1.0) > INITIAL_CONDITION_TOLERANCE:
            raise ValueError(
                f"structure function must satisfy phi(0)=0 and phi(1)=1, got {phi0}, {phi1}"
            )
        return self

    @property
    def q(self) -> Optional[float]:
        return None

    @property
    def deformation(self) -> Optional[float]:
        """The parameter f of the quadratic form, when the spec fixes one."""
        return None


class FermionicQuadratic(_SpecBase):
    """phi(n) = (1 + f/2) n - (f/2) n^2 with f = 2/m."""
    variant: Literal["fermionic_quadratic"] = "fermionic_quadratic"
    m: int = Field(..., ge=1, description="Rank of every Phi matrix, f = 2/m")

    @property
    def deformation(self) -> float:
        return 2.0 / self.m


class QFermionSquare(_SpecBase):
    """phi(n) = [n]^2 of the q-fermion bracket."""
    variant: Literal["q_fermion_square"] = "q_fermion_square"
    q_value: float = Field(..., alias="q", description="Deformation of the constituents, -1 < q < 1")

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    @field_validator("q_value")
    @classmethod
    def validate_q(cls, v: float) -> float:
        if not (-1.0 < v < 1.0):
            raise ValueError(f"q-fermion square structure function needs -1 < q < 1, got {v}")
        return v

    @property
    def q(self) -> float:
        return self.q_value


class Parameterized(_SpecBase):
    """Three-parameter blend; (p1, p2, p3) = (1, 1, 2) reduces to the square form."""
    variant: Literal["parameterized"] = "parameterized"
    q_value: float = Field(..., alias="q", description="Deformation of the constituents, -1 < q < 1")
    p1: float = Field(default=0.0)
    p2: float = Field(default=0.0)
    p3: float = Field(default=0.0)

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    @field_validator("q_value")
    @classmethod
    def validate_q(cls, v: float) -> float:
        if not (-1.0 < v < 1.0):
            raise ValueError(f"parameterized structure function needs -1 < q < 1, got {v}")
        return v

    @property
    def q(self) -> float:
        return self.q_value


class Tabulated(_SpecBase):
    """Explicit values phi(0), phi(1), ...; evaluation past the end is a range error."""
    variant: Literal["tabulated"] = "tabulated"
    values: List[float] = Field(..., min_length=2)

    @property
    def deformation(self) -> Optional[float]:
        if len(self.values) < 3:
            return None
        return 2.0 - self.values[2]


StructureFunctionSpec = Annotated[
    Union[FermionicQuadratic, QFermionSquare, Parameterized, Tabulated],
    Field(discriminator="variant"),
]

structure_function_adapter: TypeAdapter = TypeAdapter(StructureFunctionSpec)

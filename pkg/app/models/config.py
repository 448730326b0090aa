"""
Run configuration: one JSON file describes one verification run.
"""

import json
from enum import Enum
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError
from typing_extensions import Annotated

from app.core.errors import ConfigError
from app.models.dsf import StructureFunctionSpec
from app.models.fock import ModeSpec
from app.models.phi import PhiFamilyFile


class GeneratorKind(str, Enum):
    """How a generated family is laid out."""
    BLOCK = "block"
    UNITARY = "unitary"
    ONE_HOT = "one_hot"


class PhiFileSource(BaseModel):
    """Load the family from a Phi family JSON file."""
    source: Literal["file"] = "file"
    path: str


class PhiInlineSource(BaseModel):
    """Family given inline in the run configuration."""
    source: Literal["inline"] = "inline"
    family: PhiFamilyFile


class PhiGeneratorSource(BaseModel):
    """
    Generate the family.

    block: m x m unitary blocks rotated by U1, U2 (seeded when seed is set,
    identities otherwise); unitary: a single U/sqrt(d); one_hot: unit entries
    at the given 1-based (mu, nu) positions, diagonal positions by default.
    """
    source: Literal["generate"] = "generate"
    kind: GeneratorKind = GeneratorKind.BLOCK
    m: int = Field(default=1, ge=1)
    n_modes: int = Field(default=1, ge=1)
    seed: Optional[int] = Field(default=None)
    positions: List[Tuple[int, int]] = Field(default_factory=list)


PhiSource = Annotated[
    Union[PhiFileSource, PhiInlineSource, PhiGeneratorSource],
    Field(discriminator="source"),
]


class OutputPaths(BaseModel):
    report: Optional[str] = Field(default=None, description="Where the report JSON is written")


class RunConfig(BaseModel):
    """
    Everything a verification run needs.

    CLI flags override these values; these override application settings.
    """
    model_config = ConfigDict(frozen=False)

    space: ModeSpec
    phi: PhiSource
    dsf: StructureFunctionSpec
    n_max: int = Field(default=2, ge=1)
    tolerance: Optional[float] = Field(default=None, gt=0)
    outputs: OutputPaths = Field(default_factory=OutputPaths)
    base_dir: Optional[str] = Field(
        default=None,
        exclude=True,
        description="Directory relative file sources resolve against",
    )

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)

    def resolve(self, path: str) -> Path:
        candidate = Path(path)
        if not candidate.is_absolute() and self.base_dir:
            candidate = Path(self.base_dir) / candidate
        return candidate


def _field_names(error: ValidationError) -> List[str]:
    return [".".join(str(part) for part in err["loc"]) for err in error.errors()]


def parse_run_config(text: str, base_dir: Optional[str] = None) -> RunConfig:
    """
    Parse a run configuration from JSON text.

    Raises:
        ConfigError: On malformed JSON or schema violations, naming the fields
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    try:
        config = RunConfig.model_validate(raw)
    except ValidationError as e:
        fields = _field_names(e)
        raise ConfigError("config schema violation", fields=fields) from e
    config.base_dir = base_dir
    return config


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """
    Read and parse a run configuration file.

    Raises:
        ConfigError: If the file is missing or invalid
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}", fields=["config"])
    return parse_run_config(path.read_text(encoding="utf-8"), base_dir=str(path.parent))

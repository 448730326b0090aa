"""
File I/O for Phi families, structure-function and P tables, and reports.

Tables are written as CSV through pandas; families and reports as JSON.
"""

from pathlib import Path
from typing import Optional, Union

import pandas as pd
from pydantic import ValidationError

from app.core.errors import ConfigError, ContractError
from app.core.logging import get_logger
from app.models.config import GeneratorKind, PhiFileSource, PhiGeneratorSource, PhiInlineSource, RunConfig
from app.models.phi import PhiFamilyFile
from app.models.report import VerificationReport
from app.services.dsf import dsf_table
from app.services.expansion import check_closed_forms, p_table
from app.services.phi import PhiFamily, nondegenerate_family, one_hot_family, random_family, seeded_unitary

logger = get_logger(__name__)

PathLike = Union[str, Path]


def read_phi_file(path: PathLike) -> PhiFamily:
    """
    Load a Phi family JSON file.

    Raises:
        ConfigError: If the file is missing or does not match the family schema
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Phi file not found: {path}", fields=["phi.path"])
    try:
        data = PhiFamilyFile.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        fields = ["phi." + ".".join(str(part) for part in err["loc"]) for err in e.errors()]
        raise ConfigError(f"invalid Phi file {path}", fields=fields) from e
    family = PhiFamily.from_file(data)
    logger.debug("Phi family loaded", path=str(path), modes=len(family))
    return family


def family_json(family: PhiFamily) -> str:
    return family.to_file().model_dump_json(indent=2)


def write_phi_file(family: PhiFamily, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(family_json(family) + "\n", encoding="utf-8")
    logger.info("Phi family written", path=str(path), modes=len(family), f=family.f)
    return path


def generate_from_source(source: PhiGeneratorSource, d_a: int, d_b: int, q: float) -> PhiFamily:
    """
    Build a family from generator parameters.

    Raises:
        EmptySolutionError: If the blocks do not fit
        ContractError: If a unitary family is requested for d_a != d_b or a position is out of range
    """
    if source.kind == GeneratorKind.BLOCK:
        return random_family(d_a, d_b, source.m, source.n_modes, seed=source.seed, q=q)
    if source.kind == GeneratorKind.UNITARY:
        if d_a != d_b:
            raise ContractError(f"unitary family needs d_a = d_b, got {d_a} and {d_b}")
        return nondegenerate_family(seeded_unitary(d_a, source.seed), q=q)
    positions = source.positions or [(alpha, alpha) for alpha in range(1, source.n_modes + 1)]
    return one_hot_family(d_a, d_b, [(mu - 1, nu - 1) for mu, nu in positions], q=q)


def build_family(config: RunConfig) -> PhiFamily:
    """Resolve the Phi source of a run configuration into a family."""
    source = config.phi
    space = config.space
    if isinstance(source, PhiFileSource):
        return read_phi_file(config.resolve(source.path))
    if isinstance(source, PhiInlineSource):
        return PhiFamily.from_file(source.family)
    return generate_from_source(source, space.d_a, space.d_b, space.q)


def write_report(report: VerificationReport, path: PathLike, include_timing: bool = False) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.to_json(include_timing=include_timing) + "\n", encoding="utf-8")
    logger.info("Report written", path=str(path), verdict=report.verdict)
    return path


def read_report(path: PathLike) -> VerificationReport:
    return VerificationReport.model_validate_json(Path(path).read_text(encoding="utf-8"))


def _emit(frame: pd.DataFrame, path: Optional[PathLike]) -> str:
    text = frame.to_csv(index=False)
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info("Table written", path=str(path), rows=len(frame))
    return text


def dsf_table_csv(spec, n_max: int, path: Optional[PathLike] = None) -> str:
    """CSV of n, phi, energy and recurrence residuals; written to path when given."""
    return _emit(dsf_table(spec, n_max), path)


def ptable_frame(n_max: int) -> pd.DataFrame:
    """
    Exact P-table as a frame, cross-checked against the closed forms first.

    Raises:
        ContractError: If a covered closed form disagrees with the recurrence
    """
    table = p_table(n_max)
    check = check_closed_forms(table)
    if not check.passed:
        logger.error("P-table disagrees with closed forms", failures=check.failures)
        raise ContractError(f"P-table closed-form mismatch: {', '.join(check.failures)}")
    return table.to_frame()


def ptable_csv(n_max: int, path: Optional[PathLike] = None) -> str:
    return _emit(ptable_frame(n_max), path)

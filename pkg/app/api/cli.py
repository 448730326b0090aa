"""
Command-line interface.

    python -m app.api.cli verify --config fixtures/q1_m2.json
    python -m app.api.cli generate-phi --da 4 --db 4 --m 2 --modes 2 --seed 7 --out phi.json
    python -m app.api.cli dsf-table --variant q_fermion_square --q 0.5 --n-max 6
    python -m app.api.cli ptable --n-max 8 --out ptable.csv

Exit codes: 0 pass, 1 verification failure, 2 configuration or input error.
"""

import sys
from typing import Optional, Tuple

import click
from pydantic import ValidationError

from app.core.config import get_settings
from app.core.errors import ConfigError, QuasibosonError
from app.core.logging import get_logger, setup_logging
from app.models.config import GeneratorKind, PhiGeneratorSource, load_run_config
from app.models.dsf import DSFVariant, structure_function_adapter
from app.services import exports
from app.services.verify import full_report

logger = get_logger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


def _fail_config(error: Exception) -> None:
    fields = getattr(error, "fields", None)
    logger.error("Configuration rejected", error=str(error), fields=fields)
    click.echo(f"error: {error}", err=True)
    sys.exit(EXIT_CONFIG)


@click.group()
@click.option("--log-level", default=None, help="Override QB_LOG_LEVEL")
def cli(log_level: Optional[str]) -> None:
    """Composite quasiboson realization toolkit."""
    setup_logging(log_level)


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Run configuration JSON")
@click.option("--n-max", type=int, default=None, help="Highest quasiboson number probed")
@click.option("--tol", type=float, default=None, help="Relative residual tolerance")
@click.option("--out", type=click.Path(), default=None, help="Report path (stdout when omitted)")
def verify(config_path: str, n_max: Optional[int], tol: Optional[float], out: Optional[str]) -> None:
    """Run every applicable suite for one configuration and write the report."""
    try:
        config = load_run_config(config_path)
        if n_max is not None:
            if n_max < 1:
                raise ConfigError(f"--n-max must be positive, got {n_max}", fields=["n_max"])
            config.n_max = n_max
        if tol is not None:
            if tol <= 0:
                raise ConfigError(f"--tol must be positive, got {tol}", fields=["tolerance"])
            config.tolerance = tol
        family = exports.build_family(config)
        report = full_report(config, family)
    except QuasibosonError as e:
        _fail_config(e)
        return

    target = out or (str(config.resolve(config.outputs.report)) if config.outputs.report else None)
    include_timing = get_settings().report_timing
    if target:
        exports.write_report(report, target, include_timing=include_timing)
    else:
        click.echo(report.to_json(include_timing=include_timing))

    for failure in report.failures:
        click.echo(f"FAIL {failure}", err=True)
    click.echo(f"verdict: {report.verdict}", err=True)
    sys.exit(EXIT_PASS if report.verdict == "pass" else EXIT_FAIL)


@cli.command("generate-phi")
@click.option("--da", "d_a", type=int, required=True)
@click.option("--db", "d_b", type=int, required=True)
@click.option("--m", type=int, default=1, show_default=True, help="Block rank, f = 2/m")
@click.option("--modes", "n_modes", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=None, help="Seed for Haar-random unitaries; identities when omitted")
@click.option(
    "--kind",
    type=click.Choice([k.value for k in GeneratorKind]),
    default=GeneratorKind.BLOCK.value,
    show_default=True,
)
@click.option("--position", "positions", type=(int, int), multiple=True, help="1-based (mu, nu) for one_hot")
@click.option("--q", type=float, default=1.0, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def generate_phi(
    d_a: int,
    d_b: int,
    m: int,
    n_modes: int,
    seed: Optional[int],
    kind: str,
    positions: Tuple[Tuple[int, int], ...],
    q: float,
    out: Optional[str],
) -> None:
    """Write a Phi family file."""
    try:
        source = PhiGeneratorSource(kind=kind, m=m, n_modes=n_modes, seed=seed, positions=list(positions))
        family = exports.generate_from_source(source, d_a, d_b, q)
    except ValidationError as e:
        _fail_config(ConfigError("invalid generator parameters", fields=[str(err["loc"][0]) for err in e.errors()]))
        return
    except QuasibosonError as e:
        _fail_config(e)
        return

    if out:
        exports.write_phi_file(family, out)
    else:
        click.echo(exports.family_json(family))


@cli.command("dsf-table")
@click.option("--variant", type=click.Choice([v.value for v in DSFVariant]), required=True)
@click.option("--m", type=int, default=None)
@click.option("--q", type=float, default=None)
@click.option("--p", "p", type=(float, float, float), default=None, help="p1 p2 p3 for the parameterized variant")
@click.option("--values", type=str, default=None, help="Comma-separated phi(0), phi(1), ... for tabulated")
@click.option("--n-max", type=int, default=10, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def dsf_table(
    variant: str,
    m: Optional[int],
    q: Optional[float],
    p: Optional[Tuple[float, float, float]],
    values: Optional[str],
    n_max: int,
    out: Optional[str],
) -> None:
    """Tabulate phi(n), E_n and the recurrence residuals as CSV."""
    raw = {"variant": variant}
    if m is not None:
        raw["m"] = m
    if q is not None:
        raw["q"] = q
    if p is not None:
        raw.update(p1=p[0], p2=p[1], p3=p[2])
    try:
        if values is not None:
            raw["values"] = [float(v) for v in values.split(",")]
        spec = structure_function_adapter.validate_python(raw)
        text = exports.dsf_table_csv(spec, n_max, out)
    except QuasibosonError as e:
        _fail_config(e)
        return
    except ValueError as e:
        fields = [".".join(str(x) for x in err["loc"]) for err in e.errors()] if isinstance(e, ValidationError) else None
        _fail_config(ConfigError(f"invalid structure function: {e}", fields=fields))
        return
    if not out:
        click.echo(text, nl=False)


@cli.command()
@click.option("--n-max", type=int, required=True)
@click.option("--out", type=click.Path(), default=None)
def ptable(n_max: int, out: Optional[str]) -> None:
    """Export the exact P-coefficient table as CSV."""
    try:
        text = exports.ptable_csv(n_max, out)
    except QuasibosonError as e:
        _fail_config(e)
        return
    if not out:
        click.echo(text, nl=False)


def main() -> None:
    cli()


if __name__ == "__main__":
    main()

"""Command-line front end: analyze model files, verify candidate solutions.

Exit codes: 0 success, 1 usage problems, 2 parse errors, 3 pipeline
failures, 4 verification failures above tolerance.
"""

import os
import sys
from typing import Optional

import click

from . import emitter, report, verify
from .parser import ParseError, parse_model, parse_solution
from .pipeline import STAGES, STAGE_NAMES, PipelineError, run_pipeline


@click.group()
def cli():
    """Covariant Hamiltonian analysis of first-order Lagrangian models."""


def _load_model(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    name = os.path.splitext(os.path.basename(path))[0]
    return parse_model(text, name=name)


@cli.command()
@click.argument("model_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--emit", "fmt", type=click.Choice(emitter.FORMATS),
              default="text", show_default=True,
              help="Output format for the derivation record.")
@click.option("--stage", type=click.Choice(STAGE_NAMES), default=None,
              help="Emit a single stage instead of the whole record.")
@click.option("--out", "out_path",
              type=click.Path(dir_okay=False, writable=True), default=None,
              help="Write the rendering to a file instead of stdout.")
def analyze(model_file: str, fmt: str, stage: Optional[str],
            out_path: Optional[str]) -> int:
    """Derive the covariant Hamiltonian record for MODEL_FILE."""
    model = _load_model(model_file)
    system = run_pipeline(model)
    text = emitter.render(system, fmt, stage)
    if out_path is None:
        click.echo(text, nl=False)
    else:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
        click.echo("wrote %s" % out_path, err=True)
    return 0


@cli.command(name="verify")
@click.argument("model_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--solution", "solution_file", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Solution file with field and/or flux assignments.")
@click.option("--step", type=float, default=verify.DEFAULT_STEP,
              show_default=True, help="Central finite-difference step.")
@click.option("--tol", type=float, default=verify.DEFAULT_TOLERANCE,
              show_default=True, help="Maximum allowed absolute residual.")
@click.option("--points", type=int, default=verify.DEFAULT_POINTS,
              show_default=True, help="Number of random sample points.")
@click.option("--order-step", type=float, default=verify.DEFAULT_ORDER_STEP,
              show_default=True,
              help="Base step for the step-halving order check.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for the sample generator.")
@click.option("--report-dir", type=click.Path(file_okay=False), default=None,
              help="Directory for residuals.csv and rendered figures.")
def verify_cmd(model_file: str, solution_file: str, step: float, tol: float,
               points: int, order_step: float, seed: int,
               report_dir: Optional[str]) -> int:
    """Check a candidate solution against the emitted equations."""
    model = _load_model(model_file)
    system = run_pipeline(model)
    with open(solution_file, "r", encoding="utf-8") as handle:
        solution = parse_solution(handle.read())
    try:
        residuals = verify.verify_system(system, solution, step=step,
                                         tolerance=tol, points=points,
                                         seed=seed)
        rows = verify.convergence_check(system, solution, step=order_step,
                                        seed=seed)
    except verify.SolutionCoverage as exc:
        raise click.UsageError(str(exc))
    click.echo(verify.format_report(residuals, rows))
    if report_dir is not None:
        for path in report.write_report(residuals, rows, report_dir,
                                        order_step):
            click.echo("wrote %s" % path, err=True)
    if residuals.passed and all(row.second_order for row in rows):
        return 0
    return 4


@cli.command()
def stages() -> int:
    """List the pipeline stages in execution order."""
    for name, description in STAGES:
        click.echo("%-16s %s" % (name, description))
    return 0


def main(argv=None) -> int:
    """Entry point mapping exceptions onto the documented exit codes."""
    try:
        result = cli.main(args=argv, standalone_mode=False)
        return result if isinstance(result, int) else 0
    except click.UsageError as exc:
        click.echo("error: %s" % exc.format_message(), err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except ParseError as exc:
        click.echo("parse error: %s" % exc, err=True)
        return 2
    except PipelineError as exc:
        click.echo("pipeline error: %s" % exc, err=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())

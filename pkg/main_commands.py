import json
import logging
from functools import wraps
from typing import Any, Callable, Dict

import click

from algebra import SingularError
from fock import CapExceeded
from mfs import MFSeries, NotCompInvertible, SeriesError
from ncl import Mode, PartitionError, count_partitions, enumerate_partitions
from transforms import (free_additive_convolution, free_multiplicative_convolution, r_inverse, r_transform,
                        s_inverse, s_transform, t_inverse, t_transform)
from utils import MulffsError, SchemaError, to_json
from verification import DIM_KINDS, VerificationReport, oracle_check, verify_ncl

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
EXIT_SINGULAR = 3

MODES = click.Choice([m.value for m in Mode])
SINGULAR_ERRORS = (SingularError, NotCompInvertible, CapExceeded)
USAGE_ERRORS = (SchemaError, PartitionError, SeriesError, MulffsError, ValueError, OSError)


def error_response(error: BaseException, exit_code: int) -> int:
    """Write the machine-readable error object to stderr and return the exit code."""
    click.echo(to_json({
        "error": type(error).__name__,
        "exit_code": exit_code,
        "message": str(error),
        "status": "error",
    }), err=True)
    return exit_code


def handle_exceptions(func: Callable[..., int]) -> Callable[..., int]:
    """Decorator mapping library errors onto exit codes."""
    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> int:
        try:
            return func(*args, **kwargs)
        except SINGULAR_ERRORS as e:
            logger.error(f"{func.__name__} stopped on a degenerate input: {e}")
            return error_response(e, EXIT_SINGULAR)
        except USAGE_ERRORS as e:
            logger.error(f"{func.__name__} rejected its input: {e}")
            return error_response(e, EXIT_USAGE)
    return wrapper


def load_json(path: str) -> Any:
    with click.open_file(path, "r") as f:
        text = f.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("$", f"invalid JSON in {path}: {e.msg} at line {e.lineno}") from None


def load_series(path: str) -> MFSeries:
    return MFSeries.from_dict(load_json(path))


def emit(data: Any, out: str = "-") -> None:
    with click.open_file(out, "w") as f:
        f.write(to_json(data) + "\n")


def report_result(report: VerificationReport, out: str = "-") -> int:
    emit(report.to_dict(), out)
    return EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED


@click.group()
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
              default=None, help="Override MULFFS_LOG_LEVEL for this run.")
def cli(log_level: str) -> None:
    """Exact multilinear function series, noncrossing linked partitions and free transforms."""
    if log_level:
        logging.getLogger().setLevel(log_level.upper())


@cli.group()
def ncl() -> None:
    """Noncrossing (linked) partition tools."""


@ncl.command("count")
@click.option("--n", "n", type=int, required=True)
@click.option("--mode", type=MODES, default=Mode.NCL.value)
@click.option("--table", is_flag=True, help="Print counts for every size from 1 to n.")
@click.option("--format", "fmt", type=click.Choice(["text", "csv", "json"]), default="text")
@handle_exceptions
def ncl_count(n: int, mode: str, table: bool, fmt: str) -> int:
    sizes = range(1, n + 1) if table else [n]
    counts: Dict[int, int] = {k: count_partitions(k, Mode(mode)) for k in sizes}
    if fmt == "json":
        emit({"mode": mode, "counts": [{"n": k, "count": c} for k, c in counts.items()]})
    elif fmt == "csv":
        click.echo("n,count")
        for k, c in counts.items():
            click.echo(f"{k},{c}")
    elif table:
        for k, c in counts.items():
            click.echo(f"{k} {c}")
    else:
        click.echo(str(counts[n]))
    return EXIT_OK


@ncl.command("enumerate")
@click.option("--n", "n", type=int, required=True)
@click.option("--mode", type=MODES, default=Mode.NCL.value)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json")
@handle_exceptions
def ncl_enumerate(n: int, mode: str, fmt: str) -> int:
    family = enumerate_partitions(n, Mode(mode))
    if fmt == "text":
        for pi in family:
            click.echo(str(pi))
    else:
        emit([pi.to_dict() for pi in family])
    return EXIT_OK


@ncl.command("verify")
@click.option("--max-n", "max_n", type=int, required=True)
@handle_exceptions
def ncl_verify(max_n: int) -> int:
    return report_result(verify_ncl(max_n))


def _transform_command(name: str, transform: Callable[[MFSeries], MFSeries], summary: str) -> None:
    @cli.command(name, help=summary)
    @click.option("--in", "in_path", default="-", show_default=True)
    @click.option("--out", "out_path", default="-", show_default=True)
    @handle_exceptions
    def command(in_path: str, out_path: str) -> int:
        emit(transform(load_series(in_path)).to_dict(), out_path)
        return EXIT_OK


_transform_command("rtransform", r_transform, "Unsymmetrized R-transform of a distribution series.")
_transform_command("ttransform", t_transform, "Unsymmetrized T-transform of a distribution series.")
_transform_command("stransform", s_transform, "Unsymmetrized S-transform, the inverse of the T-transform.")

INVERSES = {"r": r_inverse, "t": t_inverse, "s": s_inverse}


@cli.command()
@click.option("--transform", "kind", type=click.Choice(sorted(INVERSES)), required=True)
@click.option("--in", "in_path", default="-", show_default=True)
@click.option("--out", "out_path", default="-", show_default=True)
@click.option("--order", type=int, required=True)
@handle_exceptions
def moments(kind: str, in_path: str, out_path: str, order: int) -> int:
    """Distribution series with the given transform."""
    emit(INVERSES[kind](load_series(in_path), order).to_dict(), out_path)
    return EXIT_OK


@cli.command()
@click.option("--kind", type=click.Choice(["add", "mul"]), required=True)
@click.option("--a", "a_path", required=True)
@click.option("--b", "b_path", required=True)
@click.option("--order", type=int, required=True)
@click.option("--out", "out_path", default="-", show_default=True)
@handle_exceptions
def convolve(kind: str, a_path: str, b_path: str, order: int, out_path: str) -> int:
    """Distribution of x + y or xy for free x and y."""
    a, b = load_series(a_path), load_series(b_path)
    convolution = free_additive_convolution if kind == "add" else free_multiplicative_convolution
    emit(convolution(a, b, order).to_dict(), out_path)
    return EXIT_OK


@cli.command("oracle-check")
@click.option("--order", type=int, default=3, show_default=True)
@click.option("--dim-kind", type=click.Choice(sorted(DIM_KINDS)), default="matrix2", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trials", type=int, default=1, show_default=True)
@handle_exceptions
def oracle_check_command(order: int, dim_kind: str, seed: int, trials: int) -> int:
    """Cross-check partition sums and transforms against the Fock-space model."""
    return report_result(oracle_check(order, dim_kind, seed, trials))

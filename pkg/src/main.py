import sys
from collections.abc import Callable
from collections.abc import Sequence
from typing import Annotated
from typing import TypeVar

import click
import typer
from pydantic import ValidationError

from src.core.exceptions import InputFileNotFoundError
from src.core.exceptions import SummarizerError
from src.core.logging import configure_logging
from src.routers.generation import router as generation_router
from src.routers.keywords import router as keywords_router
from src.routers.metrics import router as metrics_router
from src.routers.patterns import router as patterns_router
from src.routers.training import router as training_router

PROJECT_NAME = "egad-summarizer"

EXIT_FAILURE = 1
EXIT_USAGE = 2

# Create the Typer application and register every command group
app = typer.Typer(name=PROJECT_NAME, no_args_is_help=True, add_completion=False)

app.add_typer(patterns_router)
app.add_typer(keywords_router)
app.add_typer(training_router)
app.add_typer(generation_router)
app.add_typer(metrics_router)


@app.callback()
def main(
    log_level: Annotated[
        str, typer.Option("--log-level", help="DEBUG, INFO, WARNING or ERROR.")
    ] = "INFO",
) -> None:
    """Sparse keyword-global attention summarization: train, generate, evaluate."""
    configure_logging(log_level)


# EXCEPTION HANDLERS
ExcT = TypeVar("ExcT", bound=BaseException)
Handler = Callable[[BaseException], int]

_handlers: dict[type[BaseException], Handler] = {}


def exception_handler(
    exc_class: type[ExcT],
) -> Callable[[Callable[[ExcT], int]], Callable[[ExcT], int]]:
    """Register a function turning an exception into a process exit code."""

    def register(func: Callable[[ExcT], int]) -> Callable[[ExcT], int]:
        _handlers[exc_class] = func  # type: ignore[assignment]
        return func

    return register


@exception_handler(InputFileNotFoundError)
def missing_file_handler(exc: InputFileNotFoundError) -> int:
    typer.echo(f"error: input file not found: {exc.path}", err=True)
    return EXIT_FAILURE


@exception_handler(SummarizerError)
def domain_error_handler(exc: SummarizerError) -> int:
    typer.echo(f"error: {exc}", err=True)
    return EXIT_FAILURE


@exception_handler(ValidationError)
def invalid_config_handler(exc: ValidationError) -> int:
    typer.echo(f"error: invalid configuration\n{exc}", err=True)
    return EXIT_FAILURE


@exception_handler(click.UsageError)
def usage_error_handler(exc: click.UsageError) -> int:
    exc.show()
    return EXIT_USAGE


def _find_handler(exc: BaseException) -> Handler | None:
    for klass in type(exc).__mro__:
        if klass in _handlers:
            return _handlers[klass]
    return None


def run_subcommand(argv: Sequence[str]) -> int:
    """
    Run one command line and return its exit status.

    0 on success, 2 for unknown commands or flags, 1 for every other failure
    (with a diagnostic on stderr).
    """
    try:
        result = app(args=list(argv), prog_name=PROJECT_NAME, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return EXIT_FAILURE
    except Exception as exc:
        handler = _find_handler(exc)
        if handler is None:
            raise
        return handler(exc)
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(run_subcommand(sys.argv[1:]))

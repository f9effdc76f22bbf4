from pathlib import Path
from typing import Annotated

import typer

from src.repositories.corpus_repository import CorpusRepository
from src.services.metrics.service import MetricsService

router = typer.Typer()


@router.command("evaluate")
def evaluate_command(
    cand: Annotated[Path, typer.Option("--cand", help="Candidates: id + generated (or summary).")],
    ref: Annotated[Path, typer.Option("--ref", help="References: id + summary.")],
) -> None:
    """Print corpus ROUGE-1/2/L F-measures (x100, one decimal)."""
    candidates = CorpusRepository(cand).read_field("generated", fallback="summary")
    references = CorpusRepository(ref).read_field("summary")
    score = MetricsService().evaluate(candidates, references)
    r1, r2, rl = score.f_measures_percent()
    typer.echo(f"R-1/R-2/R-L: {r1:.1f}/{r2:.1f}/{rl:.1f}")

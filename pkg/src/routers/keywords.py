from pathlib import Path
from typing import Annotated

import typer

from src.core.config import load_config
from src.dependencies import Config_file
from src.dependencies import Dictionary_file
from src.dependencies import get_keyword_service
from src.dependencies import Keyword_count
from src.dependencies import Keyword_source
from src.dependencies import load_documents
from src.dependencies import Seed

router = typer.Typer()


@router.command("keywords")
def keywords(
    corpus: Annotated[Path, typer.Option("--corpus", help="JSON-lines corpus.")],
    doc_id: Annotated[
        str | None, typer.Option("--id", help="Only this document (default: all).")
    ] = None,
    config_file: Config_file = None,
    dictionary: Dictionary_file = None,
    k: Keyword_count = None,
    source: Keyword_source = None,
    seed: Seed = None,
) -> None:
    """Print the selected keywords of each document as id, word and score."""
    config = load_config(
        config_file,
        background_dictionary=dictionary,
        keyword_count=k,
        keyword_source=source,
        seed=seed,
    )
    service = get_keyword_service(config.background_dictionary)
    keyword_config = config.keywords()
    for doc in load_documents(corpus):
        if doc_id is not None and doc.id != doc_id:
            continue
        selected = service.select(doc, keyword_config)
        scores = selected.scores or (None,) * len(selected)
        for word, score in zip(selected.words, scores):
            typer.echo(f"{doc.id}\t{word}\t{'' if score is None else f'{score:.6f}'}")

from pathlib import Path
from typing import Annotated

import typer

from src.core.config import ExperimentConfig
from src.core.seeding import derive_seed
from src.models.params import ModelParams
from src.models.vocabulary import Vocabulary
from src.repositories.checkpoint_repository import CheckpointRepository
from src.repositories.corpus_repository import CorpusRepository
from src.repositories.dictionary_repository import DictionaryRepository
from src.repositories.report_repository import ReportRepository
from src.schemas.corpus import Document
from src.services.corpus.service import build_vocabulary
from src.services.corpus.service import CorpusService
from src.services.keywords.service import KeywordService

# Options shared by several commands; None means "not given on the command line".
Config_file = Annotated[
    Path | None, typer.Option("--config", help="Flat key = value experiment file.")
]
Seed = Annotated[int | None, typer.Option("--seed", help="Root of every named sub-seed.")]
Output_dir = Annotated[Path | None, typer.Option("--out", help="Directory for run artifacts.")]
Dictionary_file = Annotated[
    Path | None,
    typer.Option("--dictionary", help="Background dictionary, one word<TAB>count per line."),
]
Keyword_count = Annotated[int | None, typer.Option("--keywords", help="Keywords to prefix.")]
Keyword_source = Annotated[
    str | None, typer.Option("--keyword-source", help="tfidf, random, gibberish or oracle.")
]


def get_corpus_service(path: Path | str) -> CorpusService:
    return CorpusService(CorpusRepository(path))


def load_documents(path: Path | str | None) -> list[Document]:
    if path is None:
        return []
    return get_corpus_service(path).load_corpus()


def get_keyword_service(dictionary: Path | str | None) -> KeywordService:
    if dictionary is None:
        return KeywordService()
    return KeywordService.from_repository(DictionaryRepository(dictionary))


def get_checkpoint_repository(directory: Path | str) -> CheckpointRepository:
    return CheckpointRepository(directory)


def get_report_repository(directory: Path | str) -> ReportRepository:
    return ReportRepository(directory)


def get_starting_model(
    config: ExperimentConfig, docs: list[Document], checkpoint: Path | None = None
) -> tuple[ModelParams, Vocabulary]:
    """
    Parameters and vocabulary a run starts from.

    A checkpoint brings its own vocabulary; otherwise the vocabulary is built
    from docs and the parameters are drawn from the "init" sub-seed.
    """
    if checkpoint is not None:
        return get_checkpoint_repository(checkpoint).load()
    vocab = build_vocabulary(docs, config.vocab_size)
    params = ModelParams.initialize(config.model(len(vocab)), derive_seed(config.seed, "init"))
    return params, vocab

import logging
from pathlib import Path
from typing import Annotated

import typer

from src.core.config import load_config
from src.core.exceptions import EmptyTrainingSetError
from src.dependencies import Config_file
from src.dependencies import Dictionary_file
from src.dependencies import get_checkpoint_repository
from src.dependencies import get_keyword_service
from src.dependencies import get_report_repository
from src.dependencies import get_starting_model
from src.dependencies import Keyword_count
from src.dependencies import Keyword_source
from src.dependencies import load_documents
from src.dependencies import Output_dir
from src.dependencies import Seed
from src.models.example import TrainingExample
from src.schemas.corpus import Document
from src.services.experiments.service import FewShotHarness
from src.services.training.service import build_examples
from src.services.training.service import train

logger = logging.getLogger(__name__)

router = typer.Typer()

CHECKPOINT_SUBDIR = "checkpoint"

Train_corpus = Annotated[Path | None, typer.Option("--train", help="Training split.")]
Validation_corpus = Annotated[
    Path | None, typer.Option("--validation", help="Validation split.")
]
Start_checkpoint = Annotated[
    Path | None, typer.Option("--checkpoint", help="Start from this checkpoint directory.")
]


@router.command("train")
def train_command(
    config_file: Config_file = None,
    train_corpus: Train_corpus = None,
    validation_corpus: Validation_corpus = None,
    out: Output_dir = None,
    dictionary: Dictionary_file = None,
    k: Keyword_count = None,
    source: Keyword_source = None,
    seed: Seed = None,
    epochs: Annotated[int | None, typer.Option("--epochs")] = None,
    learning_rate: Annotated[float | None, typer.Option("--lr")] = None,
    batch_size: Annotated[int | None, typer.Option("--batch-size")] = None,
    model_preset: Annotated[str | None, typer.Option("--model-preset")] = None,
    vocab_size: Annotated[int | None, typer.Option("--vocab-size")] = None,
    checkpoint: Start_checkpoint = None,
) -> None:
    """
    Fine-tune on the whole training split and keep the epoch with the lowest
    validation loss.
    """
    config = load_config(
        config_file,
        train_corpus=train_corpus,
        validation_corpus=validation_corpus,
        output_dir=out,
        background_dictionary=dictionary,
        keyword_count=k,
        keyword_source=source,
        seed=seed,
        epochs=epochs,
        learning_rate=learning_rate,
        batch_size=batch_size,
        model_preset=model_preset,
        vocab_size=vocab_size,
    ).resolved()
    train_docs = load_documents(config.train_corpus)
    if not train_docs:
        raise EmptyTrainingSetError()
    val_docs = load_documents(config.validation_corpus)

    params, vocab = get_starting_model(config, train_docs, checkpoint)
    keyword_service = get_keyword_service(config.background_dictionary)
    keyword_config = config.keywords()

    def to_examples(docs: list[Document]) -> list[TrainingExample]:
        return build_examples(
            docs,
            keyword_service,
            keyword_config,
            vocab,
            params.config.max_positions,
            config.max_summary_length,
        )

    result = train(params, to_examples(train_docs), to_examples(val_docs), config.training())

    reports = get_report_repository(config.output_dir)
    reports.write_resolved_config(config.render())
    reports.write_loss_log(result.history)
    get_checkpoint_repository(config.output_dir / CHECKPOINT_SUBDIR).save(
        result.best_params, vocab
    )
    typer.echo(f"best_epoch\t{result.best_epoch}")
    typer.echo(f"val_loss\t{result.history[result.best_epoch - 1].val_loss:.6f}")


@router.command("fewshot")
def fewshot_command(
    config_file: Config_file = None,
    train_corpus: Train_corpus = None,
    validation_corpus: Validation_corpus = None,
    test_corpus: Annotated[
        Path | None, typer.Option("--test", help="Scored split (default: the drawn sample).")
    ] = None,
    out: Output_dir = None,
    dictionary: Dictionary_file = None,
    source: Keyword_source = None,
    seed: Seed = None,
    repetitions: Annotated[int | None, typer.Option("--repetitions")] = None,
    checkpoint: Start_checkpoint = None,
) -> None:
    """
    Zero/few-shot protocol: every sample size and keyword count, averaged over
    seeded repetitions, written as report.csv and samples.csv.
    """
    config = load_config(
        config_file,
        train_corpus=train_corpus,
        validation_corpus=validation_corpus,
        test_corpus=test_corpus,
        output_dir=out,
        background_dictionary=dictionary,
        keyword_source=source,
        seed=seed,
        repetitions=repetitions,
    ).resolved()
    train_docs = load_documents(config.train_corpus)
    val_docs = load_documents(config.validation_corpus)
    test_docs = load_documents(config.test_corpus) if config.test_corpus else None

    params, vocab = get_starting_model(config, train_docs + val_docs, checkpoint)
    harness = FewShotHarness(
        keyword_service=get_keyword_service(config.background_dictionary),
        vocab=vocab,
        initial_params=params,
        train_config=config.training(),
        generation_config=config.generation(),
        max_summary_length=config.max_summary_length,
    )
    result = harness.run(train_docs, val_docs, config.few_shot(), config.keywords(), test_docs)

    reports = get_report_repository(config.output_dir)
    reports.write_resolved_config(config.render())
    reports.write_samples(result.draws)
    path = reports.write_report(result.rows)
    typer.echo(path.read_text(encoding="utf-8"), nl=False)

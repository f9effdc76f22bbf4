from pathlib import Path
from typing import Annotated

import typer

from src.core.config import load_config
from src.dependencies import Config_file
from src.dependencies import Dictionary_file
from src.dependencies import get_checkpoint_repository
from src.dependencies import get_keyword_service
from src.dependencies import get_report_repository
from src.dependencies import Keyword_count
from src.dependencies import Keyword_source
from src.dependencies import load_documents
from src.dependencies import Seed
from src.repositories.corpus_repository import CorpusRepository
from src.services.generation.service import GenerationService
from src.services.seq2seq.service import Seq2SeqModel
from src.services.training.service import build_examples

router = typer.Typer()


@router.command("generate")
def generate_command(
    checkpoint: Annotated[Path, typer.Option("--checkpoint", help="Checkpoint directory.")],
    corpus: Annotated[Path, typer.Option("--corpus", help="Documents to summarize.")],
    out: Annotated[Path, typer.Option("--out", help="JSON-lines file of generated summaries.")],
    config_file: Config_file = None,
    dictionary: Dictionary_file = None,
    k: Keyword_count = None,
    source: Keyword_source = None,
    seed: Seed = None,
    generation_preset: Annotated[str | None, typer.Option("--preset")] = None,
    num_beams: Annotated[int | None, typer.Option("--num-beams")] = None,
    max_length: Annotated[int | None, typer.Option("--max-length")] = None,
    min_length: Annotated[int | None, typer.Option("--min-length")] = None,
    length_penalty: Annotated[float | None, typer.Option("--length-penalty")] = None,
    early_stopping: Annotated[
        bool | None, typer.Option("--early-stopping/--no-early-stopping")
    ] = None,
    no_repeat_ngram: Annotated[int | None, typer.Option("--no-repeat-ngram")] = None,
) -> None:
    """Beam-search a summary for every document and write {"id", "generated"} lines."""
    config = load_config(
        config_file,
        output_dir=out.parent,
        background_dictionary=dictionary,
        keyword_count=k,
        keyword_source=source,
        seed=seed,
        generation_preset=generation_preset,
        num_beams=num_beams,
        max_length=max_length,
        min_length=min_length,
        length_penalty=length_penalty,
        early_stopping=early_stopping,
        no_repeat_ngram=no_repeat_ngram,
    ).resolved()
    params, vocab = get_checkpoint_repository(checkpoint).load()
    docs = load_documents(corpus)
    examples = build_examples(
        docs,
        get_keyword_service(config.background_dictionary),
        config.keywords(),
        vocab,
        params.config.max_positions,
    )
    generator = GenerationService(Seq2SeqModel(params), vocab, config.generation())
    rows = [
        {"id": example.doc_id, "generated": generator.summarize(example.input_ids, example.globals)}
        for example in examples
    ]
    CorpusRepository(out).write_lines(rows)
    get_report_repository(config.output_dir).write_resolved_config(config.render())
    typer.echo(f"generated\t{len(rows)}")

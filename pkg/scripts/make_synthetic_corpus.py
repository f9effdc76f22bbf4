from pathlib import Path
from typing import Annotated

import numpy as np
import typer

from src.repositories.corpus_repository import CorpusRepository
from src.repositories.dictionary_repository import DictionaryRepository

# Filler vocabulary shared by every document; frequent in the background dictionary.
COMMON_WORDS = (
    "the", "of", "and", "to", "a", "in", "is", "that", "for", "it", "was", "on",
    "with", "as", "be", "at", "by", "this", "have", "from", "we", "they", "will",
    "about", "meeting", "project", "team", "discussed", "said", "should", "would",
    "also", "design", "product", "market", "cost", "user", "next", "agreed", "plan",
)
SYLLABLES = ("ka", "zo", "ri", "mu", "te", "lo", "vi", "sa", "ne", "du", "po", "xe")

TOPIC_COUNT = 20
WORDS_PER_TOPIC = 3

app = typer.Typer(add_completion=False)


def topic_words(rng: np.random.Generator) -> list[list[str]]:
    """Distinct three-syllable pseudo-words grouped by topic."""
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < TOPIC_COUNT * WORDS_PER_TOPIC:
        word = "".join(rng.choice(SYLLABLES, size=3))
        if word not in seen:
            seen.add(word)
            words.append(word)
    return [words[i : i + WORDS_PER_TOPIC] for i in range(0, len(words), WORDS_PER_TOPIC)]


def synthetic_documents(count: int, seed: int = 0) -> list[dict[str, str]]:
    """
    Documents of filler text with one topic's words repeated throughout; the
    summary names the topic words.
    """
    rng = np.random.default_rng(seed)
    topics = topic_words(rng)
    records = []
    for index in range(count):
        topic = topics[int(rng.integers(len(topics)))]
        filler = list(rng.choice(COMMON_WORDS, size=int(rng.integers(40, 80))))
        for word in topic:
            for position in rng.integers(0, len(filler) + 1, size=int(rng.integers(3, 7))):
                filler.insert(int(position), word)
        records.append(
            {
                "id": f"doc-{index:04d}",
                "document": " ".join(filler),
                "summary": f"the team discussed {topic[0]} {topic[1]} and {topic[2]} .",
            }
        )
    return records


def background_counts(seed: int = 0) -> dict[str, int]:
    """Common words get large counts, topic words small ones."""
    rng = np.random.default_rng(seed)
    topics = topic_words(rng)
    counts = {word: int(rng.integers(5_000, 50_000)) for word in COMMON_WORDS}
    for topic in topics:
        for word in topic:
            counts[word] = int(rng.integers(5, 50))
    counts["."] = 60_000
    return counts


def write_synthetic_corpus(
    out_dir: Path, count: int = 300, seed: int = 0
) -> dict[str, Path]:
    """Split count documents into train/validation/test (2/3, 1/6, 1/6) plus a dictionary."""
    records = synthetic_documents(count, seed)
    n_train = 2 * count // 3
    n_val = (count - n_train) // 2
    splits = {
        "train": records[:n_train],
        "validation": records[n_train : n_train + n_val],
        "test": records[n_train + n_val :],
    }
    paths = {}
    for name, rows in splits.items():
        paths[name] = out_dir / f"{name}.jsonl"
        CorpusRepository(paths[name]).write_lines(rows)
    paths["dictionary"] = out_dir / "dictionary.tsv"
    DictionaryRepository(paths["dictionary"]).write_counts(background_counts(seed))
    return paths


@app.command()
def main(
    out_dir: Annotated[Path, typer.Argument(help="Directory for the corpus files.")],
    count: Annotated[int, typer.Option("--count", min=3)] = 300,
    seed: Annotated[int, typer.Option("--seed")] = 0,
) -> None:
    """Write train/validation/test JSON-lines splits and a background dictionary."""
    for name, path in write_synthetic_corpus(out_dir, count, seed).items():
        typer.echo(f"{name}\t{path}")


if __name__ == "__main__":
    app()

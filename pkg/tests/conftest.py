import json
from pathlib import Path

import numpy as np
import pytest

from src.models.background_dictionary import BackgroundDictionary
from src.models.params import ModelParams
from src.schemas.corpus import Document
from src.schemas.model import ModelConfig


def write_jsonl(path: Path, rows: list[dict]) -> Path:
    """Writes rows as a JSON-lines file and returns its path."""
    path.write_text("".join(json.dumps(row) + "\n" for row in rows), encoding="utf-8")
    return path


@pytest.fixture
def corpus_rows() -> list[dict]:
    """Three small, valid corpus records."""
    return [
        {"id": "a", "document": "The cat sat on the mat .", "summary": "cat sat"},
        {"id": "b", "document": "A dog barked at the cat .", "summary": "dog barked"},
        {"id": "c", "document": "The mat was red .", "summary": "red mat"},
    ]


@pytest.fixture
def corpus_file(tmp_path: Path, corpus_rows: list[dict]) -> Path:
    return write_jsonl(tmp_path / "corpus.jsonl", corpus_rows)


@pytest.fixture
def documents(corpus_rows: list[dict]) -> list[Document]:
    return [Document(**row) for row in corpus_rows]


@pytest.fixture
def background() -> BackgroundDictionary:
    """The dictionary used by the hand-computed TF-IDF examples."""
    return BackgroundDictionary({"cat": 100, "dog": 10, "the": 1000})


@pytest.fixture
def dictionary_file(tmp_path: Path) -> Path:
    path = tmp_path / "dictionary.tsv"
    path.write_text("cat\t100\ndog\t10\nthe\t1000\nmat\t50\n", encoding="utf-8")
    return path


@pytest.fixture
def toy_config() -> ModelConfig:
    """V=11, d_model=8, 2 heads, one encoder and one decoder layer."""
    return ModelConfig(
        vocab_size=11,
        d_model=8,
        n_heads=2,
        encoder_layers=1,
        decoder_layers=1,
        max_positions=16,
        half_width=1,
    )


@pytest.fixture
def toy_params(toy_config: ModelConfig) -> ModelParams:
    return ModelParams.initialize(toy_config, seed=7)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)

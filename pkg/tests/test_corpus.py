from pathlib import Path

import numpy as np
import pytest

from src.core.exceptions import CorpusParseError
from src.core.exceptions import DuplicateDocumentError
from src.core.exceptions import InputFileNotFoundError
from src.core.exceptions import VocabularySizeError
from src.models.vocabulary import SPECIAL_TOKENS
from src.models.vocabulary import split_words
from src.models.vocabulary import UNK
from src.models.vocabulary import Vocabulary
from src.repositories.corpus_repository import CorpusRepository
from src.schemas.corpus import Document
from src.services.corpus.service import build_vocabulary
from src.services.corpus.service import CorpusService
from src.services.corpus.service import detokenize
from src.services.corpus.service import tokenize
from tests.conftest import write_jsonl


def load(path: Path) -> list[Document]:
    return CorpusService(CorpusRepository(path)).load_corpus()


class TestLoadCorpus:
    """Tests for reading JSON-lines corpora."""

    def test_file_order_and_splitting(self, corpus_file):
        """Documents come back in file order with normalized words."""
        docs = load(corpus_file)
        assert [d.id for d in docs] == ["a", "b", "c"]
        assert docs[0].document == ("the", "cat", "sat", "on", "the", "mat", ".")
        assert docs[1].summary == ("dog", "barked")

    def test_empty_file(self, tmp_path):
        """An empty file is an empty corpus."""
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        assert load(path) == []

    def test_missing_file(self, tmp_path):
        """A missing path raises InputFileNotFoundError."""
        with pytest.raises(InputFileNotFoundError):
            load(tmp_path / "nope.jsonl")

    def test_missing_summary_reports_line(self, tmp_path):
        """A record without summary fails with its 1-based line number."""
        path = write_jsonl(
            tmp_path / "bad.jsonl",
            [
                {"id": "a", "document": "x", "summary": "y"},
                {"id": "b", "document": "x"},
            ],
        )
        with pytest.raises(CorpusParseError) as exc_info:
            load(path)
        assert exc_info.value.line == 2
        assert "summary" in exc_info.value.reason

    def test_invalid_json(self, tmp_path):
        """A line that is not JSON is a parse error."""
        path = tmp_path / "broken.jsonl"
        path.write_text('{"id": "a", "document": "x", "summary": "y"}\n{not json\n', encoding="utf-8")
        with pytest.raises(CorpusParseError) as exc_info:
            load(path)
        assert exc_info.value.line == 2

    def test_non_string_field(self, tmp_path):
        """Numeric fields are not coerced to strings."""
        path = write_jsonl(tmp_path / "num.jsonl", [{"id": 1, "document": "x", "summary": "y"}])
        with pytest.raises(CorpusParseError):
            load(path)

    def test_duplicate_ids(self, tmp_path, corpus_rows):
        """Two records sharing an id are rejected."""
        path = write_jsonl(tmp_path / "dup.jsonl", corpus_rows + [corpus_rows[0]])
        with pytest.raises(DuplicateDocumentError) as exc_info:
            load(path)
        assert exc_info.value.doc_id == "a"

    def test_empty_document(self, tmp_path):
        """A document without words is rejected."""
        path = write_jsonl(tmp_path / "blank.jsonl", [{"id": "a", "document": "  ", "summary": "y"}])
        with pytest.raises(CorpusParseError):
            load(path)

    def test_empty_document_reports_file_line(self, tmp_path):
        """Blank lines are skipped but still counted in the reported line."""
        path = tmp_path / "gaps.jsonl"
        path.write_text(
            '{"id": "a", "document": "x", "summary": "y"}\n'
            "\n"
            "   \n"
            '{"id": "b", "document": "   ", "summary": "y"}\n',
            encoding="utf-8",
        )
        with pytest.raises(CorpusParseError) as exc_info:
            load(path)
        assert exc_info.value.line == 4
        assert "gaps.jsonl:4" in str(exc_info.value)

    def test_empty_summary_allowed(self, tmp_path):
        """Summaries may be empty."""
        path = write_jsonl(tmp_path / "s.jsonl", [{"id": "a", "document": "x", "summary": ""}])
        assert load(path)[0].summary == ()


class TestSplitWords:
    """Tests for text normalization."""

    def test_lowercase_and_punctuation(self):
        """Words are lowercased and punctuation becomes its own token."""
        assert split_words("Hello, World!") == ("hello", ",", "world", "!")

    def test_nfc_normalization(self):
        """Composed and decomposed accents give the same word."""
        assert split_words("Café") == split_words("Café")


class TestBuildVocabulary:
    """Tests for frequency-ranked vocabulary construction."""

    def test_specials_first(self, documents):
        """The six specials occupy ids 0..5 in fixed order."""
        vocab = build_vocabulary(documents, 100)
        assert vocab.id_to_word[:6] == SPECIAL_TOKENS

    def test_frequency_then_lexicographic(self):
        """Higher counts first; equal counts in lexicographic order."""
        docs = [Document(id="x", document="b a c c", summary="a b d")]
        vocab = build_vocabulary(docs, 100)
        assert vocab.words == ("a", "b", "c", "d")

    def test_max_size_truncates(self, documents):
        """At most max_size entries including specials."""
        vocab = build_vocabulary(documents, 8)
        assert len(vocab) == 8
        assert vocab.words == ("the", "cat")

    def test_specials_only(self, documents):
        """max_size equal to the special count gives an all-UNK vocabulary."""
        vocab = build_vocabulary(documents, 6)
        assert len(vocab) == 6
        assert np.all(tokenize(("cat", "dog"), vocab) == UNK)

    def test_too_small(self, documents):
        """A vocabulary smaller than the specials is rejected."""
        with pytest.raises(VocabularySizeError):
            build_vocabulary(documents, 5)

    def test_duplicate_words_rejected(self):
        """A vocabulary must be a bijection."""
        with pytest.raises(ValueError):
            Vocabulary.from_words(["cat", "cat"])


class TestTokenize:
    """Tests for word/id conversion."""

    def test_unknown_word(self, documents):
        """Out-of-vocabulary words map to UNK."""
        vocab = build_vocabulary(documents, 100)
        assert tokenize(("cat", "zebra"), vocab).tolist() == [vocab.id_of("cat"), UNK]

    def test_special_spelling_is_not_special(self, documents):
        """A corpus word spelled like a special token is not that special."""
        vocab = build_vocabulary(documents, 100)
        assert tokenize(("<s>",), vocab).tolist() == [UNK]

    def test_empty(self, documents):
        """Empty input gives an empty int64 array."""
        ids = tokenize((), build_vocabulary(documents, 100))
        assert ids.dtype == np.int64
        assert ids.size == 0

    def test_round_trip(self, documents):
        """In-vocabulary words survive tokenize then detokenize."""
        vocab = build_vocabulary(documents, 100)
        for doc in documents:
            assert detokenize(tokenize(doc.document, vocab), vocab) == doc.document

    def test_detokenize_skips_specials(self, documents):
        """Special ids are dropped unless asked for."""
        vocab = build_vocabulary(documents, 100)
        ids = [1, vocab.id_of("cat"), 2]
        assert detokenize(ids, vocab) == ("cat",)
        assert detokenize(ids, vocab, skip_special=False) == ("<s>", "cat", "</s>")

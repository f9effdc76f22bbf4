import logging
from collections import Counter
from collections.abc import Iterable
from collections.abc import Sequence

import numpy as np

from src.core.exceptions import CorpusParseError
from src.core.exceptions import DuplicateDocumentError
from src.core.exceptions import VocabularySizeError
from src.models.vocabulary import NUM_SPECIALS
from src.models.vocabulary import TokenSeq
from src.models.vocabulary import Vocabulary
from src.repositories.corpus_repository import CorpusRepository
from src.schemas.corpus import Document

logger = logging.getLogger(__name__)


class CorpusService:
    def __init__(self, repository: CorpusRepository):
        self.repo = repository

    def load_corpus(self) -> list[Document]:
        """Documents in file order; ids must be unique."""
        documents: list[Document] = []
        seen: set[str] = set()
        for line_no, record in self.repo.read_records():
            if record.id in seen:
                raise DuplicateDocumentError(doc_id=record.id)
            seen.add(record.id)
            try:
                documents.append(Document.from_record(record))
            except ValueError as exc:
                raise CorpusParseError(self.repo.path, line_no, str(exc)) from exc
        logger.info("Loaded %d documents from %s", len(documents), self.repo.path)
        return documents


def build_vocabulary(docs: Iterable[Document], max_size: int) -> Vocabulary:
    """
    Most frequent words of documents and summaries, ties in lexicographic order.

    At most max_size - 6 words are admitted after the specials.
    """
    if max_size < NUM_SPECIALS:
        raise VocabularySizeError(max_size=max_size, minimum=NUM_SPECIALS)
    counts: Counter[str] = Counter()
    for doc in docs:
        counts.update(doc.document)
        counts.update(doc.summary)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    vocab = Vocabulary.from_words(word for word, _ in ranked[: max_size - NUM_SPECIALS])
    logger.info("Vocabulary: %d entries (%d distinct words seen)", len(vocab), len(counts))
    return vocab


def tokenize(words: Sequence[str], vocab: Vocabulary) -> TokenSeq:
    return vocab.encode(words)


def detokenize(ids: Iterable[int], vocab: Vocabulary, skip_special: bool = True) -> tuple[str, ...]:
    return vocab.decode(np.asarray(list(ids), dtype=np.int64), skip_special=skip_special)

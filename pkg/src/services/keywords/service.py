import string
from collections import Counter
from collections.abc import Sequence

import numpy as np

from src.core.exceptions import MissingDictionaryError
from src.core.seeding import derive_seed
from src.models.background_dictionary import BackgroundDictionary
from src.models.vocabulary import SEP
from src.models.vocabulary import TASK
from src.models.vocabulary import TokenSeq
from src.models.vocabulary import Vocabulary
from src.repositories.dictionary_repository import DictionaryRepository
from src.schemas.corpus import Document
from src.schemas.keywords import KeywordConfig
from src.schemas.keywords import KeywordSet
from src.schemas.keywords import KeywordSource

_ALPHABET = np.array(list(string.ascii_lowercase))

# Gibberish word lengths ~ Binomial(10, 0.5), zero redrawn.
GIBBERISH_TRIALS = 10
GIBBERISH_PROBABILITY = 0.5


def tfidf_select(doc: Sequence[str], bg: BackgroundDictionary, k: int) -> KeywordSet:
    """
    Top-k words by raw count times ln(total / background count).

    Words missing from the background dictionary are never candidates. Ties
    go to the lexicographically smaller word.
    """
    scored = [
        (tf * bg.idf(word), word) for word, tf in Counter(doc).items() if word in bg
    ]
    scored.sort(key=lambda item: (-item[0], item[1]))
    top = scored[:k]
    return KeywordSet(
        words=tuple(word for _, word in top),
        source=KeywordSource.tfidf,
        scores=tuple(score for score, _ in top),
    )


def oracle_select(summary: Sequence[str], bg: BackgroundDictionary, k: int) -> KeywordSet:
    """TF-IDF selection run on the reference summary instead of the document."""
    selected = tfidf_select(summary, bg, k)
    return KeywordSet(words=selected.words, source=KeywordSource.oracle, scores=selected.scores)


def random_select(doc: Sequence[str], k: int, seed: int) -> KeywordSet:
    """k distinct document words drawn uniformly without replacement."""
    candidates = list(dict.fromkeys(doc))
    if not candidates or k == 0:
        return KeywordSet(source=KeywordSource.random)
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(candidates), size=min(k, len(candidates)), replace=False)
    return KeywordSet(
        words=tuple(candidates[i] for i in picked), source=KeywordSource.random
    )


def gibberish_generate(k: int, seed: int) -> KeywordSet:
    """
    k distinct random lowercase words.

    Lengths follow Binomial(10, 0.5) with zero redrawn; a word repeating an
    earlier one is redrawn as well.
    """
    rng = np.random.default_rng(seed)
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < k:
        length = 0
        while length == 0:
            length = int(rng.binomial(GIBBERISH_TRIALS, GIBBERISH_PROBABILITY))
        word = "".join(rng.choice(_ALPHABET, size=length))
        if word not in seen:
            seen.add(word)
            words.append(word)
    return KeywordSet(words=tuple(words), source=KeywordSource.gibberish)


def prefix_and_mark(
    doc_tokens: TokenSeq, keywords: KeywordSet, vocab: Vocabulary
) -> tuple[TokenSeq, frozenset[int]]:
    """
    [TASK] + keyword tokens + [SEP] + document, with TASK and keywords global.

    Without keywords the input is [TASK] + document and only index 0 is global.
    """
    doc_tokens = np.asarray(doc_tokens, dtype=np.int64)
    if not keywords.words:
        return np.concatenate(([TASK], doc_tokens)).astype(np.int64), frozenset({0})
    keyword_tokens = vocab.encode(keywords.words)
    sequence = np.concatenate(([TASK], keyword_tokens, [SEP], doc_tokens)).astype(np.int64)
    return sequence, frozenset(range(len(keywords.words) + 1))


class KeywordService:
    """Selects keywords for corpus documents according to a KeywordConfig."""

    def __init__(self, dictionary: BackgroundDictionary | None = None):
        self.dictionary = dictionary

    @classmethod
    def from_repository(cls, repository: DictionaryRepository) -> "KeywordService":
        return cls(BackgroundDictionary(repository.read_counts()))

    def select(self, doc: Document, config: KeywordConfig, stream: str = "0") -> KeywordSet:
        """
        Keywords for one document.

        Random sources draw from the sub-seed keywords:<stream>:<doc id>, so
        every repetition (stream) and document gets an independent set.
        """
        if config.k == 0:
            return KeywordSet(source=config.source)
        seed = derive_seed(config.seed, f"keywords:{stream}:{doc.id}")
        match config.source:
            case KeywordSource.tfidf:
                bg = self._require_dictionary(config.source)
                return tfidf_select(doc.document, bg, config.k)
            case KeywordSource.oracle:
                bg = self._require_dictionary(config.source)
                return oracle_select(doc.summary, bg, config.k)
            case KeywordSource.random:
                return random_select(doc.document, config.k, seed)
            case KeywordSource.gibberish:
                return gibberish_generate(config.k, seed)
        raise ValueError(f"unknown keyword source {config.source!r}")

    def _require_dictionary(self, source: KeywordSource) -> BackgroundDictionary:
        if self.dictionary is None:
            raise MissingDictionaryError(source=source.value)
        return self.dictionary

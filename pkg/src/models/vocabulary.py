import re
import unicodedata
from collections.abc import Iterable
from collections.abc import Sequence
from dataclasses import dataclass
from dataclasses import field

import numpy as np
import numpy.typing as npt

# Token-id sequence; every id is smaller than the vocabulary size.
TokenSeq = npt.NDArray[np.int64]

PAD = 0
BOS = 1
EOS = 2
UNK = 3
TASK = 4
SEP = 5

SPECIAL_TOKENS: tuple[str, ...] = ("<pad>", "<s>", "</s>", "<unk>", "<task>", "<sep>")
NUM_SPECIALS = len(SPECIAL_TOKENS)

# Alphanumeric runs stay whole; any other visible character is its own token.
_WORD_PATTERN = re.compile(r"[^\W_]+|[^\s]")


def split_words(text: str) -> tuple[str, ...]:
    """NFC-normalize, lowercase and split text into word tokens."""
    normalized = unicodedata.normalize("NFC", text).lower()
    return tuple(_WORD_PATTERN.findall(normalized))


@dataclass(frozen=True)
class Vocabulary:
    """
    Bijective word/id mapping with the six specials at ids 0..5.

    Built once from a corpus and then shared read-only.
    """

    id_to_word: tuple[str, ...]
    word_to_id: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.id_to_word[:NUM_SPECIALS] != SPECIAL_TOKENS:
            raise ValueError("vocabulary must start with the special tokens in fixed order")
        mapping = {word: idx for idx, word in enumerate(self.id_to_word)}
        if len(mapping) != len(self.id_to_word):
            raise ValueError("vocabulary words must be unique")
        object.__setattr__(self, "word_to_id", mapping)

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "Vocabulary":
        return cls(id_to_word=SPECIAL_TOKENS + tuple(words))

    def __len__(self) -> int:
        return len(self.id_to_word)

    def __contains__(self, word: object) -> bool:
        return isinstance(word, str) and self.word_to_id.get(word, UNK) >= NUM_SPECIALS

    @property
    def words(self) -> tuple[str, ...]:
        """Non-special words in id order."""
        return self.id_to_word[NUM_SPECIALS:]

    def id_of(self, word: str) -> int:
        idx = self.word_to_id.get(word, UNK)
        return idx if idx >= NUM_SPECIALS else UNK

    def word_of(self, token_id: int) -> str:
        return self.id_to_word[token_id]

    def encode(self, words: Sequence[str]) -> TokenSeq:
        return np.fromiter((self.id_of(w) for w in words), dtype=np.int64, count=len(words))

    def decode(self, ids: Iterable[int], skip_special: bool = False) -> tuple[str, ...]:
        return tuple(
            self.id_to_word[int(i)]
            for i in ids
            if not (skip_special and int(i) < NUM_SPECIALS)
        )

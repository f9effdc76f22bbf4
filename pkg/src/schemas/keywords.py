from enum import Enum

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import model_validator


class KeywordSource(str, Enum):
    tfidf = "tfidf"
    random = "random"
    gibberish = "gibberish"
    oracle = "oracle"


class KeywordConfig(BaseModel):
    """
    How many keywords to prefix and where they come from.

    Attributes:
        k (int): Number of keywords; 0 reproduces the unmodified model input.
        source (KeywordSource): Selection method.
        seed (int): Seed for the random and gibberish sources.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)
    k: int = Field(10, ge=0)
    source: KeywordSource = KeywordSource.tfidf
    seed: int = 0


class KeywordSet(BaseModel):
    """
    Selected keywords in prefix order, with provenance.

    Attributes:
        words (tuple[str, ...]): Keywords, most relevant first for scored sources.
        source (KeywordSource): Which selector produced the set.
        scores (tuple[float, ...] | None): TF-IDF score per word (scored sources only).
    """

    model_config = ConfigDict(frozen=True)
    words: tuple[str, ...] = ()
    source: KeywordSource
    scores: tuple[float, ...] | None = None

    @model_validator(mode="after")
    def check_invariants(self) -> "KeywordSet":
        if len(set(self.words)) != len(self.words):
            raise ValueError("keyword set contains duplicate words")
        if self.scores is not None:
            if len(self.scores) != len(self.words):
                raise ValueError("one score per keyword is required")
            if any(a < b for a, b in zip(self.scores, self.scores[1:])):
                raise ValueError("keyword scores must be non-increasing")
        return self

    def __len__(self) -> int:
        return len(self.words)

import math
from collections.abc import Mapping
from dataclasses import dataclass
from dataclasses import field


@dataclass(frozen=True)
class BackgroundDictionary:
    """
    Word counts of common usage, used in place of corpus document frequencies.

    Attributes:
        counts (Mapping[str, int]): Background count per word, each at least 1.
        total (int): Sum of all counts.
    """

    counts: Mapping[str, int]
    total: int = field(init=False)

    def __post_init__(self) -> None:
        for word, count in self.counts.items():
            if count < 1:
                raise ValueError(f"background count of '{word}' must be at least 1, got {count}")
        object.__setattr__(self, "total", sum(self.counts.values()))

    @property
    def vocab_size(self) -> int:
        return len(self.counts)

    def __contains__(self, word: object) -> bool:
        return word in self.counts

    def idf(self, word: str) -> float:
        return math.log(self.total / self.counts[word])

from dataclasses import dataclass
from dataclasses import field
from enum import Enum
from functools import cached_property

import numpy as np
import numpy.typing as npt

from src.core.exceptions import GlobalIndexOutOfRangeError


class PatternKind(str, Enum):
    full = "full"
    window = "window"
    longformer = "longformer"
    bigbird = "bigbird"
    egad = "egad"


@dataclass(frozen=True)
class AttentionPattern:
    """
    Predicate over (query, key) index pairs of one encoder self-attention.

    A pair is attended when it lies on the dilated sliding window, when
    either index is global, or always for the full pattern. The dense mask is
    materialized lazily and cached; the object is otherwise immutable.

    Attributes:
        kind (PatternKind): Which family the pattern was built as.
        n (int): Sequence length.
        half_width (int): Window half-width h, in dilated steps.
        dilation (int): Window stride d.
        globals (frozenset[int]): Indices attending to and attended by everything.
        random_globals (tuple[int, int] | None): (count, seed) that drew the Big Bird globals.
    """

    kind: PatternKind
    n: int
    half_width: int = 0
    dilation: int = 1
    globals: frozenset[int] = field(default_factory=frozenset)
    random_globals: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"pattern length must be positive, got {self.n}")
        if self.half_width < 0:
            raise ValueError(f"half_width must be non-negative, got {self.half_width}")
        if self.dilation < 1:
            raise ValueError(f"dilation must be at least 1, got {self.dilation}")
        for index in self.globals:
            if not 0 <= index < self.n:
                raise GlobalIndexOutOfRangeError(index=index, n=self.n)

    def is_attended(self, i: int, j: int) -> bool:
        if self.kind is PatternKind.full:
            return True
        if i in self.globals or j in self.globals:
            return True
        offset = i - j
        return (
            abs(offset) <= self.half_width * self.dilation and offset % self.dilation == 0
        )

    @cached_property
    def mask(self) -> npt.NDArray[np.bool_]:
        """Dense n x n boolean matrix; row i is query i."""
        if self.kind is PatternKind.full:
            return np.ones((self.n, self.n), dtype=bool)
        positions = np.arange(self.n)
        offset = positions[:, None] - positions[None, :]
        allowed = (np.abs(offset) <= self.half_width * self.dilation) & (
            offset % self.dilation == 0
        )
        if self.globals:
            index = np.fromiter(sorted(self.globals), dtype=np.int64)
            allowed[index, :] = True
            allowed[:, index] = True
        allowed.flags.writeable = False
        return allowed

    def pair_count(self) -> int:
        return int(self.mask.sum())

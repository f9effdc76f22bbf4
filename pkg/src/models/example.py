from dataclasses import dataclass

import numpy as np

from src.models.vocabulary import BOS
from src.models.vocabulary import EOS
from src.models.vocabulary import TokenSeq


@dataclass(frozen=True)
class TrainingExample:
    """
    One teacher-forcing pair, already tokenized and prefixed.

    decoder_input is [BOS] + summary and targets is summary + [EOS], so both
    have the same length and position t predicts targets[t].
    """

    doc_id: str
    input_ids: TokenSeq
    globals: frozenset[int]
    decoder_input: TokenSeq
    targets: TokenSeq

    @classmethod
    def build(
        cls,
        doc_id: str,
        input_ids: TokenSeq,
        globals_: frozenset[int],
        summary_ids: TokenSeq,
    ) -> "TrainingExample":
        summary_ids = np.asarray(summary_ids, dtype=np.int64)
        return cls(
            doc_id=doc_id,
            input_ids=np.asarray(input_ids, dtype=np.int64),
            globals=frozenset(globals_),
            decoder_input=np.concatenate(([BOS], summary_ids)).astype(np.int64),
            targets=np.concatenate((summary_ids, [EOS])).astype(np.int64),
        )

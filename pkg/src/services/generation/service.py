import logging
from collections.abc import Iterable
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from src.core.exceptions import EmptyPrefixError
from src.models.vocabulary import BOS
from src.models.vocabulary import EOS
from src.models.vocabulary import TokenSeq
from src.models.vocabulary import Vocabulary
from src.schemas.generation import GenerationConfig
from src.services.seq2seq.service import Encoded
from src.services.seq2seq.service import Seq2SeqModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BeamHypothesis:
    """A BOS-initiated partial or finished output with its summed log-probability."""

    tokens: tuple[int, ...]
    cum_log_prob: float
    finished: bool = False

    @property
    def generated_length(self) -> int:
        return len(self.tokens) - 1


def length_penalized_score(cum_log_prob: float, length: int, alpha: float) -> float:
    if length < 1:
        raise ValueError(f"length must be at least 1, got {length}")
    return cum_log_prob / length**alpha


def banned_by_ngrams(tokens: Sequence[int], n: int) -> set[int]:
    """Tokens whose emission would repeat an n-gram already present in tokens."""
    if n <= 0 or len(tokens) + 1 < n:
        return set()
    context = tuple(tokens[len(tokens) - n + 1 :]) if n > 1 else ()
    banned = set()
    for start in range(len(tokens) - n + 1):
        if tuple(tokens[start : start + n - 1]) == context:
            banned.add(tokens[start + n - 1])
    return banned


def _final_key(hyp: BeamHypothesis, alpha: float) -> tuple[float, tuple[int, ...]]:
    score = length_penalized_score(hyp.cum_log_prob, hyp.generated_length, alpha)
    # Sorted ascending: best score first, then the lexicographically smaller sequence.
    return -score, hyp.tokens


def _step_log_probs(
    model: Seq2SeqModel, encoded: Encoded, hyp: BeamHypothesis, config: GenerationConfig
) -> np.ndarray:
    log_probs = model.next_token_log_probs(encoded, np.asarray(hyp.tokens, dtype=np.int64))
    constrained = log_probs.copy()
    if hyp.generated_length < config.min_length:
        constrained[EOS] = -np.inf
    for token in banned_by_ngrams(hyp.tokens, config.no_repeat_ngram):
        constrained[token] = -np.inf
    if not np.isfinite(constrained).any():
        logger.warning(
            "All continuations banned after %d generated tokens; forcing EOS",
            hyp.generated_length,
        )
        constrained[EOS] = log_probs[EOS]
    return constrained


def beam_search(
    model: Seq2SeqModel,
    input_ids: TokenSeq,
    globals_: Iterable[int],
    config: GenerationConfig,
) -> BeamHypothesis:
    """
    Beam search returning the best finished hypothesis.

    Each step expands every live beam over the vocabulary and keeps the top
    num_beams continuations by cumulative log-probability (ties: earlier beam,
    then lower token id). EOS continuations and hypotheses reaching max_length
    move to the finished pool. The winner maximizes cum_log_prob / len**alpha
    with len counting generated tokens.
    """
    if len(input_ids) == 0:
        raise EmptyPrefixError("Cannot generate from an empty input.")
    encoded = model.encode(np.asarray(input_ids, dtype=np.int64), globals_)
    live = [BeamHypothesis(tokens=(BOS,), cum_log_prob=0.0)]
    finished: list[BeamHypothesis] = []

    while live:
        candidates: list[tuple[float, int, int]] = []
        for rank, hyp in enumerate(live):
            log_probs = _step_log_probs(model, encoded, hyp, config)
            for token in np.flatnonzero(np.isfinite(log_probs)):
                candidates.append((hyp.cum_log_prob + float(log_probs[token]), rank, int(token)))
        candidates.sort(key=lambda c: (-c[0], c[1], c[2]))

        next_live: list[BeamHypothesis] = []
        for cum_log_prob, rank, token in candidates[: config.num_beams]:
            tokens = live[rank].tokens + (token,)
            done = token == EOS or len(tokens) - 1 >= config.max_length
            hyp = BeamHypothesis(tokens=tokens, cum_log_prob=cum_log_prob, finished=done)
            (finished if done else next_live).append(hyp)
        live = next_live

        if config.early_stopping and len(finished) >= config.num_beams:
            break

    return min(finished, key=lambda hyp: _final_key(hyp, config.length_penalty))


def generate(
    model: Seq2SeqModel,
    input_ids: TokenSeq,
    globals_: Iterable[int],
    config: GenerationConfig,
) -> TokenSeq:
    """Token ids of the best hypothesis, BOS first and EOS last when emitted."""
    best = beam_search(model, input_ids, globals_, config)
    return np.asarray(best.tokens, dtype=np.int64)


class GenerationService:
    """Turns prefixed encoder inputs into summary text."""

    def __init__(self, model: Seq2SeqModel, vocab: Vocabulary, config: GenerationConfig):
        self.model = model
        self.vocab = vocab
        self.config = config

    def summarize(self, input_ids: TokenSeq, globals_: Iterable[int]) -> str:
        tokens = generate(self.model, input_ids, globals_, self.config)
        return " ".join(self.vocab.decode(tokens, skip_special=True))

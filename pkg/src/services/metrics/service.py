import re
from collections import Counter
from collections.abc import Iterable
from collections.abc import Mapping
from collections.abc import Sequence

import numpy as np

from src.core.exceptions import EmptyPairsError
from src.core.exceptions import MissingCandidateError
from src.schemas.metrics import RougeEntry
from src.schemas.metrics import RougeScore

_NON_ALPHANUMERIC = re.compile(r"[^a-z0-9]+")

WordPair = tuple[Sequence[str], Sequence[str]]


def scoring_tokens(text: str) -> list[str]:
    """Lowercase and split on runs of non-alphanumeric characters; no stemming."""
    return _NON_ALPHANUMERIC.sub(" ", text.lower()).split()


def _ngrams(words: Sequence[str], n: int) -> Counter[tuple[str, ...]]:
    return Counter(tuple(words[i : i + n]) for i in range(len(words) - n + 1))


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int) -> RougeEntry:
    """Clipped n-gram overlap divided by candidate (P) and reference (R) n-gram counts."""
    if n not in (1, 2):
        raise ValueError(f"rouge_n supports n in {{1, 2}}, got {n}")
    cand, ref = _ngrams(candidate, n), _ngrams(reference, n)
    cand_total, ref_total = sum(cand.values()), sum(ref.values())
    if cand_total == 0 or ref_total == 0:
        return RougeEntry.zero()
    overlap = sum((cand & ref).values())
    return RougeEntry.from_precision_recall(overlap / cand_total, overlap / ref_total)


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    previous = np.zeros(len(b) + 1, dtype=np.int64)
    for word in a:
        current = np.zeros_like(previous)
        for j, other in enumerate(b, start=1):
            if word == other:
                current[j] = previous[j - 1] + 1
            else:
                current[j] = max(previous[j], current[j - 1])
        previous = current
    return int(previous[-1])


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> RougeEntry:
    """Whole-sequence LCS, no sentence segmentation."""
    if not candidate or not reference:
        return RougeEntry.zero()
    lcs = lcs_length(candidate, reference)
    return RougeEntry.from_precision_recall(lcs / len(candidate), lcs / len(reference))


def rouge(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    return RougeScore(
        rouge1=rouge_n(candidate, reference, 1),
        rouge2=rouge_n(candidate, reference, 2),
        rougeL=rouge_l(candidate, reference),
    )


def _mean_entry(entries: Sequence[RougeEntry]) -> RougeEntry:
    return RougeEntry(
        precision=min(1.0, float(np.mean([e.precision for e in entries]))),
        recall=min(1.0, float(np.mean([e.recall for e in entries]))),
        f_measure=min(1.0, float(np.mean([e.f_measure for e in entries]))),
    )


def corpus_rouge(pairs: Iterable[WordPair]) -> RougeScore:
    """Mean per-pair precision, recall and F-measure of every variant."""
    scores = [rouge(candidate, reference) for candidate, reference in pairs]
    if not scores:
        raise EmptyPairsError()
    return RougeScore(
        rouge1=_mean_entry([s.rouge1 for s in scores]),
        rouge2=_mean_entry([s.rouge2 for s in scores]),
        rougeL=_mean_entry([s.rougeL for s in scores]),
    )


class MetricsService:
    """Scores candidate texts against references keyed by document id."""

    def evaluate(
        self, candidates: Mapping[str, str], references: Mapping[str, str]
    ) -> RougeScore:
        pairs: list[WordPair] = []
        for doc_id, reference in references.items():
            if doc_id not in candidates:
                raise MissingCandidateError(doc_id=doc_id)
            pairs.append((scoring_tokens(candidates[doc_id]), scoring_tokens(reference)))
        return corpus_rouge(pairs)

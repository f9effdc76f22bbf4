import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from src.models.example import TrainingExample
from src.models.params import ModelParams
from src.models.vocabulary import Vocabulary
from src.schemas.corpus import Document
from src.schemas.generation import GenerationConfig
from src.schemas.keywords import KeywordConfig
from src.schemas.metrics import RougeScore
from src.schemas.training import FewShotPlan
from src.schemas.training import FewShotRow
from src.schemas.training import SampleDraw
from src.schemas.training import TrainConfig
from src.services.generation.service import GenerationService
from src.services.keywords.service import KeywordService
from src.services.metrics.service import corpus_rouge
from src.services.metrics.service import scoring_tokens
from src.services.seq2seq.service import Seq2SeqModel
from src.services.training.service import build_examples
from src.services.training.service import train

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FewShotResult:
    rows: list[FewShotRow]
    draws: list[SampleDraw]


def draw_samples(
    train_docs: Sequence[Document],
    val_docs: Sequence[Document],
    plan: FewShotPlan,
    sample_size: int,
    repetition: int,
) -> tuple[list[Document], list[Document]]:
    """
    Training and evaluation draws of one repetition.

    Both depend only on (base_seed, repetition, sample_size). The training
    draw is a prefix of one seeded permutation, so a smaller sample is always
    contained in a larger one of the same repetition.
    """
    seed = plan.repetition_seed(repetition)
    train_order = np.random.default_rng(seed).permutation(len(train_docs))
    val_order = np.random.default_rng([seed, 1]).permutation(len(val_docs))
    train_sample = [train_docs[i] for i in train_order[: min(sample_size, len(train_docs))]]
    val_sample = [val_docs[i] for i in val_order[: min(plan.max_eval_examples, len(val_docs))]]
    return train_sample, val_sample


class FewShotHarness:
    """
    Zero/few-shot protocol: seeded draws, optional fine-tuning, beam search
    and ROUGE, averaged over repetitions for every (sample size, keyword count).
    """

    def __init__(
        self,
        keyword_service: KeywordService,
        vocab: Vocabulary,
        initial_params: ModelParams,
        train_config: TrainConfig,
        generation_config: GenerationConfig,
        max_summary_length: int | None = None,
    ):
        self.keywords = keyword_service
        self.vocab = vocab
        self.initial_params = initial_params
        self.train_config = train_config
        self.generation_config = generation_config
        self.max_summary_length = max_summary_length

    def examples(
        self, docs: Sequence[Document], keyword_config: KeywordConfig, stream: str
    ) -> list[TrainingExample]:
        return build_examples(
            docs,
            self.keywords,
            keyword_config,
            self.vocab,
            self.initial_params.config.max_positions,
            self.max_summary_length,
            stream,
        )

    def score(
        self,
        params: ModelParams,
        docs: Sequence[Document],
        keyword_config: KeywordConfig,
        stream: str,
    ) -> RougeScore:
        generator = GenerationService(Seq2SeqModel(params), self.vocab, self.generation_config)
        pairs = []
        for doc, example in zip(docs, self.examples(docs, keyword_config, stream)):
            candidate = generator.summarize(example.input_ids, example.globals)
            pairs.append((scoring_tokens(candidate), scoring_tokens(" ".join(doc.summary))))
        return corpus_rouge(pairs)

    def run(
        self,
        train_docs: Sequence[Document],
        val_docs: Sequence[Document],
        plan: FewShotPlan,
        keyword_config: KeywordConfig,
        test_docs: Sequence[Document] | None = None,
    ) -> FewShotResult:
        rows: list[FewShotRow] = []
        draws: list[SampleDraw] = []
        for sample_size in plan.sample_sizes:
            samples = [
                draw_samples(train_docs, val_docs, plan, sample_size, r)
                for r in range(plan.repetitions)
            ]
            for r, (train_sample, val_sample) in enumerate(samples):
                for split, sample in (("train", train_sample), ("validation", val_sample)):
                    draws.append(
                        SampleDraw(
                            sample_size=sample_size,
                            repetition=r,
                            split=split,
                            ids=tuple(d.id for d in sample),
                        )
                    )

            for k in plan.keyword_counts:
                config = keyword_config.model_copy(update={"k": k})
                per_repetition = [
                    self._repetition(
                        sample_size, r, train_sample, val_sample, test_docs, config, plan
                    )
                    for r, (train_sample, val_sample) in enumerate(samples)
                ]
                means = np.mean([s.f_measures_percent() for s in per_repetition], axis=0)
                row = FewShotRow(
                    sample_size=sample_size,
                    keyword_count=k,
                    rouge1=float(means[0]),
                    rouge2=float(means[1]),
                    rougeL=float(means[2]),
                )
                logger.info(
                    "sample_size=%d keywords=%d R-1/R-2/R-L %.1f/%.1f/%.1f",
                    sample_size,
                    k,
                    row.rouge1,
                    row.rouge2,
                    row.rougeL,
                )
                rows.append(row)
        return FewShotResult(rows=rows, draws=draws)

    def _repetition(
        self,
        sample_size: int,
        repetition: int,
        train_sample: list[Document],
        val_sample: list[Document],
        test_docs: Sequence[Document] | None,
        keyword_config: KeywordConfig,
        plan: FewShotPlan,
    ) -> RougeScore:
        stream = str(repetition)
        logger.info(
            "sample_size=%d keywords=%d repetition=%d train ids: %s",
            sample_size,
            keyword_config.k,
            repetition,
            " ".join(d.id for d in train_sample),
        )
        params = self.initial_params
        if train_sample:
            config = self.train_config.model_copy(
                update={"seed": plan.repetition_seed(repetition)}
            )
            result = train(
                params,
                self.examples(train_sample, keyword_config, stream),
                self.examples(val_sample, keyword_config, stream),
                config,
            )
            params = result.best_params
        eval_docs = val_sample if test_docs is None else list(test_docs)[: plan.max_eval_examples]
        return self.score(params, eval_docs, keyword_config, stream)

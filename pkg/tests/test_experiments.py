import logging
import re
from collections import defaultdict

import pytest

from src.models.params import ModelParams
from src.schemas.corpus import Document
from src.schemas.generation import GenerationConfig
from src.schemas.keywords import KeywordConfig
from src.schemas.keywords import KeywordSource
from src.schemas.model import ModelConfig
from src.schemas.training import EpochRecord
from src.schemas.training import FewShotPlan
from src.schemas.training import TrainConfig
from src.services.corpus.service import build_vocabulary
from src.services.experiments import service as experiments
from src.services.experiments.service import draw_samples
from src.services.experiments.service import FewShotHarness
from src.services.keywords.service import KeywordService
from src.services.metrics.service import rouge
from src.services.training.service import TrainingResult

_TRAIN_IDS = re.compile(r"sample_size=(\d+) keywords=(\d+) repetition=(\d+) train ids: (.*)")


def make_docs(prefix: str, count: int) -> list[Document]:
    words = ["red", "cat", "mat", "dog", "sat", "ran"]
    return [
        Document(
            id=f"{prefix}{i}",
            document=" ".join(words[(i + j) % len(words)] for j in range(5)),
            summary=" ".join(words[(i + j) % len(words)] for j in range(2)),
        )
        for i in range(count)
    ]


@pytest.fixture
def train_docs() -> list[Document]:
    return make_docs("t", 7)


@pytest.fixture
def val_docs() -> list[Document]:
    return make_docs("v", 4)


@pytest.fixture
def harness(train_docs, val_docs) -> FewShotHarness:
    vocab = build_vocabulary(train_docs + val_docs, 50)
    config = ModelConfig(
        vocab_size=len(vocab),
        d_model=8,
        n_heads=2,
        encoder_layers=1,
        decoder_layers=1,
        max_positions=32,
        half_width=2,
    )
    return FewShotHarness(
        keyword_service=KeywordService(),
        vocab=vocab,
        initial_params=ModelParams.initialize(config, seed=0),
        train_config=TrainConfig(epochs=1, batch_size=2),
        generation_config=GenerationConfig(num_beams=2, max_length=4, min_length=1),
        max_summary_length=8,
    )


@pytest.fixture
def recorded(monkeypatch) -> dict[str, list]:
    """Replaces fine-tuning and scoring with recorders."""
    calls: dict[str, list] = {"train": [], "score": []}

    def fake_train(params, train_set, val_set, config):
        calls["train"].append(len(train_set))
        record = EpochRecord(epoch=1, train_loss=1.0, val_loss=1.0)
        tuned = ModelParams(params.config, dict(params.items()))
        return TrainingResult(best_params=tuned, best_epoch=1, history=[record])

    def fake_score(self, params, docs, keyword_config, stream):
        calls["score"].append((params, [d.id for d in docs], keyword_config.k))
        return rouge(["a"], ["a"])

    monkeypatch.setattr(experiments, "train", fake_train)
    monkeypatch.setattr(FewShotHarness, "score", fake_score)
    return calls


class TestDrawSamples:
    """Tests for the seeded training and evaluation draws."""

    def test_sample_capped_at_corpus_size(self, train_docs, val_docs):
        """Asking for 10 of 7 training documents returns all 7."""
        train_sample, _ = draw_samples(train_docs, val_docs, FewShotPlan(), 10, 0)
        assert sorted(d.id for d in train_sample) == sorted(d.id for d in train_docs)

    def test_zero_sample(self, train_docs, val_docs):
        train_sample, val_sample = draw_samples(train_docs, val_docs, FewShotPlan(), 0, 0)
        assert train_sample == []
        assert len(val_sample) == len(val_docs)

    def test_smaller_sample_is_prefix(self, train_docs, val_docs):
        """Within a repetition, a smaller sample is contained in a larger one."""
        plan = FewShotPlan(base_seed=3)
        small, _ = draw_samples(train_docs, val_docs, plan, 2, 1)
        large, _ = draw_samples(train_docs, val_docs, plan, 5, 1)
        assert large[:2] == small

    def test_evaluation_draw_capped(self, train_docs, val_docs):
        _, val_sample = draw_samples(train_docs, val_docs, FewShotPlan(max_eval_examples=2), 3, 0)
        assert len(val_sample) == 2

    def test_repetitions_differ(self, train_docs, val_docs):
        plan = FewShotPlan()
        draws = {tuple(d.id for d in draw_samples(train_docs, val_docs, plan, 3, r)[0]) for r in range(5)}
        assert len(draws) > 1

    def test_depends_on_base_seed_and_repetition_only(self, train_docs, val_docs):
        """Seed 2 repetition 0 draws what seed 0 repetition 2 draws."""
        a = draw_samples(train_docs, val_docs, FewShotPlan(base_seed=2), 4, 0)
        b = draw_samples(train_docs, val_docs, FewShotPlan(base_seed=0, keyword_counts=(5,)), 4, 2)
        assert a == b


class TestFewShotHarness:
    """Tests for the zero/few-shot protocol loop."""

    def test_zero_shot_scores_initial_params(self, harness, train_docs, val_docs, recorded):
        """Sample size 0 performs no fine-tuning."""
        plan = FewShotPlan(sample_sizes=(0,), keyword_counts=(0, 2), repetitions=2)
        result = harness.run(train_docs, val_docs, plan, KeywordConfig(source=KeywordSource.random))
        assert recorded["train"] == []
        assert len(recorded["score"]) == 4
        assert all(params is harness.initial_params for params, _, _ in recorded["score"])
        assert [(row.sample_size, row.keyword_count) for row in result.rows] == [(0, 0), (0, 2)]

    def test_fine_tunes_on_drawn_sample(self, harness, train_docs, val_docs, recorded):
        plan = FewShotPlan(sample_sizes=(3, 10), keyword_counts=(0,), repetitions=2)
        harness.run(train_docs, val_docs, plan, KeywordConfig())
        assert recorded["train"] == [3, 3, 7, 7]
        assert all(params is not harness.initial_params for params, _, _ in recorded["score"])

    def test_draws_shared_across_keyword_configs(self, harness, train_docs, val_docs, recorded, caplog):
        """Every keyword count and source trains on the same ids per (size, repetition)."""
        plan = FewShotPlan(sample_sizes=(0, 2, 5), keyword_counts=(0, 1, 3), repetitions=3, base_seed=4)
        logged: dict[tuple[str, str], set[str]] = defaultdict(set)
        results = []
        with caplog.at_level(logging.INFO, logger=experiments.__name__):
            for source in (KeywordSource.random, KeywordSource.gibberish):
                results.append(harness.run(train_docs, val_docs, plan, KeywordConfig(source=source)))
        for record in caplog.records:
            match = _TRAIN_IDS.fullmatch(record.getMessage())
            if match:
                sample_size, _, repetition, ids = match.groups()
                logged[(sample_size, repetition)].add(ids)

        assert results[0].draws == results[1].draws
        assert len(logged) == 3 * 3
        assert all(len(ids) == 1 for ids in logged.values())
        scored = defaultdict(set)
        for _, ids, k in recorded["score"]:
            scored[k].add(tuple(ids))
        assert scored[0] == scored[1] == scored[3]

    def test_sample_log_lists_both_splits(self, harness, train_docs, val_docs, recorded):
        plan = FewShotPlan(sample_sizes=(2,), keyword_counts=(0,), repetitions=2, max_eval_examples=3)
        result = harness.run(train_docs, val_docs, plan, KeywordConfig())
        assert [(d.repetition, d.split, len(d.ids)) for d in result.draws] == [
            (0, "train", 2),
            (0, "validation", 3),
            (1, "train", 2),
            (1, "validation", 3),
        ]

    def test_test_split_scored_when_given(self, harness, train_docs, val_docs, recorded):
        test_docs = make_docs("x", 5)
        plan = FewShotPlan(sample_sizes=(0,), keyword_counts=(0,), repetitions=1, max_eval_examples=4)
        harness.run(train_docs, val_docs, plan, KeywordConfig(), test_docs)
        assert recorded["score"][0][1] == ["x0", "x1", "x2", "x3"]

    def test_end_to_end_rows(self, harness, train_docs, val_docs):
        """Without stubs every cell gets a ROUGE row in the 0-100 range."""
        plan = FewShotPlan(sample_sizes=(0, 2), keyword_counts=(0, 2), repetitions=1, max_eval_examples=2)
        result = harness.run(train_docs, val_docs, plan, KeywordConfig(source=KeywordSource.random))
        assert [(row.sample_size, row.keyword_count) for row in result.rows] == [(0, 0), (0, 2), (2, 0), (2, 2)]
        for row in result.rows:
            assert 0.0 <= row.rouge1 <= 100.0
            assert 0.0 <= row.rougeL <= 100.0

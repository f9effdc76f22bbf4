import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from src.core.exceptions import EmptyTrainingSetError
from src.core.exceptions import EmptyValidationSetError
from src.core.exceptions import NonFiniteGradientError
from src.core.exceptions import SequenceTooLongError
from src.core.seeding import derive_seed
from src.models.example import TrainingExample
from src.models.params import ModelParams
from src.models.vocabulary import Vocabulary
from src.schemas.corpus import Document
from src.schemas.keywords import KeywordConfig
from src.schemas.keywords import KeywordSet
from src.schemas.training import EpochRecord
from src.schemas.training import TrainConfig
from src.services.keywords.service import KeywordService
from src.services.keywords.service import prefix_and_mark
from src.services.seq2seq.service import Seq2SeqModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimizerState:
    """Adam moments mirroring the parameter arrays, plus the step counter."""

    m: ModelParams
    v: ModelParams
    t: int = 0

    @classmethod
    def initial(cls, params: ModelParams) -> "OptimizerState":
        return cls(m=ModelParams.zeros(params.config), v=ModelParams.zeros(params.config))


@dataclass(frozen=True)
class TrainingResult:
    """
    Outcome of one fine-tuning run.

    Attributes:
        best_params (ModelParams): Parameters after the epoch with the lowest validation loss.
        best_epoch (int): 1-based epoch of best_params.
        history (list[EpochRecord]): Train and validation loss of every epoch.
    """

    best_params: ModelParams
    best_epoch: int
    history: list[EpochRecord]


def adam_step(
    params: ModelParams, grads: ModelParams, state: OptimizerState, config: TrainConfig
) -> tuple[ModelParams, OptimizerState]:
    """
    One bias-corrected Adam update; returns new parameters and state.

    Nothing is updated when any gradient array holds NaN or Inf.
    """
    for name, grad in grads.items():
        if not np.all(np.isfinite(grad)):
            raise NonFiniteGradientError(group=name)

    t = state.t + 1
    beta1, beta2 = config.beta1, config.beta2
    new_params, new_m, new_v = {}, {}, {}
    for name, grad in grads.items():
        m = beta1 * state.m[name] + (1.0 - beta1) * grad
        v = beta2 * state.v[name] + (1.0 - beta2) * grad * grad
        m_hat = m / (1.0 - beta1**t)
        v_hat = v / (1.0 - beta2**t)
        new_params[name] = params[name] - config.learning_rate * m_hat / (
            np.sqrt(v_hat) + config.epsilon
        )
        new_m[name] = m
        new_v[name] = v
    return (
        ModelParams(params.config, new_params),
        OptimizerState(
            m=ModelParams(params.config, new_m), v=ModelParams(params.config, new_v), t=t
        ),
    )


def make_example(
    doc: Document,
    keywords: KeywordSet,
    vocab: Vocabulary,
    max_positions: int,
    max_summary_length: int | None = None,
) -> TrainingExample:
    """
    Tokenize, prefix keywords and build the teacher-forcing pair.

    The document is cut so the prefixed input fits max_positions; the summary
    is cut to max_summary_length and to max_positions - 1 (room for BOS/EOS).
    """
    prefix_length = 1 + len(keywords) + (1 if len(keywords) else 0)
    room = max_positions - prefix_length
    if room < 1:
        raise SequenceTooLongError(length=prefix_length + 1, max_positions=max_positions)
    input_ids, globals_ = prefix_and_mark(
        vocab.encode(doc.document[:room]), keywords, vocab
    )
    summary_cap = max_positions - 1
    if max_summary_length is not None:
        summary_cap = min(summary_cap, max_summary_length)
    summary_ids = vocab.encode(doc.summary[:summary_cap])
    return TrainingExample.build(doc.id, input_ids, globals_, summary_ids)


def build_examples(
    docs: Sequence[Document],
    keyword_service: KeywordService,
    keyword_config: KeywordConfig,
    vocab: Vocabulary,
    max_positions: int,
    max_summary_length: int | None = None,
    stream: str = "0",
) -> list[TrainingExample]:
    return [
        make_example(
            doc,
            keyword_service.select(doc, keyword_config, stream),
            vocab,
            max_positions,
            max_summary_length,
        )
        for doc in docs
    ]


def batch_gradients(
    model: Seq2SeqModel, batch: Sequence[TrainingExample]
) -> tuple[float, ModelParams]:
    """Mean loss and mean gradient over a batch, accumulated in batch order."""
    scale = 1.0 / len(batch)
    total = {name: np.zeros_like(array) for name, array in model.params.items()}
    loss_sum = 0.0
    for example in batch:
        loss, grads = model.loss_and_gradients(example, upstream=scale)
        loss_sum += loss
        for name, grad in grads.items():
            total[name] += grad
    return loss_sum * scale, ModelParams(model.config, total)


def mean_loss(model: Seq2SeqModel, examples: Sequence[TrainingExample]) -> float:
    return float(np.mean([model.example_loss(example) for example in examples]))


def select_best_epoch(val_losses: Sequence[float]) -> int:
    """1-based epoch with the lowest validation loss; the earliest wins ties."""
    if not val_losses:
        raise EmptyValidationSetError("No validation losses to select from.")
    best = 0
    for index, value in enumerate(val_losses):
        if value < val_losses[best]:
            best = index
    return best + 1


def train(
    params: ModelParams,
    train_set: Sequence[TrainingExample],
    val_set: Sequence[TrainingExample],
    config: TrainConfig,
) -> TrainingResult:
    """
    Teacher-forced Adam fine-tuning with per-epoch validation.

    Each epoch visits the training set in a seeded shuffled order, in batches
    of config.batch_size. The returned best_params belong to the epoch with
    the lowest validation loss.
    """
    if not train_set:
        raise EmptyTrainingSetError()
    if not val_set:
        raise EmptyValidationSetError()

    rng = np.random.default_rng(derive_seed(config.seed, "shuffle"))
    state = OptimizerState.initial(params)
    model = Seq2SeqModel(params)
    history: list[EpochRecord] = []
    best_params = params
    best_val = np.inf

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(train_set))
        epoch_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = [train_set[i] for i in order[start : start + config.batch_size]]
            loss, grads = batch_gradients(model, batch)
            epoch_loss += loss * len(batch)
            new_params, state = adam_step(model.params, grads, state, config)
            model = Seq2SeqModel(new_params)

        record = EpochRecord(
            epoch=epoch,
            train_loss=epoch_loss / len(train_set),
            val_loss=mean_loss(model, val_set),
        )
        history.append(record)
        logger.info(
            "epoch %d/%d train_loss=%.6f val_loss=%.6f",
            epoch,
            config.epochs,
            record.train_loss,
            record.val_loss,
        )
        if record.val_loss < best_val:
            best_val = record.val_loss
            best_params = model.params

    best_epoch = select_best_epoch([r.val_loss for r in history])
    logger.info("Selected epoch %d (val_loss=%.6f)", best_epoch, best_val)
    return TrainingResult(
        best_params=best_params,
        best_epoch=best_epoch,
        history=history,
    )

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field


class TrainConfig(BaseModel):
    """
    Optimizer and loop settings; defaults follow the published hyperparameter table.

    Attributes:
        learning_rate (float): Adam step size.
        beta1 (float): First-moment decay.
        beta2 (float): Second-moment decay.
        epsilon (float): Denominator floor.
        epochs (int): Passes over the training set.
        batch_size (int): Examples whose gradients are averaged per step.
        seed (int): Seed of the per-epoch shuffling.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)
    learning_rate: float = Field(5e-5, ge=0.0)
    beta1: float = Field(0.9, gt=0.0, lt=1.0)
    beta2: float = Field(0.999, gt=0.0, lt=1.0)
    epsilon: float = Field(1e-8, gt=0.0)
    epochs: int = Field(5, ge=1)
    batch_size: int = Field(4, ge=1)
    seed: int = 0


class FewShotPlan(BaseModel):
    """
    The zero/few-shot protocol.

    Attributes:
        sample_sizes (tuple[int, ...]): Training sample sizes; 0 means zero-shot.
        keyword_counts (tuple[int, ...]): Keyword counts compared on identical samples.
        repetitions (int): Seeded runs averaged per configuration.
        base_seed (int): Repetition r draws its samples with seed base_seed + r.
        max_eval_examples (int): Cap on drawn evaluation examples.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)
    sample_sizes: tuple[int, ...] = (0, 10, 100)
    keyword_counts: tuple[int, ...] = (0, 10, 20)
    repetitions: int = Field(5, ge=1)
    base_seed: int = 0
    max_eval_examples: int = Field(100, ge=1)

    def repetition_seed(self, repetition: int) -> int:
        return self.base_seed + repetition


class EpochRecord(BaseModel):
    """One row of the loss log."""

    model_config = ConfigDict(frozen=True)
    epoch: int
    train_loss: float
    val_loss: float


class SampleDraw(BaseModel):
    """Ids drawn for one (sample size, repetition, split)."""

    model_config = ConfigDict(frozen=True)
    sample_size: int
    repetition: int
    split: str
    ids: tuple[str, ...]


class FewShotRow(BaseModel):
    """One averaged row of the few-shot report; F-measures scaled to 0-100."""

    model_config = ConfigDict(frozen=True)
    sample_size: int
    keyword_count: int
    rouge1: float
    rouge2: float
    rougeL: float

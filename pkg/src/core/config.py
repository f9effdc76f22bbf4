import json
from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import Field
from pydantic_settings import BaseSettings
from pydantic_settings import PydanticBaseSettingsSource
from pydantic_settings import SettingsConfigDict

from src.core.exceptions import InputFileNotFoundError
from src.models.attention_pattern import PatternKind
from src.schemas.generation import GENERATION_PRESETS
from src.schemas.generation import GenerationConfig
from src.schemas.generation import GenerationPreset
from src.schemas.keywords import KeywordConfig
from src.schemas.keywords import KeywordSource
from src.schemas.model import DecoderOrder
from src.schemas.model import MODEL_PRESETS
from src.schemas.model import ModelConfig
from src.schemas.model import ModelPreset
from src.schemas.training import FewShotPlan
from src.schemas.training import TrainConfig

_MODEL_FIELDS = (
    "d_model",
    "n_heads",
    "d_ff",
    "encoder_layers",
    "decoder_layers",
    "max_positions",
    "half_width",
    "dilation",
    "layernorm_epsilon",
    "decoder_order",
)
_GENERATION_FIELDS = (
    "num_beams",
    "max_length",
    "min_length",
    "length_penalty",
    "early_stopping",
    "no_repeat_ngram",
)


class ExperimentConfig(BaseSettings):
    """
    Every setting of one experiment, flat and serializable.

    Values come from keyword arguments (command-line flags) first, then from
    the `key = value` file passed as _env_file, then from the defaults below.
    Environment variables are never read. Architecture and generation fields
    left unset fall back to the selected presets.
    """

    train_corpus: Path | None = None  # JSON-lines training split
    validation_corpus: Path | None = None  # JSON-lines validation split
    test_corpus: Path | None = None  # optional held-out split scored by fewshot
    background_dictionary: Path | None = None  # word<TAB>count file for tfidf/oracle
    output_dir: Path = Path("runs/latest")
    seed: int = 0  # root of every named sub-seed

    vocab_size: int = Field(5000, ge=6)
    model_preset: ModelPreset = ModelPreset.toy
    d_model: int | None = Field(None, ge=1)
    n_heads: int | None = Field(None, ge=1)
    d_ff: int | None = Field(None, ge=0)
    encoder_layers: int | None = Field(None, ge=0)
    decoder_layers: int | None = Field(None, ge=0)
    max_positions: int | None = Field(None, ge=1)
    half_width: int | None = Field(None, ge=0)
    dilation: int | None = Field(None, ge=1)
    layernorm_epsilon: float | None = Field(None, gt=0.0)
    decoder_order: DecoderOrder | None = None

    learning_rate: float = Field(5e-5, ge=0.0)
    beta1: float = Field(0.9, gt=0.0, lt=1.0)
    beta2: float = Field(0.999, gt=0.0, lt=1.0)
    epsilon: float = Field(1e-8, gt=0.0)
    epochs: int = Field(5, ge=1)
    batch_size: int = Field(4, ge=1)

    generation_preset: GenerationPreset | None = None
    num_beams: int | None = Field(None, ge=1)
    max_length: int | None = Field(None, ge=1)
    min_length: int | None = Field(None, ge=1)
    length_penalty: float | None = None
    early_stopping: bool | None = None
    no_repeat_ngram: int | None = Field(None, ge=0)

    keyword_source: KeywordSource = KeywordSource.tfidf
    keyword_count: int = Field(10, ge=0)  # used by train/generate/keywords
    keyword_counts: tuple[int, ...] = (0, 10, 20)  # compared by fewshot
    sample_sizes: tuple[int, ...] = (0, 10, 100)
    repetitions: int = Field(5, ge=1)
    max_eval_examples: int = Field(100, ge=1)
    max_summary_length: int = Field(128, ge=1)

    pattern_kind: PatternKind = PatternKind.egad  # used by pattern
    pattern_length: int = Field(16, ge=1)
    pattern_globals: tuple[int, ...] = ()
    random_globals: int = Field(0, ge=0)  # bigbird only
    reachability_layers: int | None = Field(None, ge=0)

    model_config = SettingsConfigDict(
        extra="forbid",
        protected_namespaces=(),
        env_file_encoding="utf-8",
        case_sensitive=False,
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return init_settings, dotenv_settings

    # --- DERIVED CONFIGS ---
    def model(self, vocab_size: int) -> ModelConfig:
        overrides = {name: getattr(self, name) for name in _MODEL_FIELDS}
        explicit = {name: value for name, value in overrides.items() if value is not None}
        return ModelConfig.from_preset(self.model_preset, vocab_size, **explicit)

    def generation(self) -> GenerationConfig:
        explicit = {
            name: getattr(self, name)
            for name in _GENERATION_FIELDS
            if getattr(self, name) is not None
        }
        if self.generation_preset is None:
            return GenerationConfig(**explicit)
        return GenerationConfig.from_preset(self.generation_preset, **explicit)

    def training(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            beta1=self.beta1,
            beta2=self.beta2,
            epsilon=self.epsilon,
            epochs=self.epochs,
            batch_size=self.batch_size,
            seed=self.seed,
        )

    def keywords(self, k: int | None = None) -> KeywordConfig:
        count = self.keyword_count if k is None else k
        return KeywordConfig(k=count, source=self.keyword_source, seed=self.seed)

    def few_shot(self) -> FewShotPlan:
        return FewShotPlan(
            sample_sizes=self.sample_sizes,
            keyword_counts=self.keyword_counts,
            repetitions=self.repetitions,
            base_seed=self.seed,
            max_eval_examples=self.max_eval_examples,
        )

    def resolved(self) -> "ExperimentConfig":
        """Copy with preset-derived architecture and generation values written out."""
        preset_values: dict[str, Any] = dict(MODEL_PRESETS[self.model_preset])
        if self.generation_preset is not None:
            preset_values |= GENERATION_PRESETS[self.generation_preset]
        else:
            defaults = GenerationConfig()
            preset_values |= {name: getattr(defaults, name) for name in _GENERATION_FIELDS}
        filled = {
            name: value
            for name, value in preset_values.items()
            if getattr(self, name, None) is None
        }
        return self.model_copy(update=filled)

    def render(self) -> str:
        """Flat `key = value` text that load_config() reads back to an equal config."""
        lines = []
        for name in type(self).model_fields:
            value = getattr(self, name)
            if value is not None:
                lines.append(f"{name} = {_render_value(value)}")
        return "\n".join(lines) + "\n"


def _render_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (tuple, list)):
        return json.dumps(list(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def load_config(path: Path | str | None = None, **overrides: Any) -> ExperimentConfig:
    """
    Build an ExperimentConfig from an optional config file plus overrides.

    Overrides set to None are ignored so unset command-line flags never mask
    file values.
    """
    explicit = {name: value for name, value in overrides.items() if value is not None}
    if path is None:
        return ExperimentConfig(_env_file=None, **explicit)
    path = Path(path)
    if not path.is_file():
        raise InputFileNotFoundError(path)
    return ExperimentConfig(_env_file=path, **explicit)

from enum import Enum
from typing import Any

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import model_validator


class GenerationPreset(str, Enum):
    arxiv = "arxiv"
    ami = "ami"
    icsi = "icsi"


GENERATION_PRESETS: dict[GenerationPreset, dict[str, Any]] = {
    GenerationPreset.arxiv: {
        "num_beams": 4,
        "max_length": 512,
        "min_length": 100,
        "length_penalty": 1.6,
    },
    GenerationPreset.ami: {
        "num_beams": 3,
        "max_length": 768,
        "min_length": 100,
        "length_penalty": 1.3,
    },
    GenerationPreset.icsi: {
        "num_beams": 4,
        "max_length": 1024,
        "min_length": 512,
        "length_penalty": 1.6,
    },
}


class GenerationConfig(BaseModel):
    """
    Beam-search settings.

    Attributes:
        num_beams (int): Live hypotheses kept per step.
        max_length (int): Maximum generated tokens, BOS excluded, EOS included.
        min_length (int): Generated tokens required before EOS may be emitted.
        length_penalty (float): Exponent alpha of the final score cum_log_prob / len**alpha.
        early_stopping (bool): Stop once num_beams hypotheses have finished.
        no_repeat_ngram (int): Ban any token that recreates an n-gram of this size; 0 disables.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)
    num_beams: int = Field(4, ge=1)
    max_length: int = Field(64, ge=1)
    min_length: int = Field(1, ge=1)
    length_penalty: float = 1.0
    early_stopping: bool = True
    no_repeat_ngram: int = Field(3, ge=0)

    @model_validator(mode="after")
    def check_length_bounds(self) -> "GenerationConfig":
        if self.min_length > self.max_length:
            raise ValueError(
                f"min_length={self.min_length} exceeds max_length={self.max_length}"
            )
        return self

    @classmethod
    def from_preset(cls, preset: GenerationPreset, **overrides: Any) -> "GenerationConfig":
        return cls(**{**GENERATION_PRESETS[preset], **overrides})

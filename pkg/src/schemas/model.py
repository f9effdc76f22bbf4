from enum import Enum
from typing import Any

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import model_validator


class DecoderOrder(str, Enum):
    cross_then_self = "cross_then_self"
    self_then_cross = "self_then_cross"


class ModelPreset(str, Enum):
    toy = "toy"
    base = "base"
    large = "large"


# Architectural values per preset; vocabulary size always comes from the corpus.
MODEL_PRESETS: dict[ModelPreset, dict[str, Any]] = {
    ModelPreset.toy: {
        "d_model": 16,
        "n_heads": 2,
        "encoder_layers": 2,
        "decoder_layers": 2,
        "max_positions": 512,
        "half_width": 4,
    },
    ModelPreset.base: {
        "d_model": 768,
        "n_heads": 12,
        "encoder_layers": 6,
        "decoder_layers": 6,
        "max_positions": 16384,
        "half_width": 512,
    },
    ModelPreset.large: {
        "d_model": 1024,
        "n_heads": 16,
        "encoder_layers": 12,
        "decoder_layers": 12,
        "max_positions": 16384,
        "half_width": 512,
    },
}


class ModelConfig(BaseModel):
    """
    Architectural hyperparameters of the encoder-decoder.

    Attributes:
        vocab_size (int): Number of token ids, specials included.
        d_model (int): Width of every hidden state.
        n_heads (int): Attention heads per attention block; must divide d_model.
        d_ff (int): Hidden width of the feed-forward blocks. Defaults to 4 * d_model.
        encoder_layers (int): Number of encoder layers (0 makes the encoder an embedding lookup).
        decoder_layers (int): Number of decoder layers.
        max_positions (int): Rows of the learned position table.
        half_width (int): Encoder sliding-window half-width h.
        dilation (int): Encoder sliding-window dilation d.
        layernorm_epsilon (float): Variance floor of every layer norm.
        decoder_order (DecoderOrder): Sublayer order inside each decoder layer.
        init_range (float): Half-width of the uniform weight initialization.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)
    vocab_size: int = Field(..., ge=1)
    d_model: int = Field(16, ge=1)
    n_heads: int = Field(2, ge=1)
    d_ff: int = Field(0, ge=0)
    encoder_layers: int = Field(2, ge=0)
    decoder_layers: int = Field(2, ge=0)
    max_positions: int = Field(512, ge=1)
    half_width: int = Field(4, ge=0)
    dilation: int = Field(1, ge=1)
    layernorm_epsilon: float = Field(1e-5, gt=0.0)
    decoder_order: DecoderOrder = DecoderOrder.cross_then_self
    init_range: float = Field(0.08, gt=0.0)

    @model_validator(mode="before")
    @classmethod
    def default_ff_width(cls, data: Any) -> Any:
        if isinstance(data, dict) and not data.get("d_ff"):
            data = {**data, "d_ff": 4 * int(data.get("d_model", 16))}
        return data

    @model_validator(mode="after")
    def heads_divide_width(self) -> "ModelConfig":
        if self.d_model % self.n_heads != 0:
            raise ValueError(
                f"d_model={self.d_model} is not divisible by n_heads={self.n_heads}"
            )
        return self

    @classmethod
    def from_preset(
        cls, preset: ModelPreset, vocab_size: int, **overrides: Any
    ) -> "ModelConfig":
        values = {**MODEL_PRESETS[preset], **overrides, "vocab_size": vocab_size}
        return cls(**values)

from collections.abc import Iterator
from collections.abc import Mapping

import numpy as np
import numpy.typing as npt

from src.core.exceptions import NonFiniteParameterError
from src.schemas.model import ModelConfig

Array = npt.NDArray[np.float64]

ATTENTION_PROJECTIONS = ("query", "key", "value", "output")


def attention_shapes(prefix: str, d_model: int) -> dict[str, tuple[int, ...]]:
    shapes: dict[str, tuple[int, ...]] = {}
    for projection in ATTENTION_PROJECTIONS:
        shapes[f"{prefix}.{projection}.weight"] = (d_model, d_model)
        shapes[f"{prefix}.{projection}.bias"] = (d_model,)
    return shapes


def norm_shapes(prefix: str, d_model: int) -> dict[str, tuple[int, ...]]:
    return {f"{prefix}.gain": (d_model,), f"{prefix}.bias": (d_model,)}


def ffn_shapes(prefix: str, d_model: int, d_ff: int) -> dict[str, tuple[int, ...]]:
    return {
        f"{prefix}.inner.weight": (d_model, d_ff),
        f"{prefix}.inner.bias": (d_ff,),
        f"{prefix}.outer.weight": (d_ff, d_model),
        f"{prefix}.outer.bias": (d_model,),
    }


def parameter_shapes(config: ModelConfig) -> dict[str, tuple[int, ...]]:
    """Every parameter array name with its shape, in canonical order."""
    d, ff = config.d_model, config.d_ff
    shapes: dict[str, tuple[int, ...]] = {
        "token_embedding": (config.vocab_size, d),
        "position_embedding": (config.max_positions, d),
    }
    for layer in range(config.encoder_layers):
        prefix = f"encoder.{layer}"
        shapes |= attention_shapes(f"{prefix}.self_attn", d)
        shapes |= norm_shapes(f"{prefix}.self_attn_norm", d)
        shapes |= ffn_shapes(f"{prefix}.ffn", d, ff)
        shapes |= norm_shapes(f"{prefix}.ffn_norm", d)
    for layer in range(config.decoder_layers):
        prefix = f"decoder.{layer}"
        shapes |= attention_shapes(f"{prefix}.cross_attn", d)
        shapes |= norm_shapes(f"{prefix}.cross_attn_norm", d)
        shapes |= attention_shapes(f"{prefix}.self_attn", d)
        shapes |= norm_shapes(f"{prefix}.self_attn_norm", d)
        shapes |= ffn_shapes(f"{prefix}.ffn", d, ff)
        shapes |= norm_shapes(f"{prefix}.ffn_norm", d)
    shapes["output_head.weight"] = (d, config.vocab_size)
    return shapes


class ModelParams(Mapping[str, Array]):
    """
    Named float64 arrays of one model, shapes fixed by its ModelConfig.

    Gradients use the same container so optimizer code can walk both in
    lockstep.
    """

    def __init__(self, config: ModelConfig, arrays: Mapping[str, Array]):
        expected = parameter_shapes(config)
        if list(arrays) != list(expected):
            missing = sorted(set(expected) - set(arrays))
            extra = sorted(set(arrays) - set(expected))
            raise ValueError(f"parameter names mismatch; missing={missing} extra={extra}")
        for name, shape in expected.items():
            if arrays[name].shape != shape:
                raise ValueError(
                    f"parameter '{name}' has shape {arrays[name].shape}, expected {shape}"
                )
        self.config = config
        self._arrays: dict[str, Array] = {
            name: np.asarray(arrays[name], dtype=np.float64) for name in expected
        }

    @classmethod
    def initialize(cls, config: ModelConfig, seed: int) -> "ModelParams":
        rng = np.random.default_rng(seed)
        arrays: dict[str, Array] = {}
        for name, shape in parameter_shapes(config).items():
            if name.endswith(".gain"):
                arrays[name] = np.ones(shape)
            elif name.endswith(".bias"):
                arrays[name] = np.zeros(shape)
            else:
                arrays[name] = rng.uniform(-config.init_range, config.init_range, size=shape)
        return cls(config, arrays)

    @classmethod
    def zeros(cls, config: ModelConfig) -> "ModelParams":
        return cls(
            config, {name: np.zeros(shape) for name, shape in parameter_shapes(config).items()}
        )

    def __getitem__(self, name: str) -> Array:
        return self._arrays[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._arrays)

    def __len__(self) -> int:
        return len(self._arrays)

    def check_finite(self) -> None:
        for name, array in self._arrays.items():
            if not np.all(np.isfinite(array)):
                raise NonFiniteParameterError(name=name)

    def size(self) -> int:
        return sum(a.size for a in self._arrays.values())

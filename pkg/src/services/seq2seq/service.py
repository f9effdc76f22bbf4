from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy.special import log_softmax
from scipy.special import softmax

from src.core.exceptions import AllPaddingError
from src.core.exceptions import EmptyPrefixError
from src.core.exceptions import SequenceTooLongError
from src.models.attention_pattern import AttentionPattern
from src.models.attention_pattern import PatternKind
from src.models.example import TrainingExample
from src.models.params import Array
from src.models.params import ModelParams
from src.models.vocabulary import PAD
from src.models.vocabulary import TokenSeq
from src.schemas.model import DecoderOrder
from src.schemas.model import ModelConfig
from src.services.seq2seq.layers import AttentionCache
from src.services.seq2seq.layers import feed_forward
from src.services.seq2seq.layers import feed_forward_backward
from src.services.seq2seq.layers import FeedForwardCache
from src.services.seq2seq.layers import Grads
from src.services.seq2seq.layers import KeyIndex
from src.services.seq2seq.layers import layer_norm
from src.services.seq2seq.layers import layer_norm_backward
from src.services.seq2seq.layers import multi_head_attention
from src.services.seq2seq.layers import multi_head_attention_backward
from src.services.seq2seq.layers import NormCache


@dataclass(frozen=True)
class BlockCache:
    """One residual sublayer: inner computation, residual add, layer norm."""

    kind: str  # "self_attn", "cross_attn" or "ffn"
    norm_prefix: str
    inner: AttentionCache | FeedForwardCache
    norm: NormCache


@dataclass(frozen=True)
class Encoded:
    """Encoder output plus the mask of positions the decoder may attend to."""

    hidden: Array
    memory_mask: npt.NDArray[np.bool_]
    blocks: tuple[BlockCache, ...] = ()


@dataclass(frozen=True)
class ForwardTrace:
    """Activations of one teacher-forced forward pass, kept for backward()."""

    params: ModelParams
    input_ids: TokenSeq
    decoder_input: TokenSeq
    targets: TokenSeq
    pad_mask: npt.NDArray[np.bool_]
    encoded: Encoded
    decoder_blocks: tuple[BlockCache, ...]
    decoder_hidden: Array
    logits: Array
    loss: float


# --- MASKS ---
def encoder_key_index(
    input_ids: TokenSeq, globals_: Iterable[int], config: ModelConfig
) -> KeyIndex:
    """
    Window plus globals, with PAD positions removed as keys.

    A PAD query left without keys attends to itself; its output is never read.
    """
    pattern = AttentionPattern(
        kind=PatternKind.egad,
        n=len(input_ids),
        half_width=config.half_width,
        dilation=config.dilation,
        globals=frozenset(globals_),
    )
    not_pad = input_ids != PAD
    allowed = pattern.mask & not_pad[None, :]
    stranded = ~allowed.any(axis=1)
    allowed[stranded, stranded] = True
    return KeyIndex.from_mask(allowed)


def causal_key_index(prefix: TokenSeq) -> KeyIndex:
    t = len(prefix)
    allowed = np.tri(t, dtype=bool) & (prefix != PAD)[None, :]
    allowed[np.diag_indices(t)] = True
    return KeyIndex.from_mask(allowed)


def memory_key_index(memory_mask: npt.NDArray[np.bool_], t: int) -> KeyIndex:
    return KeyIndex.from_mask(np.broadcast_to(memory_mask, (t, memory_mask.size)).copy())


# --- BLOCKS ---
def _attention_block(
    x: Array,
    memory: Array,
    params: ModelParams,
    prefix: str,
    kind: str,
    keys: KeyIndex,
    config: ModelConfig,
) -> tuple[Array, BlockCache]:
    attended, inner = multi_head_attention(x, memory, params, prefix, keys, config.n_heads)
    norm_prefix = f"{prefix}_norm"
    y, norm = layer_norm(
        x + attended,
        params[f"{norm_prefix}.gain"],
        params[f"{norm_prefix}.bias"],
        config.layernorm_epsilon,
    )
    return y, BlockCache(kind, norm_prefix, inner, norm)


def _ffn_block(
    x: Array, params: ModelParams, prefix: str, config: ModelConfig
) -> tuple[Array, BlockCache]:
    transformed, inner = feed_forward(x, params, prefix)
    norm_prefix = f"{prefix}_norm"
    y, norm = layer_norm(
        x + transformed,
        params[f"{norm_prefix}.gain"],
        params[f"{norm_prefix}.bias"],
        config.layernorm_epsilon,
    )
    return y, BlockCache("ffn", norm_prefix, inner, norm)


def _block_backward(
    d_out: Array, block: BlockCache, params: ModelParams, grads: Grads
) -> tuple[Array, Array | None]:
    """Returns (d_input, d_memory); d_memory is set for cross-attention only."""
    d_residual, d_gain, d_bias = layer_norm_backward(d_out, block.norm)
    grads[f"{block.norm_prefix}.gain"] += d_gain
    grads[f"{block.norm_prefix}.bias"] += d_bias

    if isinstance(block.inner, FeedForwardCache):
        d_x, local = feed_forward_backward(d_residual, block.inner, params)
        _accumulate(grads, local)
        return d_residual + d_x, None

    d_query, d_memory, local = multi_head_attention_backward(d_residual, block.inner, params)
    _accumulate(grads, local)
    if block.kind == "self_attn":
        return d_residual + d_query + d_memory, None
    return d_residual + d_query, d_memory


def _accumulate(grads: Grads, local: Grads) -> None:
    for name, value in local.items():
        grads[name] += value


def _embed(ids: TokenSeq, params: ModelParams, config: ModelConfig) -> Array:
    if len(ids) > config.max_positions:
        raise SequenceTooLongError(length=len(ids), max_positions=config.max_positions)
    return params["token_embedding"][ids] + params["position_embedding"][: len(ids)]


# --- ENCODER ---
def _encode(
    input_ids: TokenSeq, globals_: Iterable[int], params: ModelParams
) -> Encoded:
    config = params.config
    input_ids = np.asarray(input_ids, dtype=np.int64)
    x = _embed(input_ids, params, config)
    keys = encoder_key_index(input_ids, globals_, config)
    blocks: list[BlockCache] = []
    for layer in range(config.encoder_layers):
        prefix = f"encoder.{layer}"
        x, block = _attention_block(
            x, x, params, f"{prefix}.self_attn", "self_attn", keys, config
        )
        blocks.append(block)
        x, block = _ffn_block(x, params, f"{prefix}.ffn", config)
        blocks.append(block)
    return Encoded(hidden=x, memory_mask=input_ids != PAD, blocks=tuple(blocks))


def encode(
    input_ids: TokenSeq, globals_: Iterable[int], params: ModelParams, config: ModelConfig
) -> Array:
    """
    Embed and run the sparse encoder stack.

    Each layer: windowed+global self-attention, residual, layer norm, GELU
    feed-forward, residual, layer norm. Returns [n, d_model].
    """
    _check_config(params, config)
    return _encode(input_ids, globals_, params).hidden


# --- DECODER ---
def _decode(
    encoded: Encoded, prefix: TokenSeq, params: ModelParams
) -> tuple[Array, tuple[BlockCache, ...], Array]:
    config = params.config
    prefix = np.asarray(prefix, dtype=np.int64)
    if len(prefix) == 0:
        raise EmptyPrefixError()
    y = _embed(prefix, params, config)
    self_keys = causal_key_index(prefix)
    cross_keys = memory_key_index(encoded.memory_mask, len(prefix))
    memory = encoded.hidden

    sublayers = ("cross_attn", "self_attn")
    if config.decoder_order is DecoderOrder.self_then_cross:
        sublayers = ("self_attn", "cross_attn")

    blocks: list[BlockCache] = []
    for layer in range(config.decoder_layers):
        layer_prefix = f"decoder.{layer}"
        for kind in sublayers:
            if kind == "cross_attn":
                y, block = _attention_block(
                    y, memory, params, f"{layer_prefix}.cross_attn", kind, cross_keys, config
                )
            else:
                y, block = _attention_block(
                    y, y, params, f"{layer_prefix}.self_attn", kind, self_keys, config
                )
            blocks.append(block)
        y, block = _ffn_block(y, params, f"{layer_prefix}.ffn", config)
        blocks.append(block)
    logits = y @ params["output_head.weight"]
    return y, tuple(blocks), logits


def decode_step_batch(
    encoder_out: Array,
    target_prefix: TokenSeq,
    params: ModelParams,
    config: ModelConfig,
    memory_mask: npt.NDArray[np.bool_] | None = None,
) -> Array:
    """
    Teacher-forced parallel decode of a BOS-initiated prefix.

    Position t only sees prefix tokens up to t. Returns logits [t, vocab_size].
    """
    _check_config(params, config)
    if memory_mask is None:
        memory_mask = np.ones(encoder_out.shape[0], dtype=bool)
    encoded = Encoded(hidden=encoder_out, memory_mask=memory_mask)
    return _decode(encoded, target_prefix, params)[2]


# --- LOSS ---
def _keep_mask(
    targets: TokenSeq, pad_mask: npt.NDArray[np.bool_] | None
) -> npt.NDArray[np.bool_]:
    ignored = np.asarray(targets) == PAD if pad_mask is None else np.asarray(pad_mask, dtype=bool)
    keep = ~ignored
    if not keep.any():
        raise AllPaddingError()
    return keep


def loss(
    logits: Array, targets: TokenSeq, pad_mask: npt.NDArray[np.bool_] | None = None
) -> float:
    """
    Mean token cross-entropy over non-padding positions.

    pad_mask marks positions to ignore; by default every PAD target.
    """
    keep = _keep_mask(targets, pad_mask)
    log_probs = log_softmax(logits, axis=-1)
    picked = log_probs[np.arange(len(targets)), np.asarray(targets)]
    return float(-picked[keep].mean())


def loss_backward(
    logits: Array, targets: TokenSeq, pad_mask: npt.NDArray[np.bool_] | None = None
) -> Array:
    keep = _keep_mask(targets, pad_mask)
    d_logits = softmax(logits, axis=-1)
    d_logits[np.arange(len(targets)), np.asarray(targets)] -= 1.0
    d_logits *= keep[:, None] / keep.sum()
    return d_logits


# --- FORWARD / BACKWARD ---
def forward(
    input_ids: TokenSeq,
    globals_: Iterable[int],
    decoder_input: TokenSeq,
    targets: TokenSeq,
    params: ModelParams,
    pad_mask: npt.NDArray[np.bool_] | None = None,
) -> tuple[float, ForwardTrace]:
    """Teacher-forced forward pass recording everything backward() needs."""
    targets = np.asarray(targets, dtype=np.int64)
    decoder_input = np.asarray(decoder_input, dtype=np.int64)
    if len(targets) != len(decoder_input):
        raise ValueError(
            f"targets ({len(targets)}) and decoder input ({len(decoder_input)}) differ in length"
        )
    encoded = _encode(input_ids, globals_, params)
    hidden, blocks, logits = _decode(encoded, decoder_input, params)
    ignored = targets == PAD if pad_mask is None else np.asarray(pad_mask, dtype=bool)
    value = loss(logits, targets, ignored)
    trace = ForwardTrace(
        params=params,
        input_ids=np.asarray(input_ids, dtype=np.int64),
        decoder_input=decoder_input,
        targets=targets,
        pad_mask=ignored,
        encoded=encoded,
        decoder_blocks=blocks,
        decoder_hidden=hidden,
        logits=logits,
        loss=value,
    )
    return value, trace


def backward(trace: ForwardTrace, upstream: float = 1.0) -> ModelParams:
    """Exact gradient of upstream * loss with respect to every parameter array."""
    params = trace.params
    grads: Grads = {name: np.zeros_like(array) for name, array in params.items()}

    d_logits = loss_backward(trace.logits, trace.targets, trace.pad_mask) * upstream
    grads["output_head.weight"] += trace.decoder_hidden.T @ d_logits
    d_hidden = d_logits @ params["output_head.weight"].T

    d_memory = np.zeros_like(trace.encoded.hidden)
    for block in reversed(trace.decoder_blocks):
        d_hidden, d_cross = _block_backward(d_hidden, block, params, grads)
        if d_cross is not None:
            d_memory += d_cross
    _embedding_backward(d_hidden, trace.decoder_input, grads)

    d_hidden = d_memory
    for block in reversed(trace.encoded.blocks):
        d_hidden, _ = _block_backward(d_hidden, block, params, grads)
    _embedding_backward(d_hidden, trace.input_ids, grads)

    return ModelParams(params.config, grads)


def _embedding_backward(d_embedded: Array, ids: TokenSeq, grads: Grads) -> None:
    np.add.at(grads["token_embedding"], ids, d_embedded)
    grads["position_embedding"][: len(ids)] += d_embedded


def _check_config(params: ModelParams, config: ModelConfig) -> None:
    if params.config != config:
        raise ValueError("parameters were built for a different ModelConfig")


class Seq2SeqModel:
    """
    Parameters bundled with the operations the trainer and decoder need.

    The model never mutates its parameters; optimizer steps return new ones.
    """

    def __init__(self, params: ModelParams):
        self.params = params
        self.config = params.config

    def encode(self, input_ids: TokenSeq, globals_: Iterable[int]) -> Encoded:
        return _encode(input_ids, globals_, self.params)

    def logits(self, encoded: Encoded, prefix: TokenSeq) -> Array:
        return _decode(encoded, prefix, self.params)[2]

    def next_token_log_probs(self, encoded: Encoded, prefix: TokenSeq) -> Array:
        return log_softmax(self.logits(encoded, prefix)[-1])

    def example_loss(self, example: TrainingExample) -> float:
        value, _ = forward(
            example.input_ids,
            example.globals,
            example.decoder_input,
            example.targets,
            self.params,
        )
        return value

    def loss_and_gradients(
        self, example: TrainingExample, upstream: float = 1.0
    ) -> tuple[float, ModelParams]:
        value, trace = forward(
            example.input_ids,
            example.globals,
            example.decoder_input,
            example.targets,
            self.params,
        )
        return value, backward(trace, upstream)

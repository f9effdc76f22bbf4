import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy.special import erf
from scipy.special import softmax

from src.core.exceptions import AttentionContractError
from src.models.params import Array
from src.models.params import ModelParams

Grads = dict[str, Array]

_SQRT_2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class KeyIndex:
    """
    Per-query lists of allowed key positions, padded to a common width.

    index[i, :] holds the allowed keys of query i in ascending order; slots
    beyond the row's count point at key 0 and are marked invalid.
    """

    index: npt.NDArray[np.int64]
    valid: npt.NDArray[np.bool_]

    @classmethod
    def from_mask(cls, allowed: npt.NDArray[np.bool_]) -> "KeyIndex":
        empty = ~allowed.any(axis=1)
        if empty.any():
            raise AttentionContractError(rows=np.flatnonzero(empty).tolist())
        width = int(allowed.sum(axis=1).max())
        order = np.argsort(~allowed, axis=1, kind="stable")[:, :width]
        valid = np.take_along_axis(allowed, order, axis=1)
        return cls(index=np.where(valid, order, 0), valid=valid)

    @property
    def width(self) -> int:
        return int(self.index.shape[1])


# --- LINEAR ---
def linear(x: Array, weight: Array, bias: Array) -> Array:
    return x @ weight + bias


def linear_backward(
    d_out: Array, x: Array, weight: Array
) -> tuple[Array, Array, Array]:
    return d_out @ weight.T, x.T @ d_out, d_out.sum(axis=0)


# --- LAYER NORM ---
@dataclass(frozen=True)
class NormCache:
    normalized: Array
    inv_std: Array
    gain: Array


def layer_norm(
    x: Array, gain: Array, bias: Array, epsilon: float
) -> tuple[Array, NormCache]:
    centered = x - x.mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt((centered**2).mean(axis=-1, keepdims=True) + epsilon)
    normalized = centered * inv_std
    return normalized * gain + bias, NormCache(normalized, inv_std, gain)


def layer_norm_backward(
    d_out: Array, cache: NormCache
) -> tuple[Array, Array, Array]:
    d_gain = (d_out * cache.normalized).sum(axis=0)
    d_bias = d_out.sum(axis=0)
    d_norm = d_out * cache.gain
    d_x = cache.inv_std * (
        d_norm
        - d_norm.mean(axis=-1, keepdims=True)
        - cache.normalized * (d_norm * cache.normalized).mean(axis=-1, keepdims=True)
    )
    return d_x, d_gain, d_bias


# --- GELU ---
def gelu(x: Array) -> Array:
    return 0.5 * x * (1.0 + erf(x / _SQRT_2))


def gelu_grad(x: Array) -> Array:
    cdf = 0.5 * (1.0 + erf(x / _SQRT_2))
    return cdf + x * _INV_SQRT_2PI * np.exp(-0.5 * x * x)


# --- ATTENTION ---
def scaled_dot_product(
    q: Array, k: Array, v: Array, keys: KeyIndex
) -> tuple[Array, Array]:
    """
    Sparse scaled dot-product attention over already projected heads.

    q is [m, heads, d_head]; k and v are [n, heads, d_head]. Only the pairs
    listed in keys are scored; the returned probabilities are [m, heads, width]
    and sum to one over the valid slots of each row.
    """
    scale = 1.0 / math.sqrt(q.shape[-1])
    k_rows = k[keys.index]
    v_rows = v[keys.index]
    scores = np.einsum("mhd,mwhd->mhw", q, k_rows) * scale
    scores = np.where(keys.valid[:, None, :], scores, -np.inf)
    probs = softmax(scores, axis=-1)
    context = np.einsum("mhw,mwhd->mhd", probs, v_rows)
    return context, probs


def scaled_dot_product_backward(
    d_context: Array, q: Array, k: Array, v: Array, keys: KeyIndex, probs: Array
) -> tuple[Array, Array, Array]:
    scale = 1.0 / math.sqrt(q.shape[-1])
    k_rows = k[keys.index]
    v_rows = v[keys.index]
    d_probs = np.einsum("mhd,mwhd->mhw", d_context, v_rows)
    d_v_rows = np.einsum("mhw,mhd->mwhd", probs, d_context)
    d_scores = probs * (d_probs - (probs * d_probs).sum(axis=-1, keepdims=True)) * scale
    d_q = np.einsum("mhw,mwhd->mhd", d_scores, k_rows)
    d_k_rows = np.einsum("mhw,mhd->mwhd", d_scores, q)
    d_k = np.zeros_like(k)
    d_v = np.zeros_like(v)
    np.add.at(d_k, keys.index, d_k_rows)
    np.add.at(d_v, keys.index, d_v_rows)
    return d_q, d_k, d_v


@dataclass(frozen=True)
class AttentionCache:
    prefix: str
    x_query: Array
    x_memory: Array
    q: Array
    k: Array
    v: Array
    keys: KeyIndex
    probs: Array
    context: Array


def multi_head_attention(
    x_query: Array,
    x_memory: Array,
    params: ModelParams,
    prefix: str,
    keys: KeyIndex,
    n_heads: int,
) -> tuple[Array, AttentionCache]:
    """Project, attend per head over the allowed keys, concatenate, project out."""
    m, d_model = x_query.shape
    n = x_memory.shape[0]
    d_head = d_model // n_heads
    q = linear(x_query, params[f"{prefix}.query.weight"], params[f"{prefix}.query.bias"])
    k = linear(x_memory, params[f"{prefix}.key.weight"], params[f"{prefix}.key.bias"])
    v = linear(x_memory, params[f"{prefix}.value.weight"], params[f"{prefix}.value.bias"])
    q = q.reshape(m, n_heads, d_head)
    k = k.reshape(n, n_heads, d_head)
    v = v.reshape(n, n_heads, d_head)
    heads, probs = scaled_dot_product(q, k, v, keys)
    context = heads.reshape(m, d_model)
    out = linear(context, params[f"{prefix}.output.weight"], params[f"{prefix}.output.bias"])
    return out, AttentionCache(prefix, x_query, x_memory, q, k, v, keys, probs, context)


def multi_head_attention_backward(
    d_out: Array, cache: AttentionCache, params: ModelParams
) -> tuple[Array, Array, Grads]:
    """Returns (d_query_input, d_memory_input, parameter gradients)."""
    prefix = cache.prefix
    m, d_model = cache.x_query.shape
    n = cache.x_memory.shape[0]
    grads: Grads = {}

    d_context, grads[f"{prefix}.output.weight"], grads[f"{prefix}.output.bias"] = (
        linear_backward(d_out, cache.context, params[f"{prefix}.output.weight"])
    )
    d_q, d_k, d_v = scaled_dot_product_backward(
        d_context.reshape(cache.q.shape), cache.q, cache.k, cache.v, cache.keys, cache.probs
    )
    d_x_query, grads[f"{prefix}.query.weight"], grads[f"{prefix}.query.bias"] = (
        linear_backward(d_q.reshape(m, d_model), cache.x_query, params[f"{prefix}.query.weight"])
    )
    d_x_key, grads[f"{prefix}.key.weight"], grads[f"{prefix}.key.bias"] = linear_backward(
        d_k.reshape(n, d_model), cache.x_memory, params[f"{prefix}.key.weight"]
    )
    d_x_value, grads[f"{prefix}.value.weight"], grads[f"{prefix}.value.bias"] = (
        linear_backward(d_v.reshape(n, d_model), cache.x_memory, params[f"{prefix}.value.weight"])
    )
    return d_x_query, d_x_key + d_x_value, grads


# --- FEED FORWARD ---
@dataclass(frozen=True)
class FeedForwardCache:
    prefix: str
    x: Array
    pre_activation: Array
    hidden: Array


def feed_forward(
    x: Array, params: ModelParams, prefix: str
) -> tuple[Array, FeedForwardCache]:
    pre_activation = linear(
        x, params[f"{prefix}.inner.weight"], params[f"{prefix}.inner.bias"]
    )
    hidden = gelu(pre_activation)
    out = linear(hidden, params[f"{prefix}.outer.weight"], params[f"{prefix}.outer.bias"])
    return out, FeedForwardCache(prefix, x, pre_activation, hidden)


def feed_forward_backward(
    d_out: Array, cache: FeedForwardCache, params: ModelParams
) -> tuple[Array, Grads]:
    prefix = cache.prefix
    grads: Grads = {}
    d_hidden, grads[f"{prefix}.outer.weight"], grads[f"{prefix}.outer.bias"] = (
        linear_backward(d_out, cache.hidden, params[f"{prefix}.outer.weight"])
    )
    d_pre = d_hidden * gelu_grad(cache.pre_activation)
    d_x, grads[f"{prefix}.inner.weight"], grads[f"{prefix}.inner.bias"] = linear_backward(
        d_pre, cache.x, params[f"{prefix}.inner.weight"]
    )
    return d_x, grads

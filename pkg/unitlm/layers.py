import numpy as np

from core.errors import DimensionError
from numcore.functional import MASK_VALUE, dropout, layer_norm, linear, relu, scaled_dot_product_attention
from numcore.tensor import Tensor, matmul
from prompts.prompt_set import apply_deep_prompts

Params = dict[str, Tensor]


def attention(q: Tensor, k: Tensor, v: Tensor, mask: np.ndarray | None = None) -> Tensor:
    """Single-head softmax(Q K^T / sqrt(d_k) + mask) V."""
    out, _ = scaled_dot_product_attention(q, k, v, mask)
    return out


def causal_mask(n_queries: int, n_keys: int, n_prefix_keys: int = 0) -> np.ndarray:
    """
    Additive mask for causal self-attention over n_prefix_keys always-visible keys followed by n_keys positions.
    Query i sees every prefix key and positions 0..i.
    """
    visible = np.tril(np.ones((n_queries, n_keys), dtype = bool))
    if n_prefix_keys:
        visible = np.concatenate([np.ones((n_queries, n_prefix_keys), dtype = bool), visible], axis = 1)
    return np.where(visible, 0.0, MASK_VALUE)


def split_heads(x: Tensor, n_heads: int) -> Tensor:
    rows, width = x.shape
    return x.reshape(rows, n_heads, width // n_heads).transpose(1, 0, 2)


def merge_heads(x: Tensor) -> Tensor:
    n_heads, rows, head_dim = x.shape
    return x.transpose(1, 0, 2).reshape(rows, n_heads * head_dim)


def multi_head_attention(
    params: Params,
    prefix: str,
    queries: Tensor,
    memory: Tensor,
    n_heads: int,
    mask: np.ndarray | None = None,
    deep_prompt: tuple[Tensor, Tensor] | None = None
) -> tuple[Tensor, Tensor]:
    """
    Bias-free multi-head attention reading {prefix}.wq/.wk/.wv/.wo from params.

    Deep prompts, when given, are prepended to the keys and values so the output keeps one row per query while every
    query also attends over the l prompt positions. The mask must already cover those positions.

    Returns:
        tuple[Tensor, Tensor]: Output (T_q x d) and attention weights (heads x T_q x T_k).
    """
    if queries.shape[1] != memory.shape[1]:
        raise DimensionError(f"query width {queries.shape[1]} != memory width {memory.shape[1]}")
    key_prompt, value_prompt = deep_prompt if deep_prompt is not None else (None, None)
    q = matmul(queries, params[f"{prefix}.wq"])
    k, v = apply_deep_prompts(memory, key_prompt, value_prompt, params[f"{prefix}.wk"], params[f"{prefix}.wv"])
    heads, weights = scaled_dot_product_attention(
        split_heads(q, n_heads),
        split_heads(k, n_heads),
        split_heads(v, n_heads),
        None if mask is None else mask[None]
    )
    return matmul(merge_heads(heads), params[f"{prefix}.wo"]), weights


def feed_forward(params: Params, prefix: str, x: Tensor) -> Tensor:
    hidden = relu(linear(x, params[f"{prefix}.w1"], params[f"{prefix}.b1"]))
    return linear(hidden, params[f"{prefix}.w2"], params[f"{prefix}.b2"])


def norm(params: Params, prefix: str, x: Tensor) -> Tensor:
    return layer_norm(x, params[f"{prefix}.gamma"], params[f"{prefix}.beta"])


def transformer_layer(
    params: Params,
    prefix: str,
    x: Tensor,
    n_heads: int,
    mask: np.ndarray | None,
    deep_prompt: tuple[Tensor, Tensor] | None = None,
    memory: Tensor | None = None,
    dropout_rate: float = 0.0,
    rng: np.random.Generator | None = None
) -> Tensor:
    """
    One pre-norm layer: self-attention, optional cross-attention over memory, then the feed-forward block, each
    wrapped in a residual connection. Deep prompts enter the self-attention only.
    """
    normed = norm(params, f"{prefix}.ln_attn", x)
    attended, _ = multi_head_attention(params, f"{prefix}.attn", normed, normed, n_heads, mask, deep_prompt)
    x = x + dropout(attended, dropout_rate, rng)
    if memory is not None:
        normed = norm(params, f"{prefix}.ln_cross", x)
        crossed, _ = multi_head_attention(params, f"{prefix}.cross", normed, memory, n_heads)
        x = x + dropout(crossed, dropout_rate, rng)
    normed = norm(params, f"{prefix}.ln_ffn", x)
    return x + dropout(feed_forward(params, f"{prefix}.ffn", normed), dropout_rate, rng)


def init_layer(
    rng: np.random.Generator,
    prefix: str,
    embed_dim: int,
    ffn_dim: int,
    n_layers: int,
    dtype: type,
    cross: bool = False
) -> Params:
    """Draws the parameters of one layer; residual output projections are scaled down by sqrt(2 * n_layers)."""
    def weight(shape: tuple[int, int], scale: float = 1.0) -> np.ndarray:
        return (rng.normal(0.0, scale / np.sqrt(shape[0]), size = shape)).astype(dtype)

    residual = 1.0 / np.sqrt(2 * n_layers)
    arrays: dict[str, np.ndarray] = {}
    blocks = ["attn", "cross"] if cross else ["attn"]
    for block in blocks:
        for name in ("wq", "wk", "wv"):
            arrays[f"{prefix}.{block}.{name}"] = weight((embed_dim, embed_dim))
        arrays[f"{prefix}.{block}.wo"] = weight((embed_dim, embed_dim), residual)
    for block in ["ln_attn", "ln_ffn"] + (["ln_cross"] if cross else []):
        arrays[f"{prefix}.{block}.gamma"] = np.ones(embed_dim, dtype = dtype)
        arrays[f"{prefix}.{block}.beta"] = np.zeros(embed_dim, dtype = dtype)
    arrays[f"{prefix}.ffn.w1"] = weight((embed_dim, ffn_dim))
    arrays[f"{prefix}.ffn.b1"] = np.zeros(ffn_dim, dtype = dtype)
    arrays[f"{prefix}.ffn.w2"] = weight((ffn_dim, embed_dim), residual)
    arrays[f"{prefix}.ffn.b2"] = np.zeros(embed_dim, dtype = dtype)
    return {name: Tensor(value, trainable = True, name = name) for name, value in arrays.items()}

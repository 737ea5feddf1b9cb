"""Desk-scale neural building blocks: the 78 x 256 character embedding,
a layer-normalized LSTM cell, and additive attention alignment.

Forward passes come with hand-derived backward passes; `grad_check`
verifies every parameter gradient against central finite differences.
All math is float64 — the gradient contract (max relative error <= 1e-4)
is only meaningful in double precision.

Layer normalization here is per-gate-block: the combined pre-activation
Wx + Uh + b is split into the four gate blocks and each block is
normalized to zero mean and unit variance (eps = 1e-5 inside the square
root) before its own gain/shift.  The cell state gets one more LN before
the output tanh.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (EmptyMemory, IndexOutOfRange, NonFiniteInput,
                     ShapeMismatch, UnknownOp)
from . import rslf

EMBEDDING_ROWS = 78
EMBEDDING_DIM = 256
LN_EPS = 1e-5


def _require_finite(name: str, *arrays: np.ndarray) -> None:
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise NonFiniteInput(f"{name} contains non-finite values")


# --- embedding --------------------------------------------------------------

def make_embedding(rng: np.random.Generator | None = None,
                   scale: float = 0.1) -> np.ndarray:
    rng = rng or np.random.default_rng(0)
    return rng.normal(0.0, scale, size=(EMBEDDING_ROWS, EMBEDDING_DIM))


def embed(ids, table: np.ndarray) -> np.ndarray:
    """Row gather: output row i is table[ids[i]]."""
    table = np.asarray(table, dtype=np.float64)
    if table.shape != (EMBEDDING_ROWS, EMBEDDING_DIM):
        raise ShapeMismatch(f"embedding table must be "
                            f"{EMBEDDING_ROWS}x{EMBEDDING_DIM}, got {table.shape}")
    idx = np.asarray(list(ids), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= EMBEDDING_ROWS):
        raise IndexOutOfRange(f"ids must lie in [0, {EMBEDDING_ROWS})")
    return table[idx] if idx.size else np.zeros((0, EMBEDDING_DIM))


def embed_backward(ids, grad_out: np.ndarray) -> np.ndarray:
    """Gradient of a scalar loss wrt the table: scatter-add of row grads."""
    grad_table = np.zeros((EMBEDDING_ROWS, EMBEDDING_DIM))
    np.add.at(grad_table, np.asarray(list(ids), dtype=np.int64), grad_out)
    return grad_table


# --- layer-normalized LSTM cell ----------------------------------------------

@dataclass
class LnLstmParams:
    """Weights for one LN-LSTM step; gate block order is (i, f, g, o)."""

    w_x: np.ndarray      # (4H, D)
    w_h: np.ndarray      # (4H, H)
    bias: np.ndarray     # (4H,)
    gamma_gates: np.ndarray  # (4H,) gain per gate block
    beta_gates: np.ndarray   # (4H,) shift per gate block
    gamma_cell: np.ndarray   # (H,)
    beta_cell: np.ndarray    # (H,)

    @property
    def hidden_size(self) -> int:
        return self.w_h.shape[1]

    @property
    def input_size(self) -> int:
        return self.w_x.shape[1]

    def tensors(self) -> dict[str, np.ndarray]:
        return {"w_x": self.w_x, "w_h": self.w_h, "bias": self.bias,
                "gamma_gates": self.gamma_gates, "beta_gates": self.beta_gates,
                "gamma_cell": self.gamma_cell, "beta_cell": self.beta_cell}

    def validate(self) -> None:
        h, d = self.hidden_size, self.input_size
        expected = {"w_x": (4 * h, d), "w_h": (4 * h, h), "bias": (4 * h,),
                    "gamma_gates": (4 * h,), "beta_gates": (4 * h,),
                    "gamma_cell": (h,), "beta_cell": (h,)}
        for name, arr in self.tensors().items():
            if arr.shape != expected[name]:
                raise ShapeMismatch(f"{name}: expected {expected[name]}, got {arr.shape}")


def make_lstm_params(input_size: int, hidden_size: int,
                     rng: np.random.Generator | None = None) -> LnLstmParams:
    """Random weights, LN gains initialized to 1 and shifts to 0."""
    rng = rng or np.random.default_rng(0)
    h, d = hidden_size, input_size
    return LnLstmParams(
        w_x=rng.normal(0, 0.4, size=(4 * h, d)),
        w_h=rng.normal(0, 0.4, size=(4 * h, h)),
        bias=rng.normal(0, 0.1, size=4 * h),
        gamma_gates=np.ones(4 * h),
        beta_gates=np.zeros(4 * h),
        gamma_cell=np.ones(h),
        beta_cell=np.zeros(h),
    )


def _ln_forward(x: np.ndarray, gamma: np.ndarray, beta: np.ndarray):
    mu = np.mean(x)
    var = np.var(x)
    inv = 1.0 / np.sqrt(var + LN_EPS)
    x_hat = (x - mu) * inv
    return gamma * x_hat + beta, (x_hat, inv)


def _ln_backward(dy: np.ndarray, gamma: np.ndarray, cache):
    x_hat, inv = cache
    dgamma = dy * x_hat
    dbeta = dy.copy()
    dx_hat = dy * gamma
    dx = inv * (dx_hat - np.mean(dx_hat) - x_hat * np.mean(dx_hat * x_hat))
    return dx, dgamma, dbeta


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def ln_lstm_step(x: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray,
                 params: LnLstmParams, with_cache: bool = False):
    """One LN-LSTM step; returns (h, c), plus a backward cache on request."""
    x = np.asarray(x, dtype=np.float64)
    h_prev = np.asarray(h_prev, dtype=np.float64)
    c_prev = np.asarray(c_prev, dtype=np.float64)
    params.validate()
    hs = params.hidden_size
    if x.shape != (params.input_size,) or h_prev.shape != (hs,) or c_prev.shape != (hs,):
        raise ShapeMismatch(f"expected x({params.input_size},), h/c({hs},), got "
                            f"{x.shape}/{h_prev.shape}/{c_prev.shape}")
    _require_finite("ln_lstm_step input", x, h_prev, c_prev)

    pre = params.w_x @ x + params.w_h @ h_prev + params.bias
    blocks, caches = [], []
    for b in range(4):
        sl = slice(b * hs, (b + 1) * hs)
        normed, cache = _ln_forward(pre[sl], params.gamma_gates[sl], params.beta_gates[sl])
        blocks.append(normed)
        caches.append(cache)
    i = _sigmoid(blocks[0])
    f = _sigmoid(blocks[1])
    g = np.tanh(blocks[2])
    o = _sigmoid(blocks[3])
    c = f * c_prev + i * g
    cn, cell_cache = _ln_forward(c, params.gamma_cell, params.beta_cell)
    tanh_cn = np.tanh(cn)
    h = o * tanh_cn

    if not with_cache:
        return h, c
    cache = {"x": x, "h_prev": h_prev, "c_prev": c_prev, "i": i, "f": f,
             "g": g, "o": o, "c": c, "tanh_cn": tanh_cn,
             "gate_caches": caches, "cell_cache": cell_cache}
    return (h, c), cache


def ln_lstm_backward(dh: np.ndarray, dc: np.ndarray, params: LnLstmParams,
                     cache) -> dict[str, np.ndarray]:
    """Gradients of a scalar loss wrt every parameter tensor and the step
    inputs, given upstream dh and dc."""
    hs = params.hidden_size
    i, f, g, o = cache["i"], cache["f"], cache["g"], cache["o"]
    tanh_cn = cache["tanh_cn"]

    do = dh * tanh_cn
    dcn = dh * o * (1.0 - tanh_cn**2)
    dc_ln, dgamma_cell, dbeta_cell = _ln_backward(dcn, params.gamma_cell,
                                                  cache["cell_cache"])
    dc_total = np.asarray(dc, dtype=np.float64) + dc_ln

    df = dc_total * cache["c_prev"]
    di = dc_total * g
    dg = dc_total * i
    dc_prev = dc_total * f

    dblocks = [di * i * (1 - i), df * f * (1 - f), dg * (1 - g**2), do * o * (1 - o)]
    dpre = np.zeros(4 * hs)
    dgamma_gates = np.zeros(4 * hs)
    dbeta_gates = np.zeros(4 * hs)
    for b in range(4):
        sl = slice(b * hs, (b + 1) * hs)
        dx_b, dgamma_b, dbeta_b = _ln_backward(dblocks[b], params.gamma_gates[sl],
                                               cache["gate_caches"][b])
        dpre[sl] = dx_b
        dgamma_gates[sl] = dgamma_b
        dbeta_gates[sl] = dbeta_b

    return {
        "w_x": np.outer(dpre, cache["x"]),
        "w_h": np.outer(dpre, cache["h_prev"]),
        "bias": dpre,
        "gamma_gates": dgamma_gates,
        "beta_gates": dbeta_gates,
        "gamma_cell": dgamma_cell,
        "beta_cell": dbeta_cell,
        "x": params.w_x.T @ dpre,
        "h_prev": params.w_h.T @ dpre,
        "c_prev": dc_prev,
    }


# --- additive attention -------------------------------------------------------

@dataclass
class AttentionParams:
    query_proj: np.ndarray   # (A, Q)
    memory_proj: np.ndarray  # (A, M)
    score_vec: np.ndarray    # (A,)

    def tensors(self) -> dict[str, np.ndarray]:
        return {"query_proj": self.query_proj, "memory_proj": self.memory_proj,
                "score_vec": self.score_vec}


def make_attention_params(query_size: int, memory_size: int, attn_size: int,
                          rng: np.random.Generator | None = None) -> AttentionParams:
    rng = rng or np.random.default_rng(0)
    return AttentionParams(
        query_proj=rng.normal(0, 0.5, size=(attn_size, query_size)),
        memory_proj=rng.normal(0, 0.5, size=(attn_size, memory_size)),
        score_vec=rng.normal(0, 0.5, size=attn_size),
    )


def softmax(e: np.ndarray) -> np.ndarray:
    shifted = e - np.max(e)
    exp = np.exp(shifted)
    return exp / np.sum(exp)


def attention_weights(query: np.ndarray, memory: np.ndarray,
                      params: AttentionParams, with_cache: bool = False):
    """Additive alignment: softmax over score_vec . tanh(Pq q + Pm m_t)."""
    query = np.asarray(query, dtype=np.float64)
    memory = np.asarray(memory, dtype=np.float64)
    if memory.ndim != 2 or memory.shape[0] == 0:
        raise EmptyMemory("memory must be a nonempty T x M matrix")
    _require_finite("attention input", query, memory)
    # s_t = Pq q + Pm m_t, u_t = tanh(s_t), e_t = v . u_t
    projected_query = params.query_proj @ query
    projected_memory = memory @ params.memory_proj.T
    u = np.tanh(projected_query[None, :] + projected_memory)
    energies = u @ params.score_vec
    weights = softmax(energies)
    if not with_cache:
        return weights
    return weights, {"query": query, "memory": memory, "u": u, "weights": weights}


def attention_backward(dweights: np.ndarray, params: AttentionParams,
                       cache) -> dict[str, np.ndarray]:
    w = cache["weights"]
    u = cache["u"]
    denergies = w * (dweights - np.dot(dweights, w))
    du = denergies[:, None] * params.score_vec[None, :]
    ds = du * (1.0 - u**2)
    return {
        "query_proj": np.outer(ds.sum(axis=0), cache["query"]),
        "memory_proj": ds.T @ cache["memory"],
        "score_vec": (denergies[:, None] * u).sum(axis=0),
        "query": params.query_proj.T @ ds.sum(axis=0),
        "memory": ds @ params.memory_proj,
    }


# --- finite-difference verification harness -----------------------------------

@dataclass(frozen=True)
class GradCheckReport:
    op_name: str
    per_tensor: dict[str, float]

    @property
    def max_relative_error(self) -> float:
        return max(self.per_tensor.values())


def _relative_errors(analytic: np.ndarray, numeric: np.ndarray) -> float:
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-6)
    return float(np.max(np.abs(analytic - numeric) / denom)) if analytic.size else 0.0


def _central_diff(loss_fn, tensor: np.ndarray, eps: float) -> np.ndarray:
    grad = np.zeros_like(tensor)
    flat = tensor.reshape(-1)
    grad_flat = grad.reshape(-1)
    for j in range(flat.size):
        original = flat[j]
        flat[j] = original + eps
        hi = loss_fn()
        flat[j] = original - eps
        lo = loss_fn()
        flat[j] = original
        grad_flat[j] = (hi - lo) / (2.0 * eps)
    return grad


def grad_check(op_name: str, seed: int = 0, eps: float = 1e-5) -> GradCheckReport:
    """Compare analytic parameter gradients of a fixed scalar loss against
    central finite differences."""
    if not 1e-7 <= eps <= 1e-3:
        raise ValueError("eps must lie in [1e-7, 1e-3]")
    rng = np.random.default_rng(seed)

    if op_name == "ln_lstm_step":
        d, h = 3, 4
        params = make_lstm_params(d, h, rng)
        x = rng.normal(size=d)
        h_prev = rng.normal(size=h)
        c_prev = rng.normal(size=h)
        r_h = rng.normal(size=h)
        r_c = rng.normal(size=h)

        def loss_fn() -> float:
            h_out, c_out = ln_lstm_step(x, h_prev, c_prev, params)
            return float(np.dot(h_out, r_h) + np.dot(c_out, r_c))

        (_, _), cache = ln_lstm_step(x, h_prev, c_prev, params, with_cache=True)
        analytic = ln_lstm_backward(r_h, r_c, params, cache)
        tensors = params.tensors()

    elif op_name == "attention_weights":
        q_size, m_size, a_size, t = 3, 4, 5, 6
        params = make_attention_params(q_size, m_size, a_size, rng)
        query = rng.normal(size=q_size)
        memory = rng.normal(size=(t, m_size))
        r_w = rng.normal(size=t)

        def loss_fn() -> float:
            return float(np.dot(attention_weights(query, memory, params), r_w))

        _, cache = attention_weights(query, memory, params, with_cache=True)
        analytic = attention_backward(r_w, params, cache)
        tensors = params.tensors()

    elif op_name == "embed":
        table = make_embedding(rng)
        ids = rng.integers(0, EMBEDDING_ROWS, size=7)
        r = rng.normal(size=(7, EMBEDDING_DIM))

        def loss_fn() -> float:
            return float(np.sum(embed(ids, table) * r))

        analytic = {"table": embed_backward(ids, r)}
        tensors = {"table": table}

    else:
        raise UnknownOp(f"no gradient check registered for {op_name!r}")

    per_tensor = {}
    for name, tensor in tensors.items():
        numeric = _central_diff(loss_fn, tensor, eps)
        per_tensor[name] = _relative_errors(np.asarray(analytic[name]), numeric)
    return GradCheckReport(op_name, per_tensor)


GRAD_CHECK_OPS = ("embed", "ln_lstm_step", "attention_weights")


# --- parameter fixtures ---------------------------------------------------------

def save_lstm_params(params: LnLstmParams, directory: str | Path) -> None:
    """One RSLF matrix per tensor, for cross-implementation fixtures."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, tensor in params.tensors().items():
        rslf.write_matrix(np.atleast_2d(tensor), directory / f"{name}.rslf")


def load_lstm_params(directory: str | Path) -> LnLstmParams:
    directory = Path(directory)
    arrays = {}
    for name in ("w_x", "w_h", "bias", "gamma_gates", "beta_gates",
                 "gamma_cell", "beta_cell"):
        m = rslf.read_matrix(directory / f"{name}.rslf")
        arrays[name] = m if name in ("w_x", "w_h") else m.reshape(-1)
    return LnLstmParams(**arrays)

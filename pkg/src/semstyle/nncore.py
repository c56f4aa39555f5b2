"""Small dense neural-network kernel with explicit gradients.

Parameters live in plain ``dict[str, np.ndarray]`` containers. Each layer is a
forward function that returns ``(output, cache)`` and a backward function that
takes the upstream gradient and the cache. Training uses float32; gradient
checks run the same code on float64 copies (reference mode).
"""

from dataclasses import dataclass, field

import numpy as np

INIT_SCALE = 0.08


class ShapeError(ValueError):
    pass


class NumericError(FloatingPointError):
    pass


def uniform_init(rng, shape, dtype=np.float32, scale=INIT_SCALE):
    return rng.uniform(-scale, scale, size=shape).astype(dtype)


def sigmoid(x):
    # split by sign to avoid overflow in exp
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def astype(params, dtype):
    return {k: v.astype(dtype) for k, v in params.items()}


def zeros_like(params):
    return {k: np.zeros_like(v) for k, v in params.items()}


def accumulate(total, grads):
    for k, g in grads.items():
        total[k] += g
    return total


# --------------------------------------------------------------------------
# dense / embedding

def dense_forward(x, W, b):
    if x.shape[-1] != W.shape[0]:
        raise ShapeError(f"input width {x.shape[-1]} != weight rows {W.shape[0]}")
    return x @ W + b, x


def dense_backward(dy, x, W):
    """Returns (dx, dW, db) for y = x @ W + b over a leading batch axis."""
    return dy @ W.T, x.T @ dy, dy.sum(axis=0)


def embedding_forward(E, ids):
    ids = np.asarray(ids)
    if ids.size and (ids.min() < 0 or ids.max() >= E.shape[0]):
        raise ShapeError(f"id out of range for table with {E.shape[0]} rows")
    return E[ids]


def embedding_backward(dE, ids, dout):
    """Scatter-add ``dout`` rows into ``dE`` (in index order)."""
    np.add.at(dE, np.asarray(ids), dout)
    return dE


# --------------------------------------------------------------------------
# GRU

def init_gru(rng, input_dim, hidden_dim, prefix, dtype=np.float32):
    """Gates are packed [update z | reset r | candidate n] along the last axis."""
    return {
        prefix + "W": uniform_init(rng, (input_dim, 3 * hidden_dim), dtype),
        prefix + "U": uniform_init(rng, (hidden_dim, 3 * hidden_dim), dtype),
        prefix + "b": np.zeros(3 * hidden_dim, dtype=dtype),
    }


def gru_step(W, U, b, x, h_prev):
    """One GRU step; returns (h, cache).

    z = sigmoid(x W_z + h U_z + b_z)
    r = sigmoid(x W_r + h U_r + b_r)
    n = tanh(x W_n + (r * h) U_n + b_n)
    h' = z * h + (1 - z) * n
    """
    H = h_prev.shape[-1]
    if W.shape[1] != 3 * H or U.shape != (H, 3 * H) or x.shape[-1] != W.shape[0]:
        raise ShapeError(f"GRU shapes W{W.shape} U{U.shape} x{x.shape} h{h_prev.shape}")
    xw = x @ W + b
    hu = h_prev @ U[:, :2 * H]
    z = sigmoid(xw[..., :H] + hu[..., :H])
    r = sigmoid(xw[..., H:2 * H] + hu[..., H:])
    rh = r * h_prev
    n = np.tanh(xw[..., 2 * H:] + rh @ U[:, 2 * H:])
    h = z * h_prev + (1.0 - z) * n
    return h, (x, h_prev, z, r, rh, n)


def gru_step_backward(dh, cache, W, U, grads, prefix):
    """Backprop one step. Accumulates into grads[prefix+W/U/b]; returns (dx, dh_prev)."""
    x, h_prev, z, r, rh, n = cache
    H = h_prev.shape[-1]
    dz = dh * (h_prev - n)
    dn = dh * (1.0 - z)
    dh_prev = dh * z
    da_n = dn * (1.0 - n * n)
    Un = U[:, 2 * H:]
    drh = da_n @ Un.T
    dr = drh * h_prev
    dh_prev = dh_prev + drh * r
    da_r = dr * r * (1.0 - r)
    da_z = dz * z * (1.0 - z)
    da = np.concatenate([da_z, da_r, da_n], axis=-1)
    dh_prev = dh_prev + da_z @ U[:, :H].T + da_r @ U[:, H:2 * H].T
    grads[prefix + "W"] += x.T @ da
    grads[prefix + "b"] += da.sum(axis=0)
    dU = grads[prefix + "U"]
    dU[:, :H] += h_prev.T @ da_z
    dU[:, H:2 * H] += h_prev.T @ da_r
    dU[:, 2 * H:] += rh.T @ da_n
    return da @ W.T, dh_prev


def gru_sequence(params, prefix, X, mask, h0, reverse=False):
    """Run a GRU over X (B, T, D). Positions where mask == 0 carry the state through.

    Returns (H_all (B, T, hidden), caches).
    """
    W, U, b = params[prefix + "W"], params[prefix + "U"], params[prefix + "b"]
    B, T, _ = X.shape
    h = h0
    outs = [None] * T
    caches = [None] * T
    steps = range(T - 1, -1, -1) if reverse else range(T)
    for t in steps:
        h_new, cache = gru_step(W, U, b, X[:, t], h)
        m = mask[:, t:t + 1]
        h = m * h_new + (1.0 - m) * h
        outs[t] = h
        caches[t] = cache
    return np.stack(outs, axis=1), caches


def gru_sequence_backward(params, prefix, dH, mask, caches, grads, dh_end=None, reverse=False):
    """Backprop through gru_sequence. dH: (B, T, hidden) gradient on every output.

    ``dh_end`` is an extra gradient on the final carried state. Returns (dX, dh0).
    """
    W, U = params[prefix + "W"], params[prefix + "U"]
    B, T, Hd = dH.shape
    dX = np.zeros((B, T, W.shape[0]), dtype=dH.dtype)
    dh = np.zeros((B, Hd), dtype=dH.dtype) if dh_end is None else dh_end.copy()
    steps = range(T) if reverse else range(T - 1, -1, -1)
    for t in steps:
        dh = dh + dH[:, t]
        m = mask[:, t:t + 1]
        dx, dh_prev = gru_step_backward(m * dh, caches[t], W, U, grads, prefix)
        dX[:, t] = dx
        dh = dh_prev + (1.0 - m) * dh
    return dX, dh


# --------------------------------------------------------------------------
# softmax / loss

def softmax(logits, axis=-1):
    shifted = logits - logits.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def log_softmax(logits, axis=-1):
    shifted = logits - logits.max(axis=axis, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=axis, keepdims=True))


def softmax_cross_entropy(logits, target):
    """Loss and probabilities for a single logit vector and class id.

    Returns (loss, probs); the gradient w.r.t. logits is ``probs - onehot``.
    """
    logits = np.asarray(logits)
    if logits.size == 0:
        raise ShapeError("empty logits")
    if not 0 <= target < logits.shape[-1]:
        raise ShapeError(f"target {target} outside [0, {logits.shape[-1]})")
    logp = log_softmax(logits)
    return float(-logp[target]), np.exp(logp)


def batch_cross_entropy(logits, targets):
    """Per-row loss and d(loss_row)/d(logits) for logits (N, V), targets (N,)."""
    logp = log_softmax(logits)
    rows = np.arange(len(targets))
    loss = -logp[rows, targets]
    dlogits = np.exp(logp)
    dlogits[rows, targets] -= 1.0
    return loss, dlogits


def sequence_loss(logits, targets, mask):
    """Mean per-sequence cross entropy averaged over the batch.

    logits: (B, T, V), targets/mask: (B, T). Each sequence contributes the mean
    of its own token losses, then sequences are averaged. Returns (loss, dlogits).
    """
    B, T, V = logits.shape
    lens = mask.sum(axis=1)
    if np.any(lens == 0):
        raise ShapeError("sequence with no scored positions")
    if targets.size and (targets.min() < 0 or targets.max() >= V):
        raise ShapeError(f"target id outside [0, {V})")
    tok_loss, d = batch_cross_entropy(logits.reshape(-1, V), targets.reshape(-1))
    w = (mask / lens[:, None] / B).reshape(-1)
    loss = float((tok_loss * w).sum())
    return loss, (d * w[:, None]).reshape(B, T, V).astype(logits.dtype)


# --------------------------------------------------------------------------
# attention

def attention_forward(Wa, enc, enc_mask, h_dec):
    """Bilinear attention: v_i = enc_i^T Wa h_dec, a = softmax(v), c = sum_i a_i enc_i.

    enc: (B, L, De), enc_mask: (B, L) with 1 for real positions, Wa: (De, Dd).
    h_dec is (B, Dd) for a single step or (B, T, Dd) for all decoder steps at
    once. Returns (a, c, cache) with a: (B, [T,] L), c: (B, [T,] De).
    """
    single = h_dec.ndim == 2
    hd = h_dec[:, None] if single else h_dec
    q = hd @ Wa.T
    v = np.einsum("bld,btd->btl", enc, q)
    valid = (enc_mask > 0)[:, None, :]
    v = np.where(valid, v, -np.inf)
    v = v - v.max(axis=2, keepdims=True)
    e = np.where(valid, np.exp(v), 0.0)
    a = e / e.sum(axis=2, keepdims=True)
    c = np.einsum("btl,bld->btd", a, enc)
    cache = (q, a, enc, hd, single)
    if single:
        return a[:, 0], c[:, 0], cache
    return a, c, cache


def attention_backward(dc, cache, Wa):
    """Returns (d_enc, d_h_dec, dWa); d_h_dec matches the shape given to forward."""
    q, a, enc, hd, single = cache
    if single:
        dc = dc[:, None]
    da = np.einsum("btd,bld->btl", dc, enc)
    d_enc = np.einsum("btl,btd->bld", a, dc)
    dv = a * (da - (a * da).sum(axis=2, keepdims=True))
    d_enc += np.einsum("btl,btd->bld", dv, q)
    dq = np.einsum("btl,bld->btd", dv, enc)
    d_hd = dq @ Wa
    dWa = np.einsum("btd,bte->de", dq, hd)
    return d_enc, (d_hd[:, 0] if single else d_hd), dWa


# --------------------------------------------------------------------------
# dropout

def dropout(x, rate, rng, train=True):
    """Inverted dropout. Returns (y, mask); mask is None when inactive."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not train or rate == 0.0:
        return x, None
    keep = (rng.random(x.shape) >= rate).astype(x.dtype) / (1.0 - rate)
    return x * keep, keep


# --------------------------------------------------------------------------
# optimizer

@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    clip: tuple = (-5.0, 5.0)
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_update(params, grads, state):
    """In-place Adam step with element-wise gradient value clipping."""
    state.step += 1
    t = state.step
    lo, hi = state.clip
    c1 = 1.0 - state.beta1 ** t
    c2 = 1.0 - state.beta2 ** t
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ShapeError(f"gradient shape {g.shape} != parameter {name} shape {p.shape}")
        g = np.clip(g, lo, hi)
        if name not in state.m:
            state.m[name] = np.zeros_like(p)
            state.v[name] = np.zeros_like(p)
        m, v = state.m[name], state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        step = (state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)).astype(p.dtype)
        p -= step
    return params, state


# --------------------------------------------------------------------------
# gradient checking

def grad_check(fn, params, epsilon=1e-5, n_samples=20, seed=0, atol=1e-8, names=None):
    """Compare analytic gradients to central differences.

    ``fn(params) -> (loss, grads)``. Up to ``n_samples`` coordinates per
    parameter are probed. Relative error is |a - n| / max(|a|, |n|, atol).
    Run on float64 parameters (reference mode) for meaningful results.
    Returns (max_relative_error, per-parameter maxima).
    """
    rng = np.random.default_rng(seed)
    loss, grads = fn(params)
    if not np.isfinite(loss):
        raise NumericError("non-finite loss at the check point")
    worst = {}
    for name in names or sorted(params):
        p = params[name]
        flat = p.reshape(-1)
        idx = rng.choice(flat.size, size=min(n_samples, flat.size), replace=False)
        errs = []
        for i in idx:
            old = flat[i]
            flat[i] = old + epsilon
            lp, _ = fn(params)
            flat[i] = old - epsilon
            lm, _ = fn(params)
            flat[i] = old
            if not (np.isfinite(lp) and np.isfinite(lm)):
                raise NumericError(f"non-finite loss while probing {name}[{i}]")
            num = (lp - lm) / (2 * epsilon)
            ana = grads[name].reshape(-1)[i]
            errs.append(abs(ana - num) / max(abs(ana), abs(num), atol))
        worst[name] = float(max(errs))
    return max(worst.values()), worst

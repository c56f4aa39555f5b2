"""Finite-difference checks for every layer and full model, on random small shapes.

All checks run in float64 (reference mode). Weights are drawn from
U(-0.7, 0.7) rather than the training init so gradients are large enough for
central differences to be informative. Relative errors use a denominator
floor of ATOL: below it, round-off in the central difference (about 1e-11
absolute) dominates and the relative figure stops measuring correctness.
"""

import numpy as np

from . import nncore as nn

SCALE = 0.7
ATOL = 1e-6


def _rand_params(params, rng):
    return {k: rng.uniform(-SCALE, SCALE, size=v.shape) for k, v in params.items()}


def check_dense(rng):
    B, i, o = rng.integers(1, 5), rng.integers(1, 7), rng.integers(1, 7)
    x = rng.normal(size=(B, i))
    w = rng.normal(size=(B, o))
    p = {"W": rng.normal(size=(i, o)), "b": rng.normal(size=o)}

    def fn(p):
        y, _ = nn.dense_forward(x, p["W"], p["b"])
        _, dW, db = nn.dense_backward(w, x, p["W"])
        return float((y * w).sum()), {"W": dW, "b": db}
    return nn.grad_check(fn, p, atol=ATOL)[0]


def check_embedding(rng):
    V, D = rng.integers(2, 8), rng.integers(1, 6)
    ids = rng.integers(0, V, size=rng.integers(1, 9))
    w = rng.normal(size=(len(ids), D))
    p = {"E": rng.normal(size=(V, D))}

    def fn(p):
        y = nn.embedding_forward(p["E"], ids)
        return float((y * w).sum()), {"E": nn.embedding_backward(np.zeros_like(p["E"]), ids, w)}
    return nn.grad_check(fn, p, atol=ATOL)[0]


def check_gru(rng):
    B, D, H, T = rng.integers(1, 4), rng.integers(1, 5), rng.integers(1, 6), rng.integers(1, 5)
    p = _rand_params(nn.init_gru(rng, D, H, "g_", np.float64), rng)
    p["h0"] = rng.normal(size=(B, H))
    X = rng.normal(size=(B, T, D))
    mask = np.ones((B, T))
    mask[0, T - 1:] = 0.0 if T > 1 else 1.0
    w = rng.normal(size=(B, T, H))

    def fn(p):
        Hs, caches = nn.gru_sequence(p, "g_", X, mask, p["h0"])
        g = {k: np.zeros_like(v) for k, v in p.items()}
        _, dh0 = nn.gru_sequence_backward(p, "g_", w, mask, caches, g)
        g["h0"] = dh0
        return float((Hs * w).sum()), g
    return nn.grad_check(fn, p, atol=ATOL)[0]


def check_attention(rng):
    B, L, De, Dd, T = (rng.integers(1, 4), rng.integers(1, 6), rng.integers(1, 5),
                       rng.integers(1, 5), rng.integers(1, 4))
    mask = np.ones((B, L))
    if L > 1:
        mask[0, L - 1] = 0.0
    p = {"Wa": rng.normal(size=(De, Dd)), "enc": rng.normal(size=(B, L, De)),
         "h": rng.normal(size=(B, T, Dd))}
    w = rng.normal(size=(B, T, De))

    def fn(p):
        _, c, cache = nn.attention_forward(p["Wa"], p["enc"], mask, p["h"])
        d_enc, dh, dWa = nn.attention_backward(w, cache, p["Wa"])
        return float((c * w).sum()), {"Wa": dWa, "enc": d_enc, "h": dh}
    return nn.grad_check(fn, p, atol=ATOL)[0]


def check_output_head(rng):
    B, T, D, V = rng.integers(1, 4), rng.integers(1, 4), rng.integers(1, 5), rng.integers(2, 8)
    X = rng.normal(size=(B, T, D))
    tgt = rng.integers(0, V, size=(B, T))
    mask = np.ones((B, T))
    mask[:, 0] = 1.0
    if T > 1:
        mask[0, T - 1] = 0.0
    p = {"W": rng.normal(size=(D, V)), "b": rng.normal(size=V)}

    def fn(p):
        logits = X @ p["W"] + p["b"]
        loss, d = nn.sequence_loss(logits, tgt, mask)
        return loss, {"W": X.reshape(-1, D).T @ d.reshape(-1, V), "b": d.reshape(-1, V).sum(0)}
    return nn.grad_check(fn, p, atol=ATOL)[0]


def _random_seqs(rng, n, vocab, lo, hi, bos=2, eos=3):
    return [[bos, *rng.integers(4, vocab, size=rng.integers(lo, hi)).tolist(), eos] for _ in range(n)]


def check_termgen(rng):
    from .termgen import TermGenConfig, TermGenModel, loss_and_grads
    cfg = TermGenConfig(vocab_size=int(rng.integers(6, 10)), feature_dim=int(rng.integers(2, 6)),
                        embed_dim=int(rng.integers(2, 5)), hidden_dim=int(rng.integers(2, 5)),
                        dropout=0.0, image_as_h0=bool(rng.integers(2)),
                        projection=("tanh", "linear")[rng.integers(2)])
    p = _rand_params(TermGenModel.init(cfg, dtype=np.float64).params, rng)
    B = int(rng.integers(1, 4))
    f = rng.normal(size=(B, cfg.feature_dim))
    seqs = _random_seqs(rng, B, cfg.vocab_size, 0, 4)
    return nn.grad_check(lambda p: loss_and_grads(p, cfg, f, seqs), p, atol=ATOL)[0]


def check_langgen(rng):
    from .langgen import LangGenConfig, LangGenModel, loss_and_grads
    cfg = LangGenConfig(in_vocab=int(rng.integers(6, 10)), out_vocab=int(rng.integers(6, 10)),
                        embed_dim=int(rng.integers(2, 5)), word_dim=int(rng.integers(2, 5)),
                        enc_hidden=int(rng.integers(2, 4)), dropout=0.0,
                        dec_init=("last", "ends")[rng.integers(2)])
    p = _rand_params(LangGenModel.init(cfg, dtype=np.float64).params, rng)
    B = int(rng.integers(1, 4))
    src = [rng.integers(4, cfg.in_vocab, size=rng.integers(1, 5)).tolist() for _ in range(B)]
    tgt = _random_seqs(rng, B, cfg.out_vocab, 0, 5)
    return nn.grad_check(lambda p: loss_and_grads(p, cfg, src, tgt)[:2], p, atol=ATOL)[0]


def check_grulm(rng):
    from .styleval.grulm import GruLm, GruLmConfig, loss_and_grads
    cfg = GruLmConfig(int(rng.integers(6, 10)), int(rng.integers(2, 5)), int(rng.integers(2, 5)), 0.0)
    p = _rand_params(GruLm.init(cfg, dtype=np.float64).params, rng)
    seqs = _random_seqs(rng, int(rng.integers(1, 4)), cfg.vocab_size, 0, 5)
    return nn.grad_check(lambda p: loss_and_grads(p, cfg, seqs), p, atol=ATOL)[0]


CHECKS = {
    "dense": check_dense,
    "embedding": check_embedding,
    "gru": check_gru,
    "attention": check_attention,
    "output_head": check_output_head,
    "termgen": check_termgen,
    "langgen": check_langgen,
    "grulm": check_grulm,
}


def run_suite(n_shapes=5, seed=0, names=None):
    """Yield (check name, worst relative error over ``n_shapes`` random shapes)."""
    for i, name in enumerate(names or CHECKS):
        rng = np.random.default_rng([seed, i])
        yield name, max(CHECKS[name](rng) for _ in range(n_shapes))

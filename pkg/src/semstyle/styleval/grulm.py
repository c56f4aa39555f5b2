"""GRU language model: the language generator's decoder without attention."""

from dataclasses import dataclass

import numpy as np

from .. import nncore as nn
from ..corpus import CorpusError, build_vocab
from ..termgen import pad_sequences


@dataclass(frozen=True)
class GruLmConfig:
    vocab_size: int
    embed_dim: int = 512
    hidden_dim: int = 512
    dropout: float = 0.5


class GruLm:
    kind = "grulm"

    def __init__(self, cfg, params, vocab=None):
        self.cfg = cfg
        self.params = params
        self.vocab = vocab

    @classmethod
    def init(cls, cfg, seed=0, vocab=None, dtype=np.float32):
        rng = np.random.default_rng(seed)
        p = {"E": nn.uniform_init(rng, (cfg.vocab_size, cfg.embed_dim), dtype)}
        p.update(nn.init_gru(rng, cfg.embed_dim, cfg.hidden_dim, "gru_", dtype))
        p["out_W"] = nn.uniform_init(rng, (cfg.hidden_dim, cfg.vocab_size), dtype)
        p["out_b"] = np.zeros(cfg.vocab_size, dtype=dtype)
        return cls(cfg, p, vocab)

    def framed(self, tokens):
        v = self.vocab
        return [v.bos, *v.encode(tokens), v.eos]

    def token_logprobs(self, tokens):
        """log2 p of every word and the final EOS, given the preceding words."""
        seq = self.framed(tokens)
        logits, _ = _forward(self.params, self.cfg, [seq])
        logp = nn.log_softmax(logits[0].astype(np.float64))
        return logp[np.arange(len(seq) - 1), seq[1:]] / np.log(2.0)


def _forward(params, cfg, seqs, train=False, rng=None):
    dtype = params["E"].dtype
    ids, mask = pad_sequences(seqs)
    mask = mask.astype(dtype)
    inp, m = ids[:, :-1], mask[:, 1:]
    emb = nn.embedding_forward(params["E"], inp)
    emb_d, keep = nn.dropout(emb, cfg.dropout, rng, train)
    h0 = np.zeros((len(seqs), cfg.hidden_dim), dtype=dtype)
    H, caches = nn.gru_sequence(params, "gru_", emb_d, m, h0)
    logits = H @ params["out_W"] + params["out_b"]
    return logits, (ids, m, inp, H, caches, keep)


def loss_and_grads(params, cfg, seqs, train=False, rng=None):
    """Mean next-token cross entropy over BOS ... EOS sequences."""
    logits, (ids, m, inp, H, caches, keep) = _forward(params, cfg, seqs, train, rng)
    loss, dlogits = nn.sequence_loss(logits, ids[:, 1:], m)
    g = nn.zeros_like(params)
    V, Hd = dlogits.shape[-1], H.shape[-1]
    g["out_W"] += H.reshape(-1, Hd).T @ dlogits.reshape(-1, V)
    g["out_b"] += dlogits.reshape(-1, V).sum(axis=0)
    dX, _ = nn.gru_sequence_backward(params, "gru_", dlogits @ params["out_W"].T, m, caches, g)
    if keep is not None:
        dX = dX * keep
    dX = dX * m[:, :, None]
    nn.embedding_backward(g["E"], inp.reshape(-1), dX.reshape(-1, dX.shape[-1]))
    return loss, g


def train_gru_lm(sentences, cfg, vocab=None, min_count=2):
    """Train on tokenized sentences with a TrainConfig (lr, batch, epochs, seed...).

    Without an explicit vocabulary, tokens seen fewer than ``min_count`` times
    are folded into UNK.
    """
    sentences = [list(s) for s in sentences]
    if not sentences:
        raise CorpusError("empty language-model corpus")
    if vocab is None:
        vocab = build_vocab((w for s in sentences for w in s), cfg.word_vocab_cap, min_count)
    mcfg = GruLmConfig(len(vocab), cfg.embed_dim, cfg.hidden_dim, cfg.dropout)
    model = GruLm.init(mcfg, seed=cfg.seed, vocab=vocab)
    seqs = [model.framed(s) for s in sentences]
    state = nn.AdamState(lr=cfg.lr, clip=cfg.clip)
    drop_rng = np.random.default_rng([cfg.seed, 1])
    model.losses = []
    steps = 0
    for epoch in range(cfg.epochs):
        order = np.random.default_rng([cfg.seed, epoch]).permutation(len(seqs))
        total = 0.0
        for start in range(0, len(seqs), cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            loss, g = loss_and_grads(model.params, mcfg, [seqs[i] for i in idx], True, drop_rng)
            if not np.isfinite(loss):
                raise nn.NumericError(f"non-finite loss at epoch {epoch}")
            nn.adam_update(model.params, g, state)
            total += loss * len(idx)
            steps += 1
            if cfg.max_steps and steps >= cfg.max_steps:
                break
        model.losses.append(total / len(seqs))
        if cfg.max_steps and steps >= cfg.max_steps:
            break
    return model


"""Image feature -> ordered semantic terms.

A dense projection of the image feature is fed to a GRU at the first timestep
(h0 = 0); afterwards the previous term is fed back. With ``image_as_h0`` the
projection instead becomes the initial hidden state and decoding starts from
BOS directly.
"""

from dataclasses import dataclass

import numpy as np

from . import nncore as nn
from .termpipe.terms import TermSequence, parse_term


@dataclass(frozen=True)
class TermGenConfig:
    vocab_size: int
    feature_dim: int = 2048
    embed_dim: int = 512
    hidden_dim: int = 512
    projection: str = "tanh"  # or "linear"
    image_as_h0: bool = False
    dropout: float = 0.5
    max_len: int = 20

    def __post_init__(self):
        if self.projection not in ("tanh", "linear"):
            raise ValueError(f"projection must be 'tanh' or 'linear', got {self.projection!r}")
        if min(self.vocab_size, self.feature_dim, self.embed_dim, self.hidden_dim) < 1:
            raise ValueError("dimensions must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")


class TermGenModel:
    kind = "termgen"

    def __init__(self, cfg, params, vocab=None):
        self.cfg = cfg
        self.params = params
        self.vocab = vocab

    @classmethod
    def init(cls, cfg, seed=0, vocab=None, dtype=np.float32):
        rng = np.random.default_rng(seed)
        proj_out = cfg.hidden_dim if cfg.image_as_h0 else cfg.embed_dim
        p = {
            "proj_W": nn.uniform_init(rng, (cfg.feature_dim, proj_out), dtype),
            "proj_b": np.zeros(proj_out, dtype=dtype),
            "E": nn.uniform_init(rng, (cfg.vocab_size, cfg.embed_dim), dtype),
        }
        p.update(nn.init_gru(rng, cfg.embed_dim, cfg.hidden_dim, "gru_", dtype))
        p["out_W"] = nn.uniform_init(rng, (cfg.hidden_dim, cfg.vocab_size), dtype)
        p["out_b"] = np.zeros(cfg.vocab_size, dtype=dtype)
        return cls(cfg, p, vocab)

    # ids of the framing tokens; vocabularies built by corpus.build_vocab use 2/3
    @property
    def bos(self):
        return self.vocab.bos if self.vocab is not None else 2

    @property
    def eos(self):
        return self.vocab.eos if self.vocab is not None else 3


def _project(params, cfg, feats):
    a = feats @ params["proj_W"] + params["proj_b"]
    return np.tanh(a) if cfg.projection == "tanh" else a


def pad_sequences(seqs, pad=0):
    """Right-pad id lists into (ids, mask) arrays."""
    T = max(len(s) for s in seqs)
    ids = np.full((len(seqs), T), pad, dtype=np.int64)
    mask = np.zeros((len(seqs), T))
    for i, s in enumerate(seqs):
        ids[i, :len(s)] = s
        mask[i, :len(s)] = 1.0
    return ids, mask


def loss_and_grads(params, cfg, feats, framed, train=False, rng=None):
    """Teacher-forced mean cross entropy and its gradient.

    ``framed`` is a list of BOS ... EOS id sequences, one per feature row.
    Each sequence contributes the mean loss over its M+1 predictions.
    """
    dtype = params["E"].dtype
    feats = np.asarray(feats, dtype=dtype)
    if feats.ndim == 1:
        feats = feats[None]
    ids, mask = pad_sequences(framed)
    mask = mask.astype(dtype)
    inp, tgt, m = ids[:, :-1], ids[:, 1:], mask[:, 1:]
    B, T = inp.shape
    Hd = cfg.hidden_dim

    proj = _project(params, cfg, feats)
    proj_d, proj_keep = nn.dropout(proj, cfg.dropout, rng, train)
    emb = nn.embedding_forward(params["E"], inp)
    emb_d, emb_keep = nn.dropout(emb, cfg.dropout, rng, train)

    if cfg.image_as_h0:
        X, xmask, h0 = emb_d, m, proj_d
    else:
        X = np.concatenate([proj_d[:, None], emb_d], axis=1)
        xmask = np.concatenate([np.ones((B, 1), dtype=dtype), m], axis=1)
        h0 = np.zeros((B, Hd), dtype=dtype)
    H, caches = nn.gru_sequence(params, "gru_", X, xmask, h0)
    Hout = H if cfg.image_as_h0 else H[:, 1:]
    logits = Hout @ params["out_W"] + params["out_b"]
    loss, dlogits = nn.sequence_loss(logits, tgt, m)

    g = nn.zeros_like(params)
    flat = dlogits.reshape(-1, dlogits.shape[-1])
    g["out_W"] += Hout.reshape(-1, Hd).T @ flat
    g["out_b"] += flat.sum(axis=0)
    dHout = dlogits @ params["out_W"].T
    dH = dHout if cfg.image_as_h0 else np.concatenate([np.zeros((B, 1, Hd), dtype=dtype), dHout], axis=1)
    dX, dh0 = nn.gru_sequence_backward(params, "gru_", dH, xmask, caches, g)
    if cfg.image_as_h0:
        demb, dproj = dX, dh0
    else:
        demb, dproj = dX[:, 1:], dX[:, 0]
    if emb_keep is not None:
        demb = demb * emb_keep
    if proj_keep is not None:
        dproj = dproj * proj_keep
    nn.embedding_backward(g["E"], inp.reshape(-1), (demb * m[:, :, None]).reshape(-1, demb.shape[-1]))
    if cfg.projection == "tanh":
        dproj = dproj * (1.0 - proj * proj)
    g["proj_W"] += feats.T @ dproj
    g["proj_b"] += dproj.sum(axis=0)
    return loss, g


def termgen_forward(model, feature, teacher_ids):
    """Mean teacher-forced loss for one (feature, BOS...EOS ids) pair."""
    loss, _ = loss_and_grads(model.params, model.cfg, feature, [list(teacher_ids)])
    return loss


def _start_state(model, feature):
    p, cfg = model.params, model.cfg
    feat = np.asarray(feature, dtype=p["E"].dtype)[None]
    proj = _project(p, cfg, feat)
    if cfg.image_as_h0:
        return proj
    h, _ = nn.gru_step(p["gru_W"], p["gru_U"], p["gru_b"], proj, np.zeros((1, cfg.hidden_dim), dtype=proj.dtype))
    return h


def step_logits(model, feature, prefix_ids):
    """Output logits after feeding BOS + ``prefix_ids``; one row per step."""
    p = model.params
    h = _start_state(model, feature)
    rows = []
    for tok in [model.bos, *prefix_ids]:
        h, _ = nn.gru_step(p["gru_W"], p["gru_U"], p["gru_b"], p["E"][[tok]], h)
        rows.append((h @ p["out_W"] + p["out_b"])[0])
    return np.array(rows)


def decode_ids(model, feature, max_len=None):
    """Greedy decoding; ties go to the lowest id. Returns ids without BOS/EOS."""
    max_len = model.cfg.max_len if max_len is None else max_len
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    p = model.params
    h = _start_state(model, feature)
    tok, out = model.bos, []
    while len(out) < max_len:
        h, _ = nn.gru_step(p["gru_W"], p["gru_U"], p["gru_b"], p["E"][[tok]], h)
        logits = (h @ p["out_W"] + p["out_b"])[0]
        tok = int(np.argmax(logits))  # argmax returns the first maximum
        if tok == model.eos:
            break
        out.append(tok)
    return out


def termgen_decode(model, feature, max_len=None):
    ids = decode_ids(model, feature, max_len)
    if model.vocab is None:
        raise ValueError("model has no term vocabulary attached")
    terms = tuple(parse_term(t) for t in model.vocab.decode(ids))
    return TermSequence(terms, len(terms))

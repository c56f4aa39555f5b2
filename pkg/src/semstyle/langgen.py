"""Term sequence + style token -> sentence, with bilinear attention.

The encoder is a pair of GRUs running in opposite directions over the term
embeddings (style token appended last); encoder outputs are the concatenated
states. The decoder GRU starts from the concatenated state at the final input
position, attends over all encoder outputs each step, and predicts the next
word from [context, decoder state].
"""

from dataclasses import dataclass, field

import numpy as np

from . import nncore as nn
from .termgen import pad_sequences


@dataclass(frozen=True)
class LangGenConfig:
    in_vocab: int
    out_vocab: int
    embed_dim: int = 512
    word_dim: int = 512
    enc_hidden: int = 512
    dropout: float = 0.5
    max_len: int = 30
    # "last": [h_fwd, h_bak] at the final input position
    # "ends": [h_fwd at the final position, h_bak at the first position]
    dec_init: str = "last"
    attention: bool = True

    def __post_init__(self):
        if self.dec_init not in ("last", "ends"):
            raise ValueError(f"dec_init must be 'last' or 'ends', got {self.dec_init!r}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")

    @property
    def dec_hidden(self):
        return 2 * self.enc_hidden


@dataclass
class AttentionTrace:
    weights: list = field(default_factory=list)   # one (M+1,) array per step
    contexts: list = field(default_factory=list)  # one (2*enc_hidden,) array per step


class LangGenModel:
    kind = "langgen"

    def __init__(self, cfg, params, in_vocab=None, out_vocab=None):
        self.cfg = cfg
        self.params = params
        self.in_vocab = in_vocab
        self.out_vocab = out_vocab

    @classmethod
    def init(cls, cfg, seed=0, in_vocab=None, out_vocab=None, dtype=np.float32):
        rng = np.random.default_rng(seed)
        He, Hd = cfg.enc_hidden, cfg.dec_hidden
        p = {"E_in": nn.uniform_init(rng, (cfg.in_vocab, cfg.embed_dim), dtype)}
        p.update(nn.init_gru(rng, cfg.embed_dim, He, "fwd_", dtype))
        p.update(nn.init_gru(rng, cfg.embed_dim, He, "bak_", dtype))
        p["E_out"] = nn.uniform_init(rng, (cfg.out_vocab, cfg.word_dim), dtype)
        p.update(nn.init_gru(rng, cfg.word_dim, Hd, "dec_", dtype))
        p["Wa"] = nn.uniform_init(rng, (2 * He, Hd), dtype)
        p["out_W"] = nn.uniform_init(rng, (2 * He + Hd, cfg.out_vocab), dtype)
        p["out_b"] = np.zeros(cfg.out_vocab, dtype=dtype)
        return cls(cfg, p, in_vocab, out_vocab)

    def ids(self, name):
        v = self.out_vocab
        return {"bos": 2, "eos": 3, "unk": 1, "pad": 0}[name] if v is None else getattr(v, name)

    def style_id(self, style):
        """``style`` is an id or a style token string."""
        if isinstance(style, str):
            return self.in_vocab.id_of[style]
        return int(style)


# --------------------------------------------------------------------------
# encoder

def _encode(params, cfg, src, smask, train=False, rng=None):
    """src: (B, L) padded ids with the style token already appended."""
    B, L = src.shape
    He = cfg.enc_hidden
    dtype = params["E_in"].dtype
    emb = nn.embedding_forward(params["E_in"], src)
    emb_d, keep = nn.dropout(emb, cfg.dropout, rng, train)
    zero = np.zeros((B, He), dtype=dtype)
    Hf, cf = nn.gru_sequence(params, "fwd_", emb_d, smask, zero)
    Hb, cb = nn.gru_sequence(params, "bak_", emb_d, smask, zero, reverse=True)
    enc = np.concatenate([Hf, Hb], axis=2)
    last = smask.sum(axis=1).astype(np.int64) - 1
    rows = np.arange(B)
    if cfg.dec_init == "last":
        h0 = np.concatenate([Hf[rows, last], Hb[rows, last]], axis=1)
    else:
        h0 = np.concatenate([Hf[rows, last], Hb[:, 0]], axis=1)
    return enc, h0, (emb_d, keep, cf, cb, last)


def _encode_backward(params, cfg, src, smask, d_enc, dh0, cache, g):
    emb_d, keep, cf, cb, last = cache
    He = cfg.enc_hidden
    B = src.shape[0]
    rows = np.arange(B)
    dHf = d_enc[:, :, :He].copy()
    dHb = d_enc[:, :, He:].copy()
    dHf[rows, last] += dh0[:, :He]
    if cfg.dec_init == "last":
        dHb[rows, last] += dh0[:, He:]
    else:
        dHb[:, 0] += dh0[:, He:]
    dXf, _ = nn.gru_sequence_backward(params, "fwd_", dHf, smask, cf, g)
    dXb, _ = nn.gru_sequence_backward(params, "bak_", dHb, smask, cb, g, reverse=True)
    dX = dXf + dXb
    if keep is not None:
        dX = dX * keep
    dX = dX * smask[:, :, None]
    nn.embedding_backward(g["E_in"], src.reshape(-1), dX.reshape(-1, dX.shape[-1]))


def frame_source(term_ids, style_id):
    """Append the style token (exactly once, last)."""
    return list(term_ids) + [style_id]


def encode(model, term_ids, style):
    """Encoder outputs (M+1, 2*enc_hidden) and the decoder's initial state."""
    src = np.array([frame_source(term_ids, model.style_id(style))], dtype=np.int64)
    smask = np.ones(src.shape, dtype=model.params["E_in"].dtype)
    enc, h0, _ = _encode(model.params, model.cfg, src, smask)
    return enc[0], h0[0]


def attend(Wa, enc, h_dec):
    """Attention weights and context for one decoder state over (L, De) outputs."""
    mask = np.ones((1, enc.shape[0]))
    a, c, _ = nn.attention_forward(Wa, enc[None], mask, h_dec[None])
    return a[0], c[0]


# --------------------------------------------------------------------------
# loss

def loss_and_grads(params, cfg, sources, targets, train=False, rng=None):
    """Teacher-forced mean cross entropy.

    ``sources``: term id lists with the style token appended.
    ``targets``: BOS ... EOS word id lists.
    Returns (loss, grads, attention weights (B, T, L)).
    """
    dtype = params["E_in"].dtype
    src, smask = pad_sequences(sources)
    smask = smask.astype(dtype)
    tids, tmask = pad_sequences(targets)
    tmask = tmask.astype(dtype)
    inp, tgt, m = tids[:, :-1], tids[:, 1:], tmask[:, 1:]
    B, T = inp.shape

    enc, h0, enc_cache = _encode(params, cfg, src, smask, train, rng)
    wemb = nn.embedding_forward(params["E_out"], inp)
    wemb_d, wkeep = nn.dropout(wemb, cfg.dropout, rng, train)
    Hdec, dcache = nn.gru_sequence(params, "dec_", wemb_d, m, h0)
    if cfg.attention:
        a, c, acache = nn.attention_forward(params["Wa"], enc, smask, Hdec)
    else:
        a, c = None, np.zeros((B, T, enc.shape[2]), dtype=dtype)
    feat = np.concatenate([c, Hdec], axis=2)
    logits = feat @ params["out_W"] + params["out_b"]
    loss, dlogits = nn.sequence_loss(logits, tgt, m)

    g = nn.zeros_like(params)
    V = dlogits.shape[-1]
    g["out_W"] += feat.reshape(-1, feat.shape[-1]).T @ dlogits.reshape(-1, V)
    g["out_b"] += dlogits.reshape(-1, V).sum(axis=0)
    dfeat = dlogits @ params["out_W"].T
    De = enc.shape[2]
    dc, dHdec = dfeat[:, :, :De], dfeat[:, :, De:]
    if cfg.attention:
        d_enc, dH_att, dWa = nn.attention_backward(dc, acache, params["Wa"])
        dHdec = dHdec + dH_att
        g["Wa"] += dWa
    else:
        d_enc = np.zeros_like(enc)
    dX, dh0 = nn.gru_sequence_backward(params, "dec_", dHdec, m, dcache, g)
    if wkeep is not None:
        dX = dX * wkeep
    dX = dX * m[:, :, None]
    nn.embedding_backward(g["E_out"], inp.reshape(-1), dX.reshape(-1, dX.shape[-1]))
    _encode_backward(params, cfg, src, smask, d_enc, dh0, enc_cache, g)
    return loss, g, a


def langgen_loss(model, term_ids, style, target_ids):
    """Mean loss for a single pair plus its AttentionTrace."""
    src = frame_source(term_ids, model.style_id(style))
    loss, _, a = loss_and_grads(model.params, model.cfg, [src], [list(target_ids)])
    trace = AttentionTrace()
    if a is not None:
        trace.weights = list(a[0, :len(target_ids) - 1])
    return loss, trace


# --------------------------------------------------------------------------
# generation

def generate_batch(model, term_lists, styles, max_len=None, with_trace=False):
    """Greedy decoding for several inputs at once.

    UNK, PAD and BOS are never emitted; argmax ties go to the lowest id.
    Returns (list of word-id lists, list of AttentionTrace or None).
    """
    cfg, p = model.cfg, model.params
    max_len = cfg.max_len if max_len is None else max_len
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if not isinstance(styles, (list, tuple)):
        styles = [styles] * len(term_lists)
    sources = [frame_source(t, model.style_id(s)) for t, s in zip(term_lists, styles)]
    dtype = p["E_in"].dtype
    src, smask = pad_sequences(sources)
    smask = smask.astype(dtype)
    enc, h, _ = _encode(p, cfg, src, smask)
    B = len(sources)
    banned = [model.ids("unk"), model.ids("pad"), model.ids("bos")]
    eos = model.ids("eos")
    tok = np.full(B, model.ids("bos"), dtype=np.int64)
    outs = [[] for _ in range(B)]
    traces = [AttentionTrace() for _ in range(B)] if with_trace else None
    done = np.zeros(B, dtype=bool)
    for _ in range(max_len):
        h, _ = nn.gru_step(p["dec_W"], p["dec_U"], p["dec_b"], p["E_out"][tok], h)
        if cfg.attention:
            a, c, _ = nn.attention_forward(p["Wa"], enc, smask, h)
        else:
            a, c = None, np.zeros((B, enc.shape[2]), dtype=dtype)
        logits = np.concatenate([c, h], axis=1) @ p["out_W"] + p["out_b"]
        logits[:, banned] = -np.inf
        tok = np.argmax(logits, axis=1)
        for i in range(B):
            if done[i]:
                continue
            if with_trace and a is not None:
                traces[i].weights.append(a[i, :len(sources[i])].copy())
                traces[i].contexts.append(c[i].copy())
            if tok[i] == eos:
                done[i] = True
            else:
                outs[i].append(int(tok[i]))
        if done.all():
            break
    return outs, traces


def generate(model, term_ids, style, max_len=None):
    """Greedy decode one sentence; returns (word ids, AttentionTrace)."""
    outs, traces = generate_batch(model, [term_ids], [style], max_len, with_trace=True)
    return outs[0], traces[0]


def generate_text(model, terms, style, max_len=None):
    """Convenience wrapper over rendered term strings and vocabularies."""
    ids = model.in_vocab.encode(terms)
    out, _ = generate(model, ids, style, max_len)
    return " ".join(model.out_vocab.decode(out))

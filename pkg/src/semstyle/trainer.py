"""Training loops for the term and language generators, plus checkpoints.

Checkpoint layout::

    b"SEMSTYLE1" | uint32 LE manifest length | manifest (UTF-8 JSON) | float32 LE payload

The manifest records the format version, model kind, config, vocabularies and
the name/shape of every parameter in payload order.
"""

import json
import logging
import os
import struct
import tempfile
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import nncore as nn
from .corpus import STYLE_TOKENS, CorpusError, Vocabulary, build_vocab, make_epoch_batches
from .langgen import LangGenConfig, LangGenModel, frame_source
from .langgen import loss_and_grads as langgen_grads
from .termgen import TermGenConfig, TermGenModel
from .termgen import loss_and_grads as termgen_grads

log = logging.getLogger(__name__)

MAGIC = b"SEMSTYLE1"
FORMAT_VERSION = 1
MODES = ("joint", "cocoonly", "romonly")


@dataclass
class TrainConfig:
    lr: float = 1e-3
    batch_size: int = 128
    epochs: int = 50
    seed: int = 0
    clip: tuple = (-5.0, 5.0)
    dropout: float = 0.5
    mode: str = "joint"
    term_vocab_cap: int = 10000
    word_vocab_cap: int = 20000
    embed_dim: int = 512
    hidden_dim: int = 512
    patience: int = 3
    max_steps: int = 0  # 0: no cap
    feature_dim: int = 2048

    def __post_init__(self):
        self.clip = tuple(self.clip)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        for name in ("batch_size", "epochs", "term_vocab_cap", "word_vocab_cap",
                     "embed_dim", "hidden_dim", "patience", "feature_dim"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.lr < 0:
            raise ValueError("lr must be non-negative")
        if not self.clip[0] < self.clip[1]:
            raise ValueError("clip lower bound must be below the upper bound")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass
class EpochStats:
    epoch: int
    loss: float
    steps: int
    n_desc: int = 0
    n_styled: int = 0
    val_loss: float = float("nan")


@dataclass
class History:
    epochs: list = field(default_factory=list)

    @property
    def losses(self):
        return [e.loss for e in self.epochs]

    def rows(self):
        for e in self.epochs:
            yield f"{e.epoch}\t{e.loss:.6f}\t{e.val_loss:.6f}\t{e.steps}\t{e.n_desc}\t{e.n_styled}"


def _check_finite(loss, epoch, step):
    if not np.isfinite(loss):
        raise nn.NumericError(f"non-finite loss {loss} at epoch {epoch}, step {step}")


class _EarlyStop:
    def __init__(self, patience):
        self.patience, self.best, self.bad = patience, float("inf"), 0

    def update(self, val):
        if not np.isfinite(val):
            return False
        if val < self.best - 1e-9:
            self.best, self.bad = val, 0
            return False
        self.bad += 1
        return self.bad >= self.patience


# --------------------------------------------------------------------------
# term generator

def term_vocab_from(term_lists, cap):
    return build_vocab((t for ts in term_lists for t in ts), cap)


def train_termgen(features, term_lists, cfg, vocab=None, val=None, callback=None):
    """Fit a TermGenModel on (feature, rendered term list) pairs.

    ``val`` is an optional (features, term_lists) pair for early stopping.
    """
    if len(features) == 0:
        raise CorpusError("empty term-generator dataset")
    if len(features) != len(term_lists):
        raise CorpusError("features and term targets differ in length")
    vocab = vocab or term_vocab_from(term_lists, cfg.term_vocab_cap)
    mcfg = TermGenConfig(vocab_size=len(vocab), feature_dim=cfg.feature_dim,
                         embed_dim=cfg.embed_dim, hidden_dim=cfg.hidden_dim, dropout=cfg.dropout)
    model = TermGenModel.init(mcfg, seed=cfg.seed, vocab=vocab)
    feats = np.asarray(features, dtype=np.float32)
    framed = [[vocab.bos, *vocab.encode(ts), vocab.eos] for ts in term_lists]
    state = nn.AdamState(lr=cfg.lr, clip=cfg.clip)
    drop_rng = np.random.default_rng([cfg.seed, 1])
    stopper = _EarlyStop(cfg.patience)
    model.history = History()
    n, steps = len(framed), 0
    for epoch in range(cfg.epochs):
        order = np.random.default_rng([cfg.seed, epoch]).permutation(n)
        total, count = 0.0, 0
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            loss, g = termgen_grads(model.params, mcfg, feats[idx], [framed[i] for i in idx],
                                    train=True, rng=drop_rng)
            _check_finite(loss, epoch, steps)
            nn.adam_update(model.params, g, state)
            total += loss * len(idx)
            count += len(idx)
            steps += 1
            if cfg.max_steps and steps >= cfg.max_steps:
                break
        stats = EpochStats(epoch, total / count, steps)
        if val is not None:
            vf, vt = val
            vframed = [[vocab.bos, *vocab.encode(ts), vocab.eos] for ts in vt]
            stats.val_loss, _ = termgen_grads(model.params, mcfg, np.asarray(vf, np.float32), vframed)
        model.history.epochs.append(stats)
        if callback:
            callback(stats)
        if cfg.max_steps and steps >= cfg.max_steps:
            break
        if val is not None and stopper.update(stats.val_loss):
            break
    return model


# --------------------------------------------------------------------------
# language generator

def build_langgen_vocabs(pairs, cfg):
    """Input (term) and output (word) vocabularies over all training pairs."""
    in_vocab = build_vocab((t for terms, _ in pairs for t in terms), cfg.word_vocab_cap,
                           style_tokens=STYLE_TOKENS)
    out_vocab = build_vocab((w for _, words in pairs for w in words), cfg.word_vocab_cap)
    return in_vocab, out_vocab


def encode_pairs(pairs, style_token, in_vocab, out_vocab):
    style = in_vocab.id_of[style_token]
    src = [frame_source(in_vocab.encode(terms), style) for terms, _ in pairs]
    tgt = [[out_vocab.bos, *out_vocab.encode(words), out_vocab.eos] for _, words in pairs]
    return src, tgt


def train_langgen(desc_pairs, styled_pairs, cfg, vocabs=None, val=None, callback=None,
                  model_overrides=None):
    """Fit a LangGenModel on (term list, word list) pairs from two sources.

    Descriptive items get the first style token, styled items the second.
    ``joint`` mixes both sources half/half per batch; ``cocoonly`` and
    ``romonly`` train on one source only. ``val`` is an optional list of
    (source, target) id-sequence pairs for early stopping.
    """
    desc_pairs = list(desc_pairs) if cfg.mode != "romonly" else []
    styled_pairs = list(styled_pairs) if cfg.mode != "cocoonly" else []
    if cfg.mode == "joint" and (not desc_pairs or not styled_pairs):
        raise CorpusError("joint mode needs both descriptive and styled pairs")
    if not desc_pairs and not styled_pairs:
        raise CorpusError("no training pairs for mode " + cfg.mode)
    in_vocab, out_vocab = vocabs or build_langgen_vocabs(desc_pairs + styled_pairs, cfg)
    overrides = dict(model_overrides or {})
    mcfg = LangGenConfig(in_vocab=len(in_vocab), out_vocab=len(out_vocab),
                         embed_dim=cfg.embed_dim, word_dim=cfg.embed_dim,
                         enc_hidden=cfg.hidden_dim, dropout=cfg.dropout, **overrides)
    model = LangGenModel.init(mcfg, seed=cfg.seed, in_vocab=in_vocab, out_vocab=out_vocab)
    d_src, d_tgt = encode_pairs(desc_pairs, STYLE_TOKENS[0], in_vocab, out_vocab)
    s_src, s_tgt = encode_pairs(styled_pairs, STYLE_TOKENS[1], in_vocab, out_vocab)

    state = nn.AdamState(lr=cfg.lr, clip=cfg.clip)
    drop_rng = np.random.default_rng([cfg.seed, 1])
    stopper = _EarlyStop(cfg.patience)
    model.history = History()
    batch_mode = "mixed" if cfg.mode == "joint" else "single"
    steps, stop = 0, False
    for epoch in range(cfg.epochs):
        plan = make_epoch_batches(len(d_src), len(s_src), cfg.batch_size, batch_mode,
                                  seed=cfg.seed, epoch=epoch)
        total, count, nd, ns = 0.0, 0, 0, 0
        for d_idx, s_idx in plan.batches:
            src = [d_src[i] for i in d_idx] + [s_src[i] for i in s_idx]
            tgt = [d_tgt[i] for i in d_idx] + [s_tgt[i] for i in s_idx]
            loss, g, _ = langgen_grads(model.params, mcfg, src, tgt, train=True, rng=drop_rng)
            _check_finite(loss, epoch, steps)
            nn.adam_update(model.params, g, state)
            total += loss * len(src)
            count += len(src)
            nd += len(d_idx)
            ns += len(s_idx)
            steps += 1
            if cfg.max_steps and steps >= cfg.max_steps:
                stop = True
                break
        stats = EpochStats(epoch, total / count, steps, nd, ns)
        if val:
            vs, vt = zip(*val)
            stats.val_loss = langgen_grads(model.params, mcfg, list(vs), list(vt))[0]
        model.history.epochs.append(stats)
        if callback:
            callback(stats)
        if stop or (val and stopper.update(stats.val_loss)):
            break
    return model


# --------------------------------------------------------------------------
# checkpoints

class CheckpointError(Exception):
    """Base class for unreadable checkpoints."""


class BadMagicError(CheckpointError):
    pass


class VersionMismatchError(CheckpointError):
    pass


class PayloadLengthError(CheckpointError):
    pass


class ManifestError(CheckpointError):
    pass


def _registry():
    from .styleval.grulm import GruLm, GruLmConfig
    return {
        "termgen": (TermGenModel, TermGenConfig),
        "langgen": (LangGenModel, LangGenConfig),
        "grulm": (GruLm, GruLmConfig),
    }


def _vocabs_of(model):
    names = ("vocab", "in_vocab", "out_vocab")
    return {n: getattr(model, n).to_lines() for n in names if getattr(model, n, None) is not None}


def checkpoint_bytes(model):
    names = list(model.params)
    manifest = {
        "version": FORMAT_VERSION,
        "kind": model.kind,
        "config": asdict(model.cfg),
        "params": [[n, list(model.params[n].shape)] for n in names],
        "total": int(sum(model.params[n].size for n in names)),
        "vocabs": _vocabs_of(model),
    }
    head = json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode("utf-8")
    payload = b"".join(np.ascontiguousarray(model.params[n], dtype="<f4").tobytes() for n in names)
    return MAGIC + struct.pack("<I", len(head)) + head + payload


def save_checkpoint(model, path):
    """Atomic write: temp file in the target directory, then rename."""
    path = Path(path)
    data = checkpoint_bytes(model)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def load_checkpoint(path):
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e
    return checkpoint_from_bytes(data)


def checkpoint_from_bytes(data):
    if data[:len(MAGIC)] != MAGIC:
        raise BadMagicError(f"bad magic {data[:len(MAGIC)]!r}, expected {MAGIC!r}")
    off = len(MAGIC)
    if len(data) < off + 4:
        raise PayloadLengthError("file truncated inside the manifest length field")
    (n_head,) = struct.unpack("<I", data[off:off + 4])
    off += 4
    if len(data) < off + n_head:
        raise PayloadLengthError(f"file truncated inside the manifest ({len(data) - off} of {n_head} bytes)")
    try:
        manifest = json.loads(data[off:off + n_head].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ManifestError(f"unreadable manifest: {e}") from e
    if manifest.get("version") != FORMAT_VERSION:
        raise VersionMismatchError(
            f"checkpoint version {manifest.get('version')} != supported {FORMAT_VERSION}")
    off += n_head
    payload = data[off:]
    total = manifest["total"]
    if len(payload) != 4 * total:
        raise PayloadLengthError(f"payload has {len(payload)} bytes, manifest expects {4 * total}")
    shapes = manifest["params"]
    if sum(int(np.prod(s)) for _, s in shapes) != total:
        raise ManifestError("parameter shapes disagree with the manifest total")
    flat = np.frombuffer(payload, dtype="<f4")
    params, pos = {}, 0
    for name, shape in shapes:
        size = int(np.prod(shape))
        params[name] = flat[pos:pos + size].reshape(shape).astype(np.float32)
        pos += size
    registry = _registry()
    if manifest["kind"] not in registry:
        raise ManifestError(f"unknown model kind {manifest['kind']!r}")
    cls, cfg_cls = registry[manifest["kind"]]
    cfg_dict = manifest["config"]
    for k, v in cfg_dict.items():
        if isinstance(v, list):
            cfg_dict[k] = tuple(v)
    model = cls(cfg_cls(**cfg_dict), params)
    for name, lines in manifest["vocabs"].items():
        setattr(model, name, Vocabulary.from_lines(lines))
    return model

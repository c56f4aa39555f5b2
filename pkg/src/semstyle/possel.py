"""Data-driven word-class importance ranking.

A denoising language generator learns to rebuild a sentence from a random
subset of its words. Classes are then ranked by greedy forward selection:
each step tries every unranked class at the lowest and at the highest open
rank (unranked classes share the middle rank), removes words from the least
important end until the retention budget is met, and keeps the placement
with the lowest held-out reconstruction loss.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from . import nncore as nn
from .corpus import STYLE_TOKENS, CorpusError, build_vocab
from .langgen import LangGenConfig, LangGenModel, frame_source
from .langgen import loss_and_grads as langgen_grads

log = logging.getLogger(__name__)

TIE_BITS = 0.01


def retained_count(n, fraction):
    return max(1, int(round(fraction * n)))


def random_subset(words, keep_fraction, rng):
    """Order-preserving random subset of ``max(1, round(keep_fraction * n))`` words."""
    k = retained_count(len(words), keep_fraction)
    idx = np.sort(rng.choice(len(words), size=k, replace=False))
    return [words[i] for i in idx]


@dataclass
class DenoisingLm:
    model: LangGenModel
    drop: float
    losses: list = field(default_factory=list)

    def source(self, words):
        m = self.model
        return frame_source(m.in_vocab.encode(words), m.in_vocab.id_of[STYLE_TOKENS[0]])

    def target(self, words):
        v = self.model.out_vocab
        return [v.bos, *v.encode(words), v.eos]

    def reconstruction_bits(self, inputs, sentences, batch_size=256):
        """Mean per-token bits (EOS included) of ``sentences`` given ``inputs``."""
        total, n = 0.0, 0
        for s in range(0, len(sentences), batch_size):
            src = [self.source(w) for w in inputs[s:s + batch_size]]
            tgt = [self.target(w) for w in sentences[s:s + batch_size]]
            loss, _, _ = langgen_grads(self.model.params, self.model.cfg, src, tgt)
            total += loss * len(src)
            n += len(src)
        return total / n / np.log(2.0)


def train_denoising_lm(sentences, cfg, drop_fraction=0.66):
    """Train a seq2seq model to rebuild each sentence from a fresh random
    ``1 - drop_fraction`` share of its words every epoch.

    ``sentences`` are word lists (or (word, POS) lists); ``cfg`` is a TrainConfig.
    """
    sentences = [[w if isinstance(w, str) else w[0] for w in s] for s in sentences]
    sentences = [s for s in sentences if s]
    if not sentences:
        raise CorpusError("empty denoising corpus")
    if not 0.0 <= drop_fraction < 1.0:
        raise ValueError("drop_fraction must be in [0, 1)")
    words = [w for s in sentences for w in s]
    in_vocab = build_vocab(words, cfg.word_vocab_cap, style_tokens=STYLE_TOKENS)
    out_vocab = build_vocab(words, cfg.word_vocab_cap)
    mcfg = LangGenConfig(in_vocab=len(in_vocab), out_vocab=len(out_vocab), embed_dim=cfg.embed_dim,
                         word_dim=cfg.embed_dim, enc_hidden=cfg.hidden_dim, dropout=cfg.dropout)
    dlm = DenoisingLm(LangGenModel.init(mcfg, cfg.seed, in_vocab, out_vocab), drop_fraction)
    tgt = [dlm.target(s) for s in sentences]
    state = nn.AdamState(lr=cfg.lr, clip=cfg.clip)
    drop_rng = np.random.default_rng([cfg.seed, 1])
    steps = 0
    for epoch in range(cfg.epochs):
        rng = np.random.default_rng([cfg.seed, epoch, 2])
        order = rng.permutation(len(sentences))
        total = 0.0
        for start in range(0, len(order), cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            src = [dlm.source(random_subset(sentences[i], 1.0 - drop_fraction, rng)) for i in idx]
            loss, g, _ = langgen_grads(dlm.model.params, mcfg, src, [tgt[i] for i in idx],
                                       train=True, rng=drop_rng)
            if not np.isfinite(loss):
                raise nn.NumericError(f"non-finite loss at epoch {epoch}")
            nn.adam_update(dlm.model.params, g, state)
            total += loss * len(idx)
            steps += 1
            if cfg.max_steps and steps >= cfg.max_steps:
                break
        dlm.losses.append(total / len(sentences))
        if cfg.max_steps and steps >= cfg.max_steps:
            break
    return dlm


# --------------------------------------------------------------------------
# ranking

@dataclass
class PosRanking:
    order: list                                   # least -> most important
    trace: list = field(default_factory=list)     # (class, placement, bits) per decision


def apply_ranking(tagged, low, high, budget, rng):
    """Remove words class by class from the least important end.

    ``low`` lists classes from the least important upward, ``high`` from the
    most important downward; every other class shares the middle rank.
    Removal walks rank groups from least important and removes a uniformly
    random part of the group that crosses the budget.
    """
    n = len(tagged)
    keep = retained_count(n, budget)
    to_remove = n - keep
    pos = [p for _, p in tagged]
    middle = sorted(set(pos) - set(low) - set(high))
    groups = [[c] for c in low] + [middle] + [[c] for c in reversed(high)]
    removed = set()
    for group in groups:
        if to_remove == 0:
            break
        idx = [i for i, p in enumerate(pos) if p in group]
        if len(idx) <= to_remove:
            removed.update(idx)
            to_remove -= len(idx)
        else:
            removed.update(rng.choice(idx, size=to_remove, replace=False).tolist())
            to_remove = 0
    return [w for i, (w, _) in enumerate(tagged) if i not in removed]


def rank_word_classes(model, corpus, budget=0.33, seed=0, classes=None, scorer=None,
                      tie_bits=TIE_BITS):
    """Greedy forward selection of word-class importance.

    ``corpus``: held-out list of (word, POS) lists. ``model``: a DenoisingLm,
    or None when ``scorer(inputs, sentences) -> bits`` is supplied. Candidate
    placements within ``tie_bits`` of the best are ties, resolved by class
    name (then lowest placement first).
    """
    present = {p for s in corpus for _, p in s}
    classes = sorted(present if classes is None else classes)
    for c in [c for c in classes if c not in present]:
        log.warning("class %s does not occur in the corpus; skipped", c)
    classes = [c for c in classes if c in present]
    if not classes:
        raise CorpusError("no word classes to rank")
    scorer = scorer or model.reconstruction_bits
    sentences = [[w for w, _ in s] for s in corpus]

    low, high, trace = [], [], []
    step = 0
    while len(low) + len(high) < len(classes) - 1:
        unranked = [c for c in classes if c not in low and c not in high]
        results = []
        for c in unranked:
            for placement in ("low", "high"):
                lo = low + [c] if placement == "low" else low
                hi = high + [c] if placement == "high" else high
                rng = np.random.default_rng([seed, step])  # common random numbers
                inputs = [apply_ranking(s, lo, hi, budget, rng) for s in corpus]
                results.append((float(scorer(inputs, sentences)), c, placement))
        best = min(r[0] for r in results)
        ties = [r for r in results if r[0] - best < tie_bits]
        bits, c, placement = min(ties, key=lambda r: (r[1], r[2] != "low"))
        (low if placement == "low" else high).append(c)
        trace.append((c, placement, bits))
        step += 1
    last = [c for c in classes if c not in low and c not in high]
    order = low + last + list(reversed(high))
    return PosRanking(order, trace)


def split_corpus(corpus, held_fraction=0.1, seed=0):
    """Seeded (train, held-out) split; held-out gets at least one sentence."""
    order = np.random.default_rng(seed).permutation(len(corpus))
    n_held = max(1, int(round(held_fraction * len(corpus))))
    held = [corpus[i] for i in sorted(order[:n_held])]
    train = [corpus[i] for i in sorted(order[n_held:])]
    return train, held

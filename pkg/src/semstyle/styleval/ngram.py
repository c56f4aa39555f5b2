"""Interpolated Kneser-Ney n-gram language model and bits-per-word scoring."""

import json
import math
from collections import Counter, defaultdict
from fractions import Fraction

import numpy as np

from ..corpus import BOS, EOS, UNK, CorpusError


class NgramLm:
    """Interpolated Kneser-Ney with one fixed discount.

    The highest order uses raw counts; lower orders use continuation counts
    (number of distinct left extensions). The unigram level is interpolated
    with a uniform distribution over the vocabulary (all kept words, UNK and
    EOS), so every in-vocabulary word has non-zero probability.

    ``smoothing="mle"`` switches to plain relative frequencies (a test mode)
    and ``boundaries=False`` drops BOS padding and the EOS event.
    """

    def __init__(self, sentences, order=4, discount=0.75, min_count=2,
                 smoothing="kn", boundaries=True):
        if smoothing not in ("kn", "mle"):
            raise ValueError(f"smoothing must be 'kn' or 'mle', got {smoothing!r}")
        if order < 1:
            raise ValueError("order must be >= 1")
        sentences = [list(s) for s in sentences]
        if not any(sentences):
            raise CorpusError("empty language-model corpus")
        self.order, self.discount = order, discount
        self.smoothing, self.boundaries = smoothing, boundaries
        self.min_count, self.sentences = min_count, sentences
        freq = Counter(w for s in sentences for w in s)
        self.vocab = {w for w, c in freq.items() if c >= min_count} | {UNK}
        if boundaries:
            self.vocab.add(EOS)
        self._count(sentences)
        self._cache = {}

    def _events(self, tokens):
        """Yield (context tuple of length order-1, word) for one sentence."""
        words = [w if w in self.vocab else UNK for w in tokens]
        n = self.order
        if self.boundaries:
            padded = [BOS] * (n - 1) + words + [EOS]
            start = n - 1
        else:
            padded, start = words, 0
        for i in range(start, len(padded)):
            ctx = tuple(padded[max(0, i - n + 1):i])
            yield ctx, padded[i]

    def _count(self, sentences):
        n = self.order
        # raw[k][ctx][w]: events whose context has length k (k < n-1 only
        # happens at sentence starts when boundaries are off)
        raw = [defaultdict(Counter) for _ in range(n)]
        for s in sentences:
            for ctx, w in self._events(s):
                raw[len(ctx)][ctx][w] += 1
        levels = [None] * n
        levels[n - 1] = raw[n - 1]
        for k in range(n - 2, -1, -1):
            level = defaultdict(Counter)
            for ctx, nxt in raw[k].items():
                level[ctx].update(nxt)
            for ctx, nxt in levels[k + 1].items():
                for w, c in nxt.items():
                    # KN: number of distinct left extensions; MLE: summed counts
                    level[ctx[1:]][w] += 1 if self.smoothing == "kn" else c
            levels[k] = level
        self.counts = levels
        self.totals = [{ctx: sum(c.values()) for ctx, c in level.items()} for level in levels]
        self.types = [{ctx: len(c) for ctx, c in level.items()} for level in levels]

    def prob(self, word, context=()):
        """p(word | context); ``context`` is truncated to the last order-1 words."""
        if word not in self.vocab:
            word = UNK
        context = tuple(w if (w in self.vocab or w == BOS) else UNK for w in context)
        context = context[len(context) - (self.order - 1):] if self.order > 1 else ()
        key = (word, context)
        if key not in self._cache:
            self._cache[key] = self._prob(word, context)
        return self._cache[key]

    def _prob(self, word, ctx):
        k = len(ctx)
        if self.smoothing == "mle":
            total = self.totals[k].get(ctx, 0)
            if total == 0:
                return self._prob(word, ctx[1:]) if k else 0.0
            return self.counts[k][ctx][word] / total
        if k == 0:
            lower = 1.0 / len(self.vocab)
        else:
            lower = self._prob(word, ctx[1:])
        total = self.totals[k].get(ctx, 0)
        if total == 0:
            return lower
        d = self.discount
        c = self.counts[k][ctx][word]
        return max(c - d, 0.0) / total + d * self.types[k][ctx] / total * lower

    def save(self, path):
        """Store the training data and settings; counts are rebuilt on load."""
        obj = {"order": self.order, "discount": self.discount, "min_count": self.min_count,
               "smoothing": self.smoothing, "boundaries": self.boundaries,
               "sentences": self.sentences}
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, ensure_ascii=False)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        return cls(obj.pop("sentences"), **obj)

    def token_logprobs(self, tokens):
        """log2 p of every token (and EOS when boundaries are on)."""
        probs = [self.prob(w, ctx) for ctx, w in self._events(tokens)]
        return np.array([math.log2(p) if p > 0 else -math.inf for p in probs])


class UniformLm:
    """Every token (EOS included) gets probability 1/size."""

    def __init__(self, size):
        self.size = size

    def token_logprobs(self, tokens):
        return np.full(len(tokens) + 1, -math.log2(self.size))


def bits_per_word(model, sentences):
    """Mean negative log2 probability over all scored tokens, EOS included."""
    scores = [model.token_logprobs(list(s)) for s in sentences]
    if not scores:
        raise CorpusError("no sentences to score")
    flat = np.concatenate(scores)
    if flat.size == 0:
        raise CorpusError("no tokens to score")
    if np.isneginf(flat).any():
        return math.inf
    # exact rational mean, rounded once, so a constant scorer reproduces its value
    values, counts = np.unique(flat, return_counts=True)
    total = sum(Fraction(float(v)) * int(c) for v, c in zip(values, counts))
    return float(-total / flat.size)

"""Corpus ingestion: caption records, styled-sentence filtering, vocabularies and
mixed-batch scheduling."""

import enum
import json
import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from nltk.stem.porter import PorterStemmer

from .text import normalize, word_count

log = logging.getLogger(__name__)

FEATURE_DIM = 2048
MIN_CHARS = 10
MIN_WORDS = 4
MAX_WORDS = 20

PAD, UNK, BOS, EOS = "<pad>", "<unk>", "<s>", "</s>"
STYLE_TOKENS = ("<style:desc>", "<style:styled>")


class CorpusError(ValueError):
    """Malformed or unreadable corpus input."""


class SourceTag(enum.Enum):
    DESC = "desc"
    STYLED = "styled"


@dataclass
class CaptionRecord:
    image_id: str
    feature: np.ndarray
    captions: list
    split: str = ""

    def __post_init__(self):
        if not self.captions:
            raise CorpusError(f"record {self.image_id!r} has no captions")


@dataclass(frozen=True)
class StyledSentence:
    text: str
    source_tag: SourceTag = SourceTag.STYLED

    @property
    def tokens(self):
        return self.text.split()


# --------------------------------------------------------------------------
# caption records

def load_captions(path, feature_dim=FEATURE_DIM, strict=False):
    """Read line-delimited JSON caption records.

    Each record carries either an inline ``feature`` list or a ``feature_file``
    (``.npy``, resolved relative to the record file).
    """
    path = Path(path)
    records = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as e:
        raise CorpusError(f"cannot read {path}: {e}") from e
    with fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                records.append(_parse_record(json.loads(line), path.parent, feature_dim))
            except (ValueError, KeyError, TypeError, OSError) as e:
                msg = f"{path}:{lineno}: {e}"
                if strict:
                    raise CorpusError(msg) from e
                log.warning("skipping malformed record %s", msg)
    return records


def _parse_record(obj, base, feature_dim):
    if "feature" in obj:
        feature = np.asarray(obj["feature"], dtype=np.float32)
    elif "feature_file" in obj:
        feature = np.load(base / obj["feature_file"]).astype(np.float32).ravel()
    else:
        raise KeyError("record needs 'feature' or 'feature_file'")
    if feature.shape != (feature_dim,):
        raise ValueError(f"feature has length {feature.size}, expected {feature_dim}")
    captions = obj["captions"]
    if not isinstance(captions, list) or not all(isinstance(c, str) for c in captions):
        raise TypeError("'captions' must be a list of strings")
    return CaptionRecord(str(obj["image_id"]), feature, captions, str(obj.get("split", "")))


def dump_captions(records, path):
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            obj = {"image_id": r.image_id, "feature": [float(x) for x in r.feature],
                   "captions": list(r.captions)}
            if r.split:
                obj["split"] = r.split
            fh.write(json.dumps(obj) + "\n")


# --------------------------------------------------------------------------
# styled text filtering

_stemmer = PorterStemmer()


def stem(word):
    return _stemmer.stem(word)


def build_keep_list(descriptive_sentences, top=300, stopwords=None):
    """Stems of the ``top`` most frequent non-stop-words in the descriptive corpus."""
    if stopwords is None:
        from .termpipe.pipeline import default_stopwords
        stopwords = default_stopwords()
    counts = Counter()
    for sent in descriptive_sentences:
        counts.update(t for t in normalize(sent) if t[0].isalpha() and t not in stopwords)
    keep = []
    for word, _ in counts.most_common():
        s = stem(word)
        if s not in keep:
            keep.append(s)
        if len(keep) == top:
            break
    return set(keep)


def passes_filters(tokens, keep_list):
    text = " ".join(tokens)
    n = word_count(tokens)
    if len(text) < MIN_CHARS or not MIN_WORDS <= n <= MAX_WORDS:
        return False
    return any(stem(t) in keep_list for t in tokens if t[0].isalpha())


def filter_styled(lines, keep_list):
    """Normalize and filter raw sentences; returns retained StyledSentences."""
    out = []
    for line in lines:
        tokens = normalize(line)
        if tokens and passes_filters(tokens, keep_list):
            out.append(StyledSentence(" ".join(tokens)))
    return out


def load_and_filter_styled(path, keep_list, strict=False):
    """Read one sentence per line (UTF-8) and apply the styled-corpus filters."""
    lines = []
    try:
        with open(path, "rb") as fh:
            for lineno, raw in enumerate(fh, 1):
                try:
                    lines.append(raw.decode("utf-8"))
                except UnicodeDecodeError as e:
                    msg = f"{path}:{lineno}: not valid UTF-8"
                    if strict:
                        raise CorpusError(msg) from e
                    log.warning("skipping %s", msg)
    except OSError as e:
        raise CorpusError(f"cannot read {path}: {e}") from e
    return filter_styled(lines, keep_list)


def select_preferred(sentences, word_freq, n):
    """One-off down-sampling to ``n`` sentences, preferring those that contain
    frequent descriptive-corpus words. Scores are summed word frequencies;
    ties keep corpus order."""
    if n >= len(sentences):
        return list(sentences)
    scores = [sum(word_freq.get(t, 0) for t in set(s.tokens)) for s in sentences]
    order = sorted(range(len(sentences)), key=lambda i: -scores[i])[:n]
    return [sentences[i] for i in sorted(order)]


# --------------------------------------------------------------------------
# vocabulary

class Vocabulary:
    """Bijective token <-> id map. Reserved tokens take the lowest ids."""

    def __init__(self, tokens, n_reserved):
        self.token_of = list(tokens)
        self.id_of = {t: i for i, t in enumerate(self.token_of)}
        if len(self.id_of) != len(self.token_of):
            raise ValueError("duplicate tokens in vocabulary")
        self.n_reserved = n_reserved

    def __len__(self):
        return len(self.token_of)

    def __contains__(self, token):
        return token in self.id_of

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self.token_of == other.token_of \
            and self.n_reserved == other.n_reserved

    @property
    def pad(self):
        return self.id_of[PAD]

    @property
    def unk(self):
        return self.id_of[UNK]

    @property
    def bos(self):
        return self.id_of[BOS]

    @property
    def eos(self):
        return self.id_of[EOS]

    def encode(self, tokens):
        unk = self.id_of[UNK]
        return [self.id_of.get(t, unk) for t in tokens]

    def decode(self, ids):
        return [self.token_of[i] for i in ids]

    def to_lines(self):
        return [str(self.n_reserved)] + self.token_of

    @classmethod
    def from_lines(cls, lines):
        lines = list(lines)
        return cls(lines[1:], int(lines[0]))

    def save(self, path):
        Path(path).write_text("\n".join(self.to_lines()) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path):
        return cls.from_lines(Path(path).read_text(encoding="utf-8").splitlines())


def reserved_tokens(style_tokens=()):
    return [PAD, UNK, BOS, EOS, *style_tokens]


def build_vocab(token_stream, cap, min_count=1, style_tokens=()):
    """Keep the ``cap - len(reserved)`` most frequent tokens (ties: first seen)."""
    reserved = reserved_tokens(style_tokens)
    if cap <= len(reserved):
        raise ValueError(f"cap {cap} must exceed the {len(reserved)} reserved tokens")
    counts = Counter()
    first_seen = {}
    for tok in token_stream:
        counts[tok] += 1
        first_seen.setdefault(tok, len(first_seen))
    if not counts:
        raise CorpusError("empty token stream: no vocabulary can be derived")
    candidates = [t for t, c in counts.items() if c >= min_count and t not in reserved]
    candidates.sort(key=lambda t: (-counts[t], first_seen[t]))
    return Vocabulary(reserved + candidates[: cap - len(reserved)], len(reserved))


# --------------------------------------------------------------------------
# batch scheduling

@dataclass(frozen=True)
class BatchPlan:
    epoch: int
    batches: tuple  # of (descriptive index array, styled index array)
    mode: str = "mixed"

    def counts(self):
        return (sum(len(d) for d, _ in self.batches), sum(len(s) for _, s in self.batches))


def make_epoch_batches(n_descriptive, n_styled, batch_size, mode="mixed", seed=0, epoch=0):
    """Index plan for one epoch.

    ``mixed``: the larger source is uniformly down-sampled to the size of the
    smaller one (a fresh subset every epoch) and each batch holds
    ``batch_size / 2`` items from each. ``single``: shuffled batches over
    whichever sources are non-empty.
    """
    if n_descriptive == 0 and n_styled == 0:
        raise CorpusError("both sources are empty")
    rng = np.random.default_rng([seed, epoch])
    empty = np.zeros(0, dtype=np.int64)
    if mode == "mixed":
        if batch_size % 2:
            raise ValueError("mixed batches need an even batch size")
        if n_descriptive == 0 or n_styled == 0:
            raise CorpusError("mixed mode needs both descriptive and styled items")
        n = min(n_descriptive, n_styled)
        half = batch_size // 2
        desc = rng.permutation(n_descriptive)[:n]
        sty = rng.permutation(n_styled)[:n]
        batches = tuple((desc[i:i + half], sty[i:i + half]) for i in range(0, n, half))
    elif mode == "single":
        pool = [(0, i) for i in range(n_descriptive)] + [(1, i) for i in range(n_styled)]
        order = rng.permutation(len(pool))
        batches = []
        for start in range(0, len(order), batch_size):
            chunk = [pool[j] for j in order[start:start + batch_size]]
            d = np.array([i for s, i in chunk if s == 0], dtype=np.int64)
            st = np.array([i for s, i in chunk if s == 1], dtype=np.int64)
            batches.append((d if d.size else empty, st if st.size else empty))
        batches = tuple(batches)
    else:
        raise ValueError(f"unknown batch mode {mode!r}")
    return BatchPlan(epoch, batches, mode)

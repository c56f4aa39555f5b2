"""Verb-lemma to frame lexicon with hierarchy fallback."""

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .terms import FrameTerm

# sentinel for verbs whose frame (and every ancestor) is out of vocabulary
FILTERED = None


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class FrameLexicon:
    lemma_to_frame: dict
    hierarchy: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    threshold: int = 200

    def __post_init__(self):
        _check_acyclic(self.hierarchy)
        # frames seen strictly more than `threshold` times
        object.__setattr__(self, "in_vocab",
                           frozenset(f for f, c in self.counts.items() if c > self.threshold))

    def resolve(self, frame):
        """Nearest in-vocabulary frame at or above ``frame``, or None."""
        vocab = self.in_vocab
        while frame is not None:
            if frame in vocab:
                return frame
            frame = self.hierarchy.get(frame)
        return None

    def ancestors(self, frame):
        out = []
        while frame is not None:
            out.append(frame)
            frame = self.hierarchy.get(frame)
        return out

    def with_counts(self, counts, threshold=None):
        return FrameLexicon(dict(self.lemma_to_frame), dict(self.hierarchy), dict(counts),
                            self.threshold if threshold is None else threshold)

    # file format --------------------------------------------------------
    def dumps(self):
        lines = ["[meta]", f"threshold\t{self.threshold}", "", "[lemmas]"]
        lines += [f"{k}\t{v}" for k, v in self.lemma_to_frame.items()]
        lines += ["", "[hierarchy]"]
        lines += [f"{k}\t{v}" for k, v in self.hierarchy.items()]
        lines += ["", "[counts]"]
        lines += [f"{k}\t{v}" for k, v in self.counts.items()]
        return "\n".join(lines) + "\n"

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text):
        sections = {"lemmas": {}, "hierarchy": {}, "counts": {}, "meta": {}}
        current = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("["):
                current = line.strip("[]")
                if current not in sections:
                    raise LexiconError(f"line {lineno}: unknown section [{current}]")
                continue
            parts = line.split()
            if current is None or len(parts) != 2:
                raise LexiconError(f"line {lineno}: expected 'key<TAB>value' inside a section")
            key, value = parts
            if current in ("counts", "meta"):
                try:
                    value = int(value)
                except ValueError:
                    raise LexiconError(f"line {lineno}: count must be an integer") from None
            sections[current][key] = value
        return cls(sections["lemmas"], sections["hierarchy"], sections["counts"],
                   sections["meta"].get("threshold", 200))

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def _check_acyclic(hierarchy):
    for start in hierarchy:
        seen = {start}
        node = hierarchy.get(start)
        while node is not None:
            if node in seen:
                raise LexiconError(f"cyclic frame hierarchy through {node!r}")
            seen.add(node)
            node = hierarchy.get(node)


def map_verb_to_frame(lemma, lex):
    """FrameTerm for a verb lemma, or FILTERED when neither its frame nor any
    ancestor is frequent enough.

    Raises KeyError for lemmas the lexicon does not list at all; the term
    pipeline keeps those as plain verb terms.
    """
    frame = lex.resolve(lex.lemma_to_frame[lemma])
    return FILTERED if frame is None else FrameTerm(frame)


def count_frames(verb_lemmas, lex):
    """Recount raw frame frequencies from an iterable of verb lemmas."""
    counts = Counter()
    for lemma in verb_lemmas:
        frame = lex.lemma_to_frame.get(lemma)
        if frame is not None:
            counts[frame] += 1
    return dict(counts)


@lru_cache(maxsize=None)
def default_frame_lexicon():
    text = resources.files("semstyle.termpipe").joinpath("data/frames.lex").read_text("utf-8")
    return FrameLexicon.loads(text)

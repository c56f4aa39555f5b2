"""Semantic term types: the style-free intermediate representation."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    pos: str  # coarse class, see tagger.COARSE_TAGS
    tag: str = ""  # Penn tag the coarse class was derived from


@dataclass(frozen=True)
class WordTerm:
    lemma: str
    pos: str

    def render(self):
        return f"{self.lemma}_{self.pos}"


@dataclass(frozen=True)
class FrameTerm:
    frame: str

    def render(self):
        return f"{self.frame}_FRAME"


@dataclass(frozen=True)
class RawTerm:
    """Unprocessed surface word, used by the ``words`` term mode."""
    word: str

    def render(self):
        return self.word


@dataclass(frozen=True)
class TermSequence:
    terms: tuple
    source_len: int
    positions: tuple = ()  # source token index of each term

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def render(self):
        return [t.render() for t in self.terms]

    def __str__(self):
        return " ".join(self.render())


def parse_term(text):
    """Inverse of ``render`` for term strings read from files."""
    if text.endswith("_FRAME"):
        return FrameTerm(text[: -len("_FRAME")])
    head, sep, pos = text.rpartition("_")
    if sep and pos.isupper() and head:
        return WordTerm(head, pos)
    return RawTerm(text)

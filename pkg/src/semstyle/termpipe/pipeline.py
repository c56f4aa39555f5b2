"""Sentence -> ordered semantic terms.

Three rule sets are applied in order: filtering of non-semantic words
(stop-words, an extra informal/number list, and whole POS classes), lemma+POS
terms for the surviving words, and frame abstraction for verbs.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from ..text import tokenize, word_count
from .frames import FILTERED, default_frame_lexicon, map_verb_to_frame
from .lemmatizer import Lemmatizer
from .tagger import COARSE, default_tagger
from .terms import RawTerm, TermSequence, Token, WordTerm

MODES = ("frames", "lempos", "words")

# least -> most semantically important word classes; everything before VERB is dropped
POS_IMPORTANCE = ("ADJ", "ADV", "CONJ", "PART", "DET", "ADP", "VERB", "PRON", "NOUN")
DEFAULT_FILTERED_POS = frozenset({"PUNCT", "ADV", "ADJ", "PRON", "CONJ", "DET", "ADP",
                                  "PART", "NUM", "OTHER"})


def _read_list(name):
    text = resources.files("semstyle.termpipe").joinpath("data", name).read_text("utf-8")
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


@lru_cache(maxsize=None)
def default_stopwords():
    return frozenset(_read_list("stopwords.txt"))


@lru_cache(maxsize=None)
def default_extra_stopwords():
    return frozenset(_read_list("extra_stopwords.txt"))


@lru_cache(maxsize=None)
def default_collocations():
    return tuple(tuple(line.split()) for line in _read_list("collocations.txt"))


@dataclass(frozen=True)
class TermConfig:
    mode: str = "frames"
    filtered_pos: frozenset = DEFAULT_FILTERED_POS
    stopwords: frozenset = field(default_factory=default_stopwords)
    extra_stopwords: frozenset = field(default_factory=default_extra_stopwords)
    collocations: tuple = field(default_factory=default_collocations)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@lru_cache(maxsize=None)
def default_lemmatizer():
    return Lemmatizer()


def preprocess_sentence(text, tagger=None, lemmatizer=None):
    """Tokenize, POS-tag and lemmatize ``text``."""
    words = tokenize(text)
    if not words:
        return []
    tagger = tagger or default_tagger()
    lemmatizer = lemmatizer or default_lemmatizer()
    tags = tagger.tag(words)
    return [Token(w, lemmatizer(w, t).lower(), COARSE.get(t, "OTHER"), t)
            for w, t in zip(words, tags)]


def merge_collocations(tokens, collocations=None):
    """Join contiguous tokens whose lemmas spell a listed phrase.

    Longest match wins, scanning left to right. Merged tokens are nouns.
    """
    return [tok for _, tok in _merge(tokens, collocations)]


def _merge(tokens, collocations):
    if collocations is None:
        collocations = default_collocations()
    by_first = {}
    for phrase in sorted(collocations, key=len, reverse=True):
        by_first.setdefault(phrase[0], []).append(tuple(phrase))

    out, i = [], 0
    while i < len(tokens):
        match = None
        for phrase in by_first.get(tokens[i].lemma, ()) + by_first.get(tokens[i].surface.lower(), ()):
            span = tokens[i:i + len(phrase)]
            if len(span) == len(phrase) and all(
                    t.lemma == p or t.surface.lower() == p for t, p in zip(span, phrase)):
                match = phrase
                break
        if match:
            span = tokens[i:i + len(match)]
            tag = "NNS" if span[-1].tag == "NNS" else "NN"
            out.append((i, Token("_".join(t.surface for t in span), "_".join(match), "NOUN", tag)))
            i += len(match)
        else:
            out.append((i, tokens[i]))
            i += 1
    return out


def extract_terms(text, lex=None, cfg=None, tagger=None):
    """Map a raw sentence to its TermSequence."""
    lex = lex or default_frame_lexicon()
    cfg = cfg or TermConfig()
    tokens = preprocess_sentence(text, tagger)
    terms, kept = [], []
    for pos_idx, tok in _merge(tokens, cfg.collocations):
        word = tok.surface.lower()
        is_colloc = "_" in tok.lemma and tok.pos == "NOUN"
        if not is_colloc and (word in cfg.stopwords or word in cfg.extra_stopwords
                              or tok.lemma in cfg.extra_stopwords):
            continue
        if tok.pos in cfg.filtered_pos:
            continue
        term = _to_term(tok, lex, cfg)
        if term is not None:
            terms.append(term)
            kept.append(pos_idx)
    return TermSequence(tuple(terms), word_count([t.surface for t in tokens]), tuple(kept))


def _to_term(tok, lex, cfg):
    if cfg.mode == "words":
        return RawTerm(tok.surface.lower())
    if tok.pos == "VERB" and cfg.mode == "frames":
        try:
            frame = map_verb_to_frame(tok.lemma, lex)
        except KeyError:
            return WordTerm(tok.lemma, "VERB")
        return frame if frame is not FILTERED else None
    return WordTerm(tok.lemma, tok.pos)

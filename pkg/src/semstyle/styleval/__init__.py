"""Automatic evaluation of generated captions."""

from dataclasses import asdict, dataclass, field

from .bm25 import Bm25Index, bm25_retrieve
from .clf import ClfModel, clf_fraction, cross_val_accuracy, ngram_features, train_clf
from .grulm import GruLm, GruLmConfig, train_gru_lm
from .ngram import NgramLm, UniformLm, bits_per_word
from .termmetrics import coverage_counts, style_attributes, term_coverage, term_precision_recall

REPORT_FIELDS = ("n_sentences", "lm_bits", "grulm_bits", "clf_fraction", "term_precision",
                 "term_recall", "coverage_word_terms", "coverage_frame_terms",
                 "present", "past", "first_person", "unique_verbs")


@dataclass
class EvalReport:
    n_sentences: int = 0
    lm_bits: float = float("nan")
    grulm_bits: float = float("nan")
    clf_fraction: float = float("nan")
    term_precision: float = float("nan")
    term_recall: float = float("nan")
    coverage_word_terms: float = float("nan")
    coverage_frame_terms: float = float("nan")
    attributes: dict = field(default_factory=dict)

    def rows(self):
        """(name, value) pairs in fixed order; unset metrics print as nan."""
        d = asdict(self)
        attrs = d.pop("attributes")
        for name in REPORT_FIELDS:
            yield name, d[name] if name in d else attrs.get(name, float("nan"))

    def dumps(self):
        lines = []
        for name, value in self.rows():
            text = str(value) if isinstance(value, int) else f"{value:.6f}"
            lines.append(f"{name}\t{text}")
        return "\n".join(lines) + "\n"


def evaluate(sentences, lm=None, grulm=None, clf=None, input_terms=None, references=None,
             tagger=None):
    """Fill an EvalReport for generated ``sentences`` (token lists or strings).

    ``input_terms[i]`` are the terms sentence i was generated from (coverage);
    ``references[i]`` lists reference term sequences (term precision/recall).
    """
    from ..termpipe.pipeline import TermConfig, extract_terms

    sentences = [s if isinstance(s, str) else " ".join(s) for s in sentences]
    toks = [s.split() for s in sentences]
    rep = EvalReport(n_sentences=len(sentences))
    if lm is not None:
        rep.lm_bits = bits_per_word(lm, toks)
    if grulm is not None:
        rep.grulm_bits = bits_per_word(grulm, toks)
    if clf is not None:
        rep.clf_fraction = clf_fraction(clf, toks)
    if input_terms is not None:
        cw = nw = cf = nf = 0
        for terms, s in zip(input_terms, sentences):
            a, b, c, d = coverage_counts(terms, s, tagger=tagger)
            cw, nw, cf, nf = cw + a, nw + b, cf + c, nf + d
        rep.coverage_word_terms = cw / nw if nw else float("nan")
        rep.coverage_frame_terms = cf / nf if nf else float("nan")
    if references is not None:
        cands = [extract_terms(s, cfg=TermConfig(), tagger=tagger).render() for s in sentences]
        rep.term_precision, rep.term_recall = term_precision_recall(cands, references)
    rep.attributes = style_attributes(sentences, tagger)
    return rep


__all__ = [
    "Bm25Index", "ClfModel", "EvalReport", "GruLm", "GruLmConfig", "NgramLm", "UniformLm",
    "bits_per_word", "bm25_retrieve", "clf_fraction", "coverage_counts", "cross_val_accuracy",
    "evaluate", "ngram_features", "style_attributes", "term_coverage", "term_precision_recall",
    "train_clf", "train_gru_lm",
]

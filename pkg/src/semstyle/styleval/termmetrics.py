"""Term-space precision/recall, term coverage and style attributes."""

from collections import Counter

from ..corpus import CorpusError
from ..termpipe.frames import default_frame_lexicon
from ..termpipe.pipeline import TermConfig, extract_terms, preprocess_sentence
from ..termpipe.terms import FrameTerm, WordTerm, parse_term

PAST_TAGS = frozenset({"VBD", "VBN"})
PRESENT_TAGS = frozenset({"VBG", "VBP", "VBZ"})
FIRST_PERSON = frozenset({"i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves"})


def _as_strings(seq):
    return [t if isinstance(t, str) else t.render() for t in seq]


def term_precision_recall(candidates, references):
    """Corpus BLEU-1 without brevity penalty and mean multi-reference ROUGE-1 recall.

    ``references[i]`` is the list of reference term sequences for candidate i.
    Precision clips each candidate term count by its maximum count in any
    reference. Recall for one candidate is the best unigram recall over its
    references; the reported recall averages over candidates.
    """
    candidates = [_as_strings(c) for c in candidates]
    if not candidates:
        raise CorpusError("no candidates")
    if len(candidates) != len(references):
        raise ValueError("candidates and references must align")
    matched = total = 0
    recalls = []
    for cand, refs in zip(candidates, references):
        refs = [Counter(_as_strings(r)) for r in refs]
        cc = Counter(cand)
        max_ref = Counter()
        for r in refs:
            max_ref |= r
        matched += sum(min(c, max_ref[t]) for t, c in cc.items())
        total += len(cand)
        per_ref = [sum(min(c, cc[t]) for t, c in r.items()) / sum(r.values())
                   for r in refs if sum(r.values())]
        recalls.append(max(per_ref) if per_ref else 0.0)
    precision = matched / total if total else 0.0
    return precision, sum(recalls) / len(recalls)


def _frame_chain(lemma, lex):
    frame = lex.lemma_to_frame.get(lemma)
    if frame is None:
        return set()
    return {frame, *lex.ancestors(frame)}


def coverage_counts(input_terms, sentence, lex=None, cfg=None, tagger=None):
    """(covered word terms, word terms, covered frame terms, frame terms)."""
    lex = lex or default_frame_lexicon()
    terms = [parse_term(t) if isinstance(t, str) else t for t in input_terms]
    gen = extract_terms(sentence, lex, cfg or TermConfig(mode="lempos"), tagger)
    lempos = {t.render() for t in gen if isinstance(t, WordTerm)}
    frames = set()
    for t in gen:
        if isinstance(t, WordTerm) and t.pos == "VERB":
            frames |= _frame_chain(t.lemma, lex)
    words = [t for t in terms if isinstance(t, WordTerm)]
    frame_terms = [t for t in terms if isinstance(t, FrameTerm)]
    return (sum(t.render() in lempos for t in words), len(words),
            sum(t.frame in frames for t in frame_terms), len(frame_terms))


def term_coverage(input_terms, sentence, lex=None, cfg=None, tagger=None):
    """Fractions of input word terms and frame terms realized in ``sentence``.

    The sentence is mapped back to lemma_POS terms; a word term is covered if
    it reappears, a frame term if some generated verb's frame (or one of its
    ancestors) is that frame. A fraction is None when there are no such terms.
    """
    cw, nw, cf, nf = coverage_counts(input_terms, sentence, lex, cfg, tagger)
    return (cw / nw if nw else None), (cf / nf if nf else None)


def style_attributes(sentences, tagger=None):
    """Fractions of sentences with present / past verbs and first-person
    pronouns, plus the number of distinct verb lemmas."""
    sentences = list(sentences)
    present = past = first = 0
    verbs = set()
    for s in sentences:
        toks = preprocess_sentence(s if isinstance(s, str) else " ".join(s), tagger)
        tags = {t.tag for t in toks}
        present += bool(tags & PRESENT_TAGS)
        past += bool(tags & PAST_TAGS)
        first += any(t.surface.lower() in FIRST_PERSON for t in toks)
        verbs.update(t.lemma for t in toks if t.pos == "VERB" and t.tag.startswith("VB"))
    n = max(len(sentences), 1)
    return {"present": present / n, "past": past / n, "first_person": first / n,
            "unique_verbs": len(verbs)}

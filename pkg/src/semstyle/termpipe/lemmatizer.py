"""Lemmatizer: lexicon lookup keyed on (form, Penn tag), with suffix rules for
words the lexicon does not know."""

from .lexicon import VOWELS, default_lexicon

_NO_UNDOUBLE = ("ll", "ss", "ff", "zz")
# stems that almost always lost a final "e": creat(e)d, realiz(e)d, danc(e)d ...
_E_STEMS = ("at", "iz", "ur", "uc", "ag", "ud", "iv", "ov", "dg", "rg", "lv", "rv", "nc", "bl", "tl")


def _strip_s(w):
    if w.endswith("ies") and len(w) > 4:
        return w[:-3] + "y"
    if w.endswith(("ches", "shes", "sses", "xes", "zes")):
        return w[:-2]
    if w.endswith("s") and not w.endswith("ss") and len(w) > 2:
        return w[:-1]
    return w


def _restore_stem(stem):
    """Undo consonant doubling or a dropped final 'e' on a stripped -ed/-ing stem."""
    if len(stem) > 2 and stem[-1] == stem[-2] and stem[-1] not in VOWELS and not stem.endswith(_NO_UNDOUBLE):
        return stem[:-1]
    if stem.endswith(_E_STEMS):
        return stem + "e"
    return stem


def _rule_lemma(w, tag):
    if tag in ("NNS", "VBZ"):
        return _strip_s(w)
    if tag in ("VBD", "VBN") and w.endswith("ed") and len(w) > 3:
        if w.endswith("ied"):
            return w[:-3] + "y"
        return _restore_stem(w[:-2])
    if tag == "VBG" and w.endswith("ing") and len(w) > 4:
        return _restore_stem(w[:-3])
    if tag in ("JJR", "RBR") and w.endswith("er") and len(w) > 4:
        return w[:-2]
    if tag in ("JJS", "RBS") and w.endswith("est") and len(w) > 5:
        return w[:-3]
    return w


class Lemmatizer:
    def __init__(self, lexicon=None):
        self.lexicon = lexicon or default_lexicon()

    def __call__(self, word, tag):
        w = word.lower()
        lemma = self.lexicon.lemma(w, tag)
        if lemma is not None:
            return lemma
        # same coarse class, different fine tag (e.g. VBD/VBN confusion)
        entries = self.lexicon.tags(w)
        for other, lem in sorted(entries.items()):
            if other[:2] == tag[:2]:
                return lem
        return _rule_lemma(w, tag)

"""Generator of Penn-tagged training sentences for the bundled tagger.

No tagged corpus ships with this package, so the tagger is trained offline on
sentences sampled from a small phrase grammar over the tag lexicon. The
grammar covers two registers: caption-like descriptions ("a man riding a horse
on the beach .") and narrative prose ("she turned and smiled at him ."). Words
that are ambiguous in the lexicon (rock, walk, park, ...) are sampled into both
noun and verb slots so the tagger learns to use context.
"""

import random

from .lexicon import default_lexicon

SINGULAR_DETS = ["a", "the", "the", "a", "this", "that", "one", "another", "each"]
PLURAL_DETS = ["the", "some", "two", "three", "several", "many", "these", "those", "four"]
PREPS = ["on", "in", "at", "near", "with", "by", "beside", "behind", "under", "over",
         "through", "across", "along", "around", "into", "toward", "from", "next to", "in front of"]
SUBJ_PRONOUNS = [("i", "VBD"), ("he", "VBZ"), ("she", "VBZ"), ("we", "VBP"), ("they", "VBP"),
                 ("you", "VBP"), ("it", "VBZ")]
OBJ_PRONOUNS = ["me", "him", "her", "us", "them", "it", "you"]
POSSESSIVES = ["my", "his", "her", "their", "our", "your", "its"]
MODALS = ["could", "would", "can", "will", "might", "should", "must"]
CD_WORDS = {"two", "three", "four", "one"}
MULTI_PREP_TAGS = {"next to": ["JJ", "TO"], "in front of": ["IN", "NN", "IN"]}


class Grammar:
    def __init__(self, rng, lex=None):
        self.rng = rng
        self.lex = lex or default_lexicon()
        self.nouns = sorted(self.lex.nouns)
        self.verbs = sorted(self.lex.verbs)
        self.adjs = sorted(self.lex.adjectives - {"several", "many", "few", "much", "more", "most",
                                                  "other", "only", "own", "first", "last"})
        self.advs = sorted(self.lex.adverbs - {"not", "n't", "home"})
        self.names = sorted(self.lex.names)
        # words that appear as both noun and verb get extra exposure in both slots
        self.ambiguous = sorted(self.lex.nouns & self.lex.verbs)

    def pick(self, seq):
        return seq[self.rng.randrange(len(seq))]

    def coin(self, p):
        return self.rng.random() < p

    def noun(self, tag="NN"):
        base = self.pick(self.ambiguous) if self.coin(0.2) else self.pick(self.nouns)
        return [(self.lex.forms[("noun", base)][tag], tag)]

    def verb(self, tag):
        base = self.pick(self.ambiguous) if self.coin(0.15) else self.pick(self.verbs)
        return [(self.lex.forms[("verb", base)][tag], tag)]

    def adjp(self):
        out = []
        if self.coin(0.1):
            out.append((self.pick(["very", "really", "quite"]), "RB"))
        out.append((self.pick(self.adjs), "JJ"))
        return out

    def np(self, plural=None, allow_pron=False):
        if plural is None:
            plural = self.coin(0.3)
        if allow_pron and self.coin(0.15):
            return [(self.pick(OBJ_PRONOUNS), "PRP")]
        if not plural and self.coin(0.05):
            return [(self.pick(self.names), "NNP")]
        out = []
        r = self.rng.random()
        if r < 0.15:
            out.append((self.pick(POSSESSIVES), "PRP$"))
        elif r < 0.9 or not plural:
            det = self.pick(PLURAL_DETS if plural else SINGULAR_DETS)
            if det in CD_WORDS:
                out.append((det, "CD"))
            elif det in ("several", "many"):
                out.append((det, "JJ"))
            else:
                out.append((det, "DT"))
        if self.coin(0.35):
            out += self.adjp()
            if self.coin(0.15):
                out += self.adjp()
        if self.coin(0.15):
            out += self.noun("NN")
        out += self.noun("NNS" if plural else "NN")
        return out

    def pp(self):
        prep = self.pick(PREPS)
        words = prep.split()
        tags = MULTI_PREP_TAGS.get(prep, ["IN"])
        return list(zip(words, tags)) + self.np(allow_pron=self.coin(0.3))

    def maybe_pp(self, p=0.5):
        return self.pp() if self.coin(p) else []

    def end(self):
        return [(self.pick([".", ".", ".", "!"]), ".")] if self.coin(0.9) else []

    # caption register -------------------------------------------------
    def caption(self):
        r = self.rng.randrange(12)
        if r == 0:
            out = self.np(False) + self.verb("VBG") + self.np() + self.maybe_pp()
        elif r == 1:
            out = self.np(False) + [("is", "VBZ")] + self.verb("VBG") + self.np() + self.maybe_pp()
        elif r == 2:
            out = self.np(True) + [("are", "VBP")] + self.verb("VBG") + self.maybe_pp(0.8)
        elif r == 3:
            out = self.np(False) + self.verb("VBN") + self.pp()
        elif r == 4:
            plural = self.coin(0.4)
            out = [("there", "EX"), ("are" if plural else "is", "VBP" if plural else "VBZ")]
            out += self.np(plural) + self.pp()
        elif r == 5:
            out = self.np() + self.pp() + self.maybe_pp(0.3)
        elif r == 6:
            out = self.np(False) + self.verb("VBZ") + self.np() + self.maybe_pp()
        elif r == 7:
            out = self.np(False) + [("with", "IN")] + self.np() + self.verb("VBG") + self.pp()
        elif r == 8:
            out = self.np(False) + [("and", "CC")] + self.np(False) + self.verb("VBG") + self.pp()
        elif r == 9:
            out = self.np(False) + [("is", "VBZ")] + self.verb("VBN") + self.pp()
        elif r == 10:
            out = self.np(False) + self.verb("VBG") + self.np() + [("and", "CC")] + self.verb("VBG") + self.np()
        else:
            out = self.np(True) + self.verb("VBP") + self.np() + self.maybe_pp()
        return out + self.end()

    # narrative register -----------------------------------------------
    def subject(self):
        if self.coin(0.6):
            pron, _ = self.pick(SUBJ_PRONOUNS)
            return [(pron, "PRP")]
        return self.np(False)

    def narrative(self):
        r = self.rng.randrange(16)
        if r == 0:
            out = self.subject() + self.verb("VBD") + (self.pp() if self.coin(0.5) else self.np(allow_pron=True))
        elif r == 1:
            out = self.subject() + self.verb("VBD") + [("and", "CC")] + self.verb("VBD")
            if self.coin(0.4):
                out.append((self.pick(self.advs), "RB"))
        elif r == 2:
            out = [(self.pick(POSSESSIVES), "PRP$")] + self.noun() + self.verb("VBD")
            if self.coin(0.4):
                out.append((self.pick(self.advs), "RB"))
        elif r == 3:
            out = [("i", "PRP")] + self.verb("VBD") + [("at", "IN"), (self.pick(OBJ_PRONOUNS), "PRP"), (",", ",")]
            out += [(self.pick(["and", "but"]), "CC"), (self.pick(["he", "she", "they"]), "PRP")] + self.verb("VBD")
        elif r == 4:
            out = self.subject() + [(self.pick(MODALS), "MD")] + self.verb("VB") + self.np(allow_pron=True)
        elif r == 5:
            out = self.subject() + [("had", "VBD")] + self.verb("VBN") + self.np(allow_pron=True) + self.maybe_pp(0.4)
        elif r == 6:
            be = self.pick(["was", "were"])
            out = self.subject() + [(be, "VBD")] + self.verb("VBG") + self.np(allow_pron=True) + self.maybe_pp(0.3)
        elif r == 7:
            out = self.subject() + [("did", "VBD"), ("n't", "RB")] + self.verb("VB") + self.np(allow_pron=True)
        elif r == 8:
            pron = self.pick(["they", "we", "you", "i"])
            out = [(pron, "PRP")] + self.verb("VBP") + (self.np(allow_pron=True) if self.coin(0.6) else [])
        elif r == 9:
            out = [(self.pick(self.names), "NNP")] + self.verb("VBD") + [(self.pick(POSSESSIVES), "PRP$")] + self.noun()
        elif r == 10:
            out = self.np(False) + self.verb("VBD") + self.pp() + self.maybe_pp(0.2)
        elif r == 11:
            out = self.subject() + self.verb("VBD") + [("to", "TO")] + self.verb("VB") + self.np(allow_pron=True)
        elif r == 12:
            out = self.subject() + [(self.pick(["was", "is"]), "VBD")]
            out[-1] = (out[-1][0], "VBD" if out[-1][0] == "was" else "VBZ")
            out += self.adjp()
        elif r == 13:
            subj = self.pick(["i", "it", "he", "she", "you", "we"])
            clitic = {"i": ("'m", "VBP"), "you": ("'re", "VBP"), "we": ("'re", "VBP")}.get(subj, ("'s", "VBZ"))
            out = [(subj, "PRP"), clitic] + (self.adjp() if self.coin(0.6) else self.verb("VBG") + self.np(allow_pron=True))
        elif r == 14:
            out = [(self.pick(self.names), "NNP"), ("'s", "POS")] + self.noun() + self.verb("VBD") + self.maybe_pp(0.5)
        else:
            out = self.verb("VB") + self.np(allow_pron=True) + self.maybe_pp(0.3)
        if self.coin(0.15):
            out += [(",", ",")] + self.subject() + self.verb("VBD")
        return out + self.end()

    def sentence(self):
        return self.caption() if self.coin(0.5) else self.narrative()


def generate(n, seed=0):
    """Return ``n`` tagged sentences, each a list of (word, penn_tag) pairs."""
    rng = random.Random(seed)
    g = Grammar(rng)
    out = []
    for _ in range(n):
        sent = g.sentence()
        if rng.random() < 0.5:
            sent[0] = (sent[0][0].capitalize(), sent[0][1])
        out.append(sent)
    return out

"""Lexicon-backed averaged-perceptron POS tagger.

Predicts Penn Treebank tags; :data:`COARSE` maps them onto the coarse classes
used by the term pipeline. Words whose lexicon entry admits a single tag are
tagged directly; everything else goes through the perceptron, which sees the
lexicon's ambiguity class as a feature.
"""

import gzip
import json
import random
from collections import defaultdict
from functools import lru_cache
from importlib import resources

from .lexicon import default_lexicon

COARSE_TAGS = ("NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "CONJ",
               "PART", "NUM", "PUNCT", "OTHER")

COARSE = {
    "NN": "NOUN", "NNS": "NOUN", "NNP": "NOUN", "NNPS": "NOUN",
    "VB": "VERB", "VBD": "VERB", "VBG": "VERB", "VBN": "VERB", "VBP": "VERB",
    "VBZ": "VERB", "MD": "VERB",
    "JJ": "ADJ", "JJR": "ADJ", "JJS": "ADJ",
    "RB": "ADV", "RBR": "ADV", "RBS": "ADV", "WRB": "ADV",
    "PRP": "PRON", "PRP$": "PRON", "WP": "PRON", "WP$": "PRON", "EX": "PRON",
    "DT": "DET", "PDT": "DET", "WDT": "DET",
    "IN": "ADP",
    "CC": "CONJ",
    "TO": "PART", "RP": "PART", "POS": "PART",
    "CD": "NUM",
    ".": "PUNCT", ",": "PUNCT", ":": "PUNCT", "``": "PUNCT", "''": "PUNCT",
    "-LRB-": "PUNCT", "-RRB-": "PUNCT", "#": "PUNCT", "$": "PUNCT",
    "UH": "OTHER", "SYM": "OTHER", "FW": "OTHER", "LS": "OTHER",
}

START = ("-START-", "-START2-")
END = ("-END-", "-END2-")


class AveragedPerceptron:
    """Multiclass perceptron with weight averaging (Collins 2002)."""

    def __init__(self):
        self.weights = {}
        self.classes = set()
        self._totals = defaultdict(float)
        self._tstamps = defaultdict(int)
        self.i = 0

    def predict(self, features):
        scores = defaultdict(float)
        for feat in features:
            weights = self.weights.get(feat)
            if not weights:
                continue
            for label, w in weights.items():
                scores[label] += w
        # ties go to the alphabetically first label
        return max(sorted(self.classes), key=lambda label: scores[label])

    def update(self, truth, guess, features):
        self.i += 1
        if truth == guess:
            return
        for f in features:
            weights = self.weights.setdefault(f, {})
            for label, delta in ((truth, 1.0), (guess, -1.0)):
                w = weights.get(label, 0.0)
                key = (f, label)
                self._totals[key] += (self.i - self._tstamps[key]) * w
                self._tstamps[key] = self.i
                weights[label] = w + delta

    def average_weights(self):
        for feat, weights in self.weights.items():
            averaged = {}
            for label, w in weights.items():
                key = (feat, label)
                total = self._totals[key] + (self.i - self._tstamps[key]) * w
                avg = round(total / self.i, 4)
                if avg:
                    averaged[label] = avg
            self.weights[feat] = averaged
        self.weights = {f: w for f, w in self.weights.items() if w}


class PerceptronTagger:
    def __init__(self, model=None, lexicon=None):
        self.lexicon = lexicon or default_lexicon()
        self.model = model or AveragedPerceptron()

    def _ambiguity(self, word):
        if word in START or word in END:
            return word
        tags = self.lexicon.tags(word)
        return "|".join(sorted(tags)) if tags else "UNK"

    def _unique_tag(self, word):
        tags = self.lexicon.tags(word)
        if len(tags) == 1:
            return next(iter(tags))
        if not tags and any(c.isdigit() for c in word):
            return "CD"
        return None

    def _features(self, i, words, prev, prev2):
        w = words[i]
        lw = w.lower()
        ctx = [START[0], START[1]] + [x.lower() for x in words] + [END[0], END[1]]
        j = i + 2
        feats = [
            "bias",
            "w=" + lw,
            "s3=" + lw[-3:],
            "s2=" + lw[-2:],
            "p1=" + lw[:1],
            "amb=" + self._ambiguity(lw),
            "t-1=" + prev,
            "t-2t-1=" + prev2 + "|" + prev,
            "t-1w=" + prev + "|" + lw,
            "w-1=" + ctx[j - 1],
            "amb-1=" + self._ambiguity(ctx[j - 1]),
            "w-2=" + ctx[j - 2],
            "w+1=" + ctx[j + 1],
            "amb+1=" + self._ambiguity(ctx[j + 1]),
            "amb+1amb=" + self._ambiguity(ctx[j + 1]) + "|" + self._ambiguity(lw),
            "t-1amb=" + prev + "|" + self._ambiguity(lw),
            "w+2=" + ctx[j + 2],
            "s3+1=" + ctx[j + 1][-3:],
        ]
        if w[:1].isupper() and i > 0:
            feats.append("title")
        if "-" in w:
            feats.append("hyphen")
        return feats

    def tag(self, words):
        """Return Penn tags for a list of tokens."""
        prev, prev2 = START
        tags = []
        for i, w in enumerate(words):
            tag = self._unique_tag(w)
            if tag is None:
                tag = self.model.predict(self._features(i, words, prev, prev2))
            tags.append(tag)
            prev2, prev = prev, tag
        return tags

    def train(self, sentences, n_iter=8, seed=0):
        """Train on (word, tag) sentences; ambiguous tokens only."""
        rng = random.Random(seed)
        sentences = list(sentences)
        for sent in sentences:
            self.model.classes.update(t for _, t in sent)
        for _ in range(n_iter):
            for sent in sentences:
                words = [w for w, _ in sent]
                prev, prev2 = START
                for i, (w, truth) in enumerate(sent):
                    guess = self._unique_tag(w)
                    if guess is None:
                        feats = self._features(i, words, prev, prev2)
                        guess = self.model.predict(feats)
                        self.model.update(truth, guess, feats)
                    prev2, prev = prev, truth
            rng.shuffle(sentences)
        self.model.average_weights()

    def to_json(self):
        return {"classes": sorted(self.model.classes), "weights": self.model.weights}

    def save(self, path):
        with gzip.open(path, "wt", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, sort_keys=True, separators=(",", ":"))

    @classmethod
    def load(cls, path=None, lexicon=None):
        if path is None:
            ref = resources.files("semstyle.termpipe").joinpath("data/tagger.json.gz")
            with ref.open("rb") as raw, gzip.open(raw, "rt", encoding="utf-8") as fh:
                data = json.load(fh)
        else:
            with gzip.open(path, "rt", encoding="utf-8") as fh:
                data = json.load(fh)
        model = AveragedPerceptron()
        model.classes = set(data["classes"])
        model.weights = data["weights"]
        return cls(model, lexicon)


@lru_cache(maxsize=None)
def default_tagger():
    return PerceptronTagger.load()

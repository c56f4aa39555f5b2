"""BM25 index over sentences for the term-retrieval baseline."""

import json
import math
from collections import Counter, defaultdict
from pathlib import Path

from ..corpus import CorpusError, stem
from ..text import tokenize


def analyze(text):
    """Tokenize, lowercase and Porter-stem; punctuation is dropped."""
    return [stem(w.lower()) for w in tokenize(text) if any(ch.isalnum() for ch in w)]


class Bm25Index:
    def __init__(self, documents, b=0.75, k1=1.2):
        self.docs = list(documents)
        if not self.docs:
            raise CorpusError("cannot index an empty corpus")
        self.b, self.k1 = b, k1
        self.postings = defaultdict(dict)  # term -> {doc id: tf}
        self.lengths = []
        for i, doc in enumerate(self.docs):
            terms = analyze(doc)
            self.lengths.append(len(terms))
            for t, tf in Counter(terms).items():
                self.postings[t][i] = tf
        self.avgdl = sum(self.lengths) / len(self.lengths)

    def idf(self, term):
        """ln(1 + (N - df + 0.5) / (df + 0.5)), positive for any df <= N."""
        n, df = len(self.docs), len(self.postings.get(term, ()))
        return math.log(1.0 + (n - df + 0.5) / (df + 0.5))

    def term_score(self, tf, length, idf):
        norm = self.k1 * (1.0 - self.b + self.b * length / self.avgdl) if self.avgdl else self.k1
        return idf * tf * (self.k1 + 1.0) / (tf + norm)

    def scores(self, query_words):
        """OR query: {doc id: score} over documents matching any query term."""
        out = defaultdict(float)
        for t in dict.fromkeys(t for w in query_words for t in analyze(w)):
            idf = self.idf(t)
            for doc, tf in self.postings.get(t, {}).items():
                out[doc] += self.term_score(tf, self.lengths[doc], idf)
        return dict(out)

    def search(self, query_words, n=1):
        """Top-n (doc id, score, text); ties go to the lower doc id."""
        ranked = sorted(self.scores(query_words).items(), key=lambda kv: (-kv[1], kv[0]))
        return [(d, s, self.docs[d]) for d, s in ranked[:n]]

    def save(self, directory):
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        (d / "bm25.json").write_text(json.dumps({"b": self.b, "k1": self.k1, "docs": self.docs}),
                                     encoding="utf-8")

    @classmethod
    def load(cls, directory):
        obj = json.loads((Path(directory) / "bm25.json").read_text(encoding="utf-8"))
        return cls(obj["docs"], obj["b"], obj["k1"])


def bm25_retrieve(terms, index, n=1):
    """Sentences for a bag of query words (or rendered terms: lemmas are used)."""
    words = []
    for t in terms:
        t = t if isinstance(t, str) else t.render()
        if t.endswith("_FRAME"):
            continue
        head, sep, pos = t.rpartition("_")
        words.append(head if sep and pos.isupper() else t)
    return [text for _, _, text in index.search(words, n)]

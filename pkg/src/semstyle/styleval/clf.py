"""Binary style classifier: L2 logistic regression on 1,2-gram presence features."""

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import optimize, sparse

from ..corpus import CorpusError
from ..text import normalize

BIGRAM_SEP = "§"


def ngram_features(tokens):
    """Binary unigram and bigram presence features (bigram keys joined by the section sign)."""
    feats = set(tokens)
    feats.update(f"{a}{BIGRAM_SEP}{b}" for a, b in zip(tokens, tokens[1:]))
    return feats


def _tokens(sentence):
    return normalize(sentence) if isinstance(sentence, str) else list(sentence)


@dataclass
class ClfModel:
    feature_index: dict
    weights: np.ndarray
    bias: float
    l2: float = 1.0
    converged: bool = True

    def matrix(self, sentences):
        rows, cols = [], []
        for i, s in enumerate(sentences):
            for f in ngram_features(_tokens(s)):
                j = self.feature_index.get(f)
                if j is not None:
                    rows.append(i)
                    cols.append(j)
        data = np.ones(len(rows))
        return sparse.csr_matrix((data, (rows, cols)), shape=(len(sentences), len(self.feature_index)))

    def decision(self, sentences):
        return self.matrix(sentences) @ self.weights + self.bias

    def predict_proba(self, sentences):
        return 1.0 / (1.0 + np.exp(-self.decision(sentences)))

    def predict(self, sentences):
        """1 for styled, 0 for descriptive (sigma(w.x + b) >= 0.5)."""
        return (self.decision(sentences) >= 0.0).astype(int)

    def save(self, path):
        feats = sorted(self.feature_index, key=self.feature_index.get)
        obj = {"l2": self.l2, "bias": self.bias, "features": feats,
               "weights": [float(w) for w in self.weights]}
        Path(path).write_text(json.dumps(obj, ensure_ascii=False), encoding="utf-8")

    @classmethod
    def load(cls, path):
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        index = {f: i for i, f in enumerate(obj["features"])}
        return cls(index, np.array(obj["weights"]), float(obj["bias"]), obj["l2"])


def train_clf(styled, descriptive, l2=1.0, min_count=2, gtol=1e-6):
    """Fit on styled (label 1) and descriptive (label 0) sentences.

    Sentences may be raw strings (normalized here) or token lists. Features
    seen in fewer than ``min_count`` training sentences are dropped. The
    objective is the summed log loss plus l2/2 * |w|^2 (bias unpenalized),
    minimized by L-BFGS until the gradient norm falls below ``gtol``.
    """
    styled, descriptive = list(styled), list(descriptive)
    if not styled or not descriptive:
        raise CorpusError("classifier needs both styled and descriptive sentences")
    sents = styled + descriptive
    y = np.array([1.0] * len(styled) + [0.0] * len(descriptive))
    df = Counter(f for s in sents for f in ngram_features(_tokens(s)))
    index = {f: i for i, f in enumerate(sorted(f for f, c in df.items() if c >= min_count))}
    model = ClfModel(index, np.zeros(len(index)), 0.0, l2)
    X = model.matrix(sents)
    sign = 2.0 * y - 1.0

    def objective(theta):
        w, b = theta[:-1], theta[-1]
        z = sign * (X @ w + b)
        loss = np.logaddexp(0.0, -z).sum() + 0.5 * l2 * w @ w
        g = -sign * _sigmoid(-z)
        grad = np.concatenate([X.T @ g + l2 * w, [g.sum()]])
        return loss, grad

    res = optimize.minimize(objective, np.zeros(len(index) + 1), jac=True, method="L-BFGS-B",
                            options={"gtol": gtol, "ftol": 0.0, "maxiter": 10000})
    model.weights, model.bias = res.x[:-1], float(res.x[-1])
    model.converged = bool(np.linalg.norm(objective(res.x)[1]) < max(gtol * 10, 1e-5))
    return model


def _sigmoid(z):
    return np.exp(-np.logaddexp(0.0, -z))


def clf_fraction(model, sentences):
    """Share of ``sentences`` classified as styled."""
    sentences = list(sentences)
    if not sentences:
        raise CorpusError("no sentences to classify")
    return float(model.predict(sentences).mean())


def cross_val_accuracy(styled, descriptive, folds=5, seed=0, **kw):
    """k-fold accuracy with a seeded shuffle; returns (mean, per-fold list)."""
    items = [(s, 1) for s in styled] + [(s, 0) for s in descriptive]
    order = np.random.default_rng(seed).permutation(len(items))
    accs = []
    for k in range(folds):
        test_idx = set(order[k::folds].tolist())
        train = [items[i] for i in range(len(items)) if i not in test_idx]
        test = [items[i] for i in sorted(test_idx)]
        m = train_clf([s for s, y in train if y], [s for s, y in train if not y], **kw)
        pred = m.predict([s for s, _ in test])
        accs.append(float(np.mean(pred == np.array([y for _, y in test]))))
    return float(np.mean(accs)), accs

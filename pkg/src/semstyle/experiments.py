"""Desk-scale experiments on the synthetic corpora in ``toy``.

Each function trains small models from a fixed seed and returns a plain dict
of measurements; the scripts in ``scripts/`` and the acceptance tests both
call into here.
"""

import time

import numpy as np

from . import toy
from .corpus import STYLE_TOKENS
from .langgen import generate_batch
from .styleval import clf_fraction, coverage_counts, cross_val_accuracy, train_clf
from .trainer import TrainConfig, train_langgen

DESC, STYLED = STYLE_TOKENS

# small but not trivial: a few seconds per model on one core
TOY_LANGGEN = dict(lr=0.005, dropout=0.0, embed_dim=32, hidden_dim=48)


def _decode_all(model, term_lists, style):
    outs, _ = generate_batch(model, [model.in_vocab.encode(t) for t in term_lists], style)
    return [" ".join(model.out_vocab.decode(o)) for o in outs]


def _coverage(term_lists, sentences):
    c = np.zeros(4, dtype=int)
    for terms, s in zip(term_lists, sentences):
        c += coverage_counts(terms, s)
    return c[0] / c[1], c[2] / c[3]


def overfit(n_pairs=50, seed=0, epochs=200, batch_size=10):
    """Memorize ``n_pairs`` toy pairs (half descriptive, half styled) and
    regenerate them from their terms."""
    train, _ = toy.split_triples(200, seed=seed)
    rng = np.random.default_rng(seed)
    chosen = [train[i] for i in rng.choice(len(train), n_pairs, replace=False)]
    desc, styled = toy.two_style_pairs(chosen)
    half = n_pairs // 2
    desc, styled = desc[:half], styled[half:]
    cfg = TrainConfig(batch_size=batch_size, epochs=epochs, seed=seed, **TOY_LANGGEN)
    t0 = time.perf_counter()
    model = train_langgen(desc, styled, cfg)
    seconds = time.perf_counter() - t0

    terms, targets, generated = [], [], []
    for pairs, style in ((desc, DESC), (styled, STYLED)):
        terms += [t for t, _ in pairs]
        targets += [" ".join(w) for _, w in pairs]
        generated += _decode_all(model, [t for t, _ in pairs], style)
    exact = float(np.mean([g == t for g, t in zip(generated, targets)]))
    word_cov, frame_cov = _coverage(terms, generated)
    return {"exact": exact, "steps": model.history.epochs[-1].steps, "seconds": seconds,
            "final_loss": model.history.losses[-1], "coverage_word_terms": word_cov,
            "coverage_frame_terms": frame_cov, "model": model, "generated": generated,
            "targets": targets}


def toy_clf(seed=0):
    """Style classifier on every toy triple rendered in both styles."""
    triples = toy.all_triples()
    styled = [toy.styled_sentence(*t) for t in triples]
    desc = [toy.descriptive_sentence(*t) for t in triples]
    return train_clf(styled, desc), styled, desc


def clf_cv(seed=0, folds=5):
    triples = toy.all_triples()
    styled = [toy.styled_sentence(*t) for t in triples]
    desc = [toy.descriptive_sentence(*t) for t in triples]
    mean, per_fold = cross_val_accuracy(styled, desc, folds=folds, seed=seed)
    return {"accuracy": mean, "folds": per_fold}


def style_switch(seed=0, n_heldout=200, epochs=30, batch_size=64):
    """Train jointly on both toy styles, then decode held-out term inputs with
    each style token and compare classifier verdicts."""
    train, held = toy.split_triples(n_heldout, seed=seed)
    desc, styled = toy.two_style_pairs(train)
    cfg = TrainConfig(batch_size=batch_size, epochs=epochs, seed=seed, **{**TOY_LANGGEN, "dropout": 0.1})
    t0 = time.perf_counter()
    model = train_langgen(desc, styled, cfg)
    seconds = time.perf_counter() - t0
    # the classifier only sees training-split sentences
    clf = train_clf([" ".join(w) for _, w in styled], [" ".join(w) for _, w in desc])

    held_desc, held_styled = toy.two_style_pairs(held)
    terms = [t for t, _ in held_desc]
    as_desc = _decode_all(model, terms, DESC)
    as_styled = _decode_all(model, terms, STYLED)
    v_desc, v_styled = clf.predict(as_desc), clf.predict(as_styled)
    return {
        "flip_rate": float(np.mean(v_desc != v_styled)),
        "clf_fraction_desc": clf_fraction(clf, as_desc),
        "clf_fraction_styled": clf_fraction(clf, as_styled),
        "exact_desc": float(np.mean([g == " ".join(w) for g, (_, w) in zip(as_desc, held_desc)])),
        "exact_styled": float(np.mean([g == " ".join(w) for g, (_, w) in zip(as_styled, held_styled)])),
        "seconds": seconds, "model": model, "clf": clf,
        "samples": list(zip(as_desc[:3], as_styled[:3])),
    }


def possel_run(seed=0, n_sentences=400, epochs=30, budget=0.33, drop=0.66):
    """Rank word classes on the noun-driven corpus; returns the ranking."""
    from .possel import rank_word_classes, split_corpus, train_denoising_lm
    corpus = toy.noun_driven_corpus(n_sentences, seed=seed)
    train, held = split_corpus(corpus, 0.1, seed=seed)
    cfg = TrainConfig(lr=0.005, batch_size=64, epochs=epochs, seed=seed, dropout=0.0,
                      embed_dim=24, hidden_dim=32)
    t0 = time.perf_counter()
    dlm = train_denoising_lm(train, cfg, drop)
    ranking = rank_word_classes(dlm, held, budget, seed=seed)
    return {"order": ranking.order, "trace": ranking.trace, "most_important": ranking.order[-1],
            "seconds": time.perf_counter() - t0, "final_loss": dlm.losses[-1]}

"""Synthetic corpora for desk-scale experiments.

The two-style corpus renders the same (subject, verb, place) triple as a
present-tense caption ("a dog is sitting on the bench .") or a past-tense
story sentence ("the dog sat on the bench ."). Every verb evokes a distinct
frame, so a sentence is a deterministic function of its terms and style.
"""

import itertools

import numpy as np

SUBJECTS = ("man", "woman", "boy", "girl", "dog", "cat", "child", "bird", "horse", "elephant")
PLACES = ("bench", "beach", "field", "street", "table", "grass", "lake", "hill", "road", "house")
# (gerund, past tense, preposition)
VERBS = (
    ("sitting", "sat", "on"),
    ("standing", "stood", "on"),
    ("walking", "walked", "along"),
    ("eating", "ate", "near"),
    ("looking", "looked", "at"),
    ("riding", "rode", "across"),
    ("sleeping", "slept", "on"),
    ("playing", "played", "in"),
    ("cooking", "cooked", "in"),
)


def descriptive_sentence(subj, verb, place):
    ing, _, prep = verb
    return f"a {subj} is {ing} {prep} the {place} ."


def styled_sentence(subj, verb, place):
    _, past, prep = verb
    return f"the {subj} {past} {prep} the {place} ."


def all_triples():
    return list(itertools.product(SUBJECTS, VERBS, PLACES))


def split_triples(n_heldout=200, seed=0):
    """Seeded (train, held-out) split of all triples."""
    triples = all_triples()
    order = np.random.default_rng(seed).permutation(len(triples))
    held = [triples[i] for i in sorted(order[:n_heldout])]
    train = [triples[i] for i in sorted(order[n_heldout:])]
    return train, held


def with_terms(sentences, tagger=None):
    """(rendered terms, tokens) pairs via the term pipeline."""
    from .termpipe.pipeline import extract_terms
    return [(extract_terms(s, tagger=tagger).render(), s.split()) for s in sentences]


def two_style_pairs(triples, tagger=None):
    """(descriptive pairs, styled pairs) for the given triples."""
    desc = with_terms([descriptive_sentence(*t) for t in triples], tagger)
    styled = with_terms([styled_sentence(*t) for t in triples], tagger)
    return desc, styled


def triple_features(triples, dim=64, noise=0.0, seed=0):
    """Fake image features: a fixed random code per subject, verb and place, summed."""
    rng = np.random.default_rng(seed)
    codes = {}
    for name in [*SUBJECTS, *(v[0] for v in VERBS), *PLACES]:
        codes[name] = rng.normal(size=dim)
    feats = np.array([codes[s] + codes[v[0]] + codes[p] for s, v, p in triples])
    if noise:
        feats += noise * rng.normal(size=feats.shape)
    return feats.astype(np.float32)


# --------------------------------------------------------------------------
# word-class corpus for the importance search

NOUN_WORDS = ("dog", "cat", "man", "horse", "bird", "boat", "car", "tree")
# each companion word is a many-to-one function of the noun, so the noun
# predicts everything while no other single class identifies the noun
ADJ_WORDS = ("big", "small")
VERB_WORDS = ("moves", "rests")
ADV_WORDS = ("slowly", "quickly")


def noun_companions(idx):
    return VERB_WORDS[idx % 2], ADJ_WORDS[idx // 4], ADV_WORDS[(idx // 2) % 2]


def noun_driven_corpus(n=400, seed=0):
    """Tagged sentences where the two nouns determine every other word.

    Pattern: DET ADJ1 NOUN1 VERB1 ADV1 CONJ DET ADJ2 NOUN2 VERB2 ADV2. Returns
    a list of (word, coarse POS) lists.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        a, b = rng.choice(len(NOUN_WORDS), size=2, replace=False)
        sent = []
        for k, idx in enumerate((a, b)):
            verb, adj, adv = noun_companions(idx)
            if k:
                sent.append(("and", "CONJ"))
            sent += [("the", "DET"), (adj, "ADJ"), (NOUN_WORDS[idx], "NOUN"), (verb, "VERB"), (adv, "ADV")]
        out.append(sent)
    return out

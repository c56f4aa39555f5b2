"""Fit the term generator on fake image features for toy triples and decode held-out ones."""

import argparse

import numpy as np

from semstyle import toy
from semstyle.termgen import decode_ids
from semstyle.trainer import TrainConfig, train_termgen


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--epochs", type=int, default=40)
    ap.add_argument("--noise", type=float, default=0.1)
    args = ap.parse_args()
    train, held = toy.split_triples(200, seed=args.seed)
    terms = [t for t, _ in toy.with_terms([toy.descriptive_sentence(*t) for t in train + held])]
    feats = toy.triple_features(train + held, dim=64, noise=args.noise, seed=args.seed)
    n = len(train)
    cfg = TrainConfig(lr=0.005, batch_size=64, epochs=args.epochs, seed=args.seed, dropout=0.1,
                      embed_dim=32, hidden_dim=48, feature_dim=64)
    model = train_termgen(feats[:n], terms[:n], cfg,
                          callback=lambda s: print(f"{s.epoch}\t{s.loss:.4f}"))
    for name, rows in (("train", range(n)), ("heldout", range(n, len(terms)))):
        hits = [model.vocab.decode(decode_ids(model, feats[i])) == terms[i] for i in rows]
        print(f"{name}_exact\t{np.mean(hits):.4f}")


if __name__ == "__main__":
    main()

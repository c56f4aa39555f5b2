"""Train the bundled POS tagger and write src/semstyle/termpipe/data/tagger.json.gz.

    python scripts/train_tagger.py --sentences 12000 --iters 8 --seed 0
"""

import argparse
import pathlib
import random

from semstyle.termpipe import treebank
from semstyle.termpipe.tagger import PerceptronTagger

OUT = pathlib.Path(__file__).resolve().parents[1] / "src/semstyle/termpipe/data/tagger.json.gz"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sentences", type=int, default=12000)
    ap.add_argument("--iters", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=str(OUT))
    args = ap.parse_args()

    sents = treebank.generate(args.sentences + 1000, seed=args.seed)
    train, held = sents[:args.sentences], sents[args.sentences:]
    tagger = PerceptronTagger()
    tagger.train(train, n_iter=args.iters, seed=args.seed)

    correct = total = 0
    for sent in held:
        pred = tagger.tag([w for w, _ in sent])
        correct += sum(p == t for p, (_, t) in zip(pred, sent))
        total += len(sent)
    print(f"held-out token accuracy\t{correct / total:.4f}")
    tagger.save(args.out)
    print(f"wrote\t{args.out}")


if __name__ == "__main__":
    main()

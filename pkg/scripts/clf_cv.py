"""Five-fold accuracy of the style classifier on the toy two-style corpus."""

import argparse

from semstyle import experiments


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--folds", type=int, default=5)
    args = ap.parse_args()
    r = experiments.clf_cv(args.seed, args.folds)
    print(f"cv_accuracy\t{r['accuracy']:.4f}")
    print("folds\t" + " ".join(f"{a:.4f}" for a in r["folds"]))


if __name__ == "__main__":
    main()

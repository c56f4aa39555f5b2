"""Joint two-style training on the toy corpus, then flip the style token on held-out inputs."""

import argparse

from semstyle import experiments


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--heldout", type=int, default=200)
    ap.add_argument("--epochs", type=int, default=30)
    args = ap.parse_args()
    r = experiments.style_switch(args.seed, args.heldout, args.epochs)
    for key in ("flip_rate", "clf_fraction_desc", "clf_fraction_styled", "exact_desc",
                "exact_styled", "seconds"):
        print(f"{key}\t{r[key]:.4f}")
    for d, s in r["samples"]:
        print(f"desc\t{d}\nstyled\t{s}")


if __name__ == "__main__":
    main()

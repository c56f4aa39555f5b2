"""Memorize 50 toy (terms -> sentence) pairs and report reconstruction and coverage."""

import argparse

from semstyle import experiments


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--pairs", type=int, default=50)
    ap.add_argument("--epochs", type=int, default=200)
    args = ap.parse_args()
    r = experiments.overfit(args.pairs, args.seed, args.epochs)
    for key in ("exact", "steps", "final_loss", "coverage_word_terms", "coverage_frame_terms", "seconds"):
        print(f"{key}\t{r[key]:.4f}" if isinstance(r[key], float) else f"{key}\t{r[key]}")
    for g, t in list(zip(r["generated"], r["targets"]))[:5]:
        print(f"#\t{g}\t|\t{t}")


if __name__ == "__main__":
    main()

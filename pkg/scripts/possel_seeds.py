"""Word-class ranking on the noun-driven corpus across several seeds."""

import argparse
import time

from semstyle import experiments


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--epochs", type=int, default=30)
    args = ap.parse_args()
    t0, hits = time.perf_counter(), 0
    for seed in range(args.seeds):
        r = experiments.possel_run(seed, epochs=args.epochs)
        hits += r["most_important"] == "NOUN"
        print(f"{seed}\t{' < '.join(r['order'])}\t{r['seconds']:.1f}s")
    print(f"noun_most_important\t{hits}/{args.seeds}\ttotal\t{time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()

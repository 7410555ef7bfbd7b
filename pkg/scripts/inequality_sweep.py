#!/usr/bin/env python3
"""Sweep the inequality-ratio ensembles over their parameter ranges.

Emits one CSV row per (check, parameter, truncation) with the ratio summary,
plus the tail-compactness table of the fractional embedding.
"""

import argparse
import csv
import os

from wavetorus import (
    EnsembleSpec,
    check_box_regularity,
    check_embedding,
    check_gn,
    check_hausdorff_young,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=400)
    ap.add_argument("--truncations", type=int, nargs="+", default=[16, 32, 64])
    ap.add_argument("--seed", type=int, default=314)
    ap.add_argument("--out", default="runs/inequalities")
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    rows = []
    for M in args.truncations:
        spec = EnsembleSpec(count=args.count, M=M, seed=args.seed)
        for p in (4.0 / 3.0, 1.5, 2.0):
            rep = check_hausdorff_young(spec, p)
            rows.append(("hausdorff_young", f"p={p:.4g}", M, rep.ratios["max"],
                         rep.ratios["mean"], rep.violation_count))
        for p in (3.0, 4.0):
            rep = check_gn(spec, p)
            rows.append(("gagliardo_nirenberg", f"p={p:g}", M, rep.ratios["max"],
                         rep.ratios["mean"], 0))
        for s in (0.5, 2.0 / 3.0):
            rep = check_embedding(spec, s, tails=(), tail_count=0)
            rows.append(("embedding", f"s={s:.4g}", M, rep.ratios["max"],
                         rep.ratios["mean"], 0))
        rep = check_box_regularity(spec, 2.0, 0.45)
        rows.append(("box_inverse_holder", "p=2,gamma=0.45", M,
                     rep.ratios["max"], rep.ratios["mean"], 0))

    tail_rep = check_embedding(EnsembleSpec(count=64, M=16, seed=args.seed),
                               0.5, tails=(8, 16, 32, 64), tail_count=64)

    path = os.path.join(args.out, "sweep.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["check", "parameter", "M", "max_ratio", "mean_ratio",
                    "violations"])
        w.writerows(rows)
    with open(os.path.join(args.out, "embedding_tails.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["T", "max_ratio"])
        for T, v in sorted(tail_rep.extras["tail_max_ratio"].items()):
            w.writerow([T, repr(v)])
    for r in rows:
        print(f"{r[0]:22s} {r[1]:12s} M={r[2]:<3d} max={r[3]:.4f} mean={r[4]:.4f}")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()

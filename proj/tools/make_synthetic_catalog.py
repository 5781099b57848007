#!/usr/bin/env python3
"""Writes data/synthetic_catalog.csv: a small catalog in the fuzzyburst CSV
layout with three short/intermediate/long burst populations plus a handful
of rows that derive_features must exclude (blank, zero and negative-coded
fields)."""

import argparse

import numpy as np

POPULATIONS = [
    # count, log10 T90 (mean, sd), log10 P256, log10 F_T, channel fractions f1..f4
    (120, (-0.35, 0.30), (0.25, 0.25), (-6.3, 0.35), (0.08, 0.14, 0.48, 0.30)),
    (130, (1.30, 0.25), (0.05, 0.20), (-5.6, 0.30), (0.20, 0.22, 0.45, 0.13)),
    (110, (1.95, 0.25), (0.70, 0.25), (-4.6, 0.35), (0.16, 0.20, 0.46, 0.18)),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=20200812)
    ap.add_argument("--output", default="data/synthetic_catalog.csv")
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    rows = []
    trig = 100
    for count, t90, p256, ft, frac in POPULATIONS:
        for _ in range(count):
            trig += int(rng.integers(1, 9))
            lt90 = rng.normal(*t90)
            lt50 = lt90 - abs(rng.normal(0.4, 0.12))
            lp256 = rng.normal(*p256)
            total = 10 ** rng.normal(*ft)
            w = np.array(frac) * np.exp(rng.normal(0.0, 0.15, 4))
            f = total * w / w.sum()
            lp64 = lp256 + abs(rng.normal(0.1, 0.05))
            lp1024 = lp256 - abs(rng.normal(0.1, 0.05))
            rows.append([trig, 10**lt50, 10**lt90, *f, 10**lp64, 10**lp256, 10**lp1024])

    order = rng.permutation(len(rows))
    rows = [rows[i] for i in order]

    # Rows that must be excluded, one per failure path.
    bad = [(3, "t50"), (11, "f3zero"), (19, "f2zero"), (27, "p256"), (35, "f4"),
           (43, "t90neg"), (51, "t90zero"), (59, "f1f2zero")]
    text = ["trigger_id,t50,t90,f1,f2,f3,f4,p64,p256,p1024"]
    for i, r in enumerate(rows):
        cells = [str(r[0])] + ["%.6g" % v for v in r[1:]]
        for idx, kind in bad:
            if idx != i:
                continue
            if kind == "t50":
                cells[1] = ""
            elif kind == "f3zero":
                cells[5] = "0"
            elif kind == "f2zero":
                cells[4] = "0"
            elif kind == "p256":
                cells[8] = ""
            elif kind == "f4":
                cells[6] = ""
            elif kind == "t90neg":
                cells[2] = "-1"
            elif kind == "t90zero":
                cells[2] = "0"
            elif kind == "f1f2zero":
                cells[3] = "0"
                cells[4] = "0"
        text.append(",".join(cells))
    with open(args.output, "w", newline="\n") as fh:
        fh.write("\n".join(text) + "\n")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Emit the construction growth tables as CSV files.

One file per family: modular for k in 4..6, split for the feasible
(k, r) pairs, and the star baseline, all against the n^(k-1) mark.
"""

import argparse
import os
import sys

from qturan.constructions import prime_select
from qturan.errors import ParameterError
from qturan.turan import growth_csv, growth_table


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="tables")
    ap.add_argument("--nmax", type=int, default=200)
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    def dump(name, rows):
        path = os.path.join(args.outdir, name)
        with open(path, "w") as f:
            f.write(growth_csv(rows))
        print(f"wrote {path}", file=sys.stderr)

    for k in (4, 5, 6):
        ns = []
        seen = set()
        for n in range(6 * k, args.nmax + 1, 2 * k):
            try:
                p = prime_select(n, k)
            except ParameterError:
                continue
            if p not in seen:
                seen.add(p)
                ns.append(n)
        dump(f"modular_k{k}.csv", growth_table("modular", k, ns))
    for k, r in ((4, 3), (5, 4), (6, 4), (6, 5)):
        ns = list(range(2 * k, min(40, args.nmax) + 1, 4))
        dump(f"split_k{k}_r{r}.csv", growth_table("split", k, ns, r=r))
    dump("star_k4.csv", growth_table("star", 4,
                                     list(range(8, min(60, args.nmax) + 1, 4))))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

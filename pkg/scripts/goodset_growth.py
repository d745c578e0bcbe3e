#!/usr/bin/env python3
"""Tabulate good-set sizes across primes for a fixed k.

Exact values where the subset search is affordable, digit-sphere lower
bounds beyond that.  Columns: p, exact size (or blank), sphere size,
sphere policy parameters.
"""

import argparse
import sys

from qturan.numbers import _is_prime, behrend_good_set, max_good_set

EXACT_CAP = 23


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--pmax", type=int, default=200)
    ap.add_argument("--out", default="", help="CSV path, stdout when empty")
    args = ap.parse_args()

    lines = ["p,k,exact,sphere,dim,base,digits"]
    for p in range(args.k + 1, args.pmax + 1):
        if not _is_prime(p):
            continue
        exact = ""
        if p <= EXACT_CAP:
            exact = str(max_good_set(p, args.k).size)
        g = behrend_good_set(p, args.k)
        meta = g.meta or {}
        lines.append(f"{p},{args.k},{exact},{g.size},"
                     f"{meta.get('dim', '')},{meta.get('base', '')},"
                     f"{meta.get('digits', '')}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

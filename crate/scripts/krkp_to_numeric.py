#!/usr/bin/env python3
"""Convert the UCI kr-vs-kp chess endgame file to a numeric CSV.

Each of the 36 categorical attributes is mapped to the index of its value in
sorted order, so binary attributes become {0, 1}. The class column becomes
1 for "won" and 0 otherwise.

    python3 scripts/krkp_to_numeric.py kr-vs-kp.data krkp.csv
"""

import argparse
import csv
import sys


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("source", help="kr-vs-kp.data (comma separated, class last)")
    parser.add_argument("target", help="numeric CSV to write")
    parser.add_argument("--positive", default="won", help="class value labelled 1")
    args = parser.parse_args()

    with open(args.source, newline="") as f:
        rows = [r for r in csv.reader(f) if r]
    if not rows:
        print(f"{args.source}: no rows", file=sys.stderr)
        return 2
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        print(f"{args.source}: ragged rows", file=sys.stderr)
        return 2

    levels = [sorted({r[j] for r in rows}) for j in range(width - 1)]
    with open(args.target, "w", newline="") as f:
        out = csv.writer(f)
        out.writerow([f"a{j + 1}" for j in range(width - 1)] + ["label"])
        for r in rows:
            codes = [levels[j].index(v) for j, v in enumerate(r[:-1])]
            out.writerow(codes + [1 if r[-1] == args.positive else 0])
    return 0


if __name__ == "__main__":
    sys.exit(main())

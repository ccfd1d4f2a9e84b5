#!/usr/bin/env python3
"""Converts Marvin & Linzen template pickles into the slot TSV read by
`tsekit ingest --ml`.

Each pickle maps a condition key (e.g. "sing_MS_MV") to a list of
(grammatical, ungrammatical) sentence pairs. The construction is the pickle's
file stem unless --construction is given; the number comes from the key.
"""

import argparse
import pickle
import sys
from pathlib import Path

BASE_FORM = {"are": "be", "is": "be", "were": "be", "was": "be", "has": "have"}


def split_pair(good, bad):
    g, b = good.split(), bad.split()
    if len(g) != len(b):
        return None
    diff = [i for i, (x, y) in enumerate(zip(g, b)) if x != y]
    if len(diff) != 1:
        return None
    i = diff[0]
    return " ".join(g[:i]), g[i], b[i], " ".join(g[i + 1:])


def number_of(key):
    head = key.split("_", 1)[0].lower()
    if head.startswith("sing"):
        return "singular"
    if head.startswith("plur"):
        return "plural"
    return None


def lemma_of(number, good_verb, bad_verb):
    base = good_verb if number == "plural" else bad_verb
    base = base.lower()
    return BASE_FORM.get(base, base)


def convert(path, construction, out, log):
    with open(path, "rb") as f:
        data = pickle.load(f)
    written = skipped = 0
    for key in sorted(data):
        number = number_of(key)
        for pair in data[key]:
            good, bad = pair[0], pair[1]
            parts = split_pair(good, bad) if number else None
            if parts is None:
                skipped += 1
                continue
            prefix, gv, bv, suffix = parts
            sentence = prefix + " ___" + (" " + suffix if suffix else "")
            out.write(f"{construction}\t{number}\t{sentence}\t{lemma_of(number, gv, bv)}\n")
            written += 1
    print(f"{path}: {written} lines, {skipped} pairs skipped", file=log)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("pickles", nargs="+", type=Path)
    ap.add_argument("--construction", help="label for every line (default: file stem)")
    ap.add_argument("-o", "--output", type=Path, help="output TSV (default: stdout)")
    args = ap.parse_args()
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        for p in args.pickles:
            convert(p, args.construction or p.stem, out, sys.stderr)
    finally:
        if args.output:
            out.close()


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Regenerate the shipped coefficient tables under crates/octic/data/forms.

Requires cypari2. Weight-4 tables come from PARI's mfeigenbasis; each entry is
selected by matching a fingerprint of a_p values so the choice is explicit.
Elliptic-curve files carry only Weierstrass data; a_p is counted by the crate.
"""
import os
import sys

import cypari2

pari = cypari2.Pari()
pari.allocatemem(2 * 10**9)

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "octic", "data", "forms")
PMAX = 997
PRIMES = [p for p in range(2, PMAX + 1) if pari.isprime(p)]
FP = [5, 7, 11, 13]

# (file label, level, fingerprint a_5, a_7, a_11, a_13)
TABLES = [
    ("12k4A1", 12, [-18, 8, 36, -10]),
    ("24k4A1", 24, [14, -24, -28, -74]),
    ("32k4B1", 32, [-10, 16, -40, -50]),
    ("96k4B1", 96, [2, -12, -60, -42]),
    ("96k4E1", 96, [-14, 36, 36, 54]),
    ("256k4H", 256, [0, 0, -18, 0]),
    ("144k4A", 144, [0, -20, 0, -70]),
    ("49k4D", 49, [0, 0, -68, 0]),
]

# (file label, level, minimal Weierstrass model)
CURVES = [
    ("24A1", 24, [0, -1, 0, -4, 4]),
    ("32A1", 32, [0, 0, 0, -1, 0]),
    ("48A1", 48, [0, 1, 0, -4, -4]),
    ("72A1", 72, [0, 0, 0, 6, -7]),
    ("96A1", 96, [0, 1, 0, -2, 0]),
    ("96B1", 96, [0, -1, 0, -2, 0]),
    ("256k2D", 256, [0, 1, 0, -3, 1]),
    ("144k2B", 144, [0, 0, 0, 0, -1]),
    ("49k2A", 49, [1, -1, 0, -2, -1]),
]



def eigenforms(level, weight):
    mf = pari.mfinit([level, weight], 0)
    out = []
    for f in pari.mfeigenbasis(mf):
        co = pari.mfcoefs(f, PMAX)
        try:
            out.append([int(co[p]) for p in range(PMAX + 1)])
        except (TypeError, ValueError):
            pass
    return out


def weight_and_letter(label, level):
    rest = label[len(str(level)):]
    if rest.startswith("k"):
        return int(rest[1]), rest[2:]
    return 2, rest


def main():
    os.makedirs(OUT, exist_ok=True)
    for label, level, fp in TABLES:
        hits = [f for f in eigenforms(level, 4) if [f[p] for p in FP] == fp]
        if len(hits) != 1:
            sys.exit(f"{label}: {len(hits)} eigenforms match fingerprint")
        f = hits[0]
        _, letter = weight_and_letter(label, level)
        with open(os.path.join(OUT, label + ".txt"), "w") as fh:
            fh.write(f"# level={level} weight=4 label={letter} source=table\n")
            for p in PRIMES:
                fh.write(f"{p} {f[p]}\n")
    for label, level, ai in CURVES:
        e = pari.ellinit(ai)
        if int(pari.ellglobalred(e)[0]) != level:
            sys.exit(f"{label}: conductor mismatch")
        aps = [int(pari.ellap(e, p)) for p in FP]
        if not any([f[p] for p in FP] == aps for f in eigenforms(level, 2)):
            sys.exit(f"{label}: no weight-2 newform with these a_p")
        _, letter = weight_and_letter(label, level)
        a1, a2, a3, a4, a6 = ai
        with open(os.path.join(OUT, label + ".txt"), "w") as fh:
            fh.write(
                f"# level={level} weight=2 label={letter} source=curve "
                f"a1={a1} a2={a2} a3={a3} a4={a4} a6={a6}\n"
            )


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Independent reference for balanced sampling.

Re-implements MT19937-64 from its published recurrence, the rejection-sampled
bounded draw and the stratified partial Fisher-Yates selection, then prints the
selected keys' digest for a dump + gold file + seed.

    sampling_oracle.py corpus.jsonl gold.csv SEED N_POS N_NEG
"""
import csv
import hashlib
import json
import sys

MASK = (1 << 64) - 1


class MT19937_64:
    def __init__(self, seed):
        self.mt = [0] * 312
        self.mt[0] = seed & MASK
        for i in range(1, 312):
            prev = self.mt[i - 1]
            self.mt[i] = (6364136223846793005 * (prev ^ (prev >> 62)) + i) & MASK
        self.index = 312

    def _twist(self):
        upper, lower = 0xFFFFFFFF80000000, 0x7FFFFFFF
        for i in range(312):
            x = (self.mt[i] & upper) | (self.mt[(i + 1) % 312] & lower)
            xa = x >> 1
            if x & 1:
                xa ^= 0xB5026F5AA96619E9
            self.mt[i] = self.mt[(i + 156) % 312] ^ xa
        self.index = 0

    def next(self):
        if self.index >= 312:
            self._twist()
        y = self.mt[self.index]
        self.index += 1
        y ^= (y >> 29) & 0x5555555555555555
        y ^= (y << 17) & 0x71D67FFFEDA60000
        y ^= (y << 37) & 0xFFF7EEE000000000
        y ^= y >> 43
        return y & MASK

    def below(self, bound):
        threshold = ((1 << 64) - bound) % bound
        while True:
            x = self.next()
            if x >= threshold:
                return x % bound


def draw(stratum, count, rng):
    stratum = list(stratum)
    for i in range(count):
        j = i + rng.below(len(stratum) - i)
        stratum[i], stratum[j] = stratum[j], stratum[i]
    return stratum[:count]


def main():
    dump, gold_path, seed, n_pos, n_neg = sys.argv[1], sys.argv[2], int(sys.argv[3]), int(sys.argv[4]), int(sys.argv[5])
    keys = []
    with open(dump) as f:
        for line in f:
            if line.strip():
                rec = json.loads(line)
                keys.append((rec["repo"], rec["number"]))
    gold = {}
    with open(gold_path) as f:
        for row in csv.DictReader(f):
            if row["fault_related"]:
                gold[(row["repo"], int(row["number"]))] = row["fault_related"].lower() in ("true", "1", "yes")
    pos = sorted((k for k in keys if gold.get(k) is True))
    neg = sorted((k for k in keys if gold.get(k) is False))
    index = {k: i for i, k in enumerate(keys)}
    rng = MT19937_64(seed)
    chosen = set(draw(pos, n_pos, rng)) | set(draw(neg, n_neg, rng))
    ordered = sorted(chosen, key=lambda k: index[k])
    text = "".join(f"{r}#{n}\n" for r, n in ordered)
    print(hashlib.sha256(text.encode()).hexdigest())
    print(len(ordered), ordered[0], ordered[-1])


if __name__ == "__main__":
    main()

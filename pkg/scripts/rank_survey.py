"""Singular-value gaps and membership residuals of the catalecticant rank presets.

Also shows how the rank drops for instances built from fewer summands.

    python scripts/rank_survey.py --instances 50
"""

import argparse

import numpy as np

from catconf.catalecticant import build_catalecticant, generating_memberships
from catconf.polyvec import random_summands, waring_forward_eval
from catconf.presets import RANK_PRESETS


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--instances", type=int, default=20)
    args = ap.parse_args()

    print(f"{'preset':14} {'shape':>7} {'rank':>5} {'worst gap':>10} {'median gap':>11} {'worst memb':>11}")
    for name, preset in sorted(RANK_PRESETS.items()):
        gaps, memb, ranks = [], [], set()
        for seed in range(args.instances):
            f, summands = preset.instance(seed)
            cat = build_catalecticant(f, preset.h)
            ranks.add(cat.rank)
            gaps.append(cat.gap)
            memb.append(max(generating_memberships(cat, summands, f.degrees)))
        shape = "x".join(map(str, cat.shape))
        print(f"{name:14} {shape:>7} {sorted(ranks)!s:>5} {max(gaps):>10.2e} {np.median(gaps):>11.2e} {max(memb):>11.2e}")

    print("\nrank against number of summands (seed 0)")
    for name, preset in sorted(RANK_PRESETS.items()):
        rng = np.random.default_rng(0)
        summands = random_summands(rng, 2, preset.r, preset.k)
        ranks = [
            build_catalecticant(waring_forward_eval(summands[:k], (preset.degree,) * preset.r), preset.h).rank
            for k in range(1, preset.k + 1)
        ]
        print(f"{name:14} {ranks}")


if __name__ == "__main__":
    main()

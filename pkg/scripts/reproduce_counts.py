"""Run monodromy on count presets over several seeds and tabulate the results.

    python scripts/reproduce_counts.py london sextic9 --seeds 1 2 3
"""

import argparse
import json
import time

from catconf.monodromy import MonodromyConfig, run, solution_set_json
from catconf.presets import COUNT_PRESETS, build_count_system
from catconf.systems import make_start_pair


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("presets", nargs="*", default=["london", "london-mixed", "segre-slice-6", "c2-slice-12", "sextic9"])
    ap.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--published-start", action="store_true", help="quartics-reduced from the published vector")
    ap.add_argument("--dump", help="write all solution sets to this JSON file")
    args = ap.parse_args()

    dumped = []
    print(f"{'preset':18} {'seed':>4} {'count':>5} {'expect':>6} {'spur':>4} {'loops':>5} {'fail':>9} {'time':>7}  history")
    for name in args.presets:
        for seed in args.seeds:
            system = build_count_system(name, seed)
            published = args.published_start and name == "quartics-reduced"
            start = make_start_pair(system, seed, published=published)
            t0 = time.perf_counter()
            state = run(system, start, MonodromyConfig(), seed=seed)
            dt = time.perf_counter() - t0
            print(f"{name:18} {seed:>4} {state.count:>5} {COUNT_PRESETS[name].expected:>6} {state.spurious:>4} "
                  f"{state.loops_run:>5} {state.path_failures:>4}/{state.paths_tracked:<4} {dt:>6.1f}s  {state.history}",
                  flush=True)
            dumped.append(solution_set_json(state, name))
            if published:
                break
    if args.dump:
        with open(args.dump, "w") as fh:
            json.dump(dumped, fh, indent=1)


if __name__ == "__main__":
    main()

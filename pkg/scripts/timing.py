"""Per-case wall time of each suite at a small scale, extrapolated to full counts."""
from __future__ import annotations

import argparse
import time

from gq import suites as S
from gq.suites import dnb_configurations

SMALL = {"exp-bch": 20, "condition": 20, "oracle": 10, "dvb": 10, "pike": 10, "lifts": 20}
FULL = {"exp-bch": 200, "condition": 200, "oracle": 100, "dvb": 100, "pike": 100, "lifts": 200}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--dnb-max-m", type=int, default=5)
    a = ap.parse_args()
    for name, n in SMALL.items():
        t = time.time()
        S.SUITES[name](a.seed, n)
        dt = time.time() - t
        # the dvb suite has a fixed part (group law, dim P11) that does not scale with cases
        print(f"{name:16s} {n:4d} cases {dt:7.2f}s  ~{dt * FULL[name] / n:8.1f}s at {FULL[name]}")
    t = time.time()
    r = S.suite_dnb(a.seed, twists=1, max_m=a.dnb_max_m)
    dt = time.time() - t
    n_conf = sum(1 for _ in dnb_configurations(a.dnb_max_m))
    print(f"{'double-normal':16s} {n_conf} configurations x 1 twist {dt:7.1f}s"
          f"  ~{dt * 21 / 2:8.1f}s at 20 twists (failed {r.failed})")
    t = time.time()
    S.suite_wnb(a.seed, twists=2, max_m=4)
    dt = time.time() - t
    print(f"{'weighted-normal':16s} 2 twists {dt:7.2f}s  ~{dt * 21 / 3:8.1f}s at 20 twists")


if __name__ == "__main__":
    main()

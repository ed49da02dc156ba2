"""Tabulate double normal bundles of coordinate submanifolds by orbit class.

For each class (m, |I1∖I2|, |I2∖I1|, |I1∩I2|) one representative is computed
both ways (graded model and jet subquotient) and the ranks, graded dims and
invariant-span dims are printed side by side.
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass

from gq.geom.normal import double_normal_gr, double_normal_subquotient
from gq.suites import dnb_class, dnb_configurations


@dataclass
class TableConfig:
    max_m: int = 4


def fmt(d):
    return " ".join(f"{','.join(map(str, k))}:{v}" for k, v in sorted(d.items()) if v)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-m", type=int, default=TableConfig.max_m)
    cfg = TableConfig(ap.parse_args().max_m)
    seen = set()
    print(f"{'m':>2} {'I1':>12} {'I2':>12} {'sides':>7} {'core':>4} {'exc':>3}  agree  {'sec':>5}  span dims")
    for m, I1, I2 in dnb_configurations(cfg.max_m):
        cls = dnb_class(m, I1, I2)
        if cls in seen:
            continue
        seen.add(cls)
        t = time.time()
        gr = double_normal_gr(m, I1, I2)
        sq = double_normal_subquotient(m, I1, I2)
        dt = time.time() - t
        print(f"{m:>2} {str(sorted(I1)):>12} {str(sorted(I2)):>12} {str(gr.sides):>7} {gr.core:>4} "
              f"{gr.excess:>3}  {'yes' if gr.summary() == sq.summary() else 'NO':>5}  {dt:5.2f}  {fmt(sq.span_dims)}")


if __name__ == "__main__":
    main()

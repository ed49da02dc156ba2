"""Run the randomized property suites and write one JSON record per suite.

    python scripts/run_verify.py --seed 1 --out results/verify_seed1.json
    python scripts/run_verify.py --seed 2 --suite oracle --suite pike --scale 0.1
"""
from __future__ import annotations

import argparse
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from gq import suites as S


@dataclass
class VerifyConfig:
    seed: int = 1
    suites: list = field(default_factory=lambda: list(S.SUITES))
    scale: float = 1.0  # multiplies every case / twist count
    dnb_max_m: int = 5
    dnb_twist_scope: str = "all"
    wnb_max_m: int = 4
    out: str = "results/verify.json"


FULL_COUNTS = {"exp-bch": 200, "condition": 200, "oracle": 100, "dvb": 100,
               "pike": 100, "lifts": 200, "double-normal": 20, "weighted-normal": 20}


def run(cfg: VerifyConfig) -> dict:
    out = {"config": asdict(cfg), "suites": {}}
    for name in cfg.suites:
        n = max(1, round(FULL_COUNTS[name] * cfg.scale))
        t = time.time()
        if name == "double-normal":
            r = S.suite_dnb(cfg.seed, twists=n, max_m=cfg.dnb_max_m, twist_scope=cfg.dnb_twist_scope)
        elif name == "weighted-normal":
            r = S.suite_wnb(cfg.seed, twists=n, max_m=cfg.wnb_max_m)
        else:
            r = S.SUITES[name](cfg.seed, n)
        d = r.as_dict()
        d["stats"] = {str(k): v for k, v in d["stats"].items()}
        d["seconds"] = round(time.time() - t, 2)
        out["suites"][name] = d
        print(f"{name:16s} {r.passed:6d}/{r.cases:<6d} split {r.split_passed}/{r.split_passed + r.split_failed}"
              f"  {d['seconds']:8.1f}s  {'ok' if r.ok else 'FAILED'}", flush=True)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--suite", action="append", choices=list(S.SUITES))
    ap.add_argument("--scale", type=float, default=1.0)
    ap.add_argument("--dnb-max-m", type=int, default=5)
    ap.add_argument("--dnb-twist-scope", choices=("all", "class"), default="all")
    ap.add_argument("--wnb-max-m", type=int, default=4)
    ap.add_argument("--out", default="results/verify.json")
    a = ap.parse_args()
    cfg = VerifyConfig(a.seed, a.suite or list(S.SUITES), a.scale, a.dnb_max_m,
                       a.dnb_twist_scope, a.wnb_max_m, a.out)
    res = run(cfg)
    Path(cfg.out).parent.mkdir(parents=True, exist_ok=True)
    Path(cfg.out).write_text(json.dumps(res, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    raise SystemExit(0 if all(s["failed"] == 0 and s["split_failed"] == 0 for s in res["suites"].values()) else 1)


if __name__ == "__main__":
    main()

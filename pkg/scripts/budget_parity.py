"""Post-decay explore fraction of each strategy on SparseGrid.

Runs ``decay_steps + --post`` agent steps per seed and counts exploratory
steps taken in episodes that start after the decay phase. For the
homeostasis-driven strategies it also splits the mean explore probability
by trigger. Writes reports/budget_parity.csv.

    python scripts/budget_parity.py [--seeds 0 1] [--post 200000]
"""

import argparse
import csv
from pathlib import Path

from vdsc.config import load_config
from vdsc.harness import run_seed

ROOT = Path(__file__).resolve().parent.parent
STRATEGIES = ("epsilon_greedy", "vdsc", "vpd_only", "counts_only")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=str(ROOT / "configs" / "sparsegrid.ini"))
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1])
    ap.add_argument("--post", type=int, default=200_000, help="steps after the decay phase")
    ap.add_argument("--out", default=str(ROOT / "reports" / "budget_parity.csv"))
    args = ap.parse_args()

    base = load_config(args.config)
    decay = base.strategy.decay_steps
    rows = []
    for name in STRATEGIES:
        for seed in args.seeds:
            cfg = base.replace(
                strategy={"name": name},
                run={"seeds": [seed], "total_steps": decay + args.post, "trace": True,
                     "trace_start": decay, "trace_episodes": 0},
            )
            res = run_seed(cfg, seed)
            steps = len(res.trace)
            frac = sum(t.y for t in res.trace) / steps
            mean_p = sum(t.p_bar for t in res.trace) / steps
            rows.append((name, seed, steps, frac, mean_p, base.strategy.rho_final))
            print(f"{name:15s} seed {seed}: explore fraction {frac:.4f} (mean p {mean_p:.4f}) over {steps} steps")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["strategy", "seed", "post_decay_steps", "explore_fraction", "mean_p_bar", "rho"])
        w.writerows(rows)


if __name__ == "__main__":
    main()

"""DeepSea(10) ablation: VDSC, its single-signal variants and epsilon-greedy.

Writes reports/deepsea/comparison.csv (seeds that ever earned a positive
return, mean return, explore fraction) plus per-strategy results.

    python scripts/deepsea_headline.py [--out reports/deepsea] [--parallel N]
"""

import argparse
import time
from pathlib import Path

from vdsc.config import load_config
from vdsc.harness import run_ablation

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=str(ROOT / "configs" / "deepsea.ini"))
    ap.add_argument("--out", default=str(ROOT / "reports" / "deepsea"))
    ap.add_argument("--parallel", type=int, default=1)
    args = ap.parse_args()

    cfg = load_config(args.config)
    start = time.perf_counter()
    run_ablation(cfg, args.out, parallel=args.parallel)
    print((Path(args.out) / "comparison.csv").read_text(), end="")
    print(f"{time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Run the team-size scalability experiment and write CSV/JSONL artifacts.

Example:
    python3 scripts/run_scalability.py --seed 12345 --out-dir results/
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from relaysim.simulation import SimConfig, run_batch, summary_to_csv


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=12345)
    parser.add_argument("--team-sizes", default="1,3,5,7,10")
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--grid", type=int, default=20, help="grid side length")
    parser.add_argument("--out-dir", default="results")
    args = parser.parse_args(argv)

    config = SimConfig(
        grid_cols=args.grid,
        grid_rows=args.grid,
        team_sizes=tuple(int(n) for n in args.team_sizes.split(",")),
        trials_per_size=args.trials,
        seed=args.seed,
    )
    started = time.perf_counter()
    summary, records, _ = run_batch(config)
    elapsed = time.perf_counter() - started

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "summary.csv").write_text(summary_to_csv(summary), encoding="utf-8")
    with (out_dir / "trials.jsonl").open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json_line() + "\n")
    (out_dir / "config.json").write_text(
        json.dumps(
            {
                "grid_cols": config.grid_cols,
                "grid_rows": config.grid_rows,
                "team_sizes": list(config.team_sizes),
                "trials_per_size": config.trials_per_size,
                "min_task_separation": config.min_task_separation,
                "seed": config.seed,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )

    print(summary_to_csv(summary), end="")
    print(f"# completion rate: {summary.completion_rate:.3f}", file=sys.stderr)
    print(
        f"# per-agent reduction vs baseline at n={max(summary.per_size)}: "
        f"{summary.reduction_vs_baseline:.1%}",
        file=sys.stderr,
    )
    print(f"# wall time: {elapsed:.1f}s; artifacts in {out_dir}/", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())

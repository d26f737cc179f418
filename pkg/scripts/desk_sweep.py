"""Run the spatial two-stage sweep for several rules and write CSV, SVG and a dip report per rule."""
import argparse
import json
import time
from dataclasses import replace
from pathlib import Path

from msvote.generate import default_labels
from msvote.simulation import SimConfig, emit_csv, emit_svg, run_sweep, sweep_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rules", default="l1:plu,l1:borda,l1:app")
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--trials", type=int, default=50)
    args = ap.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    reports = {}
    for rule in args.rules.split(","):
        cfg = replace(SimConfig(), rule=rule, seed=args.seed, trials=args.trials)
        start = time.perf_counter()
        res = run_sweep(cfg)
        stem = rule.replace(":", "_")
        emit_csv(res.records, args.out_dir / f"{stem}.csv", default_labels(cfg.m))
        for metric in ("score", "gini"):
            emit_svg(res.aggregates, metric, args.out_dir / f"{stem}_{metric}.svg")
        reports[rule] = sweep_report(res.aggregates)
        print(f"{rule}: {len(res.records)} records in {time.perf_counter() - start:.1f}s")
    (args.out_dir / "report.json").write_text(json.dumps(reports, indent=2) + "\n")
    print(json.dumps(reports, indent=2))


if __name__ == "__main__":
    main()

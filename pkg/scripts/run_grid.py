"""Run the training grid from a TOML config and print the test table.

    python scripts/run_grid.py configs/default.toml --jobs 4
"""

import argparse
import sys
import time

from airdemand.harness import config
from airdemand.harness.grid import run_grid, write_report
from airdemand.harness.plots import emit_plots


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("config", nargs="?", default="configs/default.toml")
    ap.add_argument("--jobs", type=int)
    ap.add_argument("-o", "--output")
    args = ap.parse_args()

    cfg = config.override(config.load(args.config), "run", jobs=args.jobs, output=args.output)
    t0 = time.perf_counter()
    report, results = run_grid(cfg)
    out = write_report(report, cfg.run.output, results)
    emit_plots(report.predictions, out)

    print(f"{len(report.train_rows)} cells in {time.perf_counter() - t0:.1f}s -> {out}")
    print(f"{'family':10s} {'champion':>12s} {'rmse':>9s} {'cc':>7s} {'si':>7s}")
    for r in report.test_rows:
        print(f"{r['family']:10s} {r['neurons_or_mftype'] + '/' + str(r['pop_size']):>12s} "
              f"{r['rmse']:9.3f} {r['cc'] or float('nan'):7.3f} {r['si'] or float('nan'):7.3f}")
    print(f"test target std: {report.meta['dataset']['test_target_std']:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

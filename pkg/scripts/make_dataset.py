"""Write synthetic datasets for every dam preset into a directory."""

import argparse
from pathlib import Path

from airdemand import synth
from airdemand.dataset import save_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-o", "--out", default="data")
    ap.add_argument("--n", type=int, default=110)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--noise-rel", type=float, default=0.0)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, spec in synth.PRESETS.items():
        d = synth.generate(spec, synth.SynthConfig(args.n, args.noise_rel, args.seed))
        save_csv(d, out / f"{name}.csv")
        v = d.targets
        print(f"{name:10s} n={len(d)} air velocity {v.min():.2f}..{v.max():.2f} m/s")


if __name__ == "__main__":
    main()

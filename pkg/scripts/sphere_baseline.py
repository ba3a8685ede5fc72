"""Success counts of PSO and GA on the 5-D sphere over many seeds.

Reproduces the desk-scale optimizer check (pop 50, 200 iterations,
PSO < 1e-3, GA < 1e-2) and prints the fitness distribution.
"""

import argparse

import numpy as np

from airdemand.optimize import Bounds, GaConfig, PsoConfig, ga_run, pso_run


def sphere(pop):
    return np.sum(np.atleast_2d(pop) ** 2, axis=1)


class Sphere:
    batch = staticmethod(sphere)

    def __call__(self, x):
        return float(sphere(x)[0])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--dims", type=int, default=5)
    ap.add_argument("--pop", type=int, default=50)
    ap.add_argument("--iters", type=int, default=200)
    args = ap.parse_args()

    box = Bounds.uniform(args.dims, -5.0, 5.0)
    runs = {
        "PSO": (lambda s: pso_run(Sphere(), box, PsoConfig(args.pop, args.iters, seed=s)), 1e-3),
        "GA": (lambda s: ga_run(Sphere(), box, GaConfig(args.pop, args.iters, seed=s)), 1e-2),
    }
    for name, (run, threshold) in runs.items():
        best = np.array([run(s).best_fitness for s in range(args.seeds)])
        hits = int(np.sum(best < threshold))
        print(f"{name:3s} {hits}/{args.seeds} below {threshold:g}  "
              f"median {np.median(best):.2e}  max {best.max():.2e}")


if __name__ == "__main__":
    main()

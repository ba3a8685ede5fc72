"""Real-coded GA and global-best PSO over a bounded box.

Both optimizers minimize a fitness callable. A fitness may expose a
``batch(population) -> values`` method; when present the whole population is
scored in one call, otherwise rows are scored one by one in index order.
"""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .dataset import Dataset, Normalizer

BLX_ALPHA = 0.5


class NonFiniteFitness(FloatingPointError):
    def __init__(self, position, value):
        self.position = np.asarray(position)
        self.value = value
        super().__init__(f"fitness returned {value!r} at position {np.array2string(self.position, threshold=20)}")


@dataclass(frozen=True)
class Bounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, float).ravel()
        hi = np.asarray(self.upper, float).ravel()
        if lo.shape != hi.shape:
            raise ValueError("lower and upper bounds differ in length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("bounds must be finite")
        if np.any(hi <= lo):
            raise ValueError("upper must exceed lower element-wise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def uniform(cls, dims: int, lo: float, hi: float) -> Bounds:
        return cls(np.full(dims, lo), np.full(dims, hi))

    @property
    def dims(self) -> int:
        return self.lower.size

    @property
    def span(self) -> np.ndarray:
        return self.upper - self.lower

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)


@dataclass(frozen=True)
class PsoConfig:
    pop_size: int = 50
    max_iters: int = 300
    w: float = 0.729
    c1: float = 1.49445
    c2: float = 1.49445
    velocity_clamp: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.pop_size < 2:
            raise ValueError("pop_size must be >= 2")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0 <= self.w <= 1:
            raise ValueError("inertia w must be in [0, 1]")
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError("c1 and c2 must be non-negative")
        if not self.velocity_clamp > 0:
            raise ValueError("velocity_clamp must be positive")


@dataclass(frozen=True)
class GaConfig:
    pop_size: int = 50
    max_iters: int = 300
    crossover_rate: float = 0.9
    mutation_rate: float | None = None  # None -> 1/dims
    mutation_scale: float = 0.1
    tournament_size: int = 3
    elitism_count: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.pop_size < 2:
            raise ValueError("pop_size must be >= 2")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        for name in ("crossover_rate", "mutation_rate"):
            v = getattr(self, name)
            if v is not None and not 0 <= v <= 1:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.mutation_scale < 0:
            raise ValueError("mutation_scale must be non-negative")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")
        if not 1 <= self.elitism_count <= self.pop_size:
            raise ValueError("elitism_count must be in [1, pop_size]")


@dataclass
class OptResult:
    best_position: np.ndarray
    best_fitness: float
    trace: np.ndarray
    evaluations: int
    seed: int
    initial_best_fitness: float
    population: np.ndarray = field(repr=False, default=None)

    def summary(self) -> dict:
        return {
            "best_fitness": self.best_fitness,
            "initial_best_fitness": self.initial_best_fitness,
            "evaluations": self.evaluations,
            "seed": self.seed,
            "iterations": len(self.trace),
        }


def write_trace_csv(result: OptResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "best_fitness"])
        for i, v in enumerate(result.trace, start=1):
            w.writerow([i, repr(float(v))])


def _evaluate(fitness: Callable, pop: np.ndarray) -> np.ndarray:
    batch = getattr(fitness, "batch", None)
    if batch is not None:
        vals = np.asarray(batch(pop), float)
    else:
        vals = np.array([float(fitness(row)) for row in pop])
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        raise NonFiniteFitness(pop[bad[0]], vals[bad[0]])
    return vals


def _initial(bounds: Bounds, size: int, rng, init) -> np.ndarray:
    if init is None:
        return rng.uniform(bounds.lower, bounds.upper, size=(size, bounds.dims))
    init = np.asarray(init, float)
    if init.shape != (size, bounds.dims):
        raise ValueError(f"initial population must have shape {(size, bounds.dims)}, got {init.shape}")
    return bounds.clip(init)


def pso_run(fitness: Callable, bounds: Bounds, cfg: PsoConfig, init=None) -> OptResult:
    """Global-best PSO with velocity and position clamping."""
    rng = np.random.default_rng(cfg.seed)
    n, d = cfg.pop_size, bounds.dims
    vmax = cfg.velocity_clamp * bounds.span

    x = _initial(bounds, n, rng, init)
    v = rng.uniform(-vmax, vmax, size=(n, d))
    f = _evaluate(fitness, x)
    evals = n

    pbest, pbest_f = x.copy(), f.copy()
    g = int(np.argmin(pbest_f))
    gbest, gbest_f = pbest[g].copy(), float(pbest_f[g])
    initial_best = gbest_f
    trace = np.empty(cfg.max_iters)

    for it in range(cfg.max_iters):
        r1 = rng.random((n, d))
        r2 = rng.random((n, d))
        v = cfg.w * v + cfg.c1 * r1 * (pbest - x) + cfg.c2 * r2 * (gbest - x)
        v = np.clip(v, -vmax, vmax)
        x = bounds.clip(x + v)
        f = _evaluate(fitness, x)
        evals += n

        improved = f < pbest_f
        pbest[improved] = x[improved]
        pbest_f[improved] = f[improved]
        g = int(np.argmin(pbest_f))
        if pbest_f[g] < gbest_f:
            gbest, gbest_f = pbest[g].copy(), float(pbest_f[g])
        trace[it] = gbest_f

    return OptResult(gbest, gbest_f, trace, evals, cfg.seed, initial_best, x)


def _blx(p1: np.ndarray, p2: np.ndarray, u: np.ndarray, alpha: float = BLX_ALPHA) -> np.ndarray:
    lo = np.minimum(p1, p2)
    spread = np.abs(p1 - p2)
    return lo - alpha * spread + u * (1 + 2 * alpha) * spread


def ga_run(fitness: Callable, bounds: Bounds, cfg: GaConfig, init=None) -> OptResult:
    """Generational GA: tournament selection, BLX-0.5 crossover, Gaussian mutation, elitism.

    The whole next generation (elites included) is scored each generation.
    """
    rng = np.random.default_rng(cfg.seed)
    n, d = cfg.pop_size, bounds.dims
    mut_rate = 1.0 / d if cfg.mutation_rate is None else cfg.mutation_rate
    sigma = cfg.mutation_scale * bounds.span
    n_child = n - cfg.elitism_count

    pop = _initial(bounds, n, rng, init)
    fit = _evaluate(fitness, pop)
    evals = n
    best_i = int(np.argmin(fit))
    best, best_f = pop[best_i].copy(), float(fit[best_i])
    initial_best = best_f
    trace = np.empty(cfg.max_iters)

    for gen in range(cfg.max_iters):
        order = np.argsort(fit, kind="stable")
        elites = pop[order[: cfg.elitism_count]]

        entrants = rng.integers(0, n, size=(n_child, 2, cfg.tournament_size))
        winners = np.take_along_axis(entrants, np.argmin(fit[entrants], axis=-1)[..., None], axis=-1)[..., 0]
        p1, p2 = pop[winners[:, 0]], pop[winners[:, 1]]
        cross = rng.random(n_child) < cfg.crossover_rate
        children = np.where(cross[:, None], _blx(p1, p2, rng.random((n_child, d))), p1)
        mutate = rng.random((n_child, d)) < mut_rate
        children = children + mutate * rng.normal(0.0, 1.0, (n_child, d)) * sigma
        children = bounds.clip(children)

        pop = np.vstack([elites, children])
        fit = _evaluate(fitness, pop)
        evals += n
        i = int(np.argmin(fit))
        if fit[i] < best_f:
            best, best_f = pop[i].copy(), float(fit[i])
        trace[gen] = best_f

    return OptResult(best, best_f, trace, evals, cfg.seed, initial_best, pop)


class MseFitness:
    """Training-set MSE in normalized units for a parameterized model.

    ``forward(population, x)`` maps a (pop, P) parameter matrix and (n, 2)
    normalized features to (pop, n) normalized predictions.
    """

    def __init__(self, forward, x: np.ndarray, t: np.ndarray):
        self.forward = forward
        self.x = np.asarray(x, float)
        self.t = np.asarray(t, float)
        if self.t.size == 0:
            raise ValueError("empty training set")

    def batch(self, population) -> np.ndarray:
        pred = self.forward(np.atleast_2d(population), self.x)
        return np.mean((pred - self.t) ** 2, axis=1)

    def __call__(self, params) -> float:
        return float(self.batch(np.asarray(params, float)[None, :])[0])


def fitness_mse(forward, train: Dataset, norm: Normalizer) -> MseFitness:
    return MseFitness(forward, norm.scale_features(train.features), norm.scale_target(train.targets))


def config_dict(cfg) -> dict:
    return asdict(cfg)

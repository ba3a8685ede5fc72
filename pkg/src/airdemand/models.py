"""Hybrid model families, training glue, and JSON persistence."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import anfis, ann
from .dataset import Dataset, Normalizer
from .optimize import Bounds, GaConfig, OptResult, PsoConfig, fitness_mse, ga_run, pso_run

ANN_GA = "ANN-GA"
ANN_PSO = "ANN-PSO"
ANFIS_PSO = "ANFIS-PSO"
FAMILIES = (ANN_GA, ANN_PSO, ANFIS_PSO)

FORMAT_VERSION = 1


def parse_family(name: str) -> str:
    key = name.strip().upper().replace("_", "-")
    for f in FAMILIES:
        if f == key or f.replace("-", "") == key.replace("-", ""):
            return f
    raise ValueError(f"unknown model family {name!r}; choose from {FAMILIES}")


def model_config(family: str, hyper):
    """AnnConfig for ANN families (hyper = hidden neurons), AnfisConfig otherwise (hyper = MF type)."""
    if family == ANFIS_PSO:
        return anfis.AnfisConfig(mf_type=anfis.MfType.parse(hyper))
    return ann.AnnConfig(hidden_neurons=int(hyper))


def hyper_label(cfg) -> str:
    return cfg.mf_type.value if isinstance(cfg, anfis.AnfisConfig) else str(cfg.hidden_neurons)


def batch_forward(cfg):
    """(population, x) -> (pop, n) normalized predictions; ANFIS positions are repaired first."""
    if isinstance(cfg, anfis.AnfisConfig):
        return lambda pop, x: anfis.forward_batch(cfg, anfis.repair(cfg, pop), x)
    return lambda pop, x: ann.forward_batch(cfg, pop, x)


@dataclass
class TrainedModel:
    family: str
    config: ann.AnnConfig | anfis.AnfisConfig
    params: np.ndarray
    normalizer: Normalizer
    metadata: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        return "anfis" if isinstance(self.config, anfis.AnfisConfig) else "ann"

    def predict(self, d: Dataset) -> np.ndarray:
        if self.kind == "anfis":
            return anfis.predict_batch(self.config, self.params, d, self.normalizer)
        return ann.predict_batch(self.config, self.params, d, self.normalizer)

    def to_dict(self) -> dict:
        if self.kind == "anfis":
            cfg = {"mf_type": self.config.mf_type.value, "mfs_per_input": self.config.mfs_per_input}
        else:
            cfg = {"hidden_neurons": self.config.hidden_neurons}
        return {
            "format_version": FORMAT_VERSION,
            "kind": self.kind,
            "family": self.family,
            "config": cfg,
            "params": [float(v) for v in self.params],
            "normalizer": self.normalizer.to_dict(),
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> TrainedModel:
        if d.get("kind") == "anfis":
            cfg = anfis.AnfisConfig(mf_type=anfis.MfType.parse(d["config"]["mf_type"]))
            count = anfis.param_count(cfg)
        elif d.get("kind") == "ann":
            cfg = ann.AnnConfig(hidden_neurons=int(d["config"]["hidden_neurons"]))
            count = ann.param_count(cfg)
        else:
            raise ValueError(f"unknown model kind {d.get('kind')!r}")
        params = np.asarray(d["params"], float)
        if params.shape != (count,):
            raise ValueError(f"model file has {params.size} parameters, expected {count}")
        return cls(d["family"], cfg, params, Normalizer.from_dict(d["normalizer"]), d.get("metadata", {}))

    def save(self, path) -> None:
        Path(path).write_text(dumps(self.to_dict()), encoding="utf-8")

    @classmethod
    def load(cls, path) -> TrainedModel:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def train(
    family: str,
    hyper,
    pop_size: int,
    train_set: Dataset,
    norm: Normalizer,
    seed: int,
    pso: PsoConfig | None = None,
    ga: GaConfig | None = None,
) -> tuple[TrainedModel, OptResult]:
    """Fit one grid cell on ``train_set`` by minimizing normalized MSE."""
    family = parse_family(family)
    cfg = model_config(family, hyper)
    fitness = fitness_mse(batch_forward(cfg), train_set, norm)
    # init stream kept separate from the optimizer's own stream
    rng = np.random.default_rng((seed, 1))

    if family == ANFIS_PSO:
        lo, hi = anfis.bounds(cfg)
        init = anfis.init_population(cfg, pop_size, rng)
    else:
        lo, hi = ann.bounds(cfg)
        init = ann.init_population(cfg, pop_size, rng)
    bounds = Bounds(lo, hi)

    if family == ANN_GA:
        opt_cfg = replace(ga or GaConfig(), pop_size=pop_size, seed=seed)
        result = ga_run(fitness, bounds, opt_cfg, init=init)
    else:
        opt_cfg = replace(pso or PsoConfig(), pop_size=pop_size, seed=seed)
        result = pso_run(fitness, bounds, opt_cfg, init=init)

    params = result.best_position
    if family == ANFIS_PSO:
        params = anfis.repair(cfg, params)
    meta = {
        "optimizer": "ga" if family == ANN_GA else "pso",
        "optimizer_config": asdict(opt_cfg),
        "seed": seed,
        "fitness": "mse_normalized",
        "fitness_trace": [float(v) for v in result.trace],
        **result.summary(),
    }
    return TrainedModel(family, cfg, params, norm, meta), result

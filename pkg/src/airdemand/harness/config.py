"""Experiment configuration: dataclasses plus TOML loading with flag overrides."""

from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from ..anfis import MfType
from ..dataset import Dataset, load_csv
from ..models import FAMILIES, parse_family
from ..optimize import GaConfig, PsoConfig
from ..synth import DamSpec, SynthConfig, generate, get_preset

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DataConfig:
    """Either ``path`` to a CSV file, or a synthetic dam (preset name or custom spec)."""

    path: str | None = None
    dam: str = "safarood"
    dam_spec: dict | None = None
    n: int = 110
    noise_rel: float = 0.0
    seed: int = 7

    def dam_spec_obj(self) -> DamSpec:
        if self.dam_spec:
            return DamSpec.from_dict({"name": self.dam, **self.dam_spec})
        return get_preset(self.dam)

    def resolve(self, base: Path | None = None) -> Dataset:
        if self.path:
            p = Path(self.path)
            if base is not None and not p.is_absolute():
                p = base / p
            return load_csv(p)
        return generate(self.dam_spec_obj(), SynthConfig(self.n, self.noise_rel, self.seed))


@dataclass(frozen=True)
class SplitConfig:
    fraction: float = 0.7
    seed: int = 0


@dataclass(frozen=True)
class GridConfig:
    families: tuple[str, ...] = FAMILIES
    hidden_neurons: tuple[int, ...] = (8, 12, 16)
    pop_sizes: tuple[int, ...] = (50, 100, 150)
    mf_types: tuple[str, ...] = tuple(t.value for t in MfType)

    def cells(self) -> list[tuple[str, object, int]]:
        """Grid cells in report order: family, then hyperparameter, then population."""
        out = []
        for fam in self.families:
            hypers = self.mf_types if fam == "ANFIS-PSO" else self.hidden_neurons
            for h in hypers:
                for pop in self.pop_sizes:
                    out.append((fam, h, pop))
        return out


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    output: str = "results"
    jobs: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    data: DataConfig = field(default_factory=DataConfig)
    split: SplitConfig = field(default_factory=SplitConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    pso: PsoConfig = field(default_factory=PsoConfig)
    ga: GaConfig = field(default_factory=GaConfig)
    run: RunConfig = field(default_factory=RunConfig)
    base_dir: str | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        d["run"] = {"seed": self.run.seed}  # output dir and worker count do not affect results
        for sec in ("pso", "ga"):
            d[sec].pop("seed")  # per-cell seeds are derived
            d[sec].pop("pop_size")
        return d

    def dataset(self) -> Dataset:
        return self.data.resolve(Path(self.base_dir) if self.base_dir else None)


_SECTIONS = {"data": DataConfig, "split": SplitConfig, "grid": GridConfig,
             "pso": PsoConfig, "ga": GaConfig, "run": RunConfig}


def _build(cls, values: dict, section: str):
    names = {f.name for f in fields(cls)}
    unknown = set(values) - names
    if unknown:
        raise ConfigError(f"[{section}] unknown key(s): {sorted(unknown)}")
    values = {k: tuple(v) if isinstance(v, list) else v for k, v in values.items()}
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}] {exc}") from None


def from_dict(raw: dict, base_dir: str | None = None) -> ExperimentConfig:
    unknown = set(raw) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown section(s): {sorted(unknown)}")
    kw = {}
    for name, cls in _SECTIONS.items():
        section = dict(raw.get(name, {}))
        if name == "data" and "dam_spec" in section:
            section["dam_spec"] = dict(section["dam_spec"])
        if name == "grid" and "families" in section:
            section["families"] = [parse_family(f) for f in section["families"]]
        if name == "grid" and "mf_types" in section:
            section["mf_types"] = [MfType.parse(t).value for t in section["mf_types"]]
        kw[name] = _build(cls, section, name)
    return ExperimentConfig(**kw, base_dir=base_dir)


def load(path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return from_dict(raw, base_dir=str(path.parent))


def override(cfg: ExperimentConfig, section: str, **values) -> ExperimentConfig:
    values = {k: v for k, v in values.items() if v is not None}
    if not values:
        return cfg
    return replace(cfg, **{section: replace(getattr(cfg, section), **values)})


DEFAULT_TOML = """\
# Full 27-cell grid on a synthetic Safarood dataset.

[data]
# path = "data.csv"         # use a CSV file instead of synthetic data
dam = "safarood"             # dam preset used when no path is given
n = 110
noise_rel = 0.0
seed = 7

[split]
fraction = 0.7
seed = 0

[grid]
families = ["ANN-GA", "ANN-PSO", "ANFIS-PSO"]
hidden_neurons = [8, 12, 16]
pop_sizes = [50, 100, 150]
mf_types = ["triangular", "gbell", "gaussian"]

[pso]
max_iters = 300
w = 0.729
c1 = 1.49445
c2 = 1.49445
velocity_clamp = 0.5

[ga]
max_iters = 300
crossover_rate = 0.9
# mutation_rate defaults to 1/dims
mutation_scale = 0.1
tournament_size = 3
elitism_count = 2

[run]
seed = 0
output = "results"
jobs = 1
"""

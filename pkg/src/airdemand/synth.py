"""Synthetic air-demand data from Kalinske's hydraulic-jump relation.

The aeration ratio ``beta = Q_air / Q_water = 0.0066 (Fr - 1)^1.4`` is evaluated
at the contracted gate section and converted to an air velocity through a
fixed nominal vent area.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np

from .dataset import Dataset, Sample

KALINSKE_COEF = 0.0066
KALINSKE_EXP = 1.4
VENT_AREA_M2 = 0.25


@dataclass(frozen=True)
class DamSpec:
    """Operating envelope of one dam; ``None`` marks a cell missing from the source table."""

    name: str
    q_min: float
    q_max: float
    gate_height: float
    gate_width: float
    opening_min: float
    opening_max: float
    head_max: float | None = None
    head_min: float | None = None
    head_normal: float | None = None
    downstream_length: tuple[float, float] | None = None
    air_min: float | None = None
    air_max: float | None = None
    g: float = 9.81

    def __post_init__(self):
        if not self.q_max > self.q_min > 0:
            raise ValueError(f"{self.name}: need q_max > q_min > 0")
        if not (self.gate_height > 0 and self.gate_width > 0):
            raise ValueError(f"{self.name}: gate dimensions must be positive")
        if not 0 < self.opening_min <= self.opening_max <= 100:
            raise ValueError(f"{self.name}: need 0 < opening_min <= opening_max <= 100")
        if not self.g > 0:
            raise ValueError(f"{self.name}: g must be positive")

    @property
    def full_area(self) -> float:
        """Exit cross-section at full opening (A0)."""
        return self.gate_height * self.gate_width

    def exit_area(self, opening: float) -> float:
        """Exit cross-section A at a given opening percentage."""
        return self.full_area * opening / 100.0

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        if d["downstream_length"] is not None:
            d["downstream_length"] = list(d["downstream_length"])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> DamSpec:
        d = dict(d)
        if d.get("downstream_length") is not None:
            dl = d["downstream_length"]
            d["downstream_length"] = (float(dl), float(dl)) if np.isscalar(dl) else tuple(map(float, dl))
        return cls(**d)


# Table of the six studied dams: water flow (m3/s), gate H x W (m),
# opening range (%), head (m), downstream length (m), air flow range.
PRESETS: dict[str, DamSpec] = {
    s.name: s
    for s in (
        DamSpec("safarood", 8.7, 48.2, 1.47, 1.19, 20, 100, head_max=59.4,
                downstream_length=(12.0, 60.0), air_min=6.8, air_max=18.9),
        DamSpec("balarood", 2.2, 44.8, 1.39, 1.17, 10, 100, head_max=69.0, head_normal=58.0,
                downstream_length=(40.0, 40.0), air_min=5.2, air_max=18.0),
        DamSpec("sardasht", 14.1, 225.0, 2.80, 2.23, 10, 100, head_max=95.2, head_min=42.3,
                head_normal=87.2, downstream_length=(60.0, 60.0), air_min=15.7, air_max=54.0),
        DamSpec("silve", 4.6, 96.3, 2.00, 1.89, 10, 100, head_max=56.4, head_min=27.6,
                downstream_length=(40.0, 40.0), air_min=40.0, air_max=210.3),
        DamSpec("talvar", 15.1, 179.4, 3.12, 2.14, 10, 100, head_normal=56.5,
                downstream_length=(60.0, 60.0), air_min=88.0, air_max=152.7),
        DamSpec("kucheri", 27.7, 243.2, 2.79, 2.29, 10, 100, head_normal=64.0,
                downstream_length=(30.0, 30.0), air_min=27.2, air_max=71.7),
    )
}


def get_preset(name: str) -> DamSpec:
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise KeyError(f"unknown dam preset {name!r}; choose from {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class SynthConfig:
    n: int = 110
    noise_rel: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not self.noise_rel >= 0:
            raise ValueError("noise_rel must be >= 0")


def kalinske_beta(fr: float) -> float:
    """Air/water volume ratio; zero at or below the incipient jump (Fr <= 1)."""
    if not math.isfinite(fr):
        raise ValueError(f"Froude number must be finite, got {fr!r}")
    if fr <= 1.0:
        return 0.0
    return KALINSKE_COEF * (fr - 1.0) ** KALINSKE_EXP


def froude_at_gate(q: float, spec: DamSpec, opening: float) -> float:
    if not q > 0:
        raise ValueError(f"flow must be positive, got {q!r}")
    if not spec.opening_min <= opening <= spec.opening_max:
        raise ValueError(
            f"opening {opening!r} outside [{spec.opening_min}, {spec.opening_max}] for {spec.name}"
        )
    y = spec.gate_height * opening / 100.0
    v = q / (spec.gate_width * y)
    return v / math.sqrt(spec.g * y)


def air_velocity(q: float, spec: DamSpec, opening: float, vent_area: float = VENT_AREA_M2) -> float:
    """Noise-free target: beta(Fr) * q / vent_area, in m/s."""
    return kalinske_beta(froude_at_gate(q, spec, opening)) * q / vent_area


def generate(spec: DamSpec, cfg: SynthConfig, vent_area: float = VENT_AREA_M2) -> Dataset:
    rng = np.random.default_rng(cfg.seed)
    flows = rng.uniform(spec.q_min, spec.q_max, cfg.n)
    openings = rng.uniform(spec.opening_min, spec.opening_max, cfg.n)
    eps = rng.normal(0.0, cfg.noise_rel, cfg.n)
    samples = []
    for q, o, e in zip(flows.tolist(), openings.tolist(), eps.tolist()):
        target = air_velocity(q, spec, o, vent_area) * (1.0 + e)
        samples.append(Sample(q, o, max(target, 0.0)))
    tag = (
        f"synth:{spec.name}:n={cfg.n}:seed={cfg.seed}:noise_rel={cfg.noise_rel!r}"
        f":vent_area_m2={vent_area!r}"
    )
    return Dataset(tuple(samples), source_tag=tag)


def with_overrides(spec: DamSpec, **kw) -> DamSpec:
    return replace(spec, **{k: v for k, v in kw.items() if v is not None})

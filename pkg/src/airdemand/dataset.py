"""Samples, datasets, train/test splitting and min-max normalization."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

COLUMNS = ("flow_m3s", "opening_pct", "air_velocity_ms")


class DatasetError(ValueError):
    pass


class NotFittedError(RuntimeError):
    pass


@dataclass(frozen=True)
class Sample:
    flow: float
    opening: float
    air_velocity: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.flow, self.opening, self.air_velocity)


def check_sample(s: Sample) -> None:
    """Raise DatasetError if ``s`` is not a physically valid record."""
    for name, v in zip(("flow", "opening", "air_velocity"), s.as_tuple()):
        if not math.isfinite(v):
            raise DatasetError(f"{name} is not finite ({v!r})")
    if not s.flow > 0:
        raise DatasetError(f"flow must be > 0, got {s.flow!r}")
    if not 0 < s.opening <= 100:
        raise DatasetError(f"opening must be in (0, 100], got {s.opening!r}")
    if not s.air_velocity >= 0:
        raise DatasetError(f"air_velocity must be >= 0, got {s.air_velocity!r}")


@dataclass(frozen=True)
class Dataset:
    """Ordered, immutable collection of samples.

    ``normalized`` marks data living in scaled units, for which the physical
    bounds of :func:`check_sample` do not apply.
    """

    samples: tuple[Sample, ...]
    source_tag: str = ""
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if not self.samples:
            raise DatasetError("dataset is empty")
        if not self.normalized:
            for i, s in enumerate(self.samples):
                try:
                    check_sample(s)
                except DatasetError as exc:
                    raise DatasetError(f"sample {i}: {exc}") from None

    def __len__(self) -> int:
        return len(self.samples)

    @classmethod
    def from_arrays(cls, flow, opening, air_velocity, source_tag="", normalized=False) -> Dataset:
        rows = np.column_stack([flow, opening, air_velocity]).astype(float)
        return cls(tuple(Sample(*map(float, r)) for r in rows), source_tag, normalized)

    def as_array(self) -> np.ndarray:
        """(n, 3) array of flow, opening, air_velocity."""
        return np.array([s.as_tuple() for s in self.samples], dtype=float)

    @property
    def features(self) -> np.ndarray:
        return self.as_array()[:, :2]

    @property
    def targets(self) -> np.ndarray:
        return self.as_array()[:, 2]

    def subset(self, indices) -> Dataset:
        return Dataset(tuple(self.samples[i] for i in indices), self.source_tag, self.normalized)


def load_csv(path) -> Dataset:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DatasetError(f"{path}: empty file")
        header = [h.strip() for h in header]
        missing = [c for c in COLUMNS if c not in header]
        if missing:
            raise DatasetError(f"{path}: missing column(s) {missing}; header was {header}")
        idx = [header.index(c) for c in COLUMNS]
        samples = []
        for row_no, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                values = [float(row[j]) for j in idx]
            except (ValueError, IndexError):
                raise DatasetError(f"{path}: row {row_no}: non-numeric or missing cell in {row}") from None
            s = Sample(*values)
            try:
                check_sample(s)
            except DatasetError as exc:
                raise DatasetError(f"{path}: row {row_no}: {exc}") from None
            samples.append(s)
    if not samples:
        raise DatasetError(f"{path}: no data rows")
    return Dataset(tuple(samples), source_tag=path.name)


def to_csv_text(d: Dataset) -> str:
    lines = [",".join(COLUMNS)]
    lines += [",".join(repr(float(v)) for v in s.as_tuple()) for s in d.samples]
    return "\n".join(lines) + "\n"


def save_csv(d: Dataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(to_csv_text(d))


@dataclass(frozen=True)
class SplitDataset:
    train: Dataset
    test: Dataset
    seed: int
    train_fraction: float
    train_indices: tuple[int, ...] = field(default=(), repr=False)
    test_indices: tuple[int, ...] = field(default=(), repr=False)


def train_size(n: int, fraction: float) -> int:
    # half-up rounding, not banker's
    return int(math.floor(fraction * n + 0.5))


def split(d: Dataset, train_fraction: float = 0.7, seed: int = 0) -> SplitDataset:
    if not 0 < train_fraction < 1:
        raise DatasetError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = len(d)
    n_train = train_size(n, train_fraction)
    if n_train < 1 or n_train >= n:
        raise DatasetError(f"n={n} too small for a non-empty split at fraction {train_fraction}")
    perm = np.random.default_rng(seed).permutation(n)
    tr = tuple(int(i) for i in perm[:n_train])
    te = tuple(int(i) for i in perm[n_train:])
    return SplitDataset(d.subset(tr), d.subset(te), seed, train_fraction, tr, te)


@dataclass(frozen=True)
class Normalizer:
    """Per-column min-max scaling to [0, 1] for (flow, opening, air_velocity)."""

    mins: tuple[float, float, float] | None = None
    maxs: tuple[float, float, float] | None = None

    @property
    def fitted(self) -> bool:
        return self.mins is not None and self.maxs is not None

    def _bounds(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.fitted:
            raise NotFittedError("normalizer has not been fitted")
        return np.asarray(self.mins, float), np.asarray(self.maxs, float)

    def scale(self, a: np.ndarray, cols=slice(None)) -> np.ndarray:
        lo, hi = self._bounds()
        return (np.asarray(a, float) - lo[cols]) / (hi[cols] - lo[cols])

    def unscale(self, a: np.ndarray, cols=slice(None)) -> np.ndarray:
        lo, hi = self._bounds()
        return np.asarray(a, float) * (hi[cols] - lo[cols]) + lo[cols]

    def scale_features(self, x: np.ndarray) -> np.ndarray:
        return self.scale(x, slice(0, 2))

    def scale_target(self, y: np.ndarray) -> np.ndarray:
        return self.scale(y, 2)

    def unscale_target(self, y: np.ndarray) -> np.ndarray:
        return self.unscale(y, 2)

    def to_dict(self) -> dict:
        self._bounds()
        return {"columns": list(COLUMNS), "min": list(self.mins), "max": list(self.maxs)}

    @classmethod
    def from_dict(cls, d: dict) -> Normalizer:
        return cls(tuple(map(float, d["min"])), tuple(map(float, d["max"])))


def fit_normalizer(d: Dataset) -> Normalizer:
    a = d.as_array()
    lo, hi = a.min(axis=0), a.max(axis=0)
    for name, l, h in zip(COLUMNS, lo, hi):
        if not h > l:
            raise DatasetError(f"column {name} has zero range ({l})")
    return Normalizer(tuple(map(float, lo)), tuple(map(float, hi)))


def apply(norm: Normalizer, d: Dataset) -> Dataset:
    a = norm.scale(d.as_array())
    return Dataset.from_arrays(a[:, 0], a[:, 1], a[:, 2], d.source_tag, normalized=True)


def invert(norm: Normalizer, d: Dataset) -> Dataset:
    a = norm.unscale(d.as_array())
    return Dataset.from_arrays(a[:, 0], a[:, 1], a[:, 2], d.source_tag, normalized=False)

"""Regression performance factors: RMSE, MSE, CC (Pearson), SI, and Taylor statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class EvalPair:
    """Observed (O) and predicted (P) series of equal, non-zero length."""

    observed: np.ndarray
    predicted: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.observed, float).ravel()
        p = np.asarray(self.predicted, float).ravel()
        if o.size == 0 or o.shape != p.shape:
            raise MetricError(f"series must be non-empty and equal length, got {o.size} and {p.size}")
        if not (np.all(np.isfinite(o)) and np.all(np.isfinite(p))):
            raise MetricError("series contain non-finite values")
        object.__setattr__(self, "observed", o)
        object.__setattr__(self, "predicted", p)

    @property
    def n(self) -> int:
        return self.observed.size


def _pair(e, p=None) -> EvalPair:
    return e if p is None and isinstance(e, EvalPair) else EvalPair(e, p)


def mse(e, p=None) -> float:
    e = _pair(e, p)
    return float(np.mean((e.observed - e.predicted) ** 2))


def rmse(e, p=None) -> float:
    return math.sqrt(mse(e, p))


def cc(e, p=None) -> float:
    """Pearson correlation; raises MetricError when either series is constant."""
    e = _pair(e, p)
    do = e.observed - e.observed.mean()
    dp = e.predicted - e.predicted.mean()
    sxx = float(np.dot(do, do))
    syy = float(np.dot(dp, dp))
    if sxx == 0.0 or syy == 0.0:
        raise MetricError("correlation undefined for a constant series")
    r = float(np.dot(do, dp)) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def si(e, p=None) -> float:
    """RMSE divided by the observed mean."""
    e = _pair(e, p)
    mean_o = float(np.mean(e.observed))
    if mean_o == 0.0:
        raise MetricError("SI undefined for zero observed mean")
    return rmse(e) / mean_o


def taylor_stats(e, p=None) -> tuple[float, float, float]:
    """(std_O, std_P, cc) with population standard deviations."""
    e = _pair(e, p)
    r = cc(e)
    return float(np.std(e.observed)), float(np.std(e.predicted)), r


def deviation_series(e, p=None) -> list[tuple[int, float]]:
    e = _pair(e, p)
    return [(i, float(d)) for i, d in enumerate(e.predicted - e.observed)]


@dataclass(frozen=True)
class MetricRow:
    rmse: float
    mse: float
    cc: float
    si: float
    model: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {**self.model, "rmse": self.rmse, "mse": self.mse, "cc": self.cc, "si": self.si}


def evaluate(e, p=None, **model) -> MetricRow:
    """All four factors. CC or SI that are undefined come back as NaN."""
    e = _pair(e, p)
    m = mse(e)
    try:
        r = cc(e)
    except MetricError:
        r = float("nan")
    try:
        s = si(e)
    except MetricError:
        s = float("nan")
    return MetricRow(rmse=math.sqrt(m), mse=m, cc=r, si=s, model=model)

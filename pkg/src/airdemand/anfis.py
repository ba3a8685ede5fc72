"""First-order Takagi-Sugeno fuzzy system on a 7x7 grid partition of two inputs.

Flat parameter layout::

    premise:     for input in (0, 1): for mf in range(7): mf parameters
                   Triangular (a, b, c)   GBell (a, b, c)   Gaussian (sigma, c)
    consequents: for rule k in range(49): (p, q, r) with f_k = p*x1 + q*x2 + r

Rule ``k = i*7 + j`` pairs MF ``i`` of input 1 with MF ``j`` of input 2. Firing
strengths use the product t-norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dataset import Dataset, Normalizer

N_INPUTS = 2
N_MFS = 7
N_RULES = N_MFS**N_INPUTS
WIDTH_EPS = 1e-3

CENTER_BOUNDS = (-0.2, 1.2)
WIDTH_BOUNDS = (WIDTH_EPS, 1.0)
GBELL_SHAPE_BOUNDS = (0.5, 5.0)
CONSEQUENT_BOUNDS = (-5.0, 5.0)


class MfType(str, Enum):
    TRIANGULAR = "triangular"
    GBELL = "gbell"
    GAUSSIAN = "gaussian"

    @classmethod
    def parse(cls, s) -> MfType:
        if isinstance(s, cls):
            return s
        key = str(s).strip().lower().replace(".", "").replace(" ", "").replace("_", "")
        aliases = {"tri": "triangular", "trimf": "triangular", "bell": "gbell",
                   "gbellmf": "gbell", "gauss": "gaussian", "gaussmf": "gaussian"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown membership function type {s!r}") from None

    @property
    def arity(self) -> int:
        return 2 if self is MfType.GAUSSIAN else 3

    @property
    def center_slot(self) -> int:
        return {MfType.TRIANGULAR: 1, MfType.GBELL: 2, MfType.GAUSSIAN: 1}[self]


@dataclass(frozen=True)
class AnfisConfig:
    mf_type: MfType = MfType.TRIANGULAR
    mfs_per_input: int = N_MFS
    input_dim: int = N_INPUTS

    def __post_init__(self):
        object.__setattr__(self, "mf_type", MfType.parse(self.mf_type))
        if self.mfs_per_input != N_MFS or self.input_dim != N_INPUTS:
            raise ValueError("only the 2-input, 7-MF (49 rule) grid is supported")

    @property
    def rule_count(self) -> int:
        return self.mfs_per_input**self.input_dim

    @property
    def premise_size(self) -> int:
        return self.input_dim * self.mfs_per_input * self.mf_type.arity


def param_count(cfg: AnfisConfig) -> int:
    return cfg.premise_size + 3 * cfg.rule_count


# ---------------------------------------------------------------- membership

def mf_values(t: MfType, prm, x) -> np.ndarray:
    """Vectorized membership degrees; ``prm[..., k]`` is the k-th MF parameter.

    Parameters are assumed valid; see :func:`check_mf_params`.
    """
    prm = np.asarray(prm, float)
    x = np.asarray(x, float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if t is MfType.TRIANGULAR:
            a, b, c = prm[..., 0], prm[..., 1], prm[..., 2]
            left = np.where(b > a, (x - a) / np.where(b > a, b - a, 1.0), np.where(x >= b, 1.0, 0.0))
            right = np.where(c > b, (c - x) / np.where(c > b, c - b, 1.0), np.where(x <= b, 1.0, 0.0))
            return np.clip(np.minimum(left, right), 0.0, 1.0)
        if t is MfType.GBELL:
            a, b, c = prm[..., 0], prm[..., 1], prm[..., 2]
            return 1.0 / (1.0 + np.abs((x - c) / a) ** (2.0 * b))
        sigma, c = prm[..., 0], prm[..., 1]
        return np.exp(-((x - c) ** 2) / (2.0 * sigma**2))


def check_mf_params(t: MfType, prm) -> None:
    prm = np.asarray(prm, float)
    if prm.shape[-1] != t.arity:
        raise ValueError(f"{t.value} MF takes {t.arity} parameters, got {prm.shape[-1]}")
    if not np.all(np.isfinite(prm)):
        raise ValueError("membership parameters must be finite")
    if t is MfType.TRIANGULAR:
        if np.any(prm[..., 0] > prm[..., 1]) or np.any(prm[..., 1] > prm[..., 2]):
            raise ValueError("triangular MF needs a <= b <= c")
    elif t is MfType.GBELL:
        if np.any(prm[..., 0] <= 0) or np.any(prm[..., 1] <= 0):
            raise ValueError("generalized bell MF needs a > 0 and b > 0")
    elif np.any(prm[..., 0] <= 0):
        raise ValueError("gaussian MF needs sigma > 0")


def mf_eval(t, p, x: float) -> float:
    t = MfType.parse(t)
    check_mf_params(t, p)
    return float(mf_values(t, p, x))


# ---------------------------------------------------------------- encoding

def decode(cfg: AnfisConfig, params) -> tuple[np.ndarray, np.ndarray]:
    """Flat vector(s) (..., P) -> premise (..., 2, 7, arity), consequents (..., 49, 3)."""
    p = np.asarray(params, float)
    if p.shape[-1] != param_count(cfg):
        raise ValueError(f"expected {param_count(cfg)} parameters for {cfg.mf_type.value}, got {p.shape[-1]}")
    lead = p.shape[:-1]
    k = cfg.premise_size
    premise = p[..., :k].reshape(*lead, cfg.input_dim, cfg.mfs_per_input, cfg.mf_type.arity)
    cons = p[..., k:].reshape(*lead, cfg.rule_count, 3)
    return premise, cons


def encode(premise, consequents) -> np.ndarray:
    premise = np.asarray(premise, float)
    consequents = np.asarray(consequents, float)
    lead = premise.shape[:-3]
    return np.concatenate([premise.reshape(*lead, -1), consequents.reshape(*lead, -1)], axis=-1)


# ---------------------------------------------------------------- inference

def _memberships(cfg: AnfisConfig, premise: np.ndarray, x: np.ndarray) -> np.ndarray:
    # premise (pop, 2, 7, arity), x (n, 2) -> (pop, n, 2, 7)
    return mf_values(cfg.mf_type, premise[:, None, :, :, :], x[None, :, :, None])


def _normalize(w: np.ndarray) -> np.ndarray:
    total = w.sum(axis=-1, keepdims=True)
    safe = np.where(total > 0, total, 1.0)
    return np.where(total > 0, w / safe, 1.0 / w.shape[-1])


def firing_strengths_batch(cfg: AnfisConfig, population, x) -> np.ndarray:
    """Normalized firing strengths, shape (pop, n, 49)."""
    premise, _ = decode(cfg, np.atleast_2d(population))
    x = np.atleast_2d(np.asarray(x, float))
    mu = _memberships(cfg, premise, x)
    w = mu[:, :, 0, :, None] * mu[:, :, 1, None, :]
    return _normalize(w.reshape(*w.shape[:2], cfg.rule_count))


def forward_batch(cfg: AnfisConfig, population, x) -> np.ndarray:
    """Outputs for every parameter row and input row, shape (pop, n). No validation."""
    pop = np.atleast_2d(np.asarray(population, float))
    x = np.atleast_2d(np.asarray(x, float))
    _, cons = decode(cfg, pop)
    wbar = firing_strengths_batch(cfg, pop, x)
    f = np.einsum("ni,pki->pnk", x, cons[:, :, :2]) + cons[:, None, :, 2]
    return np.einsum("pnk,pnk->pn", wbar, f)


def _validated(cfg: AnfisConfig, params) -> np.ndarray:
    params = np.asarray(params, float)
    if params.ndim != 1:
        raise ValueError("params must be a flat vector")
    premise, cons = decode(cfg, params)
    check_mf_params(cfg.mf_type, premise)
    if not np.all(np.isfinite(cons)):
        raise ValueError("consequent parameters must be finite")
    return params


def firing_strengths(cfg: AnfisConfig, params, x) -> np.ndarray:
    params = _validated(cfg, params)
    xa = np.asarray(x, float)
    w = firing_strengths_batch(cfg, params[None, :], xa)[0]
    return w[0] if xa.ndim == 1 else w


def forward(cfg: AnfisConfig, params, x):
    params = _validated(cfg, params)
    xa = np.asarray(x, float)
    out = forward_batch(cfg, params[None, :], xa)[0]
    return float(out[0]) if xa.ndim == 1 else out


def predict_batch(cfg: AnfisConfig, params, dataset: Dataset, norm: Normalizer) -> np.ndarray:
    x = norm.scale_features(dataset.features)
    return norm.unscale_target(forward(cfg, params, x))


# ---------------------------------------------------------------- repair / init

def repair(cfg: AnfisConfig, population) -> np.ndarray:
    """Map arbitrary swarm positions to valid, canonically ordered parameters.

    Widths are clamped to at least WIDTH_EPS, triangle vertices sorted, and the
    MFs of each input sorted by center with the rule consequents permuted to
    match, so valid inputs keep their input-output behaviour.
    """
    pop = np.array(np.atleast_2d(population), dtype=float)
    premise, cons = decode(cfg, pop)
    premise = premise.copy()
    t = cfg.mf_type
    if t is MfType.TRIANGULAR:
        premise.sort(axis=-1)
    elif t is MfType.GBELL:
        premise[..., 0] = np.maximum(premise[..., 0], WIDTH_EPS)
        premise[..., 1] = np.maximum(premise[..., 1], WIDTH_EPS)
    else:
        premise[..., 0] = np.maximum(premise[..., 0], WIDTH_EPS)

    order = np.argsort(premise[..., t.center_slot], axis=-1, kind="stable")  # (pop, 2, 7)
    premise = np.take_along_axis(premise, order[..., None], axis=2)
    m = cfg.mfs_per_input
    grid = cons.reshape(len(pop), m, m, 3)
    rows = np.arange(len(pop))[:, None, None]
    grid = grid[rows, order[:, 0, :, None], order[:, 1, None, :]]
    out = encode(premise, grid.reshape(len(pop), cfg.rule_count, 3))
    return out if np.ndim(population) > 1 else out[0]


def grid_centers(cfg: AnfisConfig) -> np.ndarray:
    return np.linspace(0.0, 1.0, cfg.mfs_per_input)


def grid_init(cfg: AnfisConfig) -> np.ndarray:
    """Even partition of [0, 1] with zero consequents."""
    c = grid_centers(cfg)
    step = c[1] - c[0]
    t = cfg.mf_type
    if t is MfType.TRIANGULAR:
        one = np.column_stack([c - step, c, c + step])
    elif t is MfType.GBELL:
        one = np.column_stack([np.full_like(c, step / 2), np.full_like(c, 2.0), c])
    else:
        sigma = step / math.sqrt(2.0 * math.log(2.0))
        one = np.column_stack([np.full_like(c, sigma), c])
    premise = np.stack([one] * cfg.input_dim)
    return encode(premise, np.zeros((cfg.rule_count, 3)))


def bounds(cfg: AnfisConfig) -> tuple[np.ndarray, np.ndarray]:
    t = cfg.mf_type
    if t is MfType.TRIANGULAR:
        slots = [CENTER_BOUNDS] * 3
    elif t is MfType.GBELL:
        slots = [WIDTH_BOUNDS, GBELL_SHAPE_BOUNDS, CENTER_BOUNDS]
    else:
        slots = [WIDTH_BOUNDS, CENTER_BOUNDS]
    n_mf = cfg.input_dim * cfg.mfs_per_input
    lo = [s[0] for s in slots] * n_mf + [CONSEQUENT_BOUNDS[0]] * (3 * cfg.rule_count)
    hi = [s[1] for s in slots] * n_mf + [CONSEQUENT_BOUNDS[1]] * (3 * cfg.rule_count)
    return np.array(lo), np.array(hi)


def init_population(cfg: AnfisConfig, size: int, rng: np.random.Generator,
                    premise_jitter: float = 0.05, consequent_range: float = 1.0) -> np.ndarray:
    """Swarm seeded around :func:`grid_init`; row 0 is the unperturbed grid."""
    lo, hi = bounds(cfg)
    center = grid_init(cfg)
    k = cfg.premise_size
    pop = np.tile(center, (size, 1))
    pop[1:, :k] += rng.uniform(-premise_jitter, premise_jitter, size=(size - 1, k))
    pop[1:, k:] = rng.uniform(-consequent_range, consequent_range, size=(size - 1, len(center) - k))
    return np.clip(pop, lo, hi)

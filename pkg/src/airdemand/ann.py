"""2-H-1 feedforward network evaluated from a flat parameter vector.

Layout of the flat vector (length ``4*H + 1``)::

    [ w_in (2*H, input-major: w[i, j] at i*H + j) | b_hidden (H) | w_out (H) | b_out (1) ]

Hidden units use tanh, the output unit is linear.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, Normalizer

INPUT_DIM = 2
INIT_RANGE = (-1.0, 1.0)


@dataclass(frozen=True)
class AnnConfig:
    hidden_neurons: int = 12
    input_dim: int = INPUT_DIM
    output_dim: int = 1

    def __post_init__(self):
        if self.hidden_neurons < 1:
            raise ValueError("hidden_neurons must be >= 1")
        if self.input_dim != INPUT_DIM or self.output_dim != 1:
            raise ValueError("only 2-input, 1-output networks are supported")


def param_count(cfg: AnnConfig) -> int:
    return 4 * cfg.hidden_neurons + 1


def unpack(cfg: AnnConfig, params):
    """Split params of shape (..., 4H+1) into (w_in, b_hidden, w_out, b_out)."""
    p = np.asarray(params, dtype=float)
    h = cfg.hidden_neurons
    if p.shape[-1] != param_count(cfg):
        raise ValueError(f"expected {param_count(cfg)} parameters for H={h}, got {p.shape[-1]}")
    lead = p.shape[:-1]
    w_in = p[..., : 2 * h].reshape(*lead, 2, h)
    b_h = p[..., 2 * h : 3 * h]
    w_out = p[..., 3 * h : 4 * h]
    b_out = p[..., 4 * h]
    return w_in, b_h, w_out, b_out


def pack(w_in, b_h, w_out, b_out) -> np.ndarray:
    return np.concatenate([np.ravel(w_in), np.ravel(b_h), np.ravel(w_out), np.atleast_1d(b_out)]).astype(float)


def forward_batch(cfg: AnnConfig, population, x) -> np.ndarray:
    """Outputs for every parameter row and every input row: shape (pop, n)."""
    pop = np.atleast_2d(np.asarray(population, float))
    x = np.atleast_2d(np.asarray(x, float))
    w_in, b_h, w_out, b_out = unpack(cfg, pop)
    hidden = np.tanh(np.einsum("ni,pih->pnh", x, w_in) + b_h[:, None, :])
    return np.einsum("pnh,ph->pn", hidden, w_out) + b_out[:, None]


def forward(cfg: AnnConfig, params, x):
    """Normalized prediction for one feature pair (returns float) or a batch (n,)."""
    params = np.asarray(params, float)
    if params.ndim != 1:
        raise ValueError("params must be a flat vector")
    xa = np.asarray(x, float)
    out = forward_batch(cfg, params[None, :], xa)[0]
    return float(out[0]) if xa.ndim == 1 else out


def predict_batch(cfg: AnnConfig, params, dataset: Dataset, norm: Normalizer) -> np.ndarray:
    """Denormalized predictions (m/s) for every sample, in order."""
    x = norm.scale_features(dataset.features)
    return norm.unscale_target(forward(cfg, params, x))


def init_population(cfg: AnnConfig, size: int, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(*INIT_RANGE, size=(size, param_count(cfg)))


def bounds(cfg: AnnConfig) -> tuple[np.ndarray, np.ndarray]:
    n = param_count(cfg)
    return np.full(n, INIT_RANGE[0]), np.full(n, INIT_RANGE[1])

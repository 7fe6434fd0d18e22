"""Layer primitives with plain numpy forward/backward pairs.

Activations are float64 throughout.  Spatial tensors are channels-last
(H, W, C); pooled activations are flat (C,) vectors.  Layers are pure
functions of their input plus explicit RNG state, which keeps every
forward pass bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "Mode",
    "PassSeed",
    "Conv3x3",
    "Affine",
    "Relu",
    "MeanPool",
    "MaxPool",
    "Dropout",
    "PositiveHead",
]


class Mode(Enum):
    """Forward-pass behavior for stochastic layers."""

    TRAIN = "train"
    MC = "mc"
    DETERMINISTIC = "deterministic"


@dataclass(frozen=True)
class PassSeed:
    """Seed material for one stochastic forward pass.

    Dropout masks are a pure function of (base_seed, pass_index,
    layer_index), so passes can be replayed or scheduled in any order
    without coordination.
    """

    base_seed: int
    pass_index: int = 0

    def __post_init__(self) -> None:
        if self.pass_index < 0:
            raise ValueError("pass_index must be non-negative")


class Conv3x3:
    """3x3 same-padding convolution, stride 1, channels-last."""

    kind = "conv3x3"

    def __init__(self, c_in: int, c_out: int):
        self.c_in = c_in
        self.c_out = c_out
        self.params = {
            "W": np.zeros((3, 3, c_in, c_out)),
            "b": np.zeros(c_out),
        }

    def init(self, rng: np.random.Generator) -> None:
        span = np.sqrt(6.0 / (9 * self.c_in + 9 * self.c_out))
        self.params["W"] = rng.uniform(-span, span, (3, 3, self.c_in, self.c_out))
        self.params["b"] = np.zeros(self.c_out)

    def forward(self, x, *, mode, rng, want_cache):
        h, w, _ = x.shape
        xp = np.zeros((h + 2, w + 2, self.c_in))
        xp[1:-1, 1:-1] = x
        weight = self.params["W"]
        y = np.broadcast_to(self.params["b"], (h, w, self.c_out)).copy()
        for ki in range(3):
            for kj in range(3):
                y += xp[ki : ki + h, kj : kj + w] @ weight[ki, kj]
        return y, (xp if want_cache else None)

    def backward(self, dy, cache):
        xp = cache
        h, w, _ = dy.shape
        weight = self.params["W"]
        d_weight = np.empty_like(weight)
        dxp = np.zeros_like(xp)
        dy_flat = dy.reshape(-1, self.c_out)
        for ki in range(3):
            for kj in range(3):
                patch = xp[ki : ki + h, kj : kj + w].reshape(-1, self.c_in)
                d_weight[ki, kj] = patch.T @ dy_flat
                dxp[ki : ki + h, kj : kj + w] += dy @ weight[ki, kj].T
        return dxp[1:-1, 1:-1], {"W": d_weight, "b": dy.sum(axis=(0, 1))}


class Affine:
    """Linear map plus bias over the channel axis.

    Acts per pixel on spatial maps (pointwise affine) and as a dense
    layer on pooled vectors; the math is identical.
    """

    kind = "affine"

    def __init__(self, c_in: int, c_out: int):
        self.c_in = c_in
        self.c_out = c_out
        self.params = {"W": np.zeros((c_in, c_out)), "b": np.zeros(c_out)}

    def init(self, rng: np.random.Generator) -> None:
        span = np.sqrt(6.0 / (self.c_in + self.c_out))
        self.params["W"] = rng.uniform(-span, span, (self.c_in, self.c_out))
        self.params["b"] = np.zeros(self.c_out)

    def forward(self, x, *, mode, rng, want_cache):
        y = x @ self.params["W"] + self.params["b"]
        return y, (x if want_cache else None)

    def backward(self, dy, cache):
        x = cache
        x_flat = x.reshape(-1, self.c_in)
        dy_flat = dy.reshape(-1, self.c_out)
        dx = dy @ self.params["W"].T
        return dx, {"W": x_flat.T @ dy_flat, "b": dy_flat.sum(axis=0)}


class Relu:
    kind = "relu"

    def __init__(self):
        self.params = {}

    def forward(self, x, *, mode, rng, want_cache):
        y = np.maximum(x, 0.0)
        return y, ((x > 0.0) if want_cache else None)

    def backward(self, dy, cache):
        return dy * cache, {}


class MeanPool:
    """Global spatial mean: (H, W, C) -> (C,)."""

    kind = "mean-pool"

    def __init__(self):
        self.params = {}

    def forward(self, x, *, mode, rng, want_cache):
        return x.mean(axis=(0, 1)), (x.shape if want_cache else None)

    def backward(self, dy, cache):
        h, w, _ = cache
        return np.broadcast_to(dy / (h * w), cache).copy(), {}


class MaxPool:
    """Global spatial max: (H, W, C) -> (C,).

    Ties route the gradient to the first (row-major) maximum, so the
    backward pass is deterministic.
    """

    kind = "max-pool"

    def __init__(self):
        self.params = {}

    def forward(self, x, *, mode, rng, want_cache):
        flat = x.reshape(-1, x.shape[-1])
        idx = flat.argmax(axis=0)
        y = flat[idx, np.arange(x.shape[-1])]
        return y, ((x.shape, idx) if want_cache else None)

    def backward(self, dy, cache):
        shape, idx = cache
        dflat = np.zeros((shape[0] * shape[1], shape[2]))
        dflat[idx, np.arange(shape[2])] = dy
        return dflat.reshape(shape), {}


class Dropout:
    """Inverted dropout: kept units are scaled by 1/(1-rate).

    On spatial maps the mask is drawn per channel (one Bernoulli per
    feature map), so the spread it induces survives global pooling and
    stays on a comparable scale wherever the layer sits in the stack.
    On vectors the mask is per element.  Rate 0 is an exact identity,
    as is any forward in deterministic mode.
    """

    kind = "dropout"

    def __init__(self, rate: float):
        if not 0.0 <= rate < 1.0:
            raise ValueError("dropout rate must lie in [0, 1)")
        self.rate = rate
        self.params = {}

    def forward(self, x, *, mode, rng, want_cache):
        if mode is Mode.DETERMINISTIC or self.rate == 0.0:
            return x, None
        if x.ndim == 3:
            keep = rng.random(x.shape[-1]) >= self.rate
        else:
            keep = rng.random(x.shape) >= self.rate
        scale = keep / (1.0 - self.rate)
        return x * scale, (scale if want_cache else None)

    def backward(self, dy, cache):
        if cache is None:
            return dy, {}
        return dy * cache, {}


class PositiveHead:
    """Maps raw scores to a strictly positive unit direction.

    exp then L2 normalization.  The exponent is shifted by the max
    component (the output is invariant to that shift) and floored at
    -700 so every output component stays strictly positive for any
    finite input; the floor only engages for astronomically dominated
    components and carries no gradient.
    """

    kind = "positive-head"

    def __init__(self):
        self.params = {}

    def forward(self, x, *, mode, rng, want_cache):
        shifted = x - x.max(axis=-1, keepdims=True)
        e = np.exp(np.maximum(shifted, -700.0))
        norm = np.linalg.norm(e, axis=-1, keepdims=True)
        y = e / norm
        return y, ((e, y, norm) if want_cache else None)

    def backward(self, dy, cache):
        e, y, norm = cache
        radial = np.sum(y * dy, axis=-1, keepdims=True)
        return e * (dy - y * radial) / norm, {}

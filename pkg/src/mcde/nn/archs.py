"""Stock architectures.

Two deliberately different stacks: g-net averages features before the
readout and drops whole channels ahead of the pool, m-net takes a
spatial max and drops pooled features.  The pooling and dropout
placement differ so the two models fail in different ways on the same
scene, which is what makes ensembling them worthwhile.
"""

from __future__ import annotations

import numpy as np

from mcde.nn.layers import Affine, Conv3x3, Dropout, MaxPool, MeanPool, PositiveHead, Relu
from mcde.nn.network import Network
from mcde.seeding import derive_seed

__all__ = ["ARCHITECTURES", "build", "build_g_net", "build_m_net"]


def _init_layers(layers, seed: int) -> None:
    # Uniform [-s, s] with s = sqrt(6 / (fan_in + fan_out)), biases zero.
    for i, layer in enumerate(layers):
        if layer.params:
            layer.init(np.random.default_rng(derive_seed("layer-init", seed, i)))


def build_g_net(seed: int = 0, channels: int = 12, dropout_rate: float = 0.3) -> Network:
    layers = [
        Conv3x3(3, channels),
        Relu(),
        Dropout(dropout_rate),
        MeanPool(),
        Affine(channels, 3),
        PositiveHead(),
    ]
    _init_layers(layers, seed)
    return Network(layers, arch="g-net")


def build_m_net(seed: int = 0, channels: int = 12, dropout_rate: float = 0.3) -> Network:
    layers = [
        Conv3x3(3, channels),
        Relu(),
        MaxPool(),
        Dropout(dropout_rate),
        Affine(channels, 3),
        PositiveHead(),
    ]
    _init_layers(layers, seed)
    return Network(layers, arch="m-net")


ARCHITECTURES = {"g-net": build_g_net, "m-net": build_m_net}


def build(arch: str, seed: int = 0, channels: int = 12, dropout_rate: float = 0.3) -> Network:
    try:
        builder = ARCHITECTURES[arch]
    except KeyError:
        raise ValueError(
            f"unknown architecture {arch!r}; choose from {sorted(ARCHITECTURES)}"
        ) from None
    return builder(seed=seed, channels=channels, dropout_rate=dropout_rate)

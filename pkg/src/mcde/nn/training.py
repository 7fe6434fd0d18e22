"""Plain SGD on the cosine loss, fully deterministic given its config."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mcde.nn.layers import PassSeed
from mcde.nn.network import Network, NumericError
from mcde.seeding import derive_seed

__all__ = ["TrainConfig", "TrainingError", "train"]


class TrainingError(RuntimeError):
    """Raised when training diverges; the message names the epoch."""


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    learning_rate: float = 0.01
    batch_size: int = 8
    base_seed: int = 0

    def __post_init__(self) -> None:
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")


def train(net: Network, scenes, config: TrainConfig):
    """SGD without momentum; gradients averaged over each mini-batch.

    Scenes are visited in a per-epoch shuffled order derived from the
    base seed, and each sample's dropout masks come from a global step
    counter, so identical (network, data, config) runs produce
    bit-identical weights.  Returns (net, per-epoch mean loss trace);
    the network is updated in place.
    """
    scenes = list(scenes)
    if not scenes:
        raise ValueError("training set is empty")
    pass_base = derive_seed("train-pass", config.base_seed)
    trace: list[float] = []
    step = 0
    for epoch in range(config.epochs):
        order = np.random.default_rng(
            derive_seed("train-shuffle", config.base_seed, epoch)
        ).permutation(len(scenes))
        epoch_losses: list[float] = []
        for start in range(0, len(order), config.batch_size):
            batch = order[start : start + config.batch_size]
            acc = None
            for idx in batch:
                scene = scenes[idx]
                try:
                    loss, grads = net.backward(
                        scene.pixels, scene.label, PassSeed(pass_base, step)
                    )
                except NumericError as exc:
                    raise TrainingError(
                        f"training diverged at epoch {epoch}: {exc}"
                    ) from exc
                step += 1
                epoch_losses.append(loss)
                if acc is None:
                    acc = grads
                else:
                    for held, new in zip(acc, grads):
                        for name in held:
                            held[name] = held[name] + new[name]
            scale = config.learning_rate / len(batch)
            for layer, layer_grads in zip(net.layers, acc):
                for name, grad in layer_grads.items():
                    layer.params[name] -= scale * grad
        mean_loss = float(np.mean(epoch_losses))
        if not np.isfinite(mean_loss):
            raise TrainingError(f"training diverged at epoch {epoch}: non-finite loss")
        trace.append(mean_loss)
    return net, trace

"""Network container: ordered layers, forward modes, backprop."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from mcde.nn.layers import Dropout, Mode, PassSeed
from mcde.seeding import derive_seed

__all__ = ["Network", "NumericError", "cosine_loss"]


class NumericError(RuntimeError):
    """Non-finite activations or gradients, annotated with the layer index."""


def cosine_loss(pred, gt) -> float:
    """1 minus the inner product of two unit vectors; 0 iff they coincide."""
    return 1.0 - float(np.dot(pred, gt))


def _mask_rng(seed: PassSeed, layer_index: int) -> np.random.Generator:
    return np.random.default_rng(
        derive_seed("dropout-mask", seed.base_seed, seed.pass_index, layer_index)
    )


@dataclass
class Network:
    """Ordered layer stack mapping an (H, W, 3) image to an illuminant.

    Single-writer: training mutates ``layers[i].params`` in place, so a
    network must not be trained and evaluated concurrently.  Forward
    passes themselves are read-only and safe to replay.
    """

    layers: list = field(default_factory=list)
    arch: str = "custom"

    def forward(self, pixels, mode: Mode = Mode.DETERMINISTIC, seed: PassSeed | None = None) -> np.ndarray:
        """Run the stack and return the (3,) estimate.

        Train and MC modes activate dropout and therefore require a
        PassSeed; deterministic mode disables dropout entirely.
        """
        out, _ = self._run(np.asarray(pixels, dtype=np.float64), mode, seed, False)
        return out

    def _run(self, x, mode, seed, want_caches):
        if mode is not Mode.DETERMINISTIC and seed is None:
            raise ValueError("train/mc forward passes require a PassSeed")
        caches = []
        a = x
        for i, layer in enumerate(self.layers):
            rng = None
            if isinstance(layer, Dropout) and mode is not Mode.DETERMINISTIC:
                rng = _mask_rng(seed, i)
            a, cache = layer.forward(a, mode=mode, rng=rng, want_cache=want_caches)
            if not np.all(np.isfinite(a)):
                raise NumericError(
                    f"non-finite activations after layer {i} ({layer.kind})"
                )
            caches.append(cache)
        return a, caches

    def backward(self, pixels, gt, seed: PassSeed):
        """Loss and gradients for one sample under the pass's dropout masks.

        Returns (loss, grads) where grads is a list parallel to
        ``layers``; each entry maps parameter names to arrays shaped
        like the parameters.
        """
        x = np.asarray(pixels, dtype=np.float64)
        gt = np.asarray(gt, dtype=np.float64)
        pred, caches = self._run(x, Mode.TRAIN, seed, True)
        loss = cosine_loss(pred, gt)
        grad = -gt
        grads: list[dict] = [{}] * len(self.layers)
        for i in range(len(self.layers) - 1, -1, -1):
            grad, layer_grads = self.layers[i].backward(grad, caches[i])
            grads[i] = layer_grads
        for i, layer_grads in enumerate(grads):
            for name, arr in layer_grads.items():
                if not np.all(np.isfinite(arr)):
                    raise NumericError(
                        f"non-finite gradient for parameter {name!r} of layer {i}"
                    )
        return loss, grads

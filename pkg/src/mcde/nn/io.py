"""Flat binary network container plus a JSON sidecar.

Binary layout (all integers little-endian):

    magic            8 bytes  b"MCDENET1"
    format version   uint32
    arch name        uint16 length + utf-8 bytes
    layer count      uint32
    layer records    one per layer: uint32 kind code, uint32 a,
                     uint32 b, float64 f (a/b carry channel counts,
                     f carries the dropout rate; unused slots are 0)
    weight blobs     per layer: uint32 param count, then per param:
                     uint8 name length + ascii name, uint8 ndim,
                     uint32 dims, raw float64 data (C order)

Weights round-trip bit-exactly.  The sidecar at ``<path>.json``
describes the architecture and, when provided, the training config and
loss trace; it is documentation, the binary alone rebuilds the network.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from mcde.nn.layers import (
    Affine,
    Conv3x3,
    Dropout,
    MaxPool,
    MeanPool,
    PositiveHead,
    Relu,
)
from mcde.nn.network import Network

__all__ = ["ModelFormatError", "save_network", "load_network", "FORMAT_VERSION"]

MAGIC = b"MCDENET1"
FORMAT_VERSION = 1

_KIND_CODES = {
    "conv3x3": 1,
    "affine": 2,
    "relu": 3,
    "mean-pool": 4,
    "max-pool": 5,
    "dropout": 6,
    "positive-head": 7,
}


class ModelFormatError(Exception):
    """Malformed, truncated, or version-incompatible model file."""


def _layer_record(layer) -> tuple[int, int, int, float]:
    code = _KIND_CODES[layer.kind]
    if isinstance(layer, (Conv3x3, Affine)):
        return code, layer.c_in, layer.c_out, 0.0
    if isinstance(layer, Dropout):
        return code, 0, 0, layer.rate
    return code, 0, 0, 0.0


def _layer_from_record(code: int, a: int, b: int, f: float):
    if code == 1:
        return Conv3x3(a, b)
    if code == 2:
        return Affine(a, b)
    if code == 3:
        return Relu()
    if code == 4:
        return MeanPool()
    if code == 5:
        return MaxPool()
    if code == 6:
        return Dropout(f)
    if code == 7:
        return PositiveHead()
    raise ModelFormatError(f"unknown layer kind code {code}")


def _layer_sidecar(layer) -> dict:
    entry: dict = {"kind": layer.kind}
    if isinstance(layer, (Conv3x3, Affine)):
        entry["c_in"] = layer.c_in
        entry["c_out"] = layer.c_out
    if isinstance(layer, Dropout):
        entry["rate"] = layer.rate
    return entry


def save_network(net: Network, path, training: dict | None = None, loss_trace=None) -> None:
    """Write the binary container and its JSON sidecar."""
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        arch = net.arch.encode("utf-8")
        fh.write(struct.pack("<H", len(arch)))
        fh.write(arch)
        fh.write(struct.pack("<I", len(net.layers)))
        for layer in net.layers:
            fh.write(struct.pack("<IIId", *_layer_record(layer)))
        for layer in net.layers:
            names = sorted(layer.params)
            fh.write(struct.pack("<I", len(names)))
            for name in names:
                arr = np.ascontiguousarray(layer.params[name], dtype="<f8")
                encoded = name.encode("ascii")
                fh.write(struct.pack("<B", len(encoded)))
                fh.write(encoded)
                fh.write(struct.pack("<B", arr.ndim))
                fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
                fh.write(arr.tobytes())
    sidecar = {
        "format_version": FORMAT_VERSION,
        "arch": net.arch,
        "layers": [_layer_sidecar(layer) for layer in net.layers],
        "training": training,
        "loss_trace": list(loss_trace) if loss_trace is not None else None,
    }
    Path(str(path) + ".json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _read(fh, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise ModelFormatError("truncated model file")
    return data


def load_network(path) -> Network:
    """Rebuild a Network from the binary container, bit-exactly."""
    with open(path, "rb") as fh:
        if _read(fh, len(MAGIC)) != MAGIC:
            raise ModelFormatError("bad magic bytes; not a network container")
        (version,) = struct.unpack("<I", _read(fh, 4))
        if version != FORMAT_VERSION:
            raise ModelFormatError(
                f"unsupported container version {version} (expected {FORMAT_VERSION})"
            )
        (arch_len,) = struct.unpack("<H", _read(fh, 2))
        arch = _read(fh, arch_len).decode("utf-8")
        (n_layers,) = struct.unpack("<I", _read(fh, 4))
        layers = []
        for _ in range(n_layers):
            code, a, b, f = struct.unpack("<IIId", _read(fh, 20))
            try:
                layers.append(_layer_from_record(code, a, b, f))
            except ValueError as exc:
                raise ModelFormatError(f"invalid layer record: {exc}") from exc
        for i, layer in enumerate(layers):
            (n_params,) = struct.unpack("<I", _read(fh, 4))
            for _ in range(n_params):
                (name_len,) = struct.unpack("<B", _read(fh, 1))
                name = _read(fh, name_len).decode("ascii")
                (ndim,) = struct.unpack("<B", _read(fh, 1))
                shape = struct.unpack(f"<{ndim}I", _read(fh, 4 * ndim))
                count = int(np.prod(shape, dtype=np.int64)) if ndim else 1
                arr = np.frombuffer(_read(fh, 8 * count), dtype="<f8").reshape(shape)
                if name not in layer.params or layer.params[name].shape != arr.shape:
                    raise ModelFormatError(
                        f"parameter {name!r} of layer {i} does not fit its layer record"
                    )
                layer.params[name] = arr.copy()
        if fh.read(1):
            raise ModelFormatError("trailing bytes after weight blobs")
    return Network(layers, arch=arch)

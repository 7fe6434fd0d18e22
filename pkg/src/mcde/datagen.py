"""Synthetic scene generation and the on-disk dataset format.

Scenes are reflectance mosaics: a grid of n_patches random positive
colors, multiplied per pixel by one illuminant drawn from a named pool
and perturbed with Gaussian noise (clamped at zero).  Every scene is a
pure function of (base_seed, index).

Illuminant pools are rectangles in (azimuth, inclination) degrees:
"full" covers most of the positive octant, "band-a" is a blue-shifted
cap (small inclination, blue dominant) and "band-b" a red-shifted cap
(large inclination, red leaning azimuth).  The two bands are disjoint
and well separated, which is what the domain-shift benchmark leans on.

Dataset directory layout:

    manifest          JSON: format version, generation config, scene
                      count, file names, per-scene SHA-256 checksums
    labels.csv        index,r,g,b with 17-significant-digit decimals
    scene_00000.f32   raw little-endian float32 pixel blob, C order,
                      shape (height, width, 3)

save followed by load is the identity, bit for bit.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from mcde.color import Scene, SphericalDir, from_spherical
from mcde.seeding import derive_seed

__all__ = [
    "FORMAT_VERSION",
    "DatasetFormatError",
    "PoolSpec",
    "POOLS",
    "GenConfig",
    "Dataset",
    "sample_illuminant",
    "gen_scene",
    "gen_dataset",
    "save",
    "load",
    "folds",
]

FORMAT_VERSION = 1

REFLECTANCE_LOW = 0.05
REFLECTANCE_HIGH = 1.0


class DatasetFormatError(Exception):
    """Malformed, truncated, or checksum-failing dataset directory."""


@dataclass(frozen=True)
class PoolSpec:
    """Angular rectangle illuminants are drawn from, in degrees."""

    phi_deg: tuple[float, float]
    varphi_deg: tuple[float, float]


POOLS = {
    "full": PoolSpec(phi_deg=(10.0, 80.0), varphi_deg=(10.0, 80.0)),
    "band-a": PoolSpec(phi_deg=(40.0, 62.0), varphi_deg=(16.0, 30.0)),
    "band-b": PoolSpec(phi_deg=(16.0, 38.0), varphi_deg=(56.0, 72.0)),
}


@dataclass(frozen=True)
class GenConfig:
    n_scenes: int
    width: int = 16
    height: int = 16
    n_patches: int = 25
    pool: str = "full"
    noise_std: float = 0.01
    base_seed: int = 0

    def __post_init__(self) -> None:
        if self.n_scenes < 0:
            raise ValueError("n_scenes must be non-negative")
        if self.width < 8 or self.height < 8:
            raise ValueError("width and height must be at least 8")
        if self.n_patches < 1:
            raise ValueError("n_patches must be at least 1")
        if self.noise_std < 0.0:
            raise ValueError("noise_std must be non-negative")
        if self.pool not in POOLS:
            raise ValueError(f"unknown pool {self.pool!r}; choose from {sorted(POOLS)}")


@dataclass
class Dataset:
    scenes: list[Scene]
    config: GenConfig


def sample_illuminant(pool: str, rng: np.random.Generator) -> np.ndarray:
    """One illuminant, uniform over the pool's angular rectangle."""
    spec = POOLS[pool]
    phi = np.radians(rng.uniform(*spec.phi_deg))
    varphi = np.radians(rng.uniform(*spec.varphi_deg))
    return from_spherical(SphericalDir(phi, varphi))


def gen_scene(config: GenConfig, index: int) -> Scene:
    """Render scene ``index``; a pure function of (base_seed, index).

    Draw order is fixed: patch colors, then the illuminant, then noise.
    """
    rng = np.random.default_rng(derive_seed("scene", config.base_seed, index))
    colors = rng.uniform(REFLECTANCE_LOW, REFLECTANCE_HIGH, (config.n_patches, 3))
    label = sample_illuminant(config.pool, rng)

    grid = math.isqrt(config.n_patches - 1) + 1  # ceil(sqrt(n_patches))
    h, w = config.height, config.width
    reflectance = np.empty((h, w, 3))
    for row in range(grid):
        r0, r1 = row * h // grid, (row + 1) * h // grid
        for col in range(grid):
            c0, c1 = col * w // grid, (col + 1) * w // grid
            reflectance[r0:r1, c0:c1] = colors[(row * grid + col) % config.n_patches]

    pixels = reflectance * label
    if config.noise_std > 0.0:
        pixels = pixels + rng.normal(0.0, config.noise_std, pixels.shape)
    pixels = np.maximum(pixels, 0.0).astype(np.float32)
    return Scene(pixels=pixels, label=label)


def gen_dataset(config: GenConfig) -> Dataset:
    return Dataset([gen_scene(config, i) for i in range(config.n_scenes)], config)


def save(dataset: Dataset, path) -> None:
    """Write a dataset directory (manifest, labels.csv, pixel blobs)."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    names: list[str] = []
    checksums: dict[str, str] = {}
    for i, scene in enumerate(dataset.scenes):
        blob = np.ascontiguousarray(scene.pixels, dtype="<f4").tobytes()
        name = f"scene_{i:05d}.f32"
        (root / name).write_bytes(blob)
        names.append(name)
        checksums[name] = hashlib.sha256(blob).hexdigest()
    lines = ["index,r,g,b"]
    for i, scene in enumerate(dataset.scenes):
        r, g, b = (format(float(x), ".17g") for x in scene.label)
        lines.append(f"{i},{r},{g},{b}")
    (root / "labels.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    manifest = {
        "format_version": FORMAT_VERSION,
        "config": asdict(dataset.config),
        "n_scenes": len(dataset.scenes),
        "pixel_dtype": "<f4",
        "pixel_shape": [dataset.config.height, dataset.config.width, 3],
        "labels_file": "labels.csv",
        "scene_files": names,
        "checksums": checksums,
    }
    (root / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load(path) -> Dataset:
    """Read a dataset directory back, verifying checksums and sizes."""
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise DatasetFormatError(f"no manifest in {root}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"malformed manifest: {exc}") from exc
    if manifest.get("format_version") != FORMAT_VERSION:
        raise DatasetFormatError(
            f"unsupported dataset version {manifest.get('format_version')!r}"
        )
    try:
        config = GenConfig(**manifest["config"])
        n_scenes = manifest["n_scenes"]
        names = manifest["scene_files"]
        checksums = manifest["checksums"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetFormatError(f"invalid manifest contents: {exc}") from exc
    if len(names) != n_scenes:
        raise DatasetFormatError("scene file list does not match the scene count")

    labels_path = root / "labels.csv"
    if not labels_path.is_file():
        raise DatasetFormatError(f"no labels.csv in {root}")
    labels_text = labels_path.read_text(encoding="utf-8").splitlines()
    if len(labels_text) != n_scenes + 1 or labels_text[0] != "index,r,g,b":
        raise DatasetFormatError("labels.csv does not match the manifest")
    labels = []
    for expected, line in enumerate(labels_text[1:]):
        fields = line.split(",")
        if len(fields) != 4 or int(fields[0]) != expected:
            raise DatasetFormatError(f"bad labels.csv row {expected}")
        labels.append(np.array([float(v) for v in fields[1:]], dtype=np.float64))

    expected_len = config.height * config.width * 3 * 4
    scenes = []
    for i, name in enumerate(names):
        blob_path = root / name
        if not blob_path.is_file():
            raise DatasetFormatError(f"missing scene file {name}")
        blob = blob_path.read_bytes()
        if len(blob) != expected_len:
            raise DatasetFormatError(f"scene file {name} is truncated")
        if hashlib.sha256(blob).hexdigest() != checksums.get(name):
            raise DatasetFormatError(f"checksum mismatch for {name}")
        pixels = (
            np.frombuffer(blob, dtype="<f4")
            .reshape(config.height, config.width, 3)
            .copy()
        )
        scenes.append(Scene(pixels=pixels, label=labels[i]))
    return Dataset(scenes, config)


def folds(dataset, k: int) -> list[range]:
    """Contiguous, order-preserving folds of near-equal size.

    Sizes differ by at most one; the earliest folds take the extra
    scene.  Accepts a Dataset or a plain scene count.
    """
    n = len(dataset.scenes) if hasattr(dataset, "scenes") else int(dataset)
    if k < 2:
        raise ValueError("need at least two folds")
    if k > n:
        raise ValueError(f"cannot split {n} scenes into {k} folds")
    base, extra = divmod(n, k)
    spans = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        spans.append(range(start, start + size))
        start += size
    return spans

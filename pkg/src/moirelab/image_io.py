"""Raster image file formats: 16-bit grayscale PNG, plain-text PGM, JSON sidecars.

The analyzer accepts the same formats the renderer writes, so externally
captured photographs can be fed through the measurement pipeline.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image

from .render import RasterImage

__all__ = ["save_png", "load_png", "save_pgm", "load_pgm", "save_sidecar", "load_sidecar", "load_image"]

_MAXVAL = 65535


def _quantize(samples: np.ndarray) -> np.ndarray:
    return np.round(np.clip(samples, 0.0, 1.0) * _MAXVAL).astype(np.uint16)


def save_png(image: RasterImage, path) -> Path:
    path = Path(path)
    Image.fromarray(_quantize(image.samples), mode="I;16").save(path)
    save_sidecar(image, path.with_suffix(path.suffix + ".json"))
    return path


def load_png(path, pixel_pitch_mm: float | None = None) -> RasterImage:
    path = Path(path)
    arr = np.asarray(Image.open(path), dtype=np.float64)
    if arr.max() > 1.0:
        arr = arr / _MAXVAL
    meta = load_sidecar(path.with_suffix(path.suffix + ".json"))
    pitch = pixel_pitch_mm or meta.get("pixel_pitch_mm")
    if pitch is None:
        raise ValueError(f"no pixel pitch for {path}; pass pixel_pitch_mm or provide a sidecar")
    return RasterImage(samples=arr, pixel_pitch_mm=float(pitch), metadata=meta)


def save_pgm(image: RasterImage, path) -> Path:
    """Plain-text (P2) PGM with 16-bit depth."""
    path = Path(path)
    arr = _quantize(image.samples)
    lines = [f"P2", f"{image.width} {image.height}", f"{_MAXVAL}"]
    lines.extend(" ".join(str(v) for v in row) for row in arr)
    path.write_text("\n".join(lines) + "\n")
    save_sidecar(image, path.with_suffix(path.suffix + ".json"))
    return path


def load_pgm(path, pixel_pitch_mm: float | None = None) -> RasterImage:
    path = Path(path)
    tokens = []
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    if not tokens or tokens[0] != "P2":
        raise ValueError(f"{path} is not a plain-text (P2) PGM file")
    width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    data = np.array(tokens[4 : 4 + width * height], dtype=np.float64)
    if data.size != width * height:
        raise ValueError(f"{path}: expected {width * height} samples, found {data.size}")
    arr = data.reshape(height, width) / maxval
    meta = load_sidecar(path.with_suffix(path.suffix + ".json"))
    pitch = pixel_pitch_mm or meta.get("pixel_pitch_mm")
    if pitch is None:
        raise ValueError(f"no pixel pitch for {path}; pass pixel_pitch_mm or provide a sidecar")
    return RasterImage(samples=arr, pixel_pitch_mm=float(pitch), metadata=meta)


def save_sidecar(image: RasterImage, path) -> Path:
    path = Path(path)
    meta = dict(image.metadata)
    meta["pixel_pitch_mm"] = image.pixel_pitch_mm
    meta["width"] = image.width
    meta["height"] = image.height
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def load_sidecar(path) -> dict:
    path = Path(path)
    if not path.exists():
        return {}
    return json.loads(path.read_text())


def load_image(path, pixel_pitch_mm: float | None = None) -> RasterImage:
    """Load a PNG or PGM raster by extension."""
    path = Path(path)
    if path.suffix.lower() == ".png":
        return load_png(path, pixel_pitch_mm)
    if path.suffix.lower() == ".pgm":
        return load_pgm(path, pixel_pitch_mm)
    raise ValueError(f"unsupported image format: {path.suffix}")

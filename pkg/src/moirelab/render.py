"""Rasterization of a two-layer scene into a grayscale intensity image.

The in-silico analogue of photographing the barrier laid on a uniformly
white screen: transmission of the stacked layers is multiplicative, and each
raster sample averages a stratified grid of jittered sub-samples so that the
recorded moire comes from the layer product rather than from sampling
artifacts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .gratings import GratingKind, GratingSpec, SceneConfig, transmittance

__all__ = ["RasterImage", "Rasterizer", "render", "calibration_frames", "normalize_image"]

_MIN_SAMPLES_PER_PERIOD = 4.0


@dataclass
class RasterImage:
    """Row-major grayscale raster with physical pixel pitch in mm/sample."""

    samples: np.ndarray
    pixel_pitch_mm: float
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 2:
            raise ValueError("samples must be a 2D array")
        if self.pixel_pitch_mm <= 0:
            raise ValueError("pixel pitch must be positive")

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def extent_mm(self) -> tuple[float, float]:
        return (self.width * self.pixel_pitch_mm, self.height * self.pixel_pitch_mm)


def _check_resolution(scene: SceneConfig) -> None:
    for name, spec in (("pixel grid", scene.grid), ("barrier", scene.barrier)):
        samples_per_period = scene.resolution * spec.pitch
        if samples_per_period < _MIN_SAMPLES_PER_PERIOD:
            raise ValueError(
                f"{name} under-resolved: {samples_per_period:.2f} raster samples per "
                f"{spec.pitch} mm period (need >= {_MIN_SAMPLES_PER_PERIOD:g})"
            )


class Rasterizer:
    """Renders one scene geometry at arbitrary barrier angles.

    The jittered sub-sample positions and the static grid mask are computed
    once per scene (seeded, deterministic), so sweeping the barrier angle
    only re-evaluates the barrier layer.
    """

    def __init__(self, scene: SceneConfig):
        _check_resolution(scene)
        self.scene = scene
        n = scene.n_samples
        s = int(scene.supersample)
        ns = n * s
        sub_pitch = scene.extent_mm / ns
        rng = np.random.default_rng(scene.seed)
        # stratified jitter: one uniform offset per sub-sample and axis
        jx = rng.random((ns, ns), dtype=np.float64)
        jy = rng.random((ns, ns), dtype=np.float64)
        idx = np.arange(ns, dtype=np.float64)
        half = scene.extent_mm / 2.0
        self._x = ((idx[None, :] + jx) * sub_pitch - half).astype(np.float32)
        self._y = ((idx[:, None] + jy) * sub_pitch - half).astype(np.float32)
        del jx, jy
        self._grid_open = transmittance(scene.grid, self._x, self._y, 0.0).astype(bool)
        self._n = n
        self._s = s

    def render(self, alpha_deg: float) -> RasterImage:
        scene = self.scene
        theta = math.radians(alpha_deg % 360.0)
        c, s = math.cos(theta), math.sin(theta)
        u = self._x * np.float32(c)
        u += self._y * np.float32(s)
        barrier = scene.barrier
        w = u / np.float32(barrier.pitch)
        del u
        w -= np.float32(barrier.phase[0])
        frac = np.mod(w, np.float32(1.0))
        del w
        signed = np.where(frac > 0.5, frac - np.float32(1.0), frac)
        del frac
        half_open = np.float32(barrier.opening_ratio / 2.0)
        open_mask = (signed > -half_open) & (signed <= half_open)
        del signed
        product = open_mask & self._grid_open
        del open_mask
        n, sp = self._n, self._s
        samples = product.reshape(n, sp, n, sp).mean(axis=(1, 3), dtype=np.float64)
        meta = {
            "scene": replace(scene, alpha_deg=float(alpha_deg)).to_dict(),
            "alpha_deg": float(alpha_deg),
            "seed": scene.seed,
            "supersample": scene.supersample,
        }
        return RasterImage(samples=samples, pixel_pitch_mm=scene.extent_mm / n, metadata=meta)


def render(scene: SceneConfig) -> RasterImage:
    """Rasterize the scene at its configured barrier angle.

    Rejects under-resolved scenes (fewer than 4 raster samples per period of
    the finest grating), naming the violating layer.  Deterministic for a
    given seed.
    """
    return Rasterizer(scene).render(scene.alpha_deg)


def calibration_frames(scene: SceneConfig) -> tuple[RasterImage, RasterImage]:
    """All-open (white) and fully opaque (black) frames for amplitude calibration."""
    white_scene = replace(
        scene,
        grid=replace(scene.grid, opening_ratio=1.0),
        barrier=replace(scene.barrier, opening_ratio=1.0),
    )
    white = render(white_scene)
    black = RasterImage(
        samples=np.zeros_like(white.samples),
        pixel_pitch_mm=white.pixel_pitch_mm,
        metadata={**white.metadata, "calibration": "black"},
    )
    white.metadata["calibration"] = "white"
    return white, black


def normalize_image(image: RasterImage, white: RasterImage, black: RasterImage) -> RasterImage:
    """Normalize intensities so that black maps to 0 and white to 1."""
    span = white.samples - black.samples
    if np.any(span <= 0):
        raise ValueError("white frame must exceed black frame everywhere")
    samples = (image.samples - black.samples) / span
    return RasterImage(samples=samples, pixel_pitch_mm=image.pixel_pitch_mm, metadata=dict(image.metadata))

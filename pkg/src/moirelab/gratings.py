"""Periodic binary layers: transmission functions and their Fourier series.

Both layers of a barrier-type display are modeled as ideal binary gratings:
a 2D square pixel grid and a 1D linear barrier.  The transmission function
feeds the renderer; the closed-form Fourier coefficients serve as the
amplitude oracle for everything downstream.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

__all__ = [
    "GratingKind",
    "GratingSpec",
    "SceneConfig",
    "transmittance",
    "fourier_coefficient",
]


class GratingKind(enum.Enum):
    PIXEL_GRID_2D = "pixel_grid_2d"
    LINEAR_BARRIER_1D = "linear_barrier_1d"


def _as_phase_pair(phase) -> tuple[float, float]:
    if isinstance(phase, (int, float)):
        phase = (float(phase), float(phase))
    px, py = (float(phase[0]), float(phase[1]))
    for p in (px, py):
        if not 0.0 <= p < 1.0:
            raise ValueError(f"phase must lie in [0, 1), got {p}")
    return (px, py)


@dataclass(frozen=True)
class GratingSpec:
    """One periodic binary layer.

    ``pitch`` is the fundamental period in mm and ``opening_ratio`` the
    transparent fraction of one period (per axis for the 2D grid).  ``phase``
    shifts the openings by a fraction of a period along each grating axis;
    phase 0 centers an opening on the origin, which keeps the Fourier
    coefficients real and non-negative.
    """

    kind: GratingKind
    pitch: float
    opening_ratio: float = 1.0
    phase: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.pitch <= 0:
            raise ValueError(f"pitch must be positive, got {self.pitch}")
        if not 0.0 < self.opening_ratio <= 1.0:
            raise ValueError(f"opening_ratio must lie in (0, 1], got {self.opening_ratio}")
        object.__setattr__(self, "phase", _as_phase_pair(self.phase))

    @property
    def wavenumber(self) -> float:
        """Fundamental wavenumber 1/pitch in cycles/mm."""
        return 1.0 / self.pitch

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "pitch": self.pitch,
            "opening_ratio": self.opening_ratio,
            "phase": list(self.phase),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GratingSpec":
        return cls(
            kind=GratingKind(data["kind"]),
            pitch=float(data["pitch"]),
            opening_ratio=float(data.get("opening_ratio", 1.0)),
            phase=tuple(data.get("phase", (0.0, 0.0))),
        )


@dataclass(frozen=True)
class SceneConfig:
    """Two stacked layers plus the raster geometry used to image them.

    ``alpha_deg`` rotates the barrier about the common normal; the grid stays
    axis-aligned.  ``resolution`` is in raster samples per mm; ``supersample``
    is the per-axis count of stratified jittered sub-samples per raster sample.
    """

    grid: GratingSpec
    barrier: GratingSpec
    alpha_deg: float = 0.0
    extent_mm: float = 85.0
    resolution: float = 512.0 / 85.0
    supersample: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.grid.kind is not GratingKind.PIXEL_GRID_2D:
            raise ValueError("scene grid must be a 2D pixel grid")
        if self.barrier.kind is not GratingKind.LINEAR_BARRIER_1D:
            raise ValueError("scene barrier must be a 1D linear grating")
        if self.extent_mm <= 0 or self.resolution <= 0:
            raise ValueError("extent and resolution must be positive")
        if int(self.supersample) < 1:
            raise ValueError("supersample must be an integer >= 1")

    @property
    def n_samples(self) -> int:
        return int(round(self.extent_mm * self.resolution))

    @property
    def rho(self) -> float:
        """Period ratio of the fundamental pair, barrier pitch over grid pitch."""
        return self.barrier.pitch / self.grid.pitch

    def rho_component(self, m: int, n: int, barrier_order: int = 1) -> float:
        """Period ratio sqrt(m^2+n^2) k0 / (p k1) for grid component (m, n)."""
        return math.hypot(m, n) * self.grid.wavenumber / (barrier_order * self.barrier.wavenumber)

    def to_dict(self) -> dict[str, Any]:
        return {
            "grid": self.grid.to_dict(),
            "barrier": self.barrier.to_dict(),
            "alpha_deg": self.alpha_deg,
            "extent_mm": self.extent_mm,
            "resolution": self.resolution,
            "supersample": self.supersample,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SceneConfig":
        return cls(
            grid=GratingSpec.from_dict(data["grid"]),
            barrier=GratingSpec.from_dict(data["barrier"]),
            alpha_deg=float(data.get("alpha_deg", 0.0)),
            extent_mm=float(data.get("extent_mm", 85.0)),
            resolution=float(data.get("resolution", 512.0 / 85.0)),
            supersample=int(data.get("supersample", 4)),
            seed=int(data.get("seed", 0)),
        )


def _open_mask(coord, pitch: float, opening_ratio: float, phase: float):
    """Binary opening test along one grating axis.

    An opening of width ``opening_ratio`` periods is centered on the origin
    (shifted by ``phase``); the half-open boundary convention keeps exactly
    one of the two edges inside the opening.
    """
    w = np.asarray(coord, dtype=np.float64) / pitch - phase
    frac = np.mod(w, 1.0)
    signed = np.where(frac > 0.5, frac - 1.0, frac)
    half = opening_ratio / 2.0
    return (signed > -half) & (signed <= half)


def transmittance(spec: GratingSpec, x, y, rotation_deg: float = 0.0):
    """Binary transmission of one layer at position (x, y) in mm.

    ``rotation_deg`` rotates the grating axes about the origin.  Accepts
    scalars or numpy arrays; returns float 0/1 values of matching shape.
    """
    theta = math.radians(rotation_deg % 360.0)
    c, s = math.cos(theta), math.sin(theta)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    u = x * c + y * s
    if spec.kind is GratingKind.LINEAR_BARRIER_1D:
        mask = _open_mask(u, spec.pitch, spec.opening_ratio, spec.phase[0])
    else:
        v = -x * s + y * c
        mask = _open_mask(u, spec.pitch, spec.opening_ratio, spec.phase[0]) & _open_mask(
            v, spec.pitch, spec.opening_ratio, spec.phase[1]
        )
    out = mask.astype(np.float64)
    return float(out) if out.ndim == 0 else out


def _coefficient_1d(order: int, opening_ratio: float) -> float:
    if order == 0:
        return opening_ratio
    p = abs(order)
    return abs(math.sin(math.pi * p * opening_ratio)) / (math.pi * p)


def fourier_coefficient(spec: GratingSpec, order_x: int, order_y: int = 0) -> float:
    """Magnitude of the Fourier-series coefficient of the transmission function.

    For a 1D binary grating with opening ratio r the coefficients are
    |sin(pi p r)| / (pi p) with c0 = r; 2D grid coefficients are products of
    two 1D factors.  The DC term (0, 0) is r for 1D and r^2 for 2D.
    """
    if spec.kind is GratingKind.LINEAR_BARRIER_1D:
        if order_y != 0:
            raise ValueError("a 1D grating has a one-dimensional spectrum; order_y must be 0")
        return _coefficient_1d(order_x, spec.opening_ratio)
    return _coefficient_1d(order_x, spec.opening_ratio) * _coefficient_1d(order_y, spec.opening_ratio)

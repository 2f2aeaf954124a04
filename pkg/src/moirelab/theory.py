"""Spectral-trajectory theory of moire between a square grid and a rotated linear layer.

When the linear layer rotates by alpha, each of its spectral components
traces a circle around every spectral component (m, n) of the static grid.
The component closest to the origin of the spectral plane is the visible
moire wave; its wavenumber, orientation and magnification all follow from
the circle geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .angles import wrap_orientation
from .gratings import SceneConfig, fourier_coefficient

__all__ = [
    "TrajectoryPoint",
    "PredictedPeak",
    "component_ratio",
    "trajectory_point",
    "moire_wavenumber",
    "max_angle",
    "orientation",
    "magnification",
    "max_magnification",
    "enumerate_moire_angles",
    "predict_spectrum",
]

_SINGULAR_EPS = 1e-12


@dataclass(frozen=True)
class TrajectoryPoint:
    """One point of a spectral trajectory in the complex wavevector plane.

    ``z`` is the moire wavevector in cycles/mm (real part horizontal,
    imaginary part vertical), ``center`` the grid component the circle is
    drawn around, ``radius`` the wavenumber of the rotating layer.
    """

    z: complex
    alpha_deg: float
    center: complex
    radius: float


@dataclass(frozen=True)
class PredictedPeak:
    """A theoretical moire component produced by grid order (m, n) and one barrier harmonic."""

    m: int
    n: int
    barrier_order: int
    wavenumber: float
    orientation_deg: Optional[float]
    magnification: float
    raw_amplitude: float
    weighted_amplitude: Optional[float] = None

    @property
    def period(self) -> float:
        return math.inf if self.wavenumber == 0 else 1.0 / self.wavenumber


def component_ratio(m: int, n: int, k0: float, k1: float) -> float:
    """Period ratio rho = sqrt(m^2 + n^2) k0 / k1 of a grid component to the rotating layer."""
    return math.hypot(m, n) * k0 / k1


def trajectory_point(m: int, n: int, k0: float, k1: float, alpha_deg: float) -> TrajectoryPoint:
    """Moire wavevector z = (m + jn) k0 - k1 e^{j alpha} for one component pair."""
    center = complex(m, n) * k0
    a = math.radians(alpha_deg)
    z = center - k1 * complex(math.cos(a), math.sin(a))
    return TrajectoryPoint(z=z, alpha_deg=alpha_deg, center=center, radius=k1)


def moire_wavenumber(rho: float, k1: float, alpha_deg: float, alpha_max_deg: float) -> float:
    """Moire wavenumber k1 sqrt(1 + rho^2 - 2 rho cos(alpha - alpha_max)) in cycles/mm."""
    d = math.radians(alpha_deg - alpha_max_deg)
    return k1 * math.sqrt(max(0.0, 1.0 + rho * rho - 2.0 * rho * math.cos(d)))


def max_angle(m: int, n: int) -> float:
    """Rotation angle (degrees) minimizing the moire wavenumber of component (m, n).

    Equals arctan(n/m), with m = 0 mapping to 90 deg; for negative m the
    angular position of the component itself is returned so that the
    wavenumber identity with the trajectory holds for every integer pair.
    """
    if m == 0 and n == 0:
        raise ValueError("component (0, 0) has no maximum angle")
    return math.degrees(math.atan2(n, m))


def orientation(m: int, n: int, k0: float, k1: float, alpha_deg: float) -> Optional[float]:
    """Orientation of the moire wavevector in degrees, wrapped into (-90, +90].

    Returns None at the singular point (rho = 1 at the maximum angle) where
    the wavevector vanishes and the orientation is undefined.
    """
    a = math.radians(alpha_deg)
    vx = m * k0 - k1 * math.cos(a)
    vy = n * k0 - k1 * math.sin(a)
    scale = max(abs(m) * k0, abs(n) * k0, k1, 1.0)
    if math.hypot(vx, vy) < _SINGULAR_EPS * scale:
        return None
    return wrap_orientation(math.degrees(math.atan2(vy, vx)))


def magnification(rho: float, alpha_deg: float, alpha_max_deg: float) -> float:
    """Moire magnification 1 / sqrt(1 + rho^2 - 2 rho cos(alpha - alpha_max)).

    The singular point rho = 1 at alpha = alpha_max yields an infinite period,
    reported as math.inf.
    """
    d = math.radians(alpha_deg - alpha_max_deg)
    val = 1.0 + rho * rho - 2.0 * rho * math.cos(d)
    if val <= _SINGULAR_EPS:
        return math.inf
    return 1.0 / math.sqrt(val)


def max_magnification(rho: float) -> float:
    """Largest magnification 1 / |rho - 1|, attained at the maximum angle."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    if abs(rho - 1.0) < _SINGULAR_EPS:
        return math.inf
    return 1.0 / abs(rho - 1.0)


def enumerate_moire_angles(max_order: int) -> list[float]:
    """Sorted unique rational angles arctan(n/m) for 0 <= m, n <= max_order.

    Fractions are deduplicated in reduced form; 90 deg (the vertical
    component family) is always included.
    """
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    reduced = set()
    for m in range(0, max_order + 1):
        for n in range(0, max_order + 1):
            if m == 0 and n == 0:
                continue
            g = math.gcd(m, n)
            reduced.add((m // g, n // g))
    return sorted(math.degrees(math.atan2(n, m)) for m, n in reduced)


def predict_spectrum(
    scene: SceneConfig,
    visibility_radius_fraction: float = 0.8,
    max_grid_order: int = 3,
    max_barrier_order: int = 3,
) -> list[PredictedPeak]:
    """All moire components falling inside the visibility circle at the scene's angle.

    Grid components run over |m|, |n| <= max_grid_order and barrier harmonics
    over 1..max_barrier_order; a combination is kept when its wavenumber is
    below ``visibility_radius_fraction`` times the smaller fundamental.  Raw
    amplitudes are products of the two layers' Fourier coefficient magnitudes;
    peaks sort by descending amplitude, longer period breaking ties.
    """
    if not 0.0 < visibility_radius_fraction <= 1.0:
        raise ValueError("visibility_radius_fraction must lie in (0, 1]")
    k0 = scene.grid.wavenumber
    k1 = scene.barrier.wavenumber
    cutoff = visibility_radius_fraction * min(k0, k1)
    a = math.radians(scene.alpha_deg % 360.0)
    peaks: list[PredictedPeak] = []
    for p in range(1, max_barrier_order + 1):
        k1_eff = p * k1
        bx = k1_eff * math.cos(a)
        by = k1_eff * math.sin(a)
        barrier_amp = fourier_coefficient(scene.barrier, p)
        if barrier_amp < 1e-14:
            continue
        for m in range(-max_grid_order, max_grid_order + 1):
            for n in range(-max_grid_order, max_grid_order + 1):
                if m == 0 and n == 0:
                    continue
                zx = m * k0 - bx
                zy = n * k0 - by
                k = math.hypot(zx, zy)
                if k >= cutoff:
                    continue
                raw = fourier_coefficient(scene.grid, m, n) * barrier_amp
                if raw < 1e-14:
                    continue
                if k < _SINGULAR_EPS * k1_eff:
                    phi = None
                    mu = math.inf
                    k = 0.0
                else:
                    phi = wrap_orientation(math.degrees(math.atan2(zy, zx)))
                    mu = k1_eff / k
                peaks.append(
                    PredictedPeak(
                        m=m,
                        n=n,
                        barrier_order=p,
                        wavenumber=k,
                        orientation_deg=phi,
                        magnification=mu,
                        raw_amplitude=raw,
                    )
                )
    peaks.sort(key=lambda pk: (-pk.raw_amplitude, pk.wavenumber))
    return peaks

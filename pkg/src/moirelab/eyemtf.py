"""Radial modulation transfer function of the human eye and amplitude weighting.

The observer model attenuates a predicted moire component according to its
perceived angular frequency: the further a spectral component sits from the
origin, the weaker it appears.  The exact pupil-dependent MTF is the
reference; a cubic shortcut is provided for the standard 4 mm / 555 nm case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .theory import PredictedPeak

__all__ = [
    "MTFParams",
    "ViewingGeometry",
    "mtf_exact",
    "mtf_poly",
    "perceived_frequency",
    "weight_amplitude",
    "weight_spectrum",
]

_DEG_PER_RAD = 180.0 / math.pi


@dataclass(frozen=True)
class MTFParams:
    """Pupil diameter (mm) and wavelength (nm) defining the eye's radial MTF."""

    pupil_diameter_mm: float = 4.0
    wavelength_nm: float = 555.0

    def __post_init__(self):
        if not 2.0 <= self.pupil_diameter_mm <= 6.0:
            raise ValueError("pupil diameter must lie in [2, 6] mm")
        if self.wavelength_nm <= 0:
            raise ValueError("wavelength must be positive")

    @property
    def u0_cpd(self) -> float:
        """Diffraction cutoff d/lambda, converted to cycles/degree."""
        return (self.pupil_diameter_mm * 1e6 / self.wavelength_nm) / _DEG_PER_RAD

    @property
    def u1_cpd(self) -> float:
        """Aberration roll-off frequency in cycles/degree."""
        d = self.pupil_diameter_mm
        return 21.95 - 5.512 * d + 0.3922 * d * d


@dataclass(frozen=True)
class ViewingGeometry:
    """Observation distance and the fringe period on the surface at unit magnification."""

    distance_mm: float
    surface_period_mm: float

    def __post_init__(self):
        if self.distance_mm <= 0 or self.surface_period_mm <= 0:
            raise ValueError("distance and surface period must be positive")


def mtf_exact(u_cpd: float, params: MTFParams = MTFParams()) -> float:
    """Exact radial eye MTF at spatial frequency ``u_cpd`` (cycles/degree).

    Zero beyond the diffraction cutoff u0; clamped into [0, 1].
    """
    if u_cpd < 0:
        raise ValueError("spatial frequency must be non-negative")
    u0 = params.u0_cpd
    if u_cpd >= u0:
        return 0.0
    s = u_cpd / u0
    num = math.sqrt(2.0 / math.pi) * math.sqrt(math.acos(s) - s * math.sqrt(1.0 - s * s))
    den = (1.0 + (u_cpd / params.u1_cpd) ** 2) ** 0.62
    return min(1.0, max(0.0, num / den))


def mtf_poly(u_cpd):
    """Cubic shortcut for the 4 mm / 555 nm MTF, clamped below at zero.

    Nominal fit range is [0, 60] cycles/degree; outside it use mtf_exact.
    Accepts scalars or numpy arrays.
    """
    u = np.asarray(u_cpd, dtype=np.float64)
    val = np.maximum(0.0, -2e-6 * u**3 + 4e-4 * u**2 - 3e-2 * u + 1.0)
    return float(val) if val.ndim == 0 else val


def perceived_frequency(geom: ViewingGeometry, mu: float) -> float:
    """Angular frequency of a fringe of period surface_period * mu seen from distance L.

    Small-angle convention: L / (period) cycles per radian, divided by
    180/pi to give cycles/degree.  An infinite-period fringe maps to 0.
    """
    if mu <= 0:
        raise ValueError("magnification must be positive")
    if math.isinf(mu):
        return 0.0
    return geom.distance_mm / (geom.surface_period_mm * mu) / _DEG_PER_RAD


def perceived_frequency_of_wavenumber(k_cpmm: float, distance_mm: float) -> float:
    """Angular frequency (cycles/degree) of a surface wave of wavenumber k seen from L."""
    return distance_mm * k_cpmm / _DEG_PER_RAD


def weight_amplitude(
    peak: PredictedPeak, geom: ViewingGeometry, params: MTFParams = MTFParams()
) -> PredictedPeak:
    """Return the peak with weighted_amplitude = raw_amplitude x eye MTF.

    The peak's on-screen period 1/k equals surface_period x magnification,
    so only the viewing distance of ``geom`` enters; a vanishing wavenumber
    (infinite period) gets the full weight 1.
    """
    if peak.wavenumber <= 0 or math.isinf(peak.magnification):
        u = 0.0
    else:
        fringe = ViewingGeometry(
            distance_mm=geom.distance_mm,
            surface_period_mm=1.0 / (peak.wavenumber * peak.magnification),
        )
        u = perceived_frequency(fringe, peak.magnification)
    return replace(peak, weighted_amplitude=peak.raw_amplitude * mtf_exact(u, params))


def weight_spectrum(
    peaks: Iterable[PredictedPeak], geom: ViewingGeometry, params: MTFParams = MTFParams()
) -> list[PredictedPeak]:
    """Weight every predicted peak by the eye MTF at the viewing geometry."""
    return [weight_amplitude(p, geom, params) for p in peaks]

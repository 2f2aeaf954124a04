"""Measurement of plane waves in a raster: windowed 2D FFT peak extraction.

Geometry (wavenumber and orientation) is read from a Hann-windowed spectrum
with sub-bin refinement; amplitude is re-measured at the refined frequency
on a flat-top-windowed spectrum whose near-flat passband makes the reading
insensitive to the residual frequency error.  Harmonics of non-sinusoidal
fringes share the fundamental's orientation at integer wavenumber multiples
and are suppressed so that only the longest period of each wave remains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage
from scipy.signal import windows as _windows

from .angles import orientation_difference, wrap_orientation, wrapped_orientation
from .gratings import SceneConfig
from .render import RasterImage

__all__ = [
    "WaveMeasurement",
    "AnalyzerConfig",
    "analyze",
    "suppress_harmonics",
    "wrapped_orientation",
    "measurements_to_csv",
]

_GEOMETRY_WINDOWS = ("hann",)
_AMPLITUDE_WINDOWS = ("flattop",)
_MIN_IMAGE_SIDE = 64


@dataclass(frozen=True)
class WaveMeasurement:
    """One detected plane wave: the (k, phi, A) triple plus detection quality.

    ``amplitude`` is the cosine amplitude in calibrated intensity units
    (physical fringe contrast); ``snr`` is the spectral peak magnitude over
    the local spectral floor.  ``perceived_amplitude`` is filled by sweep
    tooling when a viewing geometry is configured.
    """

    wavenumber: float
    orientation_deg: float
    amplitude: float
    snr: float
    perceived_amplitude: Optional[float] = None

    def __post_init__(self):
        if self.wavenumber <= 0:
            raise ValueError("wavenumber must be positive")
        if self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")

    @property
    def period(self) -> float:
        return 1.0 / self.wavenumber


@dataclass(frozen=True)
class AnalyzerConfig:
    """Tunable thresholds of the peak-extraction pipeline.

    The automatic thresholds stand in for the judgment calls of a manual
    classification, so all of them are surfaced here rather than fixed.
    ``amplitude_floor`` is a fraction of the strongest non-DC peak;
    ``max_frequency`` defaults to the visibility cutoff 0.8 x min fundamental
    when the image carries scene metadata (half Nyquist otherwise).
    """

    window_for_geometry: str = "hann"
    window_for_amplitude: str = "flattop"
    amplitude_floor: float = 0.05
    max_frequency: Optional[float] = None
    max_peaks: int = 6
    min_snr: float = 6.0
    dc_guard_bins: float = 2.0
    harmonic_angle_tol_deg: float = 1.0
    harmonic_ratio_tol: float = 0.05

    def __post_init__(self):
        if self.window_for_geometry not in _GEOMETRY_WINDOWS:
            raise ValueError(f"geometry window must be one of {_GEOMETRY_WINDOWS}")
        if self.window_for_amplitude not in _AMPLITUDE_WINDOWS:
            raise ValueError(f"amplitude window must be one of {_AMPLITUDE_WINDOWS}")
        if not 0.0 < self.amplitude_floor < 1.0:
            raise ValueError("amplitude_floor must lie in (0, 1)")
        if self.max_peaks < 1:
            raise ValueError("max_peaks must be >= 1")


@dataclass
class AnalysisInfo:
    """Diagnostics from one analysis: spectral noise floor in amplitude units."""

    noise_floor_amplitude: float
    max_frequency: float
    n_candidates: int


@lru_cache(maxsize=32)
def _window(name: str, n: int) -> np.ndarray:
    if name == "hann":
        return _windows.hann(n, sym=False)
    if name == "flattop":
        return _windows.flattop(n, sym=False)
    raise ValueError(f"unknown window {name!r}")


def _windowed(samples: np.ndarray, name: str) -> tuple[np.ndarray, float]:
    h, w = samples.shape
    wy = _window(name, h)
    wx = _window(name, w)
    data = (samples - samples.mean()) * np.outer(wy, wx)
    return data, float(wy.sum() * wx.sum())


def _dtft_mag(mc: np.ndarray, x: np.ndarray, y: np.ndarray, fxs: np.ndarray, fys: np.ndarray) -> np.ndarray:
    """|DTFT| of a (windowed) image on an arbitrary small frequency grid."""
    ex = np.exp(-2j * np.pi * np.outer(x, fxs))
    ey = np.exp(-2j * np.pi * np.outer(fys, y))
    return np.abs(ey @ (mc @ ex))


def _parabolic_offset(left: float, center: float, right: float) -> float:
    den = left - 2.0 * center + right
    if den >= -1e-300:
        return 0.0
    return max(-1.0, min(1.0, 0.5 * (left - right) / den))


def _refine_peak(
    mc: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    fx0: float,
    fy0: float,
    dfx: float,
    dfy: float,
) -> tuple[float, float, float]:
    """Polish a spectral peak location to sub-bin precision.

    Runs a shrinking 3x3 local DTFT grid search with a log-parabolic vertex
    estimate at each level; returns (fx, fy, peak magnitude).
    """
    fx, fy = fx0, fy0
    mag = 0.0
    for step in (0.5, 0.125, 0.03125):
        sx, sy = dfx * step, dfy * step
        for _ in range(6):
            fxs = np.array([fx - sx, fx, fx + sx])
            fys = np.array([fy - sy, fy, fy + sy])
            g = _dtft_mag(mc, x, y, fxs, fys)
            iy, ix = np.unravel_index(np.argmax(g), g.shape)
            if ix == 1 and iy == 1:
                break
            fx, fy = fxs[ix], fys[iy]
        logg = np.log(np.maximum(g, 1e-300))
        fx = fx + sx * _parabolic_offset(logg[1, 0], logg[1, 1], logg[1, 2])
        fy = fy + sy * _parabolic_offset(logg[0, 1], logg[1, 1], logg[2, 1])
        mag = float(g[1, 1])
    return fx, fy, mag


def _default_max_frequency(image: RasterImage) -> float:
    scene = image.metadata.get("scene")
    if scene:
        try:
            cfg = SceneConfig.from_dict(scene)
            return 0.8 * min(cfg.grid.wavenumber, cfg.barrier.wavenumber)
        except (KeyError, ValueError, TypeError):
            pass
    return 0.25 / image.pixel_pitch_mm  # half of Nyquist


def _analyze(image: RasterImage, config: AnalyzerConfig) -> tuple[list[WaveMeasurement], AnalysisInfo]:
    samples = image.samples
    h, w = samples.shape
    if h < _MIN_IMAGE_SIDE or w < _MIN_IMAGE_SIDE:
        raise ValueError(f"image too small for spectral analysis: {w}x{h} (need >= {_MIN_IMAGE_SIDE})")
    pitch = image.pixel_pitch_mm
    kmax = config.max_frequency if config.max_frequency is not None else _default_max_frequency(image)

    hann_img, hann_sum = _windowed(samples, config.window_for_geometry)
    spec = np.fft.rfft2(hann_img)
    mag = np.abs(spec)

    fy = np.fft.fftfreq(h, d=pitch)
    fx = np.fft.rfftfreq(w, d=pitch)
    dfy, dfx = 1.0 / (h * pitch), 1.0 / (w * pitch)
    fyg, fxg = np.meshgrid(fy, fx, indexing="ij")

    bin_radius = np.hypot(fxg / dfx, fyg / dfy)
    half_plane = (fxg > 0.5 * dfx) | ((np.abs(fxg) <= 0.5 * dfx) & (fyg > 0))
    searchable = (
        half_plane
        & (bin_radius > config.dc_guard_bins)
        & (np.hypot(fxg, fyg) < kmax)
        & (np.abs(fyg) < fy.max())  # exclude the ambiguous Nyquist row
    )

    floor_scale = float(mag[searchable].max()) if searchable.any() else 0.0
    info_floor = 0.0
    if searchable.any():
        info_floor = float(np.median(mag[searchable])) * 2.0 / hann_sum
    if floor_scale < 1e-12 * hann_sum:
        return [], AnalysisInfo(noise_floor_amplitude=info_floor, max_frequency=kmax, n_candidates=0)

    local_max = mag >= ndimage.maximum_filter(mag, size=3, mode="wrap")
    candidates = searchable & local_max & (mag >= config.amplitude_floor * floor_scale)
    cand_idx = np.argwhere(candidates)
    order = np.argsort(mag[candidates])[::-1]
    cand_idx = cand_idx[order][: config.max_peaks * 4]

    mc = hann_img.astype(np.complex128)
    ft_img, ft_sum = _windowed(samples, config.window_for_amplitude)
    mc_ft = ft_img.astype(np.complex128)
    x = np.arange(w) * pitch
    y = np.arange(h) * pitch

    raw = []
    for iy, ix in cand_idx:
        fx_r, fy_r, peak_mag = _refine_peak(mc, x, y, fx[ix], fy[iy], dfx, dfy)
        if fx_r < 0 or (abs(fx_r) < 0.25 * dfx and fy_r < 0):
            fx_r, fy_r = -fx_r, -fy_r
        k = math.hypot(fx_r, fy_r)
        if k >= kmax or k <= config.dc_guard_bins * min(dfx, dfy):
            continue
        # local spectral floor: ring of bins around the peak, core excluded
        cy, cx = int(iy), int(ix)
        ys = slice(max(0, cy - 8), min(h, cy + 9))
        xs = slice(max(0, cx - 8), min(len(fx), cx + 9))
        patch = mag[ys, xs].copy()
        py0, px0 = cy - max(0, cy - 8), cx - max(0, cx - 8)
        patch[max(0, py0 - 3) : py0 + 4, max(0, px0 - 3) : px0 + 4] = np.nan
        ring = patch[np.isfinite(patch)]
        floor = float(np.median(ring)) if ring.size else 0.0
        snr = peak_mag / floor if floor > 0 else math.inf
        if snr < config.min_snr:
            continue
        amp = 2.0 * float(_dtft_mag(mc_ft, x, y, np.array([fx_r]), np.array([fy_r]))[0, 0]) / ft_sum
        phi = wrap_orientation(math.degrees(math.atan2(fy_r, fx_r)))
        raw.append(WaveMeasurement(wavenumber=k, orientation_deg=phi, amplitude=amp, snr=snr))

    # collapse duplicate refinements of the same underlying wave
    deduped: list[WaveMeasurement] = []
    for m in sorted(raw, key=lambda m: -m.amplitude):
        if any(
            abs(m.wavenumber - o.wavenumber) < 0.5 * min(dfx, dfy)
            and orientation_difference(m.orientation_deg, o.orientation_deg) < 2.0
            for o in deduped
        ):
            continue
        deduped.append(m)

    kept = suppress_harmonics(deduped, config.harmonic_angle_tol_deg, config.harmonic_ratio_tol)

    if kept:
        top = max(m.amplitude for m in kept)
        strong = sorted(
            (m for m in kept if m.amplitude >= 10.0 * config.amplitude_floor * top),
            key=lambda m: -m.period,
        )
        weak = sorted(
            (m for m in kept if m.amplitude < 10.0 * config.amplitude_floor * top),
            key=lambda m: -m.amplitude,
        )
        kept = (strong + weak)[: config.max_peaks]

    return kept, AnalysisInfo(
        noise_floor_amplitude=info_floor, max_frequency=kmax, n_candidates=len(cand_idx)
    )


def analyze(image: RasterImage, config: AnalyzerConfig | None = None) -> list[WaveMeasurement]:
    """Extract plane-wave measurements (k, phi, A) from a raster image.

    Returns an empty list when nothing rises above the configured floor,
    which is a valid outcome away from the moire angles.
    """
    return _analyze(image, config or AnalyzerConfig())[0]


def suppress_harmonics(
    peaks: Sequence[WaveMeasurement],
    angle_tol_deg: float = 1.0,
    ratio_tol: float = 0.05,
) -> list[WaveMeasurement]:
    """Drop integer-multiple wavenumbers that share a fundamental's orientation.

    Waves at a different orientation are genuine co-present patterns and are
    kept; the fundamental keeps its own first-harmonic amplitude.
    """
    ordered = sorted(peaks, key=lambda m: m.wavenumber)
    kept: list[WaveMeasurement] = []
    for m in ordered:
        is_harmonic = False
        for base in kept:
            if orientation_difference(m.orientation_deg, base.orientation_deg) > angle_tol_deg:
                continue
            ratio = m.wavenumber / base.wavenumber
            nearest = round(ratio)
            if nearest >= 2 and abs(ratio / nearest - 1.0) <= ratio_tol:
                is_harmonic = True
                break
        if not is_harmonic:
            kept.append(m)
    return kept


def measurements_to_csv(
    rows: Sequence[tuple[str, float, WaveMeasurement]],
) -> str:
    """Render (image_id, alpha, measurement) triples as the canonical CSV table."""
    lines = ["image_id,alpha_deg,k_cpmm,period_mm,phi_deg,amplitude,snr"]
    for image_id, alpha, m in rows:
        lines.append(
            f"{image_id},{alpha:.9g},{m.wavenumber:.9g},{m.period:.9g},"
            f"{m.orientation_deg:.9g},{m.amplitude:.9g},{m.snr:.9g}"
        )
    return "\n".join(lines) + "\n"

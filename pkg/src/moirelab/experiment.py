"""The angle-sweep experiment: render, measure, link, and compare against theory.

Reproduces the rotating-barrier measurement campaign on synthetic rasters:
a coarse angular grid refined near the rational angles, per-angle calibrated
wave measurements, branch linking, and side-by-side comparison with the
spectral-trajectory predictions.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .analyzer import AnalyzerConfig, WaveMeasurement, _analyze
from .angles import fold_to_quadrant, orientation_difference, wrapped_orientation
from .branches import Branch, LinkGates, branch_summary, link_branches, prune_branches
from .eyemtf import MTFParams, ViewingGeometry, mtf_exact, perceived_frequency_of_wavenumber
from .gratings import SceneConfig
from .render import Rasterizer, calibration_frames, normalize_image
from .theory import PredictedPeak, enumerate_moire_angles, predict_spectrum

__all__ = [
    "SweepPlan",
    "SweepRecord",
    "SweepDataset",
    "run_sweep",
    "compare_to_theory",
    "opening_ratio_study",
    "pitch_study",
    "find_moire_free",
    "rational_label",
]

_DETECTION_FLOOR_MARGIN = 1.5


@dataclass(frozen=True)
class SweepPlan:
    """Angular sampling plan: a coarse grid with fine refinement near rational angles."""

    alpha_start: float = -10.0
    alpha_end: float = 100.0
    coarse_step: float = 1.0
    fine_step: float = 0.1
    refine_radius: float = 2.0
    rational_max_order: int = 3

    def __post_init__(self):
        if self.alpha_end <= self.alpha_start:
            raise ValueError("empty sweep range")
        if not 0 < self.fine_step < self.coarse_step:
            raise ValueError("fine_step must be positive and smaller than coarse_step")

    def rational_angles(self) -> list[float]:
        """Rational angles of bounded order inside the range, including mirrored
        and quarter-turn shifted copies."""
        base = enumerate_moire_angles(self.rational_max_order)
        out = set()
        for t in base:
            for cand in (t, -t, t + 90.0, t - 90.0, t + 180.0, t - 180.0):
                if self.alpha_start <= cand <= self.alpha_end:
                    out.add(round(cand, 9))
        return sorted(out)

    def angles(self) -> np.ndarray:
        n = int(math.floor((self.alpha_end - self.alpha_start) / self.coarse_step + 1e-9))
        grid = {round(self.alpha_start + i * self.coarse_step, 9) for i in range(n + 1)}
        m = int(round(self.refine_radius / self.fine_step))
        for rat in self.rational_angles():
            for i in range(-m, m + 1):
                a = rat + i * self.fine_step
                if self.alpha_start <= a <= self.alpha_end:
                    grid.add(round(a, 9))
        return np.array(sorted(grid))

    def to_dict(self) -> dict:
        return {
            "alpha_start": self.alpha_start,
            "alpha_end": self.alpha_end,
            "coarse_step": self.coarse_step,
            "fine_step": self.fine_step,
            "refine_radius": self.refine_radius,
            "rational_max_order": self.rational_max_order,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepPlan":
        return cls(**{k: data[k] for k in cls.__dataclass_fields__ if k in data})


@dataclass
class SweepRecord:
    """Everything measured at one rotation angle."""

    alpha_deg: float
    measurements: list[WaveMeasurement]
    noise_floor_amplitude: float
    detection_floor: float


@dataclass
class SweepDataset:
    """Output of one sweep: per-angle records plus linked and pruned branches."""

    scene: SceneConfig
    plan: SweepPlan
    records: list[SweepRecord]
    branches: list[Branch]
    analyzer: AnalyzerConfig
    gates: LinkGates
    viewing_distance_mm: Optional[float] = None
    mtf: Optional[MTFParams] = None

    @property
    def alphas(self) -> np.ndarray:
        return np.array([r.alpha_deg for r in self.records])

    def record_at(self, alpha: float) -> SweepRecord:
        for r in self.records:
            if abs(r.alpha_deg - alpha) < 1e-9:
                return r
        raise KeyError(f"no record at alpha={alpha}")


def rational_label(alpha_deg: float, max_order: int = 3, tol_deg: float = 1.0) -> Optional[str]:
    """Tag an angle with the reduced fraction of its rational family, if any.

    Mirrored and quarter-turn shifted angles share a tag, so -18.4, +18.4 and
    108.4 all map to "1/3"; 90 maps to "inf".
    """
    t = fold_to_quadrant(alpha_deg)
    best = None
    for m in range(0, max_order + 1):
        for n in range(0, max_order + 1):
            if m == 0 and n == 0:
                continue
            g = math.gcd(m, n)
            mm, nn = m // g, n // g
            ang = math.degrees(math.atan2(nn, mm))
            d = abs(t - ang)
            if d <= tol_deg and (best is None or d < best[0]):
                if mm == 0:
                    label = "inf"
                elif nn == 0:
                    label = "0"
                elif mm == 1:
                    label = str(nn)
                else:
                    label = f"{nn}/{mm}"
                best = (d, label)
    return best[1] if best else None


def _perceive(m: WaveMeasurement, distance_mm: float, params: MTFParams) -> WaveMeasurement:
    u = perceived_frequency_of_wavenumber(m.wavenumber, distance_mm)
    return replace(m, perceived_amplitude=m.amplitude * mtf_exact(u, params))


def run_sweep(
    scene_base: SceneConfig,
    plan: SweepPlan = SweepPlan(),
    analyzer_cfg: Optional[AnalyzerConfig] = None,
    gates: LinkGates = LinkGates(),
    min_points: int = 3,
    min_rel_amplitude: float = 0.05,
    min_rel_period: float = 0.05,
    viewing_distance_mm: Optional[float] = 600.0,
    mtf_params: MTFParams = MTFParams(),
) -> SweepDataset:
    """Render, calibrate and analyze the scene at every planned angle, then link branches.

    Amplitudes are normalized against all-open white and opaque black
    calibration frames; when a viewing distance is given, each measurement
    also carries the eye-weighted perceived amplitude used in reports and
    theory comparisons.
    """
    cfg = analyzer_cfg or AnalyzerConfig(
        max_frequency=0.8 * min(scene_base.grid.wavenumber, scene_base.barrier.wavenumber)
    )
    rasterizer = Rasterizer(scene_base)
    white, black = calibration_frames(scene_base)
    records: list[SweepRecord] = []
    for alpha in plan.angles():
        image = rasterizer.render(float(alpha))
        image = normalize_image(image, white, black)
        try:
            measurements, diag = _analyze(image, cfg)
        except ValueError as exc:
            raise ValueError(f"analysis failed at alpha={alpha}: {exc}") from exc
        if viewing_distance_mm is not None:
            measurements = [_perceive(m, viewing_distance_mm, mtf_params) for m in measurements]
        records.append(
            SweepRecord(
                alpha_deg=float(alpha),
                measurements=measurements,
                noise_floor_amplitude=diag.noise_floor_amplitude,
                detection_floor=_DETECTION_FLOOR_MARGIN * cfg.min_snr * diag.noise_floor_amplitude,
            )
        )
    linked = link_branches([(r.alpha_deg, r.measurements) for r in records], gates)
    pruned = prune_branches(linked, min_points, min_rel_amplitude, min_rel_period)
    for b in pruned:
        b.label = rational_label(b.angle_at_max_period, plan.rational_max_order)
    return SweepDataset(
        scene=scene_base,
        plan=plan,
        records=records,
        branches=pruned,
        analyzer=cfg,
        gates=gates,
        viewing_distance_mm=viewing_distance_mm,
        mtf=mtf_params,
    )


@dataclass
class MatchedPoint:
    alpha_deg: float
    k_measured: float
    k_predicted: float
    phi_measured: float
    phi_predicted: float
    amplitude: float
    perceived_amplitude: Optional[float]
    weighted_prediction: float


@dataclass
class BranchComparison:
    branch_id: int
    label: Optional[str]
    family: Optional[tuple[int, int, int]]
    points: list[MatchedPoint]
    zero_crossings: list[float]
    amplitude_rank_correlation: Optional[float]
    unmatched: bool

    @property
    def max_period_residual(self) -> float:
        return max(abs(p.k_measured / p.k_predicted - 1.0) for p in self.points)

    @property
    def max_orientation_residual(self) -> float:
        return max(orientation_difference(p.phi_measured, p.phi_predicted) for p in self.points)


@dataclass
class ComparisonReport:
    branches: list[BranchComparison]


def _theory_components(
    scene: SceneConfig, alpha: float, kmax_fraction: float, orders: tuple[int, int]
) -> dict[tuple[int, int, int], PredictedPeak]:
    peaks = predict_spectrum(
        replace(scene, alpha_deg=alpha),
        visibility_radius_fraction=kmax_fraction,
        max_grid_order=orders[0],
        max_barrier_order=orders[1],
    )
    return {(p.m, p.n, p.barrier_order): p for p in peaks}


def compare_to_theory(
    dataset: SweepDataset,
    max_grid_order: int = 3,
    max_barrier_order: int = 3,
    match_period_tol: float = 0.10,
    match_angle_tol: float = 5.0,
) -> ComparisonReport:
    """Match each surviving branch to its best (m, n, barrier order) family.

    Reports per-angle residuals of wavenumber and orientation, the wrapped
    orientation zero crossings, and the rank correlation between measured
    (perceived) and predicted (weighted) amplitudes.  Branches without a
    matching family are flagged, not dropped.
    """
    scene = dataset.scene
    kfrac = dataset.analyzer.max_frequency / min(scene.grid.wavenumber, scene.barrier.wavenumber)
    theory_cache: dict[float, dict] = {}

    def components_at(alpha: float):
        if alpha not in theory_cache:
            theory_cache[alpha] = _theory_components(
                scene, alpha, kfrac, (max_grid_order, max_barrier_order)
            )
        return theory_cache[alpha]

    distance = dataset.viewing_distance_mm
    params = dataset.mtf or MTFParams()
    results = []
    for branch in dataset.branches:
        # score candidate families over the branch
        scores: dict[tuple[int, int, int], list[float]] = {}
        for alpha, meas in branch.points:
            for key, peak in components_at(alpha).items():
                if peak.wavenumber <= 0 or peak.orientation_deg is None:
                    continue
                dk = abs(meas.wavenumber / peak.wavenumber - 1.0)
                dphi = orientation_difference(meas.orientation_deg, peak.orientation_deg)
                scores.setdefault(key, []).append(dk + dphi / 90.0)
        best_key, best_score = None, math.inf
        for key, vals in scores.items():
            if len(vals) < max(1, branch.n_points // 2):
                continue
            s = float(np.median(vals))
            if s < best_score:
                best_key, best_score = key, s
        matched_points: list[MatchedPoint] = []
        unmatched = best_key is None
        if best_key is not None:
            for alpha, meas in branch.points:
                peak = components_at(alpha).get(best_key)
                if peak is None or peak.wavenumber <= 0 or peak.orientation_deg is None:
                    continue
                if distance is not None:
                    u = perceived_frequency_of_wavenumber(peak.wavenumber, distance)
                    weighted = peak.raw_amplitude * mtf_exact(u, params)
                else:
                    weighted = peak.raw_amplitude
                matched_points.append(
                    MatchedPoint(
                        alpha_deg=alpha,
                        k_measured=meas.wavenumber,
                        k_predicted=peak.wavenumber,
                        phi_measured=meas.orientation_deg,
                        phi_predicted=peak.orientation_deg,
                        amplitude=meas.amplitude,
                        perceived_amplitude=meas.perceived_amplitude,
                        weighted_prediction=weighted,
                    )
                )
            if matched_points:
                med_dk = float(
                    np.median([abs(p.k_measured / p.k_predicted - 1.0) for p in matched_points])
                )
                med_dphi = float(
                    np.median(
                        [orientation_difference(p.phi_measured, p.phi_predicted) for p in matched_points]
                    )
                )
                unmatched = med_dk > match_period_tol or med_dphi > match_angle_tol
            else:
                unmatched = True

        # wrapped-orientation zero crossings along the branch
        crossings: list[float] = []
        pts = branch.points
        for (a0, m0), (a1, m1) in zip(pts, pts[1:]):
            w0 = wrapped_orientation(m0.orientation_deg, a0)
            w1 = wrapped_orientation(m1.orientation_deg, a1)
            if abs(w0) > 45.0 or abs(w1) > 45.0:  # avoid the mod-180 seam
                continue
            if w0 == 0.0:
                crossings.append(a0)
            elif w0 * w1 < 0.0:
                crossings.append(a0 + (a1 - a0) * w0 / (w0 - w1))

        rank_corr = None
        usable = [
            p for p in (matched_points if not unmatched else []) if p.perceived_amplitude is not None
        ]
        if len(usable) >= 4:
            meas_a = [p.perceived_amplitude for p in usable]
            pred_a = [p.weighted_prediction for p in usable]
            rho = stats.spearmanr(meas_a, pred_a).statistic
            rank_corr = float(rho) if np.isfinite(rho) else None

        results.append(
            BranchComparison(
                branch_id=branch.id,
                label=branch.label,
                family=best_key if not unmatched else None,
                points=matched_points if not unmatched else [],
                zero_crossings=crossings,
                amplitude_rank_correlation=rank_corr,
                unmatched=unmatched,
            )
        )
    return ComparisonReport(branches=results)


@dataclass
class OpeningRatioRow:
    opening_ratio: float
    alpha_deg: float
    max_amplitude: float
    max_period: float


@dataclass
class OpeningRatioReport:
    rows: list[OpeningRatioRow]
    amplitude_monotone: bool


def opening_ratio_study(
    scene_base: SceneConfig,
    ratios: Sequence[float],
    alphas: Sequence[float],
    analyzer_cfg: Optional[AnalyzerConfig] = None,
) -> OpeningRatioReport:
    """Maximum measured amplitude and period per (barrier opening ratio, angle).

    Ratios are restricted to (0, 0.5], the monotone regime of the first
    Fourier coefficient; the report's flag confirms that measured amplitude
    increases with the opening ratio at every angle.
    """
    for r in ratios:
        if not 0.0 < r <= 0.5:
            raise ValueError("opening ratios must lie in (0, 0.5]")
    rows: list[OpeningRatioRow] = []
    for ratio in ratios:
        scene = replace(scene_base, barrier=replace(scene_base.barrier, opening_ratio=float(ratio)))
        cfg = analyzer_cfg or AnalyzerConfig(
            max_frequency=0.8 * min(scene.grid.wavenumber, scene.barrier.wavenumber)
        )
        rasterizer = Rasterizer(scene)
        white, black = calibration_frames(scene)
        for alpha in alphas:
            image = normalize_image(rasterizer.render(float(alpha)), white, black)
            measurements, _ = _analyze(image, cfg)
            amp = max((m.amplitude for m in measurements), default=0.0)
            per = max((m.period for m in measurements), default=0.0)
            rows.append(OpeningRatioRow(float(ratio), float(alpha), amp, per))
    monotone = True
    for alpha in alphas:
        series = sorted(
            (row for row in rows if row.alpha_deg == float(alpha)), key=lambda r: r.opening_ratio
        )
        amps = [r.max_amplitude for r in series]
        if any(b <= a for a, b in zip(amps, amps[1:])):
            monotone = False
    return OpeningRatioReport(rows=rows, amplitude_monotone=monotone)


@dataclass
class PitchStudyRow:
    barrier_pitch_mm: float
    alpha_deg: float
    max_amplitude: float
    max_period: float


def pitch_study(
    scene_base: SceneConfig,
    barrier_pitches: Sequence[float],
    alpha_deg: float,
    analyzer_cfg: Optional[AnalyzerConfig] = None,
) -> list[PitchStudyRow]:
    """Dominant moire amplitude and period at one angle for several barrier pitches."""
    rows = []
    for pitch in barrier_pitches:
        scene = replace(scene_base, barrier=replace(scene_base.barrier, pitch=float(pitch)))
        cfg = analyzer_cfg or AnalyzerConfig(
            max_frequency=0.8 * min(scene.grid.wavenumber, scene.barrier.wavenumber)
        )
        rasterizer = Rasterizer(scene)
        white, black = calibration_frames(scene)
        image = normalize_image(rasterizer.render(alpha_deg), white, black)
        measurements, _ = _analyze(image, cfg)
        amp = max((m.amplitude for m in measurements), default=0.0)
        per = max((m.period for m in measurements), default=0.0)
        rows.append(PitchStudyRow(float(pitch), float(alpha_deg), amp, per))
    return rows


def find_moire_free(
    scene_base: SceneConfig,
    plan: SweepPlan = SweepPlan(),
    criterion: str = "max-distance-to-rational",
    top_n: int = 5,
    viewing_distance_mm: float = 600.0,
    mtf_params: MTFParams = MTFParams(),
    neighborhood_deg: float = 0.5,
    exclusion_deg: float = 0.5,
) -> list[tuple[float, float]]:
    """Rank candidate barrier angles where no visible moire is expected.

    ``max-distance-to-rational`` scores by angular distance to the nearest
    rational angle of bounded order (larger is better, candidates are local
    maxima of the distance, typically gap midpoints).  ``min-predicted-amplitude``
    scores by the minimum over a small neighborhood of the summed MTF-weighted
    predicted amplitudes (smaller is better).  Candidates within
    ``exclusion_deg`` of a rational angle are never returned.
    """
    rationals = plan.rational_angles()
    if not rationals:
        raise ValueError("no rational angles inside the sweep range")
    grid = np.round(
        np.arange(plan.alpha_start, plan.alpha_end + plan.fine_step / 2, plan.fine_step), 9
    )
    dist = np.min(np.abs(grid[:, None] - np.array(rationals)[None, :]), axis=1)

    if criterion == "max-distance-to-rational":
        score = dist
        better_is_larger = True
    elif criterion == "min-predicted-amplitude":
        geomless = []
        for a in grid:
            peaks = predict_spectrum(replace(scene_base, alpha_deg=float(a)))
            total = 0.0
            for p in peaks:
                u = perceived_frequency_of_wavenumber(p.wavenumber, viewing_distance_mm)
                total += p.raw_amplitude * mtf_exact(u, mtf_params)
            geomless.append(total)
        amp = np.array(geomless)
        half = max(1, int(round(neighborhood_deg / plan.fine_step)))
        score = np.array([amp[max(0, i - half) : i + half + 1].min() for i in range(len(grid))])
        better_is_larger = False
    else:
        raise ValueError(f"unknown criterion {criterion!r}")

    s = score if better_is_larger else -score
    candidates = []
    for i in range(1, len(grid) - 1):
        if s[i] >= s[i - 1] and s[i] > s[i + 1] and dist[i] > exclusion_deg:
            candidates.append((float(grid[i]), float(score[i])))
    candidates.sort(key=lambda c: -c[1] if better_is_larger else c[1])
    return candidates[:top_n]

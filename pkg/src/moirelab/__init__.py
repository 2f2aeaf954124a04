"""moirelab: simulation and measurement of moire in barrier-type displays.

Predicts moire period, orientation and amplitude from the spectral
trajectories of two stacked periodic layers weighted by the eye's MTF, and
independently measures the same three quantities from raster images with a
windowed 2D Fourier pipeline.
"""

from .analyzer import AnalyzerConfig, WaveMeasurement, analyze, suppress_harmonics, wrapped_orientation
from .angles import fold_to_quadrant, orientation_difference, wrap_orientation
from .branches import Branch, BranchSummary, LinkGates, branch_summary, link_branches, prune_branches
from .eyemtf import (
    MTFParams,
    ViewingGeometry,
    mtf_exact,
    mtf_poly,
    perceived_frequency,
    weight_amplitude,
    weight_spectrum,
)
from .experiment import (
    SweepDataset,
    SweepPlan,
    SweepRecord,
    compare_to_theory,
    find_moire_free,
    opening_ratio_study,
    pitch_study,
    rational_label,
    run_sweep,
)
from .gratings import GratingKind, GratingSpec, SceneConfig, fourier_coefficient, transmittance
from .render import RasterImage, Rasterizer, calibration_frames, normalize_image, render
from .reports import emit_reports, load_dataset, save_dataset
from .theory import (
    PredictedPeak,
    TrajectoryPoint,
    component_ratio,
    enumerate_moire_angles,
    magnification,
    max_angle,
    max_magnification,
    moire_wavenumber,
    orientation,
    predict_spectrum,
    trajectory_point,
)

__version__ = "0.1.0"

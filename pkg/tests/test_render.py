"""Renderer: intensities, calibration, determinism, resolution guard, file IO."""

import math
from dataclasses import replace

import numpy as np
import pytest

from moirelab import (
    AnalyzerConfig,
    GratingKind,
    GratingSpec,
    SceneConfig,
    analyze,
    calibration_frames,
    magnification,
    normalize_image,
    render,
)
from moirelab.image_io import load_image, load_pgm, load_png, save_pgm, save_png
from moirelab.render import RasterImage

from conftest import make_wave_image, paper_scene


def simple_scene(**kw):
    defaults = dict(
        grid=GratingSpec(GratingKind.PIXEL_GRID_2D, 1.0, 0.5),
        barrier=GratingSpec(GratingKind.LINEAR_BARRIER_1D, 1.0, 0.5),
        alpha_deg=5.0,
        extent_mm=64.0,
        resolution=8.0,
        supersample=4,
        seed=7,
    )
    defaults.update(kw)
    return SceneConfig(**defaults)


class TestRender:
    def test_fully_open_layers_give_unit_image(self):
        scene = simple_scene(
            grid=GratingSpec(GratingKind.PIXEL_GRID_2D, 1.0, 1.0),
            barrier=GratingSpec(GratingKind.LINEAR_BARRIER_1D, 1.0, 1.0),
        )
        assert np.all(render(scene).samples == 1.0)

    def test_grid_area_fraction(self):
        scene = simple_scene(
            grid=GratingSpec(GratingKind.PIXEL_GRID_2D, 1.0, 0.3),
            barrier=GratingSpec(GratingKind.LINEAR_BARRIER_1D, 1.0, 1.0),
        )
        assert render(scene).samples.mean() == pytest.approx(0.09, abs=0.005)

    def test_unit_ratio_period_matches_theory(self):
        # dominant measured period within 2% of mu * pitch from the closed form
        scene = simple_scene(alpha_deg=5.0)
        image = render(scene)
        dominant = analyze(image, AnalyzerConfig(max_frequency=0.8))[0]
        mu = magnification(1.0, 5.0, 0.0)
        assert dominant.period == pytest.approx(mu * 1.0, rel=0.02)

    def test_rotation_consistency_mod_360(self):
        a = render(simple_scene(alpha_deg=17.0)).samples
        b = render(simple_scene(alpha_deg=377.0)).samples
        assert np.array_equal(a, b)

    def test_energy_bound(self):
        scene = paper_scene(alpha=7.0, extent=16.0)
        mean = render(scene).samples.mean()
        assert mean <= min(0.3**2, 0.3) + 0.005

    def test_determinism_given_seed(self):
        a = render(simple_scene()).samples
        b = render(simple_scene()).samples
        assert np.array_equal(a, b)

    def test_under_resolved_scene_rejected_by_name(self):
        fine = GratingSpec(GratingKind.LINEAR_BARRIER_1D, 0.2, 0.5)
        scene = simple_scene(barrier=fine)  # 8 samples/mm x 0.2 mm = 1.6 < 4
        with pytest.raises(ValueError, match="barrier"):
            render(scene)

    def test_samples_in_unit_interval(self):
        img = render(paper_scene(alpha=33.0, extent=16.0))
        assert img.samples.min() >= 0.0 and img.samples.max() <= 1.0

    def test_supersample_convergence(self):
        # doubling the supersampling moves the dominant amplitude by < 1%
        strong = paper_scene(alpha=0.0, grid_opening=0.5, barrier_opening=0.5)
        cfg = AnalyzerConfig(max_frequency=0.8 * min(strong.grid.wavenumber, strong.barrier.wavenumber))
        a4 = analyze(render(strong), cfg)[0].amplitude
        a8 = analyze(render(replace(strong, supersample=8)), cfg)[0].amplitude
        assert abs(a8 - a4) / a4 < 0.01


class TestCalibration:
    def test_white_and_black_frames(self):
        white, black = calibration_frames(paper_scene(extent=16.0))
        assert white.samples.mean() == pytest.approx(1.0)
        assert black.samples.mean() == 0.0

    def test_normalization_recovers_contrast(self):
        # sinusoid of contrast 0.2 against the scene's calibration frames
        scene = paper_scene(extent=64.0, resolution=8.0)
        white, black = calibration_frames(scene)
        wave = make_wave_image(n=512, extent_mm=64.0, waves=((0.2, 10.0, 30.0, 0.0),))
        normalized = normalize_image(wave, white, black)
        m = analyze(normalized, AnalyzerConfig(max_frequency=0.5))[0]
        assert m.amplitude == pytest.approx(0.2, rel=0.01)

    def test_normalization_rescales_dim_frames(self):
        wave = make_wave_image(n=256, extent_mm=64.0, waves=((0.16, 8.0, 10.0, 0.0),), offset=0.4)
        white = RasterImage(np.full((256, 256), 0.8), wave.pixel_pitch_mm)
        black = RasterImage(np.zeros((256, 256)), wave.pixel_pitch_mm)
        normalized = normalize_image(wave, white, black)
        m = analyze(normalized, AnalyzerConfig(max_frequency=0.5))[0]
        assert m.amplitude == pytest.approx(0.2, rel=0.01)


class TestImageIO:
    def test_png_roundtrip(self, tmp_path):
        img = render(paper_scene(alpha=3.0, extent=16.0))
        path = save_png(img, tmp_path / "frame.png")
        back = load_png(path)
        assert back.pixel_pitch_mm == pytest.approx(img.pixel_pitch_mm)
        assert np.abs(back.samples - img.samples).max() < 1.0 / 65535
        assert back.metadata["alpha_deg"] == 3.0

    def test_pgm_roundtrip(self, tmp_path):
        img = render(paper_scene(alpha=3.0, extent=8.0, resolution=32.0))
        path = save_pgm(img, tmp_path / "frame.pgm")
        back = load_pgm(path)
        assert np.abs(back.samples - img.samples).max() < 1.0 / 65535

    def test_loader_requires_pitch_without_sidecar(self, tmp_path):
        img = make_wave_image(n=64, extent_mm=8.0)
        path = save_png(img, tmp_path / "wave.png")
        path.with_suffix(".png.json").unlink()
        with pytest.raises(ValueError, match="pixel pitch"):
            load_image(path)
        assert load_image(path, pixel_pitch_mm=0.125).pixel_pitch_mm == 0.125

    def test_unknown_format_rejected(self, tmp_path):
        p = tmp_path / "frame.tiff"
        p.write_bytes(b"")
        with pytest.raises(ValueError, match="format"):
            load_image(p)

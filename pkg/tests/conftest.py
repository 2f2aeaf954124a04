"""Shared fixtures: synthetic wave images and the full-range acceptance sweep."""

from __future__ import annotations

import time

import numpy as np
import pytest

from moirelab import (
    AnalyzerConfig,
    GratingKind,
    GratingSpec,
    LinkGates,
    RasterImage,
    SceneConfig,
    SweepPlan,
    run_sweep,
)

RHO_PAPER = 1.273
GRID_PITCH = 0.266
BARRIER_PITCH = GRID_PITCH * RHO_PAPER


def make_wave_image(
    n: int = 512,
    extent_mm: float = 64.0,
    waves=((0.2, 10.0, 30.0, 0.0),),
    offset: float = 0.5,
) -> RasterImage:
    """Sum of plane waves: (amplitude, period_mm, orientation_deg, phase_cycles)."""
    pitch = extent_mm / n
    coords = (np.arange(n) + 0.5) * pitch
    x = coords[None, :]
    y = coords[:, None]
    img = np.full((n, n), offset)
    for amp, period, phi_deg, phase in waves:
        phi = np.deg2rad(phi_deg)
        k = 1.0 / period
        img = img + amp * np.cos(2 * np.pi * (k * (x * np.cos(phi) + y * np.sin(phi)) + phase))
    return RasterImage(samples=np.clip(img, 0.0, 1.0), pixel_pitch_mm=pitch)


def make_square_fringe_image(
    n: int = 512,
    extent_mm: float = 64.0,
    period_mm: float = 6.0,
    duty: float = 0.25,
    orientation_deg: float = 20.0,
    strength: float = 0.3,
    extra_wave=None,
) -> RasterImage:
    """Binary fringe (rich in harmonics) plus an optional co-present sinusoid."""
    pitch = extent_mm / n
    coords = (np.arange(n) + 0.5) * pitch
    x = coords[None, :]
    y = coords[:, None]
    phi = np.deg2rad(orientation_deg)
    u = x * np.cos(phi) + y * np.sin(phi)
    frac = np.mod(u / period_mm, 1.0)
    signed = np.where(frac > 0.5, frac - 1.0, frac)
    fringe = (np.abs(signed) <= duty / 2.0).astype(float)
    img = 0.35 + strength * (fringe - duty)
    if extra_wave is not None:
        amp, period, wave_phi = extra_wave
        wp = np.deg2rad(wave_phi)
        img = img + amp * np.cos(2 * np.pi * (x * np.cos(wp) + y * np.sin(wp)) / period)
    return RasterImage(samples=np.clip(img, 0.0, 1.0), pixel_pitch_mm=pitch)


def paper_scene(
    alpha: float = 0.0,
    grid_opening: float = 0.3,
    barrier_opening: float = 0.3,
    extent: float = 32.0,
    resolution: float = 16.0,
    supersample: int = 4,
    seed: int = 20260809,
    barrier_pitch: float = BARRIER_PITCH,
) -> SceneConfig:
    return SceneConfig(
        grid=GratingSpec(GratingKind.PIXEL_GRID_2D, GRID_PITCH, grid_opening),
        barrier=GratingSpec(GratingKind.LINEAR_BARRIER_1D, barrier_pitch, barrier_opening),
        alpha_deg=alpha,
        extent_mm=extent,
        resolution=resolution,
        supersample=supersample,
        seed=seed,
    )


@pytest.fixture(scope="session")
def big_sweep():
    """The full (-10, +100) deg sweep of the rho = 1.273 scene at 1 deg steps
    with 0.1 deg refinement near the rational angles (512^2 raster, 4x supersampling)."""
    scene = paper_scene()
    plan = SweepPlan(
        alpha_start=-10.0,
        alpha_end=100.0,
        coarse_step=1.0,
        fine_step=0.1,
        refine_radius=2.0,
        rational_max_order=3,
    )
    # orientation swings near the rational angles exceed the 5 deg/step default
    # at 1 deg coarse spacing, so the sweep uses a wider (still smooth) gate
    gates = LinkGates(max_dphi=15.0, max_dperiod=0.30, max_gap=2)
    t0 = time.perf_counter()
    dataset = run_sweep(scene, plan, gates=gates, viewing_distance_mm=600.0)
    runtime = time.perf_counter() - t0
    return dataset, scene, plan, runtime

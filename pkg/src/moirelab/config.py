"""Loading the human-readable experiment configuration document (YAML)."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Optional

import yaml

from .analyzer import AnalyzerConfig
from .branches import LinkGates
from .eyemtf import MTFParams
from .experiment import SweepPlan
from .gratings import GratingKind, GratingSpec, SceneConfig

__all__ = [
    "load_config",
    "default_config",
    "scene_from_config",
    "plan_from_config",
    "analyzer_from_config",
    "gates_from_config",
    "prune_from_config",
    "viewing_from_config",
]


def default_config() -> dict[str, Any]:
    return {
        "scene": {
            "grid": {"pitch": 0.266, "opening_ratio": 0.3, "phase": [0.0, 0.0]},
            "barrier": {"pitch": 0.338618, "opening_ratio": 0.3, "phase": [0.0, 0.0]},
            "alpha": 0.0,
            "extent": 32.0,
            "resolution": 16.0,
            "supersample": 4,
            "seed": 12345,
        },
        "plan": {
            "alpha_start": -10.0,
            "alpha_end": 100.0,
            "coarse_step": 1.0,
            "fine_step": 0.1,
            "refine_radius": 2.0,
            "rational_max_order": 3,
        },
        "analyzer": {},
        "gates": {"max_dphi": 5.0, "max_dperiod": 0.3, "max_gap": 2},
        "prune": {"min_points": 3, "min_rel_amplitude": 0.05, "min_rel_period": 0.05},
        "viewing": {"distance_mm": 600.0, "pupil_mm": 4.0, "wavelength_nm": 555.0},
    }


def load_config(path) -> dict[str, Any]:
    data = yaml.safe_load(Path(path).read_text())
    if not isinstance(data, dict):
        raise ValueError(f"config {path} must be a mapping")
    return data


def scene_from_config(cfg: dict[str, Any]) -> SceneConfig:
    s = cfg.get("scene", {})
    grid = s.get("grid", {})
    barrier = s.get("barrier", {})
    return SceneConfig(
        grid=GratingSpec(
            kind=GratingKind.PIXEL_GRID_2D,
            pitch=float(grid.get("pitch", 0.266)),
            opening_ratio=float(grid.get("opening_ratio", 0.3)),
            phase=tuple(grid.get("phase", (0.0, 0.0))),
        ),
        barrier=GratingSpec(
            kind=GratingKind.LINEAR_BARRIER_1D,
            pitch=float(barrier.get("pitch", 0.338618)),
            opening_ratio=float(barrier.get("opening_ratio", 0.3)),
            phase=tuple(barrier.get("phase", (0.0, 0.0))),
        ),
        alpha_deg=float(s.get("alpha", 0.0)),
        extent_mm=float(s.get("extent", 32.0)),
        resolution=float(s.get("resolution", 16.0)),
        supersample=int(s.get("supersample", 4)),
        seed=int(s.get("seed", 12345)),
    )


def plan_from_config(cfg: dict[str, Any]) -> SweepPlan:
    return SweepPlan(**cfg.get("plan", {}))


def analyzer_from_config(cfg: dict[str, Any], scene: Optional[SceneConfig] = None) -> AnalyzerConfig:
    kwargs = dict(cfg.get("analyzer", {}))
    if "max_frequency" not in kwargs and scene is not None:
        kwargs["max_frequency"] = 0.8 * min(scene.grid.wavenumber, scene.barrier.wavenumber)
    return AnalyzerConfig(**kwargs)


def gates_from_config(cfg: dict[str, Any]) -> LinkGates:
    return LinkGates(**cfg.get("gates", {}))


def prune_from_config(cfg: dict[str, Any]) -> dict[str, Any]:
    prune = cfg.get("prune", {})
    return {
        "min_points": int(prune.get("min_points", 3)),
        "min_rel_amplitude": float(prune.get("min_rel_amplitude", 0.05)),
        "min_rel_period": float(prune.get("min_rel_period", 0.05)),
    }


def viewing_from_config(cfg: dict[str, Any]) -> tuple[Optional[float], MTFParams]:
    v = cfg.get("viewing", {})
    distance = v.get("distance_mm", 600.0)
    params = MTFParams(
        pupil_diameter_mm=float(v.get("pupil_mm", 4.0)),
        wavelength_nm=float(v.get("wavelength_nm", 555.0)),
    )
    return (float(distance) if distance is not None else None), params

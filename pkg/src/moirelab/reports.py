"""CSV tables, JSON summaries and SVG plots for sweep datasets."""

from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path
from typing import Optional

import numpy as np

from .analyzer import AnalyzerConfig, WaveMeasurement, measurements_to_csv
from .angles import wrapped_orientation
from .branches import Branch, LinkGates, branch_summary
from .experiment import (
    ComparisonReport,
    OpeningRatioReport,
    PitchStudyRow,
    SweepDataset,
    SweepPlan,
    SweepRecord,
)
from .gratings import SceneConfig

__all__ = [
    "emit_reports",
    "save_dataset",
    "load_dataset",
    "branches_to_csv",
    "comparison_to_csv",
    "opening_ratio_to_csv",
    "pitch_study_to_csv",
]


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def branches_to_csv(branches: list[Branch]) -> str:
    lines = ["branch_id,alpha_deg,period_mm,phi_deg,wrapped_phi_deg,amplitude"]
    for b in branches:
        for alpha, m in b.points:
            lines.append(
                f"{b.id},{_fmt(alpha)},{_fmt(m.period)},{_fmt(m.orientation_deg)},"
                f"{_fmt(wrapped_orientation(m.orientation_deg, alpha))},{_fmt(m.amplitude)}"
            )
    return "\n".join(lines) + "\n"


def comparison_to_csv(report: ComparisonReport) -> str:
    lines = [
        "branch_id,label,family_m,family_n,barrier_order,alpha_deg,"
        "k_meas,k_pred,phi_meas,phi_pred,amplitude,perceived_amplitude,weighted_prediction"
    ]
    for b in report.branches:
        fam = b.family or ("", "", "")
        for p in b.points:
            perceived = "" if p.perceived_amplitude is None else _fmt(p.perceived_amplitude)
            lines.append(
                f"{b.branch_id},{b.label or ''},{fam[0]},{fam[1]},{fam[2]},{_fmt(p.alpha_deg)},"
                f"{_fmt(p.k_measured)},{_fmt(p.k_predicted)},{_fmt(p.phi_measured)},"
                f"{_fmt(p.phi_predicted)},{_fmt(p.amplitude)},{perceived},{_fmt(p.weighted_prediction)}"
            )
    return "\n".join(lines) + "\n"


def opening_ratio_to_csv(report: OpeningRatioReport) -> str:
    lines = ["opening_ratio,alpha_deg,max_amplitude,max_period_mm"]
    for r in report.rows:
        lines.append(f"{_fmt(r.opening_ratio)},{_fmt(r.alpha_deg)},{_fmt(r.max_amplitude)},{_fmt(r.max_period)}")
    return "\n".join(lines) + "\n"


def pitch_study_to_csv(rows: list[PitchStudyRow]) -> str:
    lines = ["barrier_pitch_mm,alpha_deg,max_amplitude,max_period_mm"]
    for r in rows:
        lines.append(f"{_fmt(r.barrier_pitch_mm)},{_fmt(r.alpha_deg)},{_fmt(r.max_amplitude)},{_fmt(r.max_period)}")
    return "\n".join(lines) + "\n"


def _plot_branch_functions(dataset: SweepDataset, path: Path) -> Optional[Path]:
    if not dataset.branches:
        return None
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "moirelab"
    fig, axes = plt.subplots(3, 1, figsize=(8, 9), sharex=True)
    markers = ["o", "s", "^", "v", "D", "x", "+", "*"]
    for i, b in enumerate(dataset.branches):
        alphas = [a for a, _ in b.points]
        wrapped = [wrapped_orientation(m.orientation_deg, a) for a, m in b.points]
        periods = [m.period for _, m in b.points]
        amps = [
            m.perceived_amplitude if m.perceived_amplitude is not None else m.amplitude
            for _, m in b.points
        ]
        mk = markers[i % len(markers)]
        label = f"branch {b.id}" + (f" ({b.label})" if b.label else "")
        axes[0].plot(alphas, wrapped, mk, ms=3, label=label)
        axes[1].plot(alphas, periods, mk, ms=3)
        axes[2].plot(alphas, amps, mk, ms=3)
    axes[0].set_ylabel("wrapped orientation (deg)")
    axes[0].axhline(0.0, color="k", lw=0.5)
    axes[1].set_ylabel("period (mm)")
    axes[2].set_ylabel("amplitude")
    axes[2].set_xlabel("rotation angle (deg)")
    axes[0].legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
    return path


def _plot_max_amplitude(dataset: SweepDataset, path: Path) -> Optional[Path]:
    if not dataset.branches:
        return None
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "moirelab"
    summaries = [branch_summary(b) for b in dataset.branches]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.stem(
        [s.angle_at_max_period for s in summaries],
        [s.max_amplitude for s in summaries],
    )
    ax.set_xlabel("angle of branch period maximum (deg)")
    ax.set_ylabel("max amplitude")
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
    return path


def emit_reports(
    dataset: SweepDataset, outdir, comparison: Optional[ComparisonReport] = None
) -> list[Path]:
    """Write the sweep's CSV tables, JSON summary and SVG plots into ``outdir``.

    Empty datasets produce valid header-only tables and no plots.  CSV output
    is byte-deterministic for identical datasets.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    rows = []
    for r in dataset.records:
        for m in r.measurements:
            rows.append((f"a{r.alpha_deg:+09.3f}", r.alpha_deg, m))
    p = outdir / "measurements.csv"
    p.write_text(measurements_to_csv(rows))
    written.append(p)

    p = outdir / "branches.csv"
    p.write_text(branches_to_csv(dataset.branches))
    written.append(p)

    summary = [dataclasses.asdict(branch_summary(b)) for b in dataset.branches]
    p = outdir / "branch_summary.json"
    p.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    written.append(p)

    if comparison is not None:
        p = outdir / "comparison.csv"
        p.write_text(comparison_to_csv(comparison))
        written.append(p)

    for maker, name in (
        (_plot_branch_functions, "branch_functions.svg"),
        (_plot_max_amplitude, "max_amplitude_vs_angle.svg"),
    ):
        out = maker(dataset, outdir / name)
        if out is not None:
            written.append(out)
    return written


def save_dataset(dataset: SweepDataset, outdir) -> Path:
    """Persist a sweep dataset (structured JSON plus the canonical CSV tables)."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    blob = {
        "scene": dataset.scene.to_dict(),
        "plan": dataset.plan.to_dict(),
        "analyzer": dataclasses.asdict(dataset.analyzer),
        "gates": dataclasses.asdict(dataset.gates),
        "viewing_distance_mm": dataset.viewing_distance_mm,
        "mtf": dataclasses.asdict(dataset.mtf) if dataset.mtf else None,
        "records": [
            {
                "alpha_deg": r.alpha_deg,
                "noise_floor_amplitude": r.noise_floor_amplitude,
                "detection_floor": r.detection_floor,
                "measurements": [dataclasses.asdict(m) for m in r.measurements],
            }
            for r in dataset.records
        ],
        "branches": [
            {
                "id": b.id,
                "label": b.label,
                "points": [[a, dataclasses.asdict(m)] for a, m in b.points],
            }
            for b in dataset.branches
        ],
    }
    path = outdir / "dataset.json"
    path.write_text(json.dumps(blob, indent=1, sort_keys=True) + "\n")
    emit_reports(dataset, outdir)
    return path


def load_dataset(outdir) -> SweepDataset:
    path = Path(outdir) / "dataset.json"
    blob = json.loads(path.read_text())
    from .eyemtf import MTFParams

    records = [
        SweepRecord(
            alpha_deg=r["alpha_deg"],
            measurements=[WaveMeasurement(**m) for m in r["measurements"]],
            noise_floor_amplitude=r["noise_floor_amplitude"],
            detection_floor=r["detection_floor"],
        )
        for r in blob["records"]
    ]
    branches = [
        Branch(
            id=b["id"],
            label=b.get("label"),
            points=[(a, WaveMeasurement(**m)) for a, m in b["points"]],
        )
        for b in blob["branches"]
    ]
    return SweepDataset(
        scene=SceneConfig.from_dict(blob["scene"]),
        plan=SweepPlan.from_dict(blob["plan"]),
        records=records,
        branches=branches,
        analyzer=AnalyzerConfig(**blob["analyzer"]),
        gates=LinkGates(**blob["gates"]),
        viewing_distance_mm=blob.get("viewing_distance_mm"),
        mtf=MTFParams(**blob["mtf"]) if blob.get("mtf") else None,
    )

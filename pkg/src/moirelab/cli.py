"""Command-line driver: synth, analyze, sweep, theory, compare, or-study, find-free, report."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import config as cfgmod
from .analyzer import analyze, measurements_to_csv
from .experiment import (
    compare_to_theory,
    find_moire_free,
    opening_ratio_study,
    pitch_study,
    run_sweep,
)
from .eyemtf import ViewingGeometry, weight_spectrum
from .image_io import load_image, save_pgm, save_png
from .render import render
from .reports import (
    comparison_to_csv,
    emit_reports,
    load_dataset,
    opening_ratio_to_csv,
    pitch_study_to_csv,
    save_dataset,
)
from .theory import predict_spectrum


def _load(args) -> dict:
    if args.config:
        return cfgmod.load_config(args.config)
    return cfgmod.default_config()


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_synth(args) -> int:
    cfg = _load(args)
    scene = cfgmod.scene_from_config(cfg)
    if args.alpha is not None:
        scene = dataclasses.replace(scene, alpha_deg=args.alpha)
    image = render(scene)
    out = _outdir(args)
    paths = [save_png(image, out / "scene.png"), save_pgm(image, out / "scene.pgm")]
    print("\n".join(str(p) for p in paths))
    return 0


def _cmd_analyze(args) -> int:
    cfg = _load(args)
    image = load_image(args.image, pixel_pitch_mm=args.pixel_pitch)
    analyzer = cfgmod.analyzer_from_config(cfg)
    if args.max_frequency is not None:
        analyzer = dataclasses.replace(analyzer, max_frequency=args.max_frequency)
    measurements = analyze(image, analyzer)
    alpha = image.metadata.get("alpha_deg", float("nan"))
    csv = measurements_to_csv([(Path(args.image).stem, alpha, m) for m in measurements])
    out = _outdir(args) / "measurements.csv"
    out.write_text(csv)
    print(out)
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    scene = cfgmod.scene_from_config(cfg)
    plan = cfgmod.plan_from_config(cfg)
    distance, params = cfgmod.viewing_from_config(cfg)
    dataset = run_sweep(
        scene,
        plan,
        analyzer_cfg=cfgmod.analyzer_from_config(cfg, scene),
        gates=cfgmod.gates_from_config(cfg),
        viewing_distance_mm=distance,
        mtf_params=params,
        **cfgmod.prune_from_config(cfg),
    )
    out = _outdir(args)
    save_dataset(dataset, out)
    comparison = compare_to_theory(dataset)
    (out / "comparison.csv").write_text(comparison_to_csv(comparison))
    print(out / "dataset.json")
    return 0


def _cmd_theory(args) -> int:
    cfg = _load(args)
    scene = cfgmod.scene_from_config(cfg)
    if args.alpha is not None:
        scene = dataclasses.replace(scene, alpha_deg=args.alpha)
    peaks = predict_spectrum(scene)
    distance, params = cfgmod.viewing_from_config(cfg)
    if distance is not None:
        geom = ViewingGeometry(distance_mm=distance, surface_period_mm=scene.barrier.pitch)
        peaks = weight_spectrum(peaks, geom, params)
    lines = ["m,n,barrier_order,k_cpmm,period_mm,phi_deg,magnification,raw_amplitude,weighted_amplitude"]
    for p in peaks:
        phi = "" if p.orientation_deg is None else f"{p.orientation_deg:.9g}"
        wa = "" if p.weighted_amplitude is None else f"{p.weighted_amplitude:.9g}"
        lines.append(
            f"{p.m},{p.n},{p.barrier_order},{p.wavenumber:.9g},{p.period:.9g},{phi},"
            f"{p.magnification:.9g},{p.raw_amplitude:.9g},{wa}"
        )
    out = _outdir(args) / "theory.csv"
    out.write_text("\n".join(lines) + "\n")
    print(out)
    return 0


def _cmd_compare(args) -> int:
    dataset = load_dataset(args.dataset)
    report = compare_to_theory(dataset)
    out = _outdir(args) / "comparison.csv"
    out.write_text(comparison_to_csv(report))
    print(out)
    return 0


def _cmd_or_study(args) -> int:
    cfg = _load(args)
    scene = cfgmod.scene_from_config(cfg)
    ratios = [float(r) for r in args.ratios.split(",")]
    alphas = [float(a) for a in args.angles.split(",")]
    report = opening_ratio_study(scene, ratios, alphas)
    out = _outdir(args) / "opening_ratio_study.csv"
    out.write_text(opening_ratio_to_csv(report))
    print(out)
    print(f"amplitude monotone in opening ratio: {report.amplitude_monotone}")
    return 0


def _cmd_find_free(args) -> int:
    cfg = _load(args)
    scene = cfgmod.scene_from_config(cfg)
    plan = cfgmod.plan_from_config(cfg)
    distance, params = cfgmod.viewing_from_config(cfg)
    candidates = find_moire_free(
        scene,
        plan,
        criterion=args.criterion,
        top_n=args.top,
        viewing_distance_mm=distance or 600.0,
        mtf_params=params,
    )
    lines = ["angle_deg,score"] + [f"{a:.9g},{s:.9g}" for a, s in candidates]
    out = _outdir(args) / "moire_free_candidates.csv"
    out.write_text("\n".join(lines) + "\n")
    print(out)
    return 0


def _cmd_report(args) -> int:
    dataset = load_dataset(args.dataset)
    comparison = compare_to_theory(dataset)
    written = emit_reports(dataset, _outdir(args), comparison)
    print("\n".join(str(p) for p in written))
    return 0


def _cmd_pitch_study(args) -> int:
    cfg = _load(args)
    scene = cfgmod.scene_from_config(cfg)
    pitches = [float(p) for p in args.pitches.split(",")]
    rows = pitch_study(scene, pitches, args.alpha)
    out = _outdir(args) / "pitch_study.csv"
    out.write_text(pitch_study_to_csv(rows))
    print(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moirelab",
        description="Simulation and measurement of moire patterns in barrier-type displays",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="YAML configuration document")
        p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("synth", help="render one scene to PNG and PGM")
    common(p)
    p.add_argument("--alpha", type=float, help="override the barrier angle (deg)")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("analyze", help="measure plane waves in one image")
    common(p)
    p.add_argument("--image", required=True)
    p.add_argument("--pixel-pitch", type=float, help="mm per sample when no sidecar is present")
    p.add_argument("--max-frequency", type=float, help="visibility cutoff in cycles/mm")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("sweep", help="run the full angle-sweep experiment")
    common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("theory", help="predicted spectrum at one angle")
    common(p)
    p.add_argument("--alpha", type=float, help="override the barrier angle (deg)")
    p.set_defaults(func=_cmd_theory)

    p = sub.add_parser("compare", help="compare a saved sweep dataset against theory")
    common(p)
    p.add_argument("--dataset", required=True, help="directory written by the sweep command")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("or-study", help="amplitude versus barrier opening ratio")
    common(p)
    p.add_argument("--ratios", default="0.1,0.2,0.3")
    p.add_argument("--angles", default="0")
    p.set_defaults(func=_cmd_or_study)

    p = sub.add_parser("find-free", help="rank moire-free angle candidates")
    common(p)
    p.add_argument(
        "--criterion",
        default="max-distance-to-rational",
        choices=["max-distance-to-rational", "min-predicted-amplitude"],
    )
    p.add_argument("--top", type=int, default=5)
    p.set_defaults(func=_cmd_find_free)

    p = sub.add_parser("report", help="emit CSV/SVG reports for a saved dataset")
    common(p)
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("pitch-study", help="amplitude and period versus barrier pitch")
    common(p)
    p.add_argument("--pitches", default="0.508,0.339,0.170")
    p.add_argument("--alpha", type=float, default=45.0)
    p.set_defaults(func=_cmd_pitch_study)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

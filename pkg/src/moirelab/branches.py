"""Linking per-angle wave measurements into branches across a rotation sweep.

Several moire waves can coexist at one angle; each smooth family of
measurements over the sweep is one branch.  Linking is a greedy
nearest-neighbor chaining gated on smoothness of orientation and period,
the automated stand-in for a manual classification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .analyzer import WaveMeasurement
from .angles import orientation_difference

__all__ = [
    "LinkGates",
    "Branch",
    "BranchSummary",
    "link_branches",
    "prune_branches",
    "branch_summary",
]


@dataclass(frozen=True)
class LinkGates:
    """Smoothness gates per sweep step: orientation drift, relative period drift, gap."""

    max_dphi: float = 5.0
    max_dperiod: float = 0.30
    max_gap: int = 2


@dataclass
class Branch:
    """A smooth sequence of measurements across a sweep.

    ``points`` are (alpha_deg, measurement) pairs sorted by strictly
    increasing alpha; ``label`` carries the rational-angle tag when one is
    assigned.
    """

    id: int
    points: list[tuple[float, WaveMeasurement]] = field(default_factory=list)
    label: Optional[str] = None

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def max_amplitude(self) -> float:
        return max(m.amplitude for _, m in self.points)

    @property
    def max_period(self) -> float:
        return max(m.period for _, m in self.points)

    @property
    def angle_at_max_period(self) -> float:
        return max(self.points, key=lambda p: (p[1].period, -p[0]))[0]

    @property
    def orientation_at_max(self) -> float:
        return max(self.points, key=lambda p: (p[1].period, -p[0]))[1].orientation_deg


@dataclass(frozen=True)
class BranchSummary:
    branch_id: int
    label: Optional[str]
    n_points: int
    angle_at_max_period: float
    max_period: float
    max_amplitude: float
    orientation_at_max: float


def _gate_distance(
    last: WaveMeasurement, cand: WaveMeasurement, steps: int, gates: LinkGates
) -> Optional[float]:
    """Normalized linking distance, or None when either smoothness gate fails."""
    dphi = orientation_difference(last.orientation_deg, cand.orientation_deg)
    dper = abs(cand.period - last.period) / last.period
    phi_budget = gates.max_dphi * steps
    per_budget = gates.max_dperiod * steps
    if dphi > phi_budget or dper > per_budget:
        return None
    return dphi / phi_budget + dper / per_budget


def link_branches(
    sweep: Sequence[tuple[float, Sequence[WaveMeasurement]]],
    gates: LinkGates = LinkGates(),
) -> list[Branch]:
    """Chain measurements of a sorted sweep into branches.

    A measurement joins the open branch with the smallest combined
    orientation/period distance (ties resolved toward the branch with the
    longer current period); otherwise it opens a new branch.  Branches stay
    open across up to ``max_gap`` missing angles.  The result does not depend
    on the ordering of measurements within one angle.
    """
    branches: list[Branch] = []
    last_index: dict[int, int] = {}

    for idx, (alpha, measurements) in enumerate(sweep):
        open_ids = [
            b.id for b in branches if idx - last_index[b.id] - 1 <= gates.max_gap
        ]
        by_id = {b.id: b for b in branches}
        # deterministic candidate list regardless of input permutation
        pending = sorted(
            measurements, key=lambda m: (-m.amplitude, m.wavenumber, m.orientation_deg)
        )
        pairs = []
        for mi, m in enumerate(pending):
            for bid in open_ids:
                b = by_id[bid]
                steps = idx - last_index[bid]
                d = _gate_distance(b.points[-1][1], m, steps, gates)
                if d is not None:
                    pairs.append((d, -b.points[-1][1].period, bid, mi))
        pairs.sort()
        used_b: set[int] = set()
        used_m: set[int] = set()
        for d, _, bid, mi in pairs:
            if bid in used_b or mi in used_m:
                continue
            by_id[bid].points.append((alpha, pending[mi]))
            last_index[bid] = idx
            used_b.add(bid)
            used_m.add(mi)
        for mi, m in enumerate(pending):
            if mi in used_m:
                continue
            b = Branch(id=len(branches), points=[(alpha, m)])
            branches.append(b)
            last_index[b.id] = idx
    return branches


def prune_branches(
    branches: Sequence[Branch],
    min_points: int = 3,
    min_rel_amplitude: float = 0.05,
    min_rel_period: float = 0.05,
) -> list[Branch]:
    """Drop weak branches; a branch passing any single criterion survives.

    Thresholds are relative to the global maxima over the input branches, so
    the strongest-amplitude and longest-period branches always survive.
    """
    if not branches:
        return []
    global_amp = max(b.max_amplitude for b in branches)
    global_per = max(b.max_period for b in branches)
    kept = []
    for b in branches:
        if (
            b.n_points >= min_points
            or b.max_amplitude >= min_rel_amplitude * global_amp
            or b.max_period >= min_rel_period * global_per
        ):
            kept.append(b)
    return kept


def branch_summary(branch: Branch) -> BranchSummary:
    """Per-branch extrema: the quantities compared across angles and scenes."""
    if not branch.points:
        raise ValueError("cannot summarize an empty branch")
    return BranchSummary(
        branch_id=branch.id,
        label=branch.label,
        n_points=branch.n_points,
        angle_at_max_period=branch.angle_at_max_period,
        max_period=branch.max_period,
        max_amplitude=branch.max_amplitude,
        orientation_at_max=branch.orientation_at_max,
    )

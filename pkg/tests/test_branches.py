"""Branch linking, pruning and summaries."""

import itertools
import math

import numpy as np
import pytest

from moirelab import (
    Branch,
    LinkGates,
    WaveMeasurement,
    branch_summary,
    link_branches,
    prune_branches,
    wrapped_orientation,
)
from moirelab.theory import magnification, max_angle, moire_wavenumber, orientation


def wave(period, phi, amp=1.0, snr=100.0):
    return WaveMeasurement(wavenumber=1.0 / period, orientation_deg=phi, amplitude=amp, snr=snr)


GATES = LinkGates(max_dphi=5.0, max_dperiod=0.30, max_gap=2)


class TestLinking:
    def test_two_interleaved_series(self):
        sweep = [
            (0.0, [wave(5.0, 0.0), wave(2.0, 45.0)]),
            (1.0, [wave(8.0, 0.5), wave(2.1, 45.2)]),
            (2.0, [wave(5.0, 1.0), wave(2.0, 45.4)]),
        ]
        branches = link_branches(sweep, GATES)
        assert len(branches) == 2
        assert sorted(b.n_points for b in branches) == [3, 3]

    def test_single_measurement_single_branch(self):
        branches = link_branches([(10.0, [wave(4.0, 10.0)])], GATES)
        assert len(branches) == 1
        assert branches[0].points == [(10.0, wave(4.0, 10.0))]

    def test_empty_sweep(self):
        assert link_branches([], GATES) == []

    def test_gap_tolerance(self):
        sweep = [
            (0.0, [wave(5.0, 0.0)]),
            (1.0, []),
            (2.0, []),
            (3.0, [wave(5.0, 0.5)]),
        ]
        assert len(link_branches(sweep, GATES)) == 1
        sweep_long_gap = [
            (0.0, [wave(5.0, 0.0)]),
            (1.0, []),
            (2.0, []),
            (3.0, []),
            (4.0, [wave(5.0, 0.5)]),
        ]
        assert len(link_branches(sweep_long_gap, GATES)) == 2

    def test_partition_property(self):
        rng = np.random.default_rng(12)
        sweep = []
        total = 0
        for i in range(10):
            ms = [
                wave(float(rng.uniform(1, 20)), float(rng.uniform(-90, 90)),
                     float(rng.uniform(0.1, 1)))
                for _ in range(int(rng.integers(0, 4)))
            ]
            total += len(ms)
            sweep.append((float(i), ms))
        branches = link_branches(sweep, GATES)
        assert sum(b.n_points for b in branches) == total

    def test_order_independence_within_angle(self):
        a = [wave(5.0, 0.0, 0.9), wave(5.5, 1.0, 0.5), wave(2.0, 40.0, 0.7)]
        b = [wave(5.1, 0.3, 0.9), wave(5.6, 1.2, 0.5), wave(2.05, 40.3, 0.7)]
        reference = None
        for perm_a, perm_b in itertools.product(itertools.permutations(a), itertools.permutations(b)):
            branches = link_branches([(0.0, list(perm_a)), (1.0, list(perm_b))], GATES)
            signature = sorted(
                tuple(sorted((alpha, m.wavenumber, m.orientation_deg) for alpha, m in br.points))
                for br in branches
            )
            if reference is None:
                reference = signature
            assert signature == reference

    def test_square_grid_sweep_has_parallel_branches_near_zero(self):
        # the axis families of a square grid coexist near alpha = 0
        k0, k1 = 1 / 0.266, 1 / 0.508
        sweep = []
        for alpha in np.arange(-3.0, 3.1, 1.0):
            ms = []
            for (m, n, p, amp) in ((1, 0, 2, 0.023), (2, 0, 3, 0.006), (2, 0, 4, 0.004)):
                k = abs(complex(m, n) * k0 - p * k1 * np.exp(1j * math.radians(alpha)))
                phi = orientation(m, n, k0, p * k1, float(alpha))
                if k < 0.8 * min(k0, k1):
                    ms.append(WaveMeasurement(k, phi, amp, 50.0))
            sweep.append((float(alpha), ms))
        branches = link_branches(sweep, GATES)
        near_zero = [b for b in branches if any(abs(a) < 0.5 for a, _ in b.points)]
        assert len(near_zero) >= 2


class TestPruning:
    def test_relative_amplitude_threshold(self):
        mk = lambda i, amp: Branch(id=i, points=[(0.0, wave(5.0, 0.0, amp))])
        branches = [mk(0, 1.0), mk(1, 0.5), mk(2, 0.01)]
        kept = prune_branches(branches, min_points=10**9, min_rel_amplitude=0.05, min_rel_period=1.0)
        assert [b.id for b in kept] == [0, 1]

    def test_longest_period_branch_survives_any_criterion(self):
        strong = Branch(id=0, points=[(float(a), wave(5.0, 0.0, 1.0)) for a in range(10)])
        weak_long = Branch(id=1, points=[(float(a), wave(50.0, 10.0, 0.001)) for a in range(3)])
        kept = prune_branches([strong, weak_long], min_points=5, min_rel_amplitude=0.05,
                              min_rel_period=0.5)
        assert {b.id for b in kept} == {0, 1}

    def test_empty_input(self):
        assert prune_branches([]) == []

    def test_monotone_in_thresholds(self):
        rng = np.random.default_rng(23)
        branches = []
        for i in range(12):
            pts = [
                (float(j), wave(float(rng.uniform(1, 30)), float(rng.uniform(-90, 90)),
                                float(rng.uniform(0.01, 1))))
                for j in range(int(rng.integers(1, 8)))
            ]
            branches.append(Branch(id=i, points=pts))
        counts = []
        for amp_thr in (0.01, 0.05, 0.2, 0.8):
            counts.append(len(prune_branches(branches, min_points=4, min_rel_amplitude=amp_thr,
                                             min_rel_period=0.3)))
        assert all(b <= a for a, b in zip(counts, counts[1:]))


class TestSummary:
    def test_single_point(self):
        b = Branch(id=3, points=[(7.0, wave(4.0, 12.0, 0.5))])
        s = branch_summary(b)
        assert s.angle_at_max_period == 7.0
        assert s.max_period == 4.0
        assert s.max_amplitude == 0.5
        assert s.orientation_at_max == 12.0

    def test_empty_branch_rejected(self):
        with pytest.raises(ValueError):
            branch_summary(Branch(id=0, points=[]))

    def test_synthetic_family_peaks_at_maximum_angle(self):
        # theory-generated branch for a rho = 0.9 family: the period maximum
        # and the wrapped-orientation zero both land on the maximum angle
        rho, k1 = 0.9, 2.0
        m, n, k0 = 1, 0, rho * 2.0
        amax = max_angle(m, n)
        points = []
        for alpha in np.arange(amax - 5.0, amax + 5.01, 0.5):
            k = moire_wavenumber(rho, k1, float(alpha), amax)
            phi = orientation(m, n, k0, k1, float(alpha))
            points.append((float(alpha), WaveMeasurement(k, phi, 0.1, 50.0)))
        branch = Branch(id=0, points=points)
        s = branch_summary(branch)
        assert s.angle_at_max_period == pytest.approx(amax, abs=0.5)
        assert abs(wrapped_orientation(s.orientation_at_max, s.angle_at_max_period)) <= 1.0

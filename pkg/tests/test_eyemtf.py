"""Eye MTF model: constants, shapes, perceived frequency, amplitude weighting."""

import math

import numpy as np
import pytest

from moirelab import (
    MTFParams,
    PredictedPeak,
    ViewingGeometry,
    mtf_exact,
    mtf_poly,
    perceived_frequency,
    weight_amplitude,
)
from moirelab.theory import magnification, moire_wavenumber


class TestConstants:
    def test_u0_for_standard_pupil(self):
        assert MTFParams(4.0, 555.0).u0_cpd == pytest.approx(125.8, abs=0.1)

    def test_u1_for_standard_pupil(self):
        assert MTFParams(4.0, 555.0).u1_cpd == pytest.approx(6.18, abs=0.01)

    def test_pupil_range_enforced(self):
        with pytest.raises(ValueError):
            MTFParams(pupil_diameter_mm=1.0)


class TestExactMTF:
    def test_unity_at_zero(self):
        assert mtf_exact(0.0) == pytest.approx(1.0, abs=1e-12)

    def test_zero_at_cutoff(self):
        params = MTFParams()
        assert mtf_exact(params.u0_cpd) == 0.0
        assert mtf_exact(params.u0_cpd + 10.0) == 0.0

    def test_rejects_negative_frequency(self):
        with pytest.raises(ValueError):
            mtf_exact(-1.0)

    def test_monotone_non_increasing(self):
        params = MTFParams()
        grid = np.linspace(0.0, params.u0_cpd, 1000)
        values = [mtf_exact(float(u), params) for u in grid]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))

    def test_bounded(self):
        params = MTFParams()
        for u in np.linspace(0, params.u0_cpd, 200):
            assert 0.0 <= mtf_exact(float(u), params) <= 1.0


class TestPolyMTF:
    def test_constant_term(self):
        assert mtf_poly(0.0) == pytest.approx(1.0)

    def test_at_10_cpd(self):
        # direct polynomial arithmetic: -2e-6*1000 + 4e-4*100 - 0.3 + 1
        assert mtf_poly(10.0) == pytest.approx(0.738, abs=1e-12)

    def test_at_50_cpd_no_clamp(self):
        # raw value -0.25 + 1.0 - 1.5 + 1 = 0.25, clamp not triggered
        assert mtf_poly(50.0) == pytest.approx(0.25, abs=1e-12)

    def test_clamped_below_at_zero(self):
        assert mtf_poly(150.0) == 0.0

    def test_array_input(self):
        out = mtf_poly(np.array([0.0, 10.0, 50.0]))
        assert out == pytest.approx([1.0, 0.738, 0.25])


class TestPerceivedFrequency:
    def test_small_angle_oracle(self):
        # 5 mm fringe at 1000 mm: 200 cycles/radian; exact angle per period is
        # 2*atan(2.5/1000), whose inverse agrees with the small-angle form
        geom = ViewingGeometry(distance_mm=1000.0, surface_period_mm=5.0)
        exact_cpd = 1.0 / math.degrees(2 * math.atan(2.5 / 1000.0))
        u = perceived_frequency(geom, 1.0)
        assert u == pytest.approx(200.0 * math.pi / 180.0, rel=1e-12)
        assert u == pytest.approx(3.49, abs=0.01)
        assert u == pytest.approx(exact_cpd, rel=1e-5)

    def test_infinite_period_maps_to_zero(self):
        geom = ViewingGeometry(1000.0, 5.0)
        assert perceived_frequency(geom, math.inf) == 0.0

    def test_linear_in_distance(self):
        g1 = ViewingGeometry(500.0, 2.0)
        g2 = ViewingGeometry(1000.0, 2.0)
        assert perceived_frequency(g2, 3.0) == pytest.approx(2 * perceived_frequency(g1, 3.0))


def peak(k=0.5, mu=2.0, raw=0.1):
    return PredictedPeak(
        m=1, n=0, barrier_order=1, wavenumber=k, orientation_deg=0.0,
        magnification=mu, raw_amplitude=raw,
    )


class TestWeighting:
    def test_infinite_period_keeps_full_amplitude(self):
        p = PredictedPeak(1, 0, 1, 0.0, None, math.inf, 0.2)
        geom = ViewingGeometry(600.0, 1.0)
        assert weight_amplitude(p, geom).weighted_amplitude == pytest.approx(0.2)

    def test_beyond_cutoff_weights_to_zero(self):
        params = MTFParams()
        # wavenumber whose perceived frequency exceeds u0 at 600 mm
        k = (params.u0_cpd + 5.0) * (180.0 / math.pi) / 600.0
        p = peak(k=k, mu=1.0)
        assert weight_amplitude(p, ViewingGeometry(600.0, 1.0), params).weighted_amplitude == 0.0

    def test_weight_never_increases_amplitude(self):
        rng = np.random.default_rng(11)
        geom = ViewingGeometry(600.0, 1.0)
        for _ in range(100):
            p = peak(k=float(rng.uniform(0.01, 5)), mu=float(rng.uniform(0.5, 50)),
                     raw=float(rng.uniform(0, 1)))
            assert weight_amplitude(p, geom).weighted_amplitude <= p.raw_amplitude + 1e-15

    def test_single_peak_at_maximum_angle(self):
        # weighted amplitude of a rho=0.9 family peaks exactly at alpha_max
        rho, k1, amax = 0.9, 2.0, 0.0
        geom = ViewingGeometry(600.0, 1.0 / k1)

        def weighted(alpha):
            k = moire_wavenumber(rho, k1, alpha, amax)
            mu = magnification(rho, alpha, amax)
            p = peak(k=k, mu=mu, raw=0.05)
            return weight_amplitude(p, geom).weighted_amplitude

        at_max = weighted(amax)
        assert weighted(amax - 2.0) < at_max
        assert weighted(amax + 2.0) < at_max

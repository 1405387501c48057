import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.lib.stride_tricks import sliding_window_view

from eepn_lab.analysis import pearson
from eepn_lab.channel import LinkParams, PhaseTrace, wiener_phase
from eepn_lab.errors import InvalidArgument, OutOfRange
from eepn_lab.models import (
    OVERSAMPLED_N_CD,
    cd_memory,
    fdpe,
    fdpe_delays,
    fdpe_distortion,
    group_delay_profile,
    idr_mean_phase,
    moving_variance,
    sota_gn_predict,
    temporal_gn_predict,
    window_n_cd,
)
from eepn_lab.rxdsp import block_centers

R = 130e9
LINK = LinkParams.from_dispersion(R, 18e3, 1550.0, lo_linewidth=210e3)


def trace(values, rate=R):
    return PhaseTrace(np.asarray(values, dtype=float), rate)


def expected_window_variance(step_var, w):
    """E[population variance] of w consecutive samples of a Gaussian random walk.

    sum_{i<j} (j-i) * step_var / w^2 = step_var * (w^2 - 1) / (6 w).
    """
    return step_var * (w * w - 1) / (6 * w)


def test_expected_window_variance_by_enumeration():
    # sum over pairs of E[(x_i - x_j)^2] / (2 w^2), x a unit-step walk
    for w in (1, 2, 5, 40):
        pairs = sum(abs(i - j) for i in range(w) for j in range(w))
        assert expected_window_variance(1.0, w) == pytest.approx(pairs / (2 * w * w))


class TestCdMemory:
    def test_zero(self):
        m = cd_memory(LinkParams(R, 0.0))
        assert m.tau_cd == 0 and m.n_cd == 0

    def test_reference_link(self):
        beta2l = 18.0 * (1550e-9) ** 2 / (2 * math.pi * 299792458.0)
        tau = 2 * math.pi * beta2l * R
        m = cd_memory(LINK)
        assert m.tau_cd == pytest.approx(tau, rel=1e-12)
        assert m.tau_cd == pytest.approx(18.7e-9, rel=0.01)
        assert abs(m.n_cd - 2437) <= 1
        assert m.n_cd == round(R * tau)

    def test_modes(self):
        assert window_n_cd(LINK, "formula") == cd_memory(LINK).n_cd
        assert window_n_cd(LINK, "oversampled") == OVERSAMPLED_N_CD == 4875
        with pytest.raises(InvalidArgument):
            window_n_cd(LINK, "other")


class TestGroupDelay:
    def test_shape(self):
        f, tg = group_delay_profile(LINK, 501)
        assert f[0] == -R / 2 and f[-1] == R / 2
        assert tg[250] == 0
        np.testing.assert_allclose(tg, -tg[::-1], rtol=1e-14)
        assert np.max(np.abs(np.diff(tg, 2))) <= 1e-14 * np.max(np.abs(tg))
        tau = cd_memory(LINK).tau_cd
        assert abs(tg[0]) == pytest.approx(tau / 2, rel=1e-12)
        assert abs(tg[-1]) == pytest.approx(tau / 2, rel=1e-12)

    def test_too_few_bins(self):
        with pytest.raises(InvalidArgument):
            group_delay_profile(LINK, 1)


class TestFdpe:
    def test_constant_and_zero(self):
        t = trace(np.full(6000, 0.4))
        assert np.all(fdpe(t, LINK, 3000, 101).phases == 0.4)
        assert np.all(fdpe(trace(np.zeros(6000)), LINK, 3000, 101).phases == 0)

    def test_delay_span(self):
        d = fdpe_delays(LINK, 501)
        n_cd = cd_memory(LINK).n_cd
        assert abs(d.max() - n_cd / 2) <= 1 and d.min() == -d.max()

    def test_linear_ramp_gives_linear_fdpe(self):
        # pick beta2_L so that R * tau_g is an integer on every bin
        n_bins = 11
        params = LinkParams(R, 200 / (2 * math.pi * R * R))  # delay = 100 symbols at f = R/2
        a = 1e-3
        t = trace(a * np.arange(1000))
        out = fdpe(t, params, 500, n_bins)
        slope = np.polyfit(out.freqs, out.phases, 1)[0]
        assert slope == pytest.approx(a * R * 2 * math.pi * params.beta2_L, rel=1e-9)
        np.testing.assert_allclose(out.phases, a * (500 + R * 2 * math.pi * params.beta2_L * out.freqs), rtol=1e-9)

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            fdpe(trace(np.zeros(2000)), LINK, 1000, 101)

    def test_rate_check(self):
        with pytest.raises(InvalidArgument):
            fdpe(trace(np.zeros(6000), rate=2 * R), LINK, 3000, 11)


class TestIdrMean:
    def test_constant(self):
        out = idr_mean_phase(trace(np.full(50, -1.5)), 10)
        np.testing.assert_allclose(out.phases, -1.5, rtol=1e-15)

    def test_zero_window_is_identity(self):
        x = np.random.default_rng(0).normal(size=30)
        out = idr_mean_phase(trace(x), 0)
        np.testing.assert_array_equal(out.phases, x)
        assert out.offset == 0

    def test_hand_value(self):
        out = idr_mean_phase(trace([0.0, 1.0, 2.0]), 2)
        assert out.phases.tolist() == [1.0] and out.offset == 1

    def test_too_short(self):
        with pytest.raises(InvalidArgument):
            idr_mean_phase(trace([0.0, 1.0]), 2)


class TestMovingVariance:
    def test_constant(self):
        assert np.all(moving_variance(trace(np.full(100, 3.0)), 7).values == 0)

    def test_hand_values(self):
        mv = moving_variance(trace([0, 1, 2, 1, 0]), 3)
        np.testing.assert_allclose(mv.values, [2 / 3, 2 / 9, 2 / 3], rtol=1e-15)
        assert mv.centers.tolist() == [1, 2, 3]

    @pytest.mark.parametrize("w", [2, 3, 10, 501, 2437])
    def test_ramp_closed_form(self, w):
        a = 0.013
        x = a * np.arange(6000) - 4.0
        mv = moving_variance(trace(x), w)
        np.testing.assert_allclose(mv.values, a * a * (w * w - 1) / 12, rtol=1e-10)
        naive = sliding_window_view(x, w).var(axis=1)
        np.testing.assert_allclose(mv.values, naive, rtol=1e-10)

    def test_window_too_long(self):
        with pytest.raises(InvalidArgument):
            moving_variance(trace(np.zeros(5)), 6)

    def test_even_window_centering(self):
        mv = moving_variance(trace(np.arange(10.0)), 4)
        assert mv.centers[0] == 1 and mv.centers[-1] == 7


class TestTemporalGn:
    def test_zero_linewidth(self):
        t = wiener_phase(0.0, 20000, R, seed=0)
        p = temporal_gn_predict(t, 2437, 500)
        assert len(p) > 0 and np.all(p.values == 0)

    def test_default_grid(self):
        n, n_cd, M = 30000, 2437, 500
        p = temporal_gn_predict(wiener_phase(210e3, n, R, 1), n_cd, M)
        np.testing.assert_array_equal(p.centers, block_centers(n, M, n_cd + 1))

    def test_block_average_matches_direct(self):
        x = np.cumsum(np.random.default_rng(3).normal(0, 0.01, 8000))
        n_cd, M = 300, 50
        p = temporal_gn_predict(trace(x), n_cd, M)
        w = n_cd + 1
        for c, v in zip(p.centers[:5], p.values[:5]):
            starts = range(c - M // 2 - (w - 1) // 2, c - M // 2 - (w - 1) // 2 + M + 1)
            ref = np.mean([np.var(x[s:s + w]) for s in starts])
            assert v == pytest.approx(ref, rel=1e-10)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**31), shift=st.floats(-1e3, 1e3), scale=st.floats(0.01, 100))
    def test_shift_and_scale(self, seed, shift, scale):
        x = np.cumsum(np.random.default_rng(seed).normal(0, 0.01, 5000))
        base = temporal_gn_predict(trace(x), 300, 100).values
        shifted = temporal_gn_predict(trace(x + shift), 300, 100).values
        scaled = temporal_gn_predict(trace(scale * x), 300, 100).values
        np.testing.assert_allclose(shifted, base, rtol=1e-9)
        np.testing.assert_allclose(scaled, scale**2 * base, rtol=1e-9)

    def test_wiener_mean_level(self):
        lw = 210e3
        n_cd = cd_memory(LINK).n_cd
        t = wiener_phase(lw, 2**20, R, seed=4)
        p = temporal_gn_predict(t, n_cd, 500)
        tau = cd_memory(LINK).tau_cd
        assert p.mean() == pytest.approx(2 * math.pi * lw * tau / 6, rel=0.10)
        # the exact discrete expectation agrees with the continuous formula to < 0.1 %
        exact = expected_window_variance(2 * math.pi * lw / R, n_cd + 1)
        assert exact == pytest.approx(2 * math.pi * lw * tau / 6, rel=1e-3)

    def test_misaligned_grid(self):
        t = wiener_phase(210e3, 10000, R, 0)
        with pytest.raises(InvalidArgument):
            temporal_gn_predict(t, 2437, 500, grid=[300])


class TestFdpeDistortion:
    def test_zero_and_constant(self):
        z = fdpe_distortion(trace(np.zeros(20000)), LINK, 500)
        assert np.all(z.values == 0)
        c = fdpe_distortion(trace(np.full(20000, 2.5)), LINK, 500)
        assert np.max(c.values) < 1e-24

    def test_matches_direct_evaluation(self):
        t = wiener_phase(210e3, 20000, R, 2)
        out = fdpe_distortion(t, LINK, 500)
        n_cd = cd_memory(LINK).n_cd
        for c, v in zip(out.centers[:3], out.values[:3]):
            bins = fdpe(t, LINK, int(c), 501).phases
            lo = c - n_cd // 2
            mean = t.phases[lo:lo + n_cd + 1].mean()
            assert v == pytest.approx(np.mean((bins - mean) ** 2), rel=1e-10)

    def test_correlates_with_temporal(self):
        M = 500
        n_cd = cd_memory(LINK).n_cd
        n = 10_000 * (M + 1) + 2 * (n_cd + 2)
        t = wiener_phase(210e3, n, R, seed=7)
        grid = block_centers(n, M, n_cd + 2)
        assert grid.size >= 10_000
        temporal = temporal_gn_predict(t, n_cd, M, grid=grid)
        freq = fdpe_distortion(t, LINK, M, grid=grid)
        assert pearson(temporal, freq).rho >= 0.99


class TestSota:
    def test_zero(self):
        s = sota_gn_predict(0.0, 10, 500)
        assert np.all(s.values == 0)
        assert np.all(sota_gn_predict(0.0, 10, 500, seed=1).values == 0)

    def test_constant_mode(self):
        s = sota_gn_predict(0.004, 7, 500)
        assert np.all(s.values == 0.004)
        assert pearson(s, np.arange(7.0)).defined is False

    def test_seeded_scatter(self):
        M = 500
        s = sota_gn_predict(0.004, 4000, M, seed=3)
        assert s.mean() == pytest.approx(0.004, rel=3 / math.sqrt(4000 * (M + 1)))
        rel_std = np.std(s.values) / 0.004
        assert rel_std == pytest.approx(1 / math.sqrt(M + 1), rel=0.05)

    def test_negative(self):
        with pytest.raises(InvalidArgument):
            sota_gn_predict(-1.0, 3, 10)

    def test_correlation_invariant_to_constant(self):
        rng = np.random.default_rng(0)
        measured = rng.normal(size=300)
        a = sota_gn_predict(1.0, 300, 10, seed=5)
        b = sota_gn_predict(7.0, 300, 10, seed=5)
        assert pearson(measured, a.values).rho == pytest.approx(pearson(measured, b.values).rho, abs=1e-12)

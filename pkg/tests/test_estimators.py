import numpy as np
import pytest
from dataclasses import replace

from leaklab import (
    ChainConfigs,
    EncryptionConfig,
    NetworkConfig,
    ObservationConfig,
    ObservationStatistic,
    SemanticLabel,
    SizeDistribution,
    TrafficProfile,
    ValidationError,
    bayes_accuracy,
    bsc,
    default_statistics,
    empirical_tv,
    estimate_C,
    estimate_delta_bar,
    estimate_rho,
    exact_bayes_error,
    exact_mi,
    exact_tv,
    identity_configs,
    plugin_mi,
    sample_channel,
)
from leaklab.estimators import default_bins, gap_estimate, mean_estimate
from leaklab.trajectory import MetricConfig

WINDOW = 10.0


def fixed_profile(rate, size, up=0.0):
    return TrafficProfile(
        kind="custom",
        burst_rate=rate,
        sizes=SizeDistribution("fixed", (float(size),)),
        up_mix=up,
        duty_on=1.0,
        duty_period=1.0,
    )


@pytest.fixture
def pair(video_label, web_label):
    return (video_label, web_label)


@pytest.fixture
def phi(metric):
    return default_statistics(metric)["clipped_total_bytes"]


class TestPairEstimate:
    def test_interval_brackets_point(self, rng):
        xs = rng.normal(3.0, 1.0, 500)
        ys = rng.normal(1.0, 1.0, 500)
        est = gap_estimate(xs, ys, (0, 500))
        assert est.lo <= est.point <= est.hi

    def test_ci_shrinks_with_n(self, rng):
        xs = rng.normal(0.0, 1.0, 40_000)
        small = mean_estimate(xs[:1000], (0, 1000))
        large = mean_estimate(xs, (0, 40_000))
        ratio = (small.hi - small.lo) / (large.hi - large.lo)
        assert ratio == pytest.approx(np.sqrt(40), rel=0.25)


class TestDeltaBar:
    def test_identical_profiles_ci_contains_zero(self, presets, pair, phi, default_configs):
        profiles = (presets["video"], presets["video"])
        est = estimate_delta_bar(pair, profiles, phi, default_configs, WINDOW, 300, seed=0)
        assert est.lo <= 0.0 <= est.hi

    def test_video_vs_web_separates_at_n_1000(self, presets, pair, phi, default_configs):
        profiles = (presets["video"], presets["web"])
        est = estimate_delta_bar(pair, profiles, phi, default_configs, WINDOW, 1000, seed=0)
        assert est.point > 0
        assert est.ci_excludes_zero()
        # self-consistency: a larger run lands inside the CI envelope
        big = estimate_delta_bar(pair, profiles, phi, default_configs, WINDOW, 4000, seed=1)
        assert est.lo - 0.02 <= big.point <= est.hi + 0.02

    def test_constructed_extremes_gap_exactly_two(self, pair, phi, default_configs):
        # one source always saturates the byte clip, the other is silent
        full = fixed_profile(rate=5.0, size=2_000_000)
        silent = fixed_profile(rate=0.0, size=100)
        est = estimate_delta_bar(
            pair, (full, silent), phi, default_configs, WINDOW, 200, seed=3
        )
        assert est.point == 2.0
        assert est.degenerate is False  # gap nonzero, variance zero

    def test_trials_floor(self, presets, pair, phi, default_configs):
        with pytest.raises(ValidationError, match="trials"):
            estimate_delta_bar(
                pair, (presets["video"], presets["web"]), phi, default_configs, WINDOW, 50, 0
            )

    def test_zero_prior_rejected(self, presets, phi, default_configs):
        bad = (SemanticLabel(0, "a", 0.0), SemanticLabel(1, "b", 1.0))
        with pytest.raises(ValidationError, match="prior"):
            estimate_delta_bar(
                bad, (presets["video"], presets["web"]), phi, default_configs, WINDOW, 200, 0
            )


class TestEstimateC:
    def test_identity_chain_zero(self, presets, video_label, metric):
        est = estimate_C(
            (video_label,),
            {"video": presets["video"]},
            metric,
            identity_configs(),
            WINDOW,
            200,
            seed=0,
        )
        assert est.point == 0.0
        assert est.hi == 0.0

    def test_block_padding_closed_form(self, video_label, metric):
        # fixed 1000 B messages, one packet each of 1040 B; with 29 B record
        # overhead and 64 B blocks every packet pads 1069 -> 1088, and the
        # only metric contribution is w_len * pad / s_cap per packet.
        profile = fixed_profile(rate=20.0, size=1000)
        configs = ChainConfigs(
            encryption=EncryptionConfig(
                record_overhead=29, block_size=64, pad_policy="pad_to_block", processing_delay=0.0
            ),
            network=NetworkConfig(base_latency=0.0, jitter=0.0, loss=0.0, reorder=0.0),
        )
        est = estimate_C(
            (video_label,), {"video": profile}, metric, configs, WINDOW, 300, seed=4
        )
        pad = 1088 - 1040
        counts = []
        from leaklab import generate_session
        from leaklab.seeding import trial_seed

        for t in range(300):
            counts.append(len(generate_session(video_label, profile, WINDOW, trial_seed(4, t))))
        expected = metric.w_len * pad / metric.s_cap * np.mean(counts)
        assert est.point == pytest.approx(expected, rel=1e-12)

    def test_jitter_monotone_nondecreasing(self, presets, video_label, metric):
        values = []
        for jitter in (0.0, 0.001, 0.004, 0.016, 0.064):
            configs = ChainConfigs(
                network=NetworkConfig(base_latency=0.0005, jitter=jitter, loss=0.0, reorder=0.0)
            )
            est = estimate_C(
                (video_label,),
                {"video": presets["video"]},
                metric,
                configs,
                WINDOW,
                150,
                seed=11,
            )
            values.append(est.point)
        assert all(b >= a for a, b in zip(values, values[1:])), values

    def test_max_over_labels(self, presets, video_label, web_label, metric, default_configs):
        single = estimate_C(
            (web_label,),
            {"web": presets["web"]},
            metric,
            default_configs,
            WINDOW,
            150,
            seed=0,
        )
        both = estimate_C(
            (video_label, web_label),
            {"video": presets["video"], "web": presets["web"]},
            metric,
            default_configs,
            WINDOW,
            150,
            seed=0,
        )
        assert both.point >= single.point


class TestEstimateRho:
    def test_lossless_observation_rho_one(self, presets, pair, phi, default_configs):
        psi = ObservationStatistic("clipped_total_bytes", s_cap=1e6)
        lossless = replace(
            default_configs,
            observation=ObservationConfig(time_granule=0.0, length_granule=0, keep_probability=1.0),
        )
        est = estimate_rho(
            pair, (presets["video"], presets["web"]), phi, psi, lossless, WINDOW, 200, seed=0
        )
        assert est.identifiable
        assert est.estimate.point == pytest.approx(1.0, abs=1e-9)
        assert est.estimate.lo <= 1.0 <= est.estimate.hi + 1e-12

    def test_sampling_halves_byte_gap(self, presets, pair, phi, default_configs):
        psi = ObservationStatistic("clipped_total_bytes", s_cap=1e6)
        sampled = replace(
            default_configs,
            observation=ObservationConfig(time_granule=0.0, keep_probability=0.5),
        )
        est = estimate_rho(
            pair, (presets["video"], presets["web"]), phi, psi, sampled, WINDOW, 400, seed=0
        )
        assert est.identifiable
        assert est.estimate.point < 1.0
        assert est.estimate.hi < 1.0
        assert est.estimate.point == pytest.approx(0.5, abs=0.05)

    def test_degenerate_observer_rho_zero(self, pair, phi, default_configs):
        # byte gap exists, direction balance is identical: the observer
        # statistic preserves none of it
        a = fixed_profile(rate=40.0, size=1200, up=0.5)
        b = fixed_profile(rate=5.0, size=300, up=0.5)
        psi = ObservationStatistic("updown_balance")
        est = estimate_rho(pair, (a, b), phi, psi, default_configs, WINDOW, 300, seed=1)
        assert est.identifiable
        assert est.numerator.lo <= 0.0
        assert est.estimate.point == pytest.approx(0.0, abs=0.02)

    def test_unidentifiable_when_network_gap_absent(self, presets, pair, phi, default_configs):
        psi = ObservationStatistic("clipped_total_bytes", s_cap=1e6)
        est = estimate_rho(
            pair,
            (presets["video"], presets["video"]),
            phi,
            psi,
            default_configs,
            WINDOW,
            200,
            seed=0,
        )
        assert not est.identifiable
        assert est.estimate is None


class TestHistogramEstimators:
    def test_empirical_tv_identical_sets(self, rng):
        xs = rng.normal(0, 1, 5000)
        assert empirical_tv(xs, xs, 16) == 0.0

    def test_empirical_tv_disjoint_supports(self, rng):
        xs = rng.uniform(0, 1, 5000)
        ys = rng.uniform(5, 6, 5000)
        assert empirical_tv(xs, ys, 8) == 1.0

    def test_empirical_tv_bernoulli_oracle(self, rng):
        # Bernoulli(0.9) vs Bernoulli(0.1) mapped to {-1, +1}: exact TV 0.8
        n = 100_000
        xs = np.where(rng.random(n) < 0.9, 1.0, -1.0)
        ys = np.where(rng.random(n) < 0.1, 1.0, -1.0)
        assert empirical_tv(xs, ys, 2) == pytest.approx(0.8, abs=0.01)

    def test_empirical_tv_validation(self, rng):
        xs = rng.normal(0, 1, 10)
        with pytest.raises(ValidationError, match="bins"):
            empirical_tv(xs, xs, 1)
        with pytest.raises(ValidationError, match="non-empty"):
            empirical_tv(xs, np.array([]), 4)

    def test_plugin_mi_independent_labels_small(self, rng):
        n = 100_000
        labels = rng.integers(0, 2, n)
        values = rng.normal(0, 1, n)
        assert plugin_mi(labels, values, default_bins(n)) <= 0.01

    def test_plugin_mi_deterministic_map_one_bit(self, rng):
        n = 20_000
        labels = rng.integers(0, 2, n)
        values = labels.astype(float)
        assert plugin_mi(labels, values, 2) == pytest.approx(1.0, abs=0.01)

    def test_plugin_mi_bsc_oracle(self, rng):
        ch = bsc(0.1)
        xs, ys = sample_channel(ch, 100_000, rng)
        mi = plugin_mi(xs, ys.astype(float), 2)
        assert mi == pytest.approx(exact_mi(ch), abs=0.01)

    def test_plugin_mi_single_label_rejected(self, rng):
        with pytest.raises(ValidationError, match="label"):
            plugin_mi(np.zeros(100, dtype=int), rng.normal(0, 1, 100), 4)

    def test_bayes_accuracy_separated(self, rng):
        n = 4000
        labels = rng.integers(0, 2, n)
        values = labels * 10.0 + rng.normal(0, 0.1, n)
        assert bayes_accuracy(labels, values, 8) == pytest.approx(1.0, abs=1e-12)

    def test_bayes_accuracy_chance_level(self, rng):
        n = 40_000
        labels = rng.integers(0, 2, n)
        values = rng.normal(0, 1, n)
        acc = bayes_accuracy(labels, values, default_bins(n))
        assert acc == pytest.approx(0.5, abs=0.02)

    def test_bayes_accuracy_bsc_oracle(self, rng):
        ch = bsc(0.1)
        xs, ys = sample_channel(ch, 100_000, rng)
        acc = bayes_accuracy(xs, ys.astype(float), 2)
        assert acc == pytest.approx(1.0 - exact_bayes_error(ch), abs=0.01)

    def test_bayes_accuracy_empty_class_rejected(self, rng):
        labels = np.array([0] * 100 + [1])
        values = rng.normal(0, 1, 101)
        with pytest.raises(ValidationError, match="split"):
            bayes_accuracy(labels, values, 4)

    def test_oracle_consistency_tv(self, rng):
        ch = bsc(0.1)
        xs, ys = sample_channel(ch, 100_000, rng)
        tv = empirical_tv(ys[xs == 0].astype(float), ys[xs == 1].astype(float), 2)
        assert tv == pytest.approx(exact_tv(ch, 0, 1), abs=0.01)

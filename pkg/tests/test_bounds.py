import math

import numpy as np
import pytest
from scipy.optimize import brentq

from leaklab import (
    BoundInputs,
    ValidationError,
    accuracy_from_tv,
    accuracy_lower_bound,
    bhattacharyya,
    binary_entropy,
    bsc,
    build_report,
    chernoff_lower_bound_from_tv,
    delta_N,
    exact_bayes_error,
    exact_chernoff,
    exact_mi,
    exact_tv,
    fano_binary_error_lower_bound,
    fano_error_lower_bound,
    multi_session_projection,
    random_channel,
    theorem_mi_lower_bound,
    tv_lower_bound_from_expectation,
)

LN2 = math.log(2.0)

# the worked parameter set: rho 0.8, gap 1.0, L*C 0.2, unit statistic bound
WORKED = BoundInputs(delta_bar=1.0, C=0.2, L_phi=1.0, rho=0.8, M=1.0)


class TestDeltaN:
    def test_worked_example(self):
        assert delta_N(1.0, 1.0, 0.2) == pytest.approx(0.6, abs=1e-15)

    def test_boundary_is_zero(self):
        assert delta_N(1.0, 2.0, 0.25) == pytest.approx(0.0, abs=1e-15)

    def test_lossless_transport(self):
        assert delta_N(1.3, 5.0, 0.0) == 1.3

    def test_validation(self):
        with pytest.raises(ValidationError):
            delta_N(-0.1, 1.0, 0.0)
        with pytest.raises(ValidationError):
            delta_N(1.0, 0.0, 0.1)


class TestTVLowerBound:
    def test_brute_force_equality_construction(self):
        # P=(0.9, 0.1), Q=(0.1, 0.9), f = (+1, -1): gap 1.6, TV 0.8, equality
        p = np.array([0.9, 0.1])
        q = np.array([0.1, 0.9])
        f = np.array([1.0, -1.0])
        gap = abs(float(f @ p) - float(f @ q))
        assert gap == pytest.approx(1.6, abs=1e-15)
        assert tv_lower_bound_from_expectation(gap, 1.0) == pytest.approx(0.8)
        assert exact_tv(bsc(0.1), 0, 1) == pytest.approx(0.8)

    def test_zero_gap(self):
        assert tv_lower_bound_from_expectation(0.0, 1.0) == 0.0

    def test_worked_pipeline_value(self):
        assert tv_lower_bound_from_expectation(0.48, 1.0) == pytest.approx(0.24)

    def test_clips_at_one(self):
        assert tv_lower_bound_from_expectation(5.0, 1.0) == 1.0


class TestTheoremMI:
    def test_equal_prior_worked_example(self):
        general, equal, ok = theorem_mi_lower_bound(WORKED)
        assert ok
        assert equal == pytest.approx(0.24**2 / (2 * LN2), abs=1e-9)
        assert general == equal  # equal priors collapse the two forms

    def test_general_prior_worked_example(self):
        inputs = BoundInputs(
            delta_bar=1.0, C=0.2, L_phi=1.0, rho=0.8, M=1.0, prior_x=0.3, prior_x2=0.7
        )
        general, _, ok = theorem_mi_lower_bound(inputs)
        assert ok
        assert general == pytest.approx((2 / LN2) * 0.21 * 0.0576, abs=1e-12)

    def test_condition_violated_vacuous(self):
        inputs = BoundInputs(delta_bar=1.0, C=0.6, L_phi=1.0, rho=0.8)
        assert theorem_mi_lower_bound(inputs) == (0.0, 0.0, False)

    def test_delta_bar_cannot_exceed_2m(self):
        with pytest.raises(ValidationError, match="2M"):
            BoundInputs(delta_bar=2.5, C=0.0, L_phi=1.0, rho=1.0, M=1.0).validate()


class TestAccuracyBounds:
    def test_worked_example_62_percent(self):
        assert accuracy_lower_bound(0.8, 1.0, 1.0, 0.2) == pytest.approx(0.62, abs=1e-12)

    def test_saturates_at_one(self):
        assert accuracy_lower_bound(1.0, 2.0, 1.0, 0.0) == 1.0  # rho*delta_N = 2

    def test_vacuous_below_condition(self):
        assert accuracy_lower_bound(0.8, 1.0, 1.0, 0.9) == 0.5

    def test_accuracy_from_tv_bsc_oracle(self):
        ch = bsc(0.1)
        assert accuracy_from_tv(0.8) == pytest.approx(0.9)
        assert accuracy_from_tv(exact_tv(ch, 0, 1)) == pytest.approx(
            1.0 - exact_bayes_error(ch), abs=1e-12
        )

    def test_accuracy_from_tv_endpoints(self):
        assert accuracy_from_tv(0.0) == 0.5
        assert accuracy_from_tv(1.0) == 1.0


class TestFano:
    def test_tor_leakage_figure(self):
        # direct evaluation: (log2(100) - 3.45 - 1)/log2(99)
        value = fano_error_lower_bound(math.log2(100), 3.45, 100)
        expected = (math.log2(100) - 3.45 - 1) / math.log2(99)
        assert value == pytest.approx(expected, abs=1e-15)
        assert value == pytest.approx(0.330930, abs=1e-6)

    def test_vacuous_when_information_plentiful(self):
        assert fano_error_lower_bound(2.0, 1.5, 10) == 0.0

    def test_zero_information_closed_form(self):
        m = 16
        value = fano_error_lower_bound(math.log2(m), 0.0, m)
        assert value == pytest.approx((math.log2(m) - 1) / math.log2(m - 1), abs=1e-12)

    def test_binary_form_required_below_three_classes(self):
        with pytest.raises(ValidationError, match="M >= 3"):
            fano_error_lower_bound(1.0, 0.1, 2)

    def test_binary_inverse_against_independent_root(self):
        # independent oracle: brentq on H2(p) - 0.9
        root = brentq(lambda p: binary_entropy(p) - 0.9, 1e-9, 0.5, xtol=1e-12)
        value = fano_binary_error_lower_bound(0.1)
        assert value == pytest.approx(root, abs=1e-9)
        assert value == pytest.approx(0.3160193, abs=1e-6)

    def test_binary_endpoints(self):
        # at I = 0 the entropy curve is flat at its maximum, so the root is
        # conditioned to about sqrt(eps); the round-trip test below is the
        # sharp check
        assert fano_binary_error_lower_bound(0.0) == pytest.approx(0.5, abs=1e-7)
        assert fano_binary_error_lower_bound(1.0) == pytest.approx(0.0, abs=1e-9)

    def test_binary_input_range(self):
        with pytest.raises(ValidationError, match="outside"):
            fano_binary_error_lower_bound(1.5)

    def test_h2_round_trip_grid(self):
        for i_bits in np.linspace(0.0, 1.0, 41):
            p = fano_binary_error_lower_bound(float(i_bits))
            assert abs(binary_entropy(p) - (1.0 - i_bits)) <= 1e-8


class TestChernoffBound:
    def test_worked_value(self):
        assert chernoff_lower_bound_from_tv(0.24) == pytest.approx(0.0296627, abs=1e-7)

    def test_zero_tv(self):
        assert chernoff_lower_bound_from_tv(0.0) == 0.0

    def test_bsc_chain_tightness_coincidence(self):
        # at TV = 0.8 the bound equals the exact BSC(0.1) Chernoff value;
        # equality is specific to this symmetric instance
        bound = chernoff_lower_bound_from_tv(0.8)
        assert bound == pytest.approx(-0.5 * math.log(0.36), abs=1e-15)
        exact = exact_chernoff(np.array([0.9, 0.1]), np.array([0.1, 0.9]))
        assert exact == pytest.approx(bound, abs=1e-9)

    def test_tv_one_sentinel(self):
        assert chernoff_lower_bound_from_tv(1.0) == math.inf


class TestBhattacharyya:
    def test_equal_distributions(self):
        p = np.array([0.25, 0.75])
        bc, b = bhattacharyya(p, p)
        assert bc == pytest.approx(1.0, abs=1e-15)
        assert b == pytest.approx(0.0, abs=1e-12)

    def test_bernoulli_example(self):
        bc, b = bhattacharyya(np.array([0.1, 0.9]), np.array([0.5, 0.5]))
        assert bc == pytest.approx(math.sqrt(0.05) + math.sqrt(0.45), abs=1e-15)
        assert b == pytest.approx(0.111572, abs=1e-6)

    def test_chain_check_with_exact_tv(self):
        p = np.array([0.1, 0.9])
        q = np.array([0.5, 0.5])
        tv = 0.5 * float(np.abs(p - q).sum())
        _, b = bhattacharyya(p, q)
        assert tv == pytest.approx(0.4)
        assert tv <= math.sqrt(1 - math.exp(-2 * b)) + 1e-12
        assert math.sqrt(1 - math.exp(-2 * b)) == pytest.approx(0.4472, abs=1e-4)

    def test_disjoint_support_sentinel(self):
        bc, b = bhattacharyya(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
        assert bc == 0.0
        assert b == math.inf


class TestBuildReport:
    def test_worked_parameter_set(self):
        report = build_report(WORKED)
        assert report.condition_v_ok
        assert report.delta_N == pytest.approx(0.6, abs=1e-15)
        assert report.tv_lb == pytest.approx(0.24, abs=1e-15)
        assert report.acc_lb == pytest.approx(0.62, abs=1e-12)
        assert report.mi_lb_equal_prior_bits == pytest.approx(0.24**2 / (2 * LN2), abs=1e-9)
        assert report.chernoff_lb_nats == pytest.approx(0.0296627, abs=1e-7)

    def test_zero_gap_fully_vacuous(self):
        report = build_report(BoundInputs(delta_bar=0.0, C=0.0, L_phi=1.0, rho=0.8))
        assert not report.condition_v_ok
        assert report.tv_lb == 0.0
        assert report.mi_lb_bits == 0.0
        assert report.mi_lb_equal_prior_bits == 0.0
        assert report.acc_lb == 0.5
        assert report.chernoff_lb_nats == 0.0

    def test_consistency_violation_flag(self):
        good = build_report(WORKED, empirical_mi_bits=0.5)
        assert good.consistency_violation is False
        bad = build_report(WORKED, empirical_mi_bits=0.001)
        assert bad.consistency_violation is True

    def test_fano_field_with_empirical_mi(self):
        report = build_report(WORKED, empirical_mi_bits=0.1)
        assert report.fano_pe_lb == pytest.approx(0.3160193, abs=1e-6)

    def test_pure_in_inputs(self):
        a = build_report(WORKED)
        b = build_report(WORKED)
        assert a == b

    def test_rows_cover_stable_fields(self):
        names = [name for name, _, _ in build_report(WORKED).rows()]
        assert names == [
            "delta_N",
            "condition_v_ok",
            "tv_lb",
            "mi_lb_bits",
            "mi_lb_equal_prior_bits",
            "acc_lb",
            "chernoff_lb_nats",
            "empirical_mi_bits",
            "fano_pe_lb",
            "consistency_violation",
        ]


class TestMonotonicity:
    def test_mi_and_acc_monotone_in_each_parameter(self):
        rhos = np.linspace(0.1, 1.0, 7)
        gaps = np.linspace(0.2, 2.0, 7)
        cs = np.linspace(0.0, 0.4, 7)
        ls = np.linspace(0.5, 3.0, 6)

        def mi(rho, gap, c, l):
            return theorem_mi_lower_bound(
                BoundInputs(delta_bar=gap, C=c, L_phi=l, rho=rho)
            )[0]

        def acc(rho, gap, c, l):
            return accuracy_lower_bound(rho, gap, l, c)

        for f in (mi, acc):
            base = dict(rho=0.8, gap=1.5, c=0.1, l=1.0)
            seq = [f(r, base["gap"], base["c"], base["l"]) for r in rhos]
            assert all(b >= a - 1e-12 for a, b in zip(seq, seq[1:]))
            seq = [f(base["rho"], g, base["c"], base["l"]) for g in gaps]
            assert all(b >= a - 1e-12 for a, b in zip(seq, seq[1:]))
            seq = [f(base["rho"], base["gap"], c, base["l"]) for c in cs]
            assert all(b <= a + 1e-12 for a, b in zip(seq, seq[1:]))
            seq = [f(base["rho"], base["gap"], base["c"], l) for l in ls]
            assert all(b <= a + 1e-12 for a, b in zip(seq, seq[1:]))


class TestMultiSessionProjection:
    def test_n1_reproduces_report(self):
        report = build_report(WORKED)
        proj = multi_session_projection(report, 1)
        assert proj.mi_accumulated_ub_bits == report.mi_lb_bits
        assert proj.error_exponent_lb_nats == report.chernoff_lb_nats
        assert not proj.vacuous

    def test_hundred_sessions_envelope(self):
        report = build_report(WORKED)
        proj = multi_session_projection(report, 100)
        assert proj.pe_envelope == pytest.approx(math.exp(-100 * report.chernoff_lb_nats))
        assert proj.pe_envelope == pytest.approx(0.05149, abs=1e-4)

    def test_envelope_nonincreasing_in_n(self):
        report = build_report(WORKED)
        values = [multi_session_projection(report, n).pe_envelope for n in range(1, 30)]
        assert all(b <= a for a, b in zip(values, values[1:]))

    def test_vacuous_report_flagged(self):
        report = build_report(BoundInputs(delta_bar=0.0, C=0.0, L_phi=1.0, rho=1.0))
        proj = multi_session_projection(report, 5)
        assert proj.vacuous
        assert proj.pe_envelope == 1.0


class TestSoundnessOnOracles:
    def test_theorem_bounds_never_exceed_exact_values(self, rng):
        # random 2-input channels dressed as a (phi, psi) pipeline with
        # C = 0 and rho = 1: every reported bound must hold exactly
        for _ in range(1000):
            ch = random_channel(rng, n_inputs=2)
            tv = exact_tv(ch, 0, 1)
            mi = exact_mi(ch)
            f = rng.uniform(-1.0, 1.0, ch.n_outputs)
            gap = abs(float(f @ ch.conditionals[0]) - float(f @ ch.conditionals[1]))
            inputs = BoundInputs(
                delta_bar=gap,
                C=0.0,
                L_phi=1.0,
                rho=1.0,
                M=1.0,
                prior_x=float(ch.priors[0]),
                prior_x2=float(ch.priors[1]),
            )
            report = build_report(inputs)
            assert report.tv_lb <= tv + 1e-9
            assert report.mi_lb_bits <= mi + 1e-9

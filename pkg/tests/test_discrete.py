import math

import numpy as np
import pytest

from leaklab import (
    DiscreteChannel,
    EnumerationCapError,
    ValidationError,
    bsc,
    exact_bayes_error,
    exact_chernoff,
    exact_mi,
    exact_tv,
    product_channel,
    random_channel,
)


class TestConstruction:
    def test_priors_must_sum_to_one(self):
        with pytest.raises(ValidationError, match="priors"):
            DiscreteChannel(np.array([0.6, 0.5]), np.array([[1.0, 0.0], [0.0, 1.0]]))

    def test_rows_must_be_stochastic(self):
        with pytest.raises(ValidationError, match="row"):
            DiscreteChannel(np.array([0.5, 0.5]), np.array([[0.9, 0.0], [0.5, 0.5]]))

    def test_text_round_trip(self):
        ch = bsc(0.1, priors=(0.3, 0.7))
        again = DiscreteChannel.from_text(ch.to_text())
        assert np.array_equal(again.priors, ch.priors)
        assert np.array_equal(again.conditionals, ch.conditionals)

    def test_text_with_comments(self):
        text = """
        # binary symmetric channel
        0.5 0.5      # priors
        0.9 0.1
        0.1 0.9
        """
        ch = DiscreteChannel.from_text(text)
        assert exact_tv(ch, 0, 1) == pytest.approx(0.8)

    def test_malformed_text(self):
        with pytest.raises(ValidationError, match="priors line"):
            DiscreteChannel.from_text("0.5 0.5\n0.9 0.1\n")


class TestExactTV:
    def test_identical_rows_zero(self):
        ch = DiscreteChannel(np.array([0.5, 0.5]), np.array([[0.3, 0.7], [0.3, 0.7]]))
        assert exact_tv(ch, 0, 1) == 0.0

    def test_bsc_point_one(self):
        assert exact_tv(bsc(0.1), 0, 1) == pytest.approx(0.8)

    def test_deterministic_distinct_rows(self):
        ch = DiscreteChannel(np.array([0.5, 0.5]), np.array([[1.0, 0.0], [0.0, 1.0]]))
        assert exact_tv(ch, 0, 1) == 1.0

    def test_same_index_rejected(self):
        with pytest.raises(ValidationError):
            exact_tv(bsc(0.1), 1, 1)

    def test_bad_index(self):
        with pytest.raises(ValidationError, match="index"):
            exact_tv(bsc(0.1), 0, 2)


class TestExactMI:
    def test_identical_rows_zero(self):
        ch = DiscreteChannel(np.array([0.4, 0.6]), np.array([[0.3, 0.7], [0.3, 0.7]]))
        assert exact_mi(ch) == pytest.approx(0.0, abs=1e-15)

    def test_bsc_closed_form(self):
        h2 = -(0.1 * math.log2(0.1) + 0.9 * math.log2(0.9))
        assert exact_mi(bsc(0.1)) == pytest.approx(1.0 - h2, abs=1e-12)

    def test_perfect_channel_log2k(self):
        for k in (2, 3, 5):
            ch = DiscreteChannel(np.full(k, 1.0 / k), np.eye(k))
            assert exact_mi(ch) == pytest.approx(math.log2(k), abs=1e-12)


class TestExactBayes:
    def test_bsc(self):
        assert exact_bayes_error(bsc(0.1)) == pytest.approx(0.1, abs=1e-15)

    def test_perfect_channel(self):
        ch = DiscreteChannel(np.array([0.5, 0.5]), np.eye(2))
        assert exact_bayes_error(ch) == 0.0

    def test_identical_rows_guess_prior_mode(self):
        ch = DiscreteChannel(np.array([0.3, 0.7]), np.array([[0.2, 0.8], [0.2, 0.8]]))
        assert exact_bayes_error(ch) == pytest.approx(0.3)

    def test_equal_prior_identity_with_tv(self, rng):
        # exact_bayes_error = (1 - TV)/2 on 1000 random 2-input channels
        for _ in range(1000):
            ch = random_channel(rng, n_inputs=2, equal_priors=True)
            pe = exact_bayes_error(ch)
            tv = exact_tv(ch, 0, 1)
            assert pe == pytest.approx((1.0 - tv) / 2.0, abs=1e-12)


class TestChernoff:
    def test_equal_distributions_zero(self):
        p = np.array([0.2, 0.3, 0.5])
        assert exact_chernoff(p, p) == pytest.approx(0.0, abs=1e-9)

    def test_bsc_rows_symmetric_case(self):
        p = np.array([0.9, 0.1])
        q = np.array([0.1, 0.9])
        # symmetric pair: minimum at 1/2 with value 2 sqrt(0.09) = 0.6
        assert exact_chernoff(p, q) == pytest.approx(-math.log(0.6), abs=1e-9)

    def test_dominates_bhattacharyya(self):
        p = np.array([0.1, 0.9])
        q = np.array([0.5, 0.5])
        b = -math.log(math.sqrt(0.05) + math.sqrt(0.45))
        assert exact_chernoff(p, q) >= b - 1e-9
        assert b == pytest.approx(0.11157, abs=1e-5)

    def test_disjoint_supports_infinite(self):
        p = np.array([1.0, 0.0])
        q = np.array([0.0, 1.0])
        assert exact_chernoff(p, q) == math.inf

    def test_asymmetric_pair_grid_oracle(self, rng):
        # golden-section result matches a dense-grid scan
        for _ in range(20):
            p = rng.dirichlet(np.ones(5))
            q = rng.dirichlet(np.ones(5))
            c = exact_chernoff(p, q)
            lams = np.linspace(0, 1, 20001)
            dense = -np.log(
                np.min([(p**l * q ** (1 - l)).sum() for l in lams])
            )
            assert c == pytest.approx(dense, abs=1e-6)


class TestProductChannel:
    def test_n1_identity(self):
        ch = bsc(0.1)
        prod = product_channel(ch, 1)
        assert np.array_equal(prod.conditionals, ch.conditionals)

    def test_bsc_three_sessions_bayes_error(self):
        prod = product_channel(bsc(0.1), 3)
        assert exact_bayes_error(prod) == pytest.approx(0.028, abs=1e-12)

    def test_mi_nondecreasing_in_n(self):
        ch = bsc(0.1)
        values = [exact_mi(product_channel(ch, n)) for n in range(1, 7)]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

    def test_cap_enforced(self):
        with pytest.raises(EnumerationCapError, match="cap"):
            product_channel(bsc(0.1), 21)

    def test_rows_remain_stochastic(self):
        prod = product_channel(bsc(0.25), 5)
        assert np.allclose(prod.conditionals.sum(axis=1), 1.0)

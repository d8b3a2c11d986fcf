import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from modsel.cv_bayes import (CvConfig, NormalLocationProblem, cvbf_ps, log_marginal_normal,
                             loo_identity_check, loo_log_predictive, mukhopadhyay_probe,
                             normal_location_log_bf12, normal_location_log_cvbf12, posterior)
from modsel.stone import FixedMean, StoneDataset, generate


class TestPseudoCvbf:
    def test_k_equals_r(self):
        ds = generate(4, 3, FixedMean(np.ones(4)), 0)
        assert cvbf_ps(ds, 3) == 0.0

    def test_hand_example(self):
        assert cvbf_ps(StoneDataset([[1.0, 3.0]]), 1) == pytest.approx(3.153427, abs=1e-6)

    def test_strong_signal_positive(self):
        law = FixedMean(np.full(100, 5.0))
        hits = sum(cvbf_ps(generate(100, 20, law, s), 2) > 0 for s in range(100))
        assert hits >= 99

    def test_null_median_grows_with_k(self):
        # under the global null a smaller training fraction gives a more negative score
        from modsel.stone import GlobalNull
        meds = [np.median([cvbf_ps(generate(500, 200, GlobalNull(), s), k) for s in range(40)])
                for k in (20, 100, 180)]
        assert meds[0] < meds[1] < meds[2] < 0

    def test_k_range(self):
        with pytest.raises(ValueError):
            cvbf_ps(StoneDataset([[1.0, 3.0]]), 0)
        with pytest.raises(ValueError):
            CvConfig(3, 2)
        assert CvConfig(1, 4).c_ratio == 0.25


class TestLooIdentity:
    def test_constant(self):
        assert loo_identity_check(np.full(5, 2.5)) == (0.0, 0.0)

    def test_hand(self):
        lhs, rhs = loo_identity_check([0.0, 1.0, 2.0])
        assert lhs == pytest.approx(4.5) and rhs == pytest.approx(4.5)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=60))
    def test_identity(self, xs):
        lhs, rhs = loo_identity_check(xs)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)

    def test_too_short(self):
        with pytest.raises(ValueError):
            loo_identity_check([1.0])


class TestNormalLocation:
    def test_posterior_tiny_prior_variance(self):
        m, v = posterior(sum_x=10.0, n=1, prior_mean=0.3, prior_var=1e-12)
        assert m == pytest.approx(0.3, abs=1e-9) and v == pytest.approx(1e-12, rel=1e-6)

    def test_loo_null(self):
        prob = NormalLocationProblem(np.zeros(2))
        assert loo_log_predictive(prob, "M1_null") == pytest.approx(-0.918939, abs=1e-6)

    def test_loo_prior_quadrature(self):
        x = np.array([0.4, -1.2, 2.0, 0.3])
        prob = NormalLocationProblem(x, prior_mean=0.5, prior_var=2.0)
        vals = []
        for i in range(x.size):
            m, v = posterior(x.sum() - x[i], x.size - 1, 0.5, 2.0)
            f = lambda th: stats.norm.pdf(x[i], th, 1) * stats.norm.pdf(th, m, math.sqrt(v))
            vals.append(math.log(integrate.quad(f, -np.inf, np.inf, epsabs=1e-13)[0]))
        assert loo_log_predictive(prob, "M2_prior") == pytest.approx(np.mean(vals), abs=1e-6)

    def test_loo_translation(self):
        x = np.array([0.4, -1.2, 2.0, 0.3])
        a = loo_log_predictive(NormalLocationProblem(x, 0.2, 1.5), "M2_prior")
        b = loo_log_predictive(NormalLocationProblem(x + 3.7, 3.9, 1.5), "M2_prior")
        assert a == pytest.approx(b, abs=1e-12)

    def test_unknown_model(self):
        with pytest.raises(ValueError):
            loo_log_predictive(NormalLocationProblem(np.zeros(3)), "M3")

    def test_bf_zero_data_favors_null(self):
        assert normal_location_log_bf12(NormalLocationProblem(np.zeros(10))) > 0

    def test_single_observation_marginal(self):
        x1, mu0, s2 = 0.8, -0.3, 2.5
        f = lambda th: stats.norm.pdf(x1, th, 1) * stats.norm.pdf(th, mu0, math.sqrt(s2))
        quad = integrate.quad(f, -np.inf, np.inf, epsabs=1e-14)[0]
        assert math.exp(log_marginal_normal([x1], mu0, s2)) == pytest.approx(quad, rel=1e-8)
        assert math.exp(log_marginal_normal([x1], mu0, s2)) == pytest.approx(
            stats.norm.pdf(x1, mu0, math.sqrt(1 + s2)), rel=1e-12)

    def test_models_coincide(self):
        x = np.random.default_rng(1).standard_normal(20)
        assert normal_location_log_bf12(NormalLocationProblem(x, 0.0, 1e-12)) == pytest.approx(0.0, abs=1e-9)

    def test_cvbf_training_split(self):
        x = np.random.default_rng(2).standard_normal(12)
        prob = NormalLocationProblem(x, 0.0, 1.0)
        # chain rule: log BF(x) = log BF(x_train) + log CVBF(x_test | x_train)
        train = NormalLocationProblem(x[:4], 0.0, 1.0)
        assert normal_location_log_cvbf12(prob, 4) == pytest.approx(
            normal_location_log_bf12(prob) - normal_location_log_bf12(train), abs=1e-10)
        with pytest.raises(ValueError):
            normal_location_log_cvbf12(prob, 12)

    def test_no_update_limit(self):
        # a prior too tight for one observation to move: CVBF equals the BF of the remaining data
        x = np.random.default_rng(3).standard_normal(15) + 0.4
        prob = NormalLocationProblem(x, 0.5, 1e-9)
        rest = NormalLocationProblem(x[1:], 0.5, 1e-9)
        assert normal_location_log_cvbf12(prob, 1) == pytest.approx(normal_location_log_bf12(rest), abs=1e-7)

    def test_mukhopadhyay_probe_fields(self):
        out = mukhopadhyay_probe(NormalLocationProblem(np.random.default_rng(0).standard_normal(30)))
        assert set(out) == {"loo_total", "reduced_form", "discrepancy"}
        assert out["discrepancy"] == pytest.approx(out["loo_total"] - out["reduced_form"])

"""Bayesian and frequentist model selection, cross-validatory Bayes factors,
two-groups multiple testing and the Lasso, with a seeded simulation lab."""
from ._accel import USE_NUMBA
from .bayes_factors import (ModelScore, aic, aic_test_simple_normal, bic, log_b_stone,
                            log_bf21_from_stats, log_bf21_stone, log_posterior_odds21,
                            stone_bic_log_bf21, stone_score)
from .cv_bayes import (CvConfig, NormalLocationProblem, cvbf_ps, loo_identity_check,
                       loo_log_predictive, normal_location_log_bf12, normal_location_log_cvbf12)
from .lasso import LassoFit, LassoProblem, bickel_penalty, fit_lasso, kkt_violation, soft_threshold
from .multitest import (TestOutcome, TwoGroupsModel, bayes_oracle_rule, bayes_risk, bh_procedure,
                        eb_estimate_eps, p_values, sample_two_groups)
from .peb import PebState, PosteriorOverQ, peb_lambda, peb_scan, posterior_over_q, select_q
from .priors import (GaussianMixturePrior, PointMass, SmoothCauchy, Tabulated, TruncatedZS,
                     ZellnerSiow, prior_density, zs_closed_form)
from .simlab import ExperimentConfig, TrialTable, load_config, run_experiment, summarize
from .stone import FixedMean, GlobalNull, HierarchicalP2, StoneDataset, generate, suff_stats

__version__ = "0.1.0"

"""Cross-validatory Bayes factors.

Two settings: the pseudo-CVBF closed form for the two-way layout, and the
normal location problem ``x_i ~ N(theta, 1)`` with ``M1: theta = 0`` against
``M2: theta ~ N(mu0, s0^2)``, where everything is conjugate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .stone import StoneDataset, subset_replicates, suff_stats

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class CvConfig:
    k: int
    r: int

    def __post_init__(self):
        if not 1 <= self.k <= self.r:
            raise ValueError(f"need 1 <= k <= r, got k={self.k}, r={self.r}")

    @property
    def c_ratio(self) -> float:
        return self.k / self.r


def cvbf_ps(ds: StoneDataset, k: int) -> float:
    """``p/2 [(r C_p - k C'_p) - log(r/k)]`` with ``C'_p`` from the first ``k`` replicates."""
    CvConfig(k, ds.r)
    c_full = suff_stats(ds).C_p
    c_train = suff_stats(subset_replicates(ds, k)).C_p
    return 0.5 * ds.p * ((ds.r * c_full - k * c_train) - math.log(ds.r / k))


def loo_identity_check(x) -> tuple[float, float]:
    """Both sides of ``sum (x_j - xbar_{-j})^2 = (n/(n-1))^2 sum (x_j - xbar)^2``."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 2:
        raise ValueError("need at least two observations")
    loo_means = (x.sum() - x) / (n - 1)
    lhs = float(np.sum((x - loo_means) ** 2))
    rhs = float(np.sum((x - x.mean()) ** 2) * (n / (n - 1)) ** 2)
    return lhs, rhs


# ---------------------------------------------------------------------------
# normal location problem
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NormalLocationProblem:
    x: np.ndarray
    prior_mean: float = 0.0
    prior_var: float = 1.0

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 1 or x.size < 2:
            raise ValueError("x must be a vector with at least two entries")
        if not self.prior_var > 0:
            raise ValueError("prior_var must be positive")
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return self.x.size


def posterior(sum_x, n, prior_mean, prior_var):
    """Conjugate posterior mean and variance of ``theta`` after ``n`` unit-variance draws."""
    prec = 1.0 / prior_var + n
    return (prior_mean / prior_var + sum_x) / prec, 1.0 / prec


def log_marginal_null(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(-0.5 * x.size * LOG_2PI - 0.5 * x @ x)


def log_marginal_normal(x, prior_mean: float, prior_var: float) -> float:
    """``log int prod N(x_i; theta, 1) N(theta; prior_mean, prior_var) dtheta``."""
    x = np.asarray(x, dtype=float)
    n = x.size
    d = x - prior_mean
    s = d.sum()
    return float(-0.5 * n * LOG_2PI - 0.5 * math.log1p(n * prior_var)
                 - 0.5 * (d @ d - prior_var * s * s / (1.0 + n * prior_var)))


def _log_normal_pdf(x, mean, var):
    return -0.5 * (LOG_2PI + np.log(var) + (x - mean) ** 2 / var)


def loo_log_predictive(prob: NormalLocationProblem, model: Literal["M1_null", "M2_prior"]) -> float:
    """Mean leave-one-out log predictive density ``(1/n) sum log p(x_i | x_-i, M)``."""
    x = prob.x
    if model == "M1_null":
        return float(np.mean(_log_normal_pdf(x, 0.0, 1.0)))
    if model == "M2_prior":
        m, v = posterior(x.sum() - x, prob.n - 1, prob.prior_mean, prob.prior_var)
        return float(np.mean(_log_normal_pdf(x, m, 1.0 + v)))
    raise ValueError(f"unknown model {model!r}")


def normal_location_log_bf12(prob: NormalLocationProblem) -> float:
    return log_marginal_null(prob.x) - log_marginal_normal(prob.x, prob.prior_mean, prob.prior_var)


def normal_location_log_cvbf12(prob: NormalLocationProblem, k: int) -> float:
    """Log BF12 of ``x[k:]`` with the posterior from ``x[:k]`` serving as the M2 prior."""
    if not 1 <= k < prob.n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={prob.n}")
    train, test = prob.x[:k], prob.x[k:]
    m, v = posterior(train.sum(), k, prob.prior_mean, prob.prior_var)
    return log_marginal_null(test) - log_marginal_normal(test, m, v)


def mukhopadhyay_probe(prob: NormalLocationProblem) -> dict:
    """Compare ``n`` times the LOO predictive under M2 with ``-SSD/2 - (n-1)/2 log 2pi - log(n)/2``.

    Reported only; the two sides need not agree for a proper normal prior.
    """
    x = prob.x
    n = prob.n
    ssd = float(np.sum((x - x.mean()) ** 2))
    total = n * loo_log_predictive(prob, "M2_prior")
    reduced = -0.5 * ssd - 0.5 * (n - 1) * LOG_2PI - 0.5 * math.log(n)
    return {"loo_total": total, "reduced_form": reduced, "discrepancy": total - reduced}

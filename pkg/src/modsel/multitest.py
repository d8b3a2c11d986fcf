"""Two-groups multiple testing with a centred normal scale alternative.

Test statistics are ``N(0, s0^2)`` under the null and ``N(0, u s0^2)`` under
the alternative; a fraction ``eps`` are alternatives. Losses are additive with
a false rejection costing ``delta`` and a missed alternative costing 1.
Hypothesis indices are 0-based.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, stats

from .kernels import mixture_loglik_grid, step_up_count


@dataclass(frozen=True)
class TwoGroupsModel:
    eps: float
    u: float
    delta: float = 1.0
    null_var: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError(f"eps must lie in [0, 1], got {self.eps}")
        if not (self.u > 0 and self.delta > 0 and self.null_var > 0):
            raise ValueError("u, delta and null_var must be positive")

    @property
    def null_sd(self) -> float:
        return math.sqrt(self.null_var)


@dataclass(frozen=True, eq=False)
class TestOutcome:
    z: np.ndarray
    labels: np.ndarray
    rejections: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.intp))

    __test__ = False  # not a pytest class

    def with_rejections(self, rejections) -> "TestOutcome":
        return TestOutcome(self.z, self.labels, np.asarray(rejections, dtype=np.intp))

    @property
    def false_discoveries(self) -> int:
        return int(np.count_nonzero(~self.labels[self.rejections]))

    @property
    def false_nondiscoveries(self) -> int:
        rejected = np.zeros(self.z.size, dtype=bool)
        rejected[self.rejections] = True
        return int(np.count_nonzero(self.labels & ~rejected))

    def loss(self, delta: float) -> float:
        return delta * self.false_discoveries + self.false_nondiscoveries


def sample_two_groups(m: int, model: TwoGroupsModel, seed) -> TestOutcome:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    labels = rng.uniform(size=m) < model.eps
    sd = np.where(labels, math.sqrt(model.u), 1.0) * model.null_sd
    return TestOutcome(z=sd * rng.standard_normal(m), labels=labels)


def p_values(z, null_var: float = 1.0) -> np.ndarray:
    """Two-sided p-values ``2 (1 - Phi(|z| / s0))``."""
    return 2.0 * stats.norm.sf(np.abs(np.asarray(z, dtype=float)) / math.sqrt(null_var))


def bh_procedure(pvals, alpha: float) -> np.ndarray:
    """Benjamini-Hochberg step-up; returns sorted indices of the rejected hypotheses."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    pvals = np.asarray(pvals, dtype=float)
    if np.any((pvals < 0) | (pvals > 1)):
        raise ValueError("p-values must lie in [0, 1]")
    k = step_up_count(np.sort(pvals), alpha)
    if k == 0:
        return np.empty(0, dtype=np.intp)
    cutoff = np.sort(pvals)[k - 1]
    return np.nonzero(pvals <= cutoff)[0]


def bayes_oracle_rule(model: TwoGroupsModel) -> float:
    """Threshold ``c`` of the Bayes rule: reject iff ``|z| >= c``.

    The likelihood-ratio rule ``f_A/f_0 >= delta (1-eps)/eps`` becomes
    ``z^2 >= 2u/(u-1) s0^2 [log(delta (1-eps)/eps) + log(u)/2]``.
    """
    if model.eps == 0.0:
        return math.inf
    if model.eps == 1.0:
        return 0.0
    if model.u <= 1.0:
        raise ValueError("the scale alternative needs u > 1 to separate from the null")
    bracket = math.log(model.delta * (1.0 - model.eps) / model.eps) + 0.5 * math.log(model.u)
    if bracket <= 0:
        return 0.0
    return math.sqrt(2.0 * model.u / (model.u - 1.0) * model.null_var * bracket)


def bayes_risk(model: TwoGroupsModel, threshold: float, m: int = 1) -> float:
    """Expected total loss of the rule ``|z| >= threshold`` over ``m`` tests."""
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    s0 = model.null_sd
    type1 = 2.0 * stats.norm.sf(threshold / s0)
    power = 2.0 * stats.norm.sf(threshold / (s0 * math.sqrt(model.u)))
    per_test = model.delta * (1.0 - model.eps) * type1 + model.eps * (1.0 - power)
    return m * per_test


def oracle_test(outcome: TestOutcome, model: TwoGroupsModel) -> TestOutcome:
    c = bayes_oracle_rule(model)
    return outcome.with_rejections(np.nonzero(np.abs(outcome.z) >= c)[0])


def bh_test(outcome: TestOutcome, model: TwoGroupsModel, alpha: float) -> TestOutcome:
    return outcome.with_rejections(bh_procedure(p_values(outcome.z, model.null_var), alpha))


# ---------------------------------------------------------------------------
# empirical Bayes estimation of the alternative proportion
# ---------------------------------------------------------------------------

def likelihood_ratio(z, null_var: float, u: float) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return np.exp(0.5 * z * z / null_var * (1.0 - 1.0 / u)) / math.sqrt(u)


def eps_objective(z, null_var: float, u: float, prior=None):
    """Return ``f(e)``: log-likelihood of the proportion (plus log Beta prior), up to constants."""
    lr1 = likelihood_ratio(z, null_var, u) - 1.0

    def f(e):
        e = np.atleast_1d(np.asarray(e, dtype=float))
        val = mixture_loglik_grid(lr1, e)
        if prior is not None:
            a, b = prior
            with np.errstate(divide="ignore", invalid="ignore"):
                lp = (a - 1.0) * np.log(e) + (b - 1.0) * np.log1p(-e)
            lp = np.where(((e == 0) & (a == 1)) | ((e == 1) & (b == 1)), 0.0, lp)
            val = val + np.nan_to_num(lp, nan=-np.inf)
        return val
    return f, lr1


def eb_estimate_eps(z, null_var: float, u: float, prior: tuple[float, float] | None = None,
                    grid_size: int = 1000) -> float:
    """Type-II maximum likelihood (or Beta posterior mode) of the alternative proportion.

    A ``grid_size`` grid on [0, 1] brackets the maximum, bounded Brent search
    refines it. Endpoints are returned exactly when the score does not increase
    into the interior, which is how the unpenalized estimate lands on 0 or 1.
    """
    if u == 1.0:
        raise ValueError("f_A equals f_0 when u == 1: the proportion is not identifiable")
    if prior is not None and min(prior) <= 0:
        raise ValueError("Beta prior parameters must be positive")
    f, lr1 = eps_objective(z, null_var, u, prior)
    grid = np.linspace(0.0, 1.0, grid_size)
    vals = f(grid)
    i = int(np.argmax(vals))
    # boundary: check the one-sided derivative of the log-likelihood
    if i == 0 and (prior is None or prior[0] <= 1):
        slope = lr1.sum() + (0.0 if prior is None else -(prior[1] - 1.0))
        if prior is not None and prior[0] < 1:
            return 0.0
        if slope <= 0:
            return 0.0
    if i == grid_size - 1 and (prior is None or prior[1] <= 1):
        with np.errstate(divide="ignore"):
            slope = np.sum(lr1 / (1.0 + lr1)) + (0.0 if prior is None else prior[0] - 1.0)
        if prior is not None and prior[1] < 1:
            return 1.0
        if slope >= 0:
            return 1.0
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid_size - 1)]
    res = optimize.minimize_scalar(lambda e: -f(e)[0], bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12})
    best = float(res.x)
    return best if f(best)[0] >= vals[i] else float(grid[i])

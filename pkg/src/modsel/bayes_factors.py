"""Log Bayes factors for the two-way normal-means model, BIC/AIC scores and the AIC test."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .priors import MixingMeasure, PointMass, _breaks, log_integrate, measure_label
from .stone import StoneDataset, suff_stats


@dataclass(frozen=True)
class ModelScore:
    kind: Literal["LogBF21", "BIC", "AIC"]
    value: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"{self.kind} score is not finite")


def log_b_stone(t, S: float, p: int, r: int):
    """Conditional log Bayes factor at fixed precision ``t``.

    Group means are ``N(0, 1/r + 1/t)`` under the alternative and ``N(0, 1/r)``
    under the null; only ``S`` and ``p`` enter.
    """
    t = np.asarray(t, dtype=float)
    return 0.5 * p * (np.log(t) - np.log(t + r)) + 0.5 * S * r * r / (t + r)


def log_bf21_from_stats(S: float, p: int, r: int, m: MixingMeasure) -> float:
    if isinstance(m, PointMass):
        return float(log_b_stone(m.t0, S, p, r))

    def log_f(t):
        return log_b_stone(t, S, p, r) + m.log_density(t)

    return float(log_integrate(log_f, m.upper, breaks=_breaks(m)))


def log_bf21_stone(ds: StoneDataset, m: MixingMeasure) -> float:
    """``log int B(t) g(t) dt`` for ``M2: mu free`` against ``M1: mu = 0``."""
    st = suff_stats(ds)
    return log_bf21_from_stats(st.S, ds.p, ds.r, m)


def stone_score(ds: StoneDataset, m: MixingMeasure) -> ModelScore:
    return ModelScore("LogBF21", log_bf21_stone(ds, m),
                      {"p": ds.p, "r": ds.r, "n": ds.p * ds.r, "prior": measure_label(m)})


def log_posterior_odds21(log_bf21: float, log_prior_odds: float = 0.0) -> float:
    """Posterior log odds of M2 over M1; equal prior weights by default."""
    return log_bf21 + log_prior_odds


def bic(loglik_max: float, dim: int, n: int) -> float:
    """``loglik_max - dim/2 * log(n)`` (larger is better)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return loglik_max - 0.5 * dim * math.log(n)


def aic(loglik_max: float, dim: int) -> float:
    """``2 loglik_max - 2 dim`` (larger is better)."""
    return 2.0 * loglik_max - 2.0 * dim


def stone_bic_log_bf21(ds: StoneDataset, n: int | None = None) -> float:
    """BIC difference ``BIC(M2) - BIC(M1)`` as an approximation to log BF21.

    The maximized log-likelihood ratio is ``r S / 2``; ``n`` defaults to ``p r``.
    """
    n = ds.p * ds.r if n is None else n
    return bic(0.5 * ds.r * suff_stats(ds).S, ds.p, n) - bic(0.0, 0, n)


def aic_test_simple_normal(xbar, n):
    """AIC choice between ``mu = 0`` (M1) and free ``mu`` (M2) for unit-variance data.

    Picks M2 iff ``n xbar^2 > 2``; ties stay with M1. Accepts arrays and then
    returns an array of labels.
    """
    if np.any(np.asarray(n) < 1):
        raise ValueError("n must be >= 1")
    stat = np.asarray(n) * np.square(xbar)
    out = np.where(stat > 2.0, "M2", "M1")
    return str(out) if out.ndim == 0 else out

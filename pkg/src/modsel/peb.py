"""Empirical-Bayes selection among nested normal-means models, plus predictive selection rules.

Model ``M_q`` keeps the first ``q`` coordinates of ``y`` as signal. Model
indices ``q`` are 1-based (``q`` is a dimension); variable indices returned by
:func:`median_model` are 0-based array positions.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp


@dataclass(frozen=True, eq=False)
class PebState:
    y: np.ndarray
    ss: np.ndarray
    chat: np.ndarray
    lam: np.ndarray

    @property
    def p(self) -> int:
        return self.y.size


@dataclass(frozen=True, eq=False)
class PosteriorOverQ:
    """Probabilities over ``q = 1..p`` (``probs[0]`` is ``q = 1``)."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0 or np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise ValueError("probs must be a non-empty vector of nonnegative numbers")
        if abs(probs.sum() - 1.0) > 1e-10:
            raise ValueError(f"probs must sum to 1, got {probs.sum()!r}")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, p: int) -> "PosteriorOverQ":
        return cls(np.full(p, 1.0 / p))


def peb_lambda(ss, q, c):
    """Selection score ``c/(1+c) SS_q - q log(1+c)`` at a fixed ``c >= 0``."""
    c = np.asarray(c, dtype=float)
    return c / (1.0 + c) * ss - q * np.log1p(c)


def plug_in_lambda(ss, q):
    """``SS_q - q (1 + log+(SS_q / q))``."""
    ss = np.asarray(ss, dtype=float)
    with np.errstate(divide="ignore"):
        log_plus = np.maximum(np.log(ss / q), 0.0)
    return ss - q * (1.0 + log_plus)


def peb_scan(y) -> PebState:
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("y must be a non-empty vector")
    q = np.arange(1, y.size + 1)
    ss = np.cumsum(y * y)
    chat = np.maximum(ss / q - 1.0, 0.0)
    return PebState(y=y, ss=ss, chat=chat, lam=plug_in_lambda(ss, q))


def select_q(state: PebState) -> int:
    """Maximizer of the plug-in score; ``np.argmax`` keeps the smallest ``q`` on ties."""
    return int(np.argmax(state.lam)) + 1


def posterior_over_q(y, c: float, prior_q: PosteriorOverQ | None = None) -> PosteriorOverQ:
    """Posterior over ``q`` at a fixed ``c``:
    ``prior(q) (1+c)^(-q/2) exp(c SS_q / (2 (1+c)))``, normalized."""
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    y = np.asarray(y, dtype=float)
    if prior_q is None:
        prior_q = PosteriorOverQ.uniform(y.size)
    if prior_q.probs.size != y.size:
        raise ValueError("prior length does not match y")
    q = np.arange(1, y.size + 1)
    ss = np.cumsum(y * y)
    with np.errstate(divide="ignore"):
        logp = np.log(prior_q.probs) - 0.5 * q * math.log1p(c) + c * ss / (2.0 * (1.0 + c))
    probs = np.exp(logp - logsumexp(logp))
    return PosteriorOverQ(probs / probs.sum())


def alpha_quantile_model(post: PosteriorOverQ, alpha: float) -> int:
    """The ``q`` with ``P(q' >= q+1) <= alpha < P(q' >= q)``."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    tail = np.cumsum(post.probs[::-1])[::-1]
    tail[0] = 1.0
    return int(np.nonzero(tail > alpha)[0][-1]) + 1


def predictive_quantile_rule(c: float, r: int, post: PosteriorOverQ) -> int:
    """Bayes predictive choice: smallest model if ``r c <= 1``, the ``(c-1)/(2c)`` quantile model if ``c > 1``."""
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    if r * c <= 1:
        return 1
    if c > 1:
        return alpha_quantile_model(post, (c - 1.0) / (2.0 * c))
    warnings.warn(f"r*c > 1 with c <= 1 (c={c}, r={r}) is not covered by the rule; returning q=1",
                  stacklevel=2)
    return 1


def median_model(probs) -> np.ndarray:
    """0-based indices of variables with inclusion probability >= 1/2."""
    probs = np.asarray(probs, dtype=float)
    if np.any((probs < 0) | (probs > 1)):
        raise ValueError("inclusion probabilities must lie in [0, 1]")
    return np.nonzero(probs >= 0.5)[0]


def model_average_prediction(weights, predictions) -> float:
    w = weights.probs if isinstance(weights, PosteriorOverQ) else np.asarray(weights, dtype=float)
    predictions = np.asarray(predictions, dtype=float)
    if w.shape != predictions.shape:
        raise ValueError("weights and predictions differ in length")
    return float(w @ predictions)

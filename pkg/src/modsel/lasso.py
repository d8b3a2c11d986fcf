"""Lasso by cyclic coordinate descent on the unscaled objective

    sum_i (y_i - b_1 - sum_{j>=2} x_ij b_j)^2 + r sum_{j>=2} |b_j|

Column 0 of the design is the all-ones intercept and is not penalized. Note the
objective has no ``1/(2n)`` factor, so ``r`` is on a different scale from
glmnet/scikit-learn's ``alpha`` (``r = 2 n alpha``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import cd_lasso

GRAM_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class LassoProblem:
    X: np.ndarray
    y: np.ndarray
    penalty: float
    center: np.ndarray | None = None
    scale: np.ndarray | None = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ValueError("X must be n x p and y of length n")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y)) and math.isfinite(self.penalty)):
            raise ValueError("non-finite input")
        if self.penalty < 0:
            raise ValueError("penalty must be nonnegative")
        if not np.allclose(X[:, 0], 1.0):
            raise ValueError("column 0 must be the all-ones intercept")
        n = X.shape[0]
        diag = np.einsum("ij,ij->j", X[:, 1:], X[:, 1:]) / n
        if np.any(np.abs(diag - 1.0) > GRAM_TOL):
            raise ValueError("non-intercept columns must have X'X/n diagonal equal to 1; "
                             "use LassoProblem.standardized")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @classmethod
    def standardized(cls, Z, y, penalty: float) -> "LassoProblem":
        """Centre the predictor columns of ``Z``, scale them to unit Gram diagonal and prepend the intercept."""
        Z = np.asarray(Z, dtype=float)
        if Z.ndim != 2:
            raise ValueError("Z must be two-dimensional")
        center = Z.mean(axis=0)
        Zc = Z - center
        scale = np.sqrt(np.einsum("ij,ij->j", Zc, Zc) / Z.shape[0])
        if np.any(scale == 0):
            raise ValueError("constant predictor column")
        X = np.column_stack([np.ones(Z.shape[0]), Zc / scale])
        return cls(X, y, penalty, center=center, scale=scale)

    def objective(self, beta) -> float:
        resid = self.y - self.X @ beta
        return float(resid @ resid + self.penalty * np.abs(beta[1:]).sum())


@dataclass(frozen=True, eq=False)
class LassoFit:
    beta: np.ndarray
    iterations: int
    converged: bool
    objective: float
    history: np.ndarray
    beta_original: np.ndarray | None = None


def soft_threshold(z, gamma):
    """``sign(z) max(|z| - gamma, 0)``."""
    if np.any(np.asarray(gamma) < 0):
        raise ValueError("gamma must be nonnegative")
    return np.sign(z) * np.maximum(np.abs(z) - gamma, 0.0)


def fit_lasso(prob: LassoProblem, tol: float = 1e-10, max_iter: int = 100_000,
              beta0=None) -> LassoFit:
    beta = np.zeros(prob.p) if beta0 is None else np.array(beta0, dtype=float)
    sweeps, ok, history = cd_lasso(prob.X, prob.y, beta, prob.penalty, tol, max_iter)
    original = None
    if prob.scale is not None:
        slopes = beta[1:] / prob.scale
        original = np.concatenate([[beta[0] - slopes @ prob.center], slopes])
    return LassoFit(beta=beta, iterations=sweeps, converged=ok,
                    objective=prob.objective(beta), history=history, beta_original=original)


def kkt_violation(prob: LassoProblem, beta) -> np.ndarray:
    """Per-coordinate distance from the Lasso optimality conditions (intercept included as 0-penalty)."""
    grad = 2.0 * prob.X.T @ (prob.y - prob.X @ beta)
    r = prob.penalty
    out = np.empty(prob.p)
    out[0] = abs(grad[0])
    b = beta[1:]
    g = grad[1:]
    out[1:] = np.where(b == 0, np.maximum(np.abs(g) - r, 0.0), np.abs(g - r * np.sign(b)))
    return out


def bickel_penalty(A: float, sigma: float, n: int, p: int) -> float:
    """``A sigma sqrt(log(p) / n)``, requiring ``A > 2 sqrt(2)``."""
    if not A > 2.0 * math.sqrt(2.0):
        raise ValueError(f"A must exceed 2*sqrt(2), got {A}")
    if sigma <= 0 or n < 1 or p < 2:
        raise ValueError("need sigma > 0, n >= 1, p >= 2")
    return A * sigma * math.sqrt(math.log(p) / n)


def rss_penalty(bickel_r: float, n: int) -> float:
    """Convert a penalty for ``|y - Xb|^2 / n + 2 r |b|_1`` to this module's unscaled objective."""
    return 2.0 * n * bickel_r


def sparsity_count(beta, zero_tol: float = 1e-8) -> int:
    """Number of non-intercept coefficients with ``|b_j| > zero_tol``."""
    return int(np.count_nonzero(np.abs(np.asarray(beta)[1:]) > zero_tol))

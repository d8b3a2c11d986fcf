"""Registered simulation studies.

Each body takes a parameter dict and a ``numpy.random.Generator`` and returns
a dict of metrics, one trial at a time. Parameter defaults are the
desk-scale settings used by the acceptance suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bayes_factors as bf
from . import cv_bayes as cv
from . import lasso
from . import multitest as mt
from .priors import parse_measure
from .stone import FixedMean, GlobalNull, HierarchicalP2, generate, suff_stats


@dataclass(frozen=True)
class Experiment:
    body: Callable[[dict, np.random.Generator], dict]
    defaults: dict
    metrics: tuple


EXPERIMENTS: dict[str, Experiment] = {}


def register(name, defaults, metrics):
    def deco(fn):
        EXPERIMENTS[name] = Experiment(fn, dict(defaults), tuple(metrics))
        return fn
    return deco


def _fixed_mu(p: int, tau2: float) -> np.ndarray:
    """Alternating +-sqrt(tau2), so that (1/p) sum mu_i^2 = tau2 exactly."""
    return math.sqrt(tau2) * np.where(np.arange(p) % 2 == 0, 1.0, -1.0)


def _stone_law(params):
    law = params["law"]
    if law == "null":
        return GlobalNull()
    if law == "p2":
        return HierarchicalP2(parse_measure(params["prior"]))
    if law == "fixed":
        return FixedMean(_fixed_mu(params["p"], params["tau2"]))
    raise ValueError(f"unknown law {law!r}")


@register("theorem1_consistency",
          {"p": 200, "r": 2, "law": "p2", "prior": "zs", "tau2": 1.0},
          ("log_bf21", "positive", "mean_sq"))
def theorem1_consistency(params, rng):
    ds = generate(params["p"], params["r"], _stone_law(params), rng)
    value = bf.log_bf21_stone(ds, parse_measure(params["prior"]))
    return {"log_bf21": value, "positive": int(value > 0), "mean_sq": suff_stats(ds).C_p}


@register("theorem2_cvbf",
          {"p": 500, "r": 200, "k": 20, "law": "null", "tau2": 1.0},
          ("log_cvbf_ps", "positive", "c_ratio"))
def theorem2_cvbf(params, rng):
    p, r, k = params["p"], params["r"], params["k"]
    law = GlobalNull() if params["law"] == "null" else FixedMean(_fixed_mu(p, params["tau2"]))
    value = cv.cvbf_ps(generate(p, r, law, rng), k)
    return {"log_cvbf_ps": value, "positive": int(value > 0), "c_ratio": k / r}


@register("aic_type1", {"n": 100, "batch": 1000}, ("rate",))
def aic_type1(params, rng):
    x = rng.standard_normal((params["batch"], params["n"]))
    picks = bf.aic_test_simple_normal(x.mean(axis=1), params["n"])
    return {"rate": float(np.mean(picks == "M2"))}


@register("cvbf_vs_bf_normal",
          {"n": 50, "mu0": 0.0, "prior_var": 1.0, "k": 5, "theta": 0.0},
          ("log_bf12", "log_cvbf12", "diff", "loo_m1", "loo_m2", "mukhopadhyay_gap"))
def cvbf_vs_bf_normal(params, rng):
    x = params["theta"] + rng.standard_normal(params["n"])
    prob = cv.NormalLocationProblem(x, params["mu0"], params["prior_var"])
    b = cv.normal_location_log_bf12(prob)
    c = cv.normal_location_log_cvbf12(prob, params["k"])
    return {"log_bf12": b, "log_cvbf12": c, "diff": c - b,
            "loo_m1": cv.loo_log_predictive(prob, "M1_null"),
            "loo_m2": cv.loo_log_predictive(prob, "M2_prior"),
            "mukhopadhyay_gap": cv.mukhopadhyay_probe(prob)["discrepancy"]}


def verge_model(m: int, beta: float, gamma: float, delta: float) -> mt.TwoGroupsModel:
    """``eps = m^-beta`` and signal on the verge of detectability, ``u = gamma log(delta/eps)``."""
    eps = m ** (-beta)
    return mt.TwoGroupsModel(eps=eps, u=gamma * math.log(delta / eps), delta=delta)


@register("bh_vs_oracle_risk",
          {"m": 1000, "beta": 0.5, "gamma": 3.0, "delta": 1.0, "alpha": 0.05},
          ("loss_bh", "loss_oracle", "risk_oracle", "ratio", "fdp_bh"))
def bh_vs_oracle_risk(params, rng):
    model = verge_model(params["m"], params["beta"], params["gamma"], params["delta"])
    outcome = mt.sample_two_groups(params["m"], model, rng)
    bh = mt.bh_test(outcome, model, params["alpha"])
    orc = mt.oracle_test(outcome, model)
    loss_bh, loss_or = bh.loss(model.delta), orc.loss(model.delta)
    n_rej = bh.rejections.size
    return {"loss_bh": loss_bh, "loss_oracle": loss_or,
            "risk_oracle": mt.bayes_risk(model, mt.bayes_oracle_rule(model), params["m"]),
            "ratio": loss_bh / loss_or if loss_or > 0 else math.nan,
            "fdp_bh": bh.false_discoveries / n_rej if n_rej else 0.0}


@register("eb_boundary", {"m": 200, "u": 1.5, "eps": 0.01, "prior": "none"},
          ("eps_hat", "at_zero", "at_one"))
def eb_boundary(params, rng):
    model = mt.TwoGroupsModel(eps=params["eps"], u=params["u"])
    z = mt.sample_two_groups(params["m"], model, rng).z
    prior = None if params["prior"] == "none" else _parse_beta(params["prior"])
    e = mt.eb_estimate_eps(z, model.null_var, model.u, prior)
    return {"eps_hat": e, "at_zero": int(e == 0.0), "at_one": int(e == 1.0)}


def _parse_beta(text: str):
    # "beta22" or "beta:2,2"
    if text == "beta22":
        return (2.0, 2.0)
    a, b = text.split(":", 1)[1].split(",")
    return (float(a), float(b))


@register("lasso_scaling",
          {"n": 200, "p": 500, "s": 1, "A": 3.0, "signal": 5.0, "sigma": 1.0},
          ("l1_error", "nonzeros", "converged"))
def lasso_scaling(params, rng):
    n, p, s = params["n"], params["p"], params["s"]
    Z = rng.standard_normal((n, p))
    beta0 = np.zeros(p)
    beta0[rng.choice(p, size=s, replace=False)] = params["signal"] * rng.choice([-1.0, 1.0], size=s)
    X = lasso.LassoProblem.standardized(Z, np.zeros(n), 0.0).X
    y = X[:, 1:] @ beta0 + params["sigma"] * rng.standard_normal(n)
    r = lasso.rss_penalty(lasso.bickel_penalty(params["A"], params["sigma"], n, p), n)
    fit = lasso.fit_lasso(lasso.LassoProblem(X, y, r))
    return {"l1_error": float(np.abs(fit.beta[1:] - beta0).sum()),
            "nonzeros": lasso.sparsity_count(fit.beta), "converged": int(fit.converged)}


@register("verge", {"m": 10000, "beta": 0.5, "gamma": 1.0, "delta": 1.0},
          ("power", "threshold", "n_alt"))
def verge(params, rng):
    model = verge_model(params["m"], params["beta"], params["gamma"], params["delta"])
    outcome = mt.oracle_test(mt.sample_two_groups(params["m"], model, rng), model)
    n_alt = int(outcome.labels.sum())
    hits = n_alt - outcome.false_nondiscoveries
    return {"power": hits / n_alt if n_alt else math.nan,
            "threshold": mt.bayes_oracle_rule(model), "n_alt": n_alt}


@register("smooth_cauchy_probe", {"p": 500, "r": 1, "tau2": 0.2},
          ("log_bf21_sc", "log_bf21_zs", "mean_sq"))
def smooth_cauchy_probe(params, rng):
    ds = generate(params["p"], params["r"], FixedMean(_fixed_mu(params["p"], params["tau2"])), rng)
    return {"log_bf21_sc": bf.log_bf21_stone(ds, parse_measure("smooth-cauchy")),
            "log_bf21_zs": bf.log_bf21_stone(ds, parse_measure("zs")),
            "mean_sq": suff_stats(ds).C_p}

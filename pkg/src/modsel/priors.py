"""Mixing measures over a precision ``t`` and the scale-mixture normal priors they induce.

A prior in this family has density

    pi_g(mu) = int_0^inf (t / 2pi)^{p/2} exp(-t |mu|^2 / 2) g(t) dt

and all integrals over ``t`` go through :func:`log_integrate`, which works in
the log domain so that large ``p`` does not underflow.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Union

import numpy as np
from scipy import special, stats

LOG_2PI = math.log(2.0 * math.pi)

# quadrature contract
GL_NODES = 201
QUAD_TOL = 1e-8
MAX_PANELS = 2 ** 11


# ---------------------------------------------------------------------------
# mixing measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointMass:
    """All mass at ``t0``; has no density."""

    t0: float

    def __post_init__(self):
        if not (self.t0 > 0 and math.isfinite(self.t0)):
            raise ValueError(f"PointMass needs 0 < t0 < inf, got {self.t0}")

    label = "point"

    @property
    def upper(self) -> float:
        return self.t0

    def sample(self, rng: np.random.Generator, size=None):
        return np.full(size, self.t0) if size is not None else self.t0


@dataclass(frozen=True)
class ZellnerSiow:
    """Gamma(1/2, rate 1/2) mixing, i.e. the chi-square(1) density.

    Mixing centred normals over this measure gives the multivariate Cauchy.
    """

    label = "zs"
    upper = math.inf

    def log_density(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return -0.5 * LOG_2PI - 0.5 * t - 0.5 * np.log(t)

    def sample(self, rng, size=None):
        return rng.chisquare(1.0, size=size)


@dataclass(frozen=True)
class SmoothCauchy:
    """Arcsine density ``1 / (pi sqrt(t (1 - t)))`` on (0, 1)."""

    label = "smooth-cauchy"
    upper = 1.0

    def log_density(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t > 0) & (t < 1)
        tt = np.where(inside, t, 0.5)
        out = -math.log(math.pi) - 0.5 * (np.log(tt) + np.log1p(-tt))
        return np.where(inside, out, -np.inf)

    def sample(self, rng, size=None):
        return rng.beta(0.5, 0.5, size=size)


@dataclass(frozen=True)
class TruncatedZS:
    """Zellner-Siow mixing restricted to (0, T] and renormalized."""

    T: float

    def __post_init__(self):
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ValueError(f"TruncatedZS needs 0 < T < inf, got {self.T}")

    label = "truncated-zs"

    @property
    def upper(self) -> float:
        return self.T

    def log_density(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t > 0) & (t <= self.T)
        log_z = stats.chi2.logcdf(self.T, 1)
        out = stats.chi2.logpdf(np.where(inside, t, 1.0), 1) - log_z
        return np.where(inside, out, -np.inf)

    def sample(self, rng, size=None):
        u = rng.uniform(size=size)
        return stats.chi2.ppf(u * stats.chi2.cdf(self.T, 1), 1)


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Piecewise-linear density through ``(nodes, values)``, zero outside the nodes.

    The values are rescaled at construction so the density integrates to one.
    """

    nodes: np.ndarray
    values: np.ndarray
    _cdf: np.ndarray = field(init=False, repr=False)

    label = "tabulated"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.shape != values.shape or nodes.size < 2:
            raise ValueError("nodes and values must be 1-d arrays of equal length >= 2")
        if not np.all(np.isfinite(nodes)) or not np.all(np.isfinite(values)):
            raise ValueError("nodes and values must be finite")
        if nodes[0] <= 0 or np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be positive and strictly increasing")
        if np.any(values < 0):
            raise ValueError("density values must be nonnegative")
        seg = 0.5 * (values[1:] + values[:-1]) * np.diff(nodes)
        total = seg.sum()
        if total <= 0:
            raise ValueError("tabulated density has zero mass")
        values = values / total
        cdf = np.concatenate([[0.0], np.cumsum(seg / total)])
        cdf[-1] = 1.0
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_cdf", cdf)

    @property
    def upper(self) -> float:
        return float(self.nodes[-1])

    def log_density(self, t):
        t = np.asarray(t, dtype=float)
        dens = np.interp(t, self.nodes, self.values, left=0.0, right=0.0)
        with np.errstate(divide="ignore"):
            return np.log(dens)

    def sample(self, rng, size=None):
        u = rng.uniform(size=size)
        i = np.clip(np.searchsorted(self._cdf, u, side="right") - 1, 0, self.nodes.size - 2)
        t0, h = self.nodes[i], np.diff(self.nodes)[i]
        f0, f1 = self.values[i], self.values[i + 1]
        slope = (f1 - f0) / h
        need = u - self._cdf[i]
        # solve f0 x + slope x^2 / 2 = need for x in [0, h]
        with np.errstate(divide="ignore", invalid="ignore"):
            disc = np.sqrt(np.maximum(f0 * f0 + 2.0 * slope * need, 0.0))
            x_quad = 2.0 * need / (f0 + disc)
        x_lin = np.where(f0 > 0, need / np.where(f0 > 0, f0, 1.0), 0.0)
        x = np.where(np.abs(slope) > 1e-300, x_quad, x_lin)
        return t0 + np.clip(np.nan_to_num(x), 0.0, h)

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "Tabulated":
        """Read a ``t,density`` CSV with strictly increasing ``t``."""
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["t", "density"]:
                raise ValueError(f"{path}: expected header 't,density'")
            rows = [(float(r["t"]), float(r["density"])) for r in reader]
        if not rows:
            raise ValueError(f"{path}: no rows")
        t, d = map(np.array, zip(*rows))
        return cls(t, d)


MixingMeasure = Union[PointMass, ZellnerSiow, SmoothCauchy, TruncatedZS, Tabulated]


def measure_label(m: MixingMeasure) -> str:
    if isinstance(m, PointMass):
        return f"point:{m.t0:g}"
    if isinstance(m, TruncatedZS):
        return f"truncated-zs:{m.T:g}"
    return m.label


def parse_measure(text: str) -> MixingMeasure:
    """Build a measure from a short string such as ``zs``, ``point:2`` or ``tabulated:g.csv``."""
    name, _, arg = text.partition(":")
    name = name.strip().lower()
    if name == "zs":
        return ZellnerSiow()
    if name in ("smooth-cauchy", "sc"):
        return SmoothCauchy()
    if name == "point":
        return PointMass(float(arg))
    if name in ("truncated-zs", "tzs"):
        return TruncatedZS(float(arg))
    if name == "tabulated":
        return Tabulated.from_csv(arg)
    raise ValueError(f"unknown mixing measure {text!r}")


def mixing_density(m: MixingMeasure, t: float) -> float:
    """Density of the mixing measure at ``t > 0`` (0 outside the support)."""
    if isinstance(m, PointMass):
        raise ValueError("PointMass has no density")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    return float(np.exp(m.log_density(t)))


# ---------------------------------------------------------------------------
# quadrature over t
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _gl_panels(panels: int):
    x, w = np.polynomial.legendre.leggauss(GL_NODES)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    edges = np.arange(panels) / panels
    v = (edges[:, None] + x[None, :] / panels).ravel()
    wv = np.tile(w / panels, panels)
    return v, np.log(wv)


def _map_nodes(v, upper, scale):
    """Map v in (0, 1) onto the support; return ``(t, log_jacobian)``.

    Unbounded: ``t = scale * (v / (1 - v))^2``.  Bounded (0, T]:
    ``t = T sin^2(pi v / 2)``.  Both absorb inverse-square-root behaviour at
    the endpoints, which the arcsine and chi-square(1) densities have.
    """
    scale = np.asarray(scale, dtype=float)[..., None]
    if math.isinf(upper):
        s = v / (1.0 - v)
        t = scale * s * s
        log_jac = np.log(2.0 * scale) + np.log(v) - 3.0 * np.log1p(-v)
    else:
        half = 0.5 * math.pi * v
        t = upper * np.sin(half) ** 2
        log_jac = np.log(0.5 * math.pi * upper) + np.log(np.sin(2.0 * half))
        t = np.broadcast_to(t, scale.shape[:-1] + t.shape)
        log_jac = np.broadcast_to(log_jac, t.shape)
    return t, log_jac


def _mode_scale(log_f, upper, batch_shape):
    """Locate the bulk of the integrand on a coarse log grid (unbounded support only)."""
    if not math.isinf(upper):
        return np.ones(batch_shape)
    grid = np.logspace(-14, 14, 281)
    vals = log_f(np.broadcast_to(grid, batch_shape + grid.shape))
    vals = np.where(np.isfinite(vals), vals + np.log(grid), -np.inf)
    return grid[np.argmax(vals, axis=-1)]


def log_integrate(log_f: Callable[[np.ndarray], np.ndarray], upper: float = math.inf,
                  batch_shape: tuple = (), breaks=None) -> np.ndarray:
    """``log int_0^upper exp(log_f(t)) dt`` by composite Gauss-Legendre.

    ``log_f`` receives ``t`` of shape ``batch_shape + (nodes,)`` and returns the
    log integrand of the same shape. Panels double from one (201 nodes) until
    successive estimates agree to ``QUAD_TOL`` in the log. With ``breaks`` the
    integrand is taken to vanish outside ``[breaks[0], breaks[-1]]`` and each
    interval between consecutive breaks is integrated on the identity map.
    """
    if breaks is not None:
        parts = [_log_integrate_interval(log_f, a, b, batch_shape)
                 for a, b in zip(breaks[:-1], breaks[1:])]
        return special.logsumexp(np.stack(parts, axis=-1), axis=-1)
    scale = _mode_scale(log_f, upper, batch_shape)
    return _doubling(log_f, lambda v: _map_nodes(v, upper, scale))


def _log_integrate_interval(log_f, a, b, batch_shape):
    def mapping(v):
        t = np.broadcast_to(a + (b - a) * v, batch_shape + v.shape)
        return t, np.full(t.shape, math.log(b - a))
    return _doubling(log_f, mapping)


def _doubling(log_f, mapping):
    prev = None
    panels = 1
    while True:
        v, log_w = _gl_panels(panels)
        t, log_jac = mapping(v)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            terms = log_f(t) + log_jac + log_w
        terms = np.where(np.isnan(terms), -np.inf, terms)
        est = special.logsumexp(terms, axis=-1)
        if prev is not None:
            diff = np.abs(est - prev)
            diff = np.where(np.isneginf(est) & np.isneginf(prev), 0.0, diff)
            if np.all(diff < QUAD_TOL):
                return est
        if panels >= MAX_PANELS:
            warnings.warn("log_integrate did not reach tolerance", RuntimeWarning)
            return est
        prev = est
        panels *= 2


def measure_mass(m: MixingMeasure) -> float:
    """Numerical integral of the density over its support (1 for a valid measure)."""
    if isinstance(m, PointMass):
        return 1.0
    return float(np.exp(log_integrate(m.log_density, m.upper, breaks=_breaks(m))))


def _breaks(m):
    return m.nodes if isinstance(m, Tabulated) else None


# ---------------------------------------------------------------------------
# induced priors on mu
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianMixturePrior:
    dim: int
    mixing: MixingMeasure

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")


def _sq_norm(mu, p):
    mu = np.asarray(mu, dtype=float)
    if mu.shape[-1:] != (p,):
        raise ValueError(f"expected vectors of length {p}, got shape {mu.shape}")
    return np.einsum("...i,...i->...", mu, mu)


def log_prior_density(prior: GaussianMixturePrior, mu) -> np.ndarray:
    """Log of the mixture density; ``mu`` may be a batch of shape ``(..., p)``."""
    p = prior.dim
    q = _sq_norm(mu, p)
    m = prior.mixing
    if isinstance(m, PointMass):
        return 0.5 * p * (math.log(m.t0) - LOG_2PI) - 0.5 * m.t0 * q
    qb = np.asarray(q)[..., None]

    def log_f(t):
        return 0.5 * p * (np.log(t) - LOG_2PI) - 0.5 * t * qb + m.log_density(t)

    out = log_integrate(log_f, m.upper, batch_shape=np.shape(q), breaks=_breaks(m))
    return out if np.ndim(out) else float(out)


def prior_density(prior: GaussianMixturePrior, mu):
    """Value of the scale-mixture prior density at ``mu``."""
    return np.exp(log_prior_density(prior, mu))


def log_zs_closed_form(p: int, mu) -> np.ndarray:
    q = _sq_norm(mu, p)
    return (special.gammaln(0.5 * (p + 1)) - 0.5 * (p + 1) * math.log(math.pi)
            - 0.5 * (p + 1) * np.log1p(q))


def zs_closed_form(p: int, mu):
    """Multivariate Cauchy density ``Gamma((p+1)/2) / pi^((p+1)/2) (1 + |mu|^2)^(-(p+1)/2)``."""
    return np.exp(log_zs_closed_form(p, mu))

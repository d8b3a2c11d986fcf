"""The p x r two-way normal-means layout ``y_ij = mu_i + eps_ij`` with unit noise."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Union

import numpy as np

from .priors import MixingMeasure


@dataclass(frozen=True)
class SuffStats:
    means: np.ndarray
    S: float
    C_p: float
    sse: float


@dataclass(frozen=True, eq=False)
class StoneDataset:
    """Observations ``y`` of shape ``(p, r)``; row ``i`` holds the replicates of group ``i``."""

    y: np.ndarray

    def __post_init__(self):
        y = np.array(self.y, dtype=float)
        if y.ndim != 2 or y.shape[0] < 1 or y.shape[1] < 1:
            raise ValueError(f"y must be a non-empty 2-d array, got shape {y.shape}")
        if not np.all(np.isfinite(y)):
            raise ValueError("y must be finite")
        y.setflags(write=False)
        object.__setattr__(self, "y", y)

    @property
    def p(self) -> int:
        return self.y.shape[0]

    @property
    def r(self) -> int:
        return self.y.shape[1]

    @cached_property
    def stats(self) -> SuffStats:
        return _compute_stats(self.y)

    def to_csv(self, path: Union[str, Path]) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["group", "rep", "value"])
            for i in range(self.p):
                for j in range(self.r):
                    w.writerow([i + 1, j + 1, repr(float(self.y[i, j]))])

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "StoneDataset":
        """Read the long ``group,rep,value`` format; groups and reps are 1-based and complete."""
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["group", "rep", "value"]:
                raise ValueError(f"{path}: expected header 'group,rep,value'")
            rows = [(int(r["group"]), int(r["rep"]), float(r["value"])) for r in reader]
        if not rows:
            raise ValueError(f"{path}: no observations")
        g, j, v = (np.array(c) for c in zip(*rows))
        p, r = g.max(), j.max()
        if g.min() < 1 or j.min() < 1 or len(rows) != p * r:
            raise ValueError(f"{path}: expected a complete {p} x {r} layout")
        y = np.full((p, r), np.nan)
        y[g - 1, j - 1] = v
        if np.isnan(y).any():
            raise ValueError(f"{path}: duplicated or missing (group, rep) cells")
        return cls(y)


def _compute_stats(y: np.ndarray) -> SuffStats:
    means = y.mean(axis=1)
    S = float(means @ means)
    sse = float(((y - means[:, None]) ** 2).sum())
    return SuffStats(means=means, S=S, C_p=S / y.shape[0], sse=sse)


def suff_stats(ds: StoneDataset) -> SuffStats:
    """Group means, ``S = sum(ybar_i^2)``, ``C_p = S/p`` and the within-group SSE."""
    return ds.stats


def subset_replicates(ds: StoneDataset, k: int) -> StoneDataset:
    """Dataset made of the first ``k`` replicate columns."""
    if not 1 <= k <= ds.r:
        raise ValueError(f"k must lie in [1, {ds.r}], got {k}")
    if k == ds.r:
        return ds
    return StoneDataset(ds.y[:, :k])


# generation laws ----------------------------------------------------------

@dataclass(frozen=True)
class GlobalNull:
    pass


@dataclass(frozen=True, eq=False)
class FixedMean:
    mu: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mu", np.asarray(self.mu, dtype=float))


@dataclass(frozen=True)
class HierarchicalP2:
    """One precision ``t`` drawn from ``mixing`` per dataset, then ``mu_i ~ N(0, 1/t)``."""

    mixing: MixingMeasure


GenerationLaw = Union[GlobalNull, FixedMean, HierarchicalP2]


def generate(p: int, r: int, law: GenerationLaw, seed) -> StoneDataset:
    """Draw a dataset; ``seed`` is an int or a ``numpy.random.Generator``."""
    if p < 1 or r < 1:
        raise ValueError(f"p and r must be positive, got p={p}, r={r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if isinstance(law, GlobalNull):
        mu = np.zeros(p)
    elif isinstance(law, FixedMean):
        if law.mu.shape != (p,):
            raise ValueError(f"FixedMean has length {law.mu.size}, expected {p}")
        mu = law.mu
    elif isinstance(law, HierarchicalP2):
        t = float(law.mixing.sample(rng))
        mu = rng.standard_normal(p) / np.sqrt(t)
    else:
        raise TypeError(f"unknown generation law {law!r}")
    return StoneDataset(mu[:, None] + rng.standard_normal((p, r)))

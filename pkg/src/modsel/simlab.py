"""Seeded, replicated experiment runner with CSV persistence.

A config is a flat ``key = value`` text file. ``experiment``, ``master_seed``,
``replicates``, ``output`` and ``workers`` are settings; every other key is an
experiment parameter, and repeating a key lists several values. The grid is
the Cartesian product of the listed values, in order of first appearance.

Each trial gets its own generator, seeded from ``(master_seed, grid_index,
replicate)`` through the splitmix64 finalizer. The finalizer is a bijection
on 64-bit words, so distinct trials always get distinct seeds.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .experiments import EXPERIMENTS

SETTING_KEYS = {"experiment", "master_seed", "replicates", "output", "workers"}
MASK64 = (1 << 64) - 1


class ConfigError(ValueError):
    pass


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def trial_seed(master_seed: int, grid_index: int, replicate: int) -> int:
    if not (0 <= grid_index < 1 << 32 and 0 <= replicate < 1 << 32):
        raise ValueError("grid index and replicate must fit in 32 bits")
    word = ((grid_index << 32) | replicate) ^ splitmix64(master_seed & MASK64)
    return splitmix64(word)


@dataclass
class ExperimentConfig:
    name: str
    master_seed: int = 0
    replicates: int = 1
    grid: list = field(default_factory=lambda: [{}])
    output_path: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.name not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.name!r}; "
                              f"known: {', '.join(sorted(EXPERIMENTS))}")
        if int(self.replicates) != self.replicates or self.replicates < 1:
            raise ConfigError(f"replicates must be a positive integer, got {self.replicates}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        exp = EXPERIMENTS[self.name]
        if not self.grid:
            self.grid = [{}]
        for point in self.grid:
            unknown = set(point) - set(exp.defaults)
            if unknown:
                raise ConfigError(f"{self.name}: unknown parameter(s) {sorted(unknown)}")

    def points(self) -> list[dict]:
        defaults = EXPERIMENTS[self.name].defaults
        return [{k: _coerce(point.get(k, v), v, k) for k, v in defaults.items()}
                for point in self.grid]


def _coerce(value, default, key):
    try:
        return type(default)(value)
    except (TypeError, ValueError):
        raise ConfigError(f"parameter {key!r}: cannot use {value!r} as {type(default).__name__}")


def _parse_value(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_config_text(text: str) -> dict[str, list]:
    entries: dict[str, list] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        entries.setdefault(key.strip(), []).append(_parse_value(value.strip()))
    return entries


def config_from_entries(entries: dict[str, list], overrides: dict | None = None) -> ExperimentConfig:
    entries = {k: list(v) for k, v in entries.items()}
    for key, value in (overrides or {}).items():
        if value is not None:
            entries[key] = list(value) if isinstance(value, (list, tuple)) else [value]
    settings = {}
    for key in SETTING_KEYS:
        if key in entries:
            vals = entries.pop(key)
            if len(vals) != 1:
                raise ConfigError(f"setting {key!r} given more than once")
            settings[key] = vals[0]
    if "experiment" not in settings:
        raise ConfigError("config must name an experiment")
    keys = list(entries)
    grid = [dict(zip(keys, combo)) for combo in itertools.product(*(entries[k] for k in keys))]
    return ExperimentConfig(
        name=str(settings["experiment"]),
        master_seed=int(settings.get("master_seed", 0)),
        replicates=int(settings.get("replicates", 1)),
        grid=grid,
        output_path=settings.get("output"),
        workers=int(settings.get("workers", 1)),
    )


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    text = Path(path).read_text()
    return config_from_entries(parse_config_text(text), overrides)


@dataclass(frozen=True)
class TrialRecord:
    experiment: str
    grid_index: int
    replicate: int
    params: dict
    metrics: dict


@dataclass
class TrialTable:
    experiment: str
    param_names: list
    metric_names: list
    records: list

    def __len__(self):
        return len(self.records)

    def column(self, name: str, **where) -> np.ndarray:
        rows = [r for r in self.records if all(r.params.get(k) == v for k, v in where.items())]
        return np.array([r.metrics[name] if name in r.metrics else r.params[name] for r in rows],
                        dtype=float)

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["experiment", "grid_index", "replicate", *self.param_names, *self.metric_names])
        for rec in self.records:
            w.writerow([rec.experiment, rec.grid_index, rec.replicate,
                        *(_fmt(rec.params[k]) for k in self.param_names),
                        *(_fmt(rec.metrics[k]) for k in self.metric_names)])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv_text())


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _run_trial(task):
    name, grid_index, replicate, params, seed = task
    rng = np.random.default_rng(seed)
    return EXPERIMENTS[name].body(params, rng)


def run_experiment(config: ExperimentConfig) -> TrialTable:
    exp = EXPERIMENTS[config.name]
    points = config.points()
    tasks = [(config.name, g, rep, params, trial_seed(config.master_seed, g, rep))
             for g, params in enumerate(points) for rep in range(config.replicates)]
    if config.output_path is not None:
        out = Path(config.output_path)
        if out.parent and not out.parent.exists():
            raise OSError(f"output directory {out.parent} does not exist")
    if config.workers > 1:
        chunk = max(1, len(tasks) // (4 * config.workers))
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_run_trial, tasks, chunksize=chunk))
    else:
        results = [_run_trial(t) for t in tasks]
    records = [TrialRecord(config.name, g, rep, params, metrics)
               for (_, g, rep, params, _), metrics in zip(tasks, results)]
    table = TrialTable(config.name, list(exp.defaults), list(exp.metrics), records)
    if config.output_path is not None:
        table.write_csv(config.output_path)
    return table


def read_table(path) -> list[dict]:
    """Rows of a trial or summary CSV, numbers converted where possible."""
    with open(path, newline="") as fh:
        return [{k: _parse_value(v) for k, v in row.items()} for row in csv.DictReader(fh)]


STATS = ("mean", "median", "frac_positive", "stderr", "count")


def summarize(rows: Sequence[dict] | TrialTable, group_by: Iterable[str],
              stats: Iterable[str] = ("mean", "stderr"),
              metrics: Iterable[str] | None = None) -> list[dict]:
    """One output row per distinct ``group_by`` combination, in order of first appearance.

    NaN metric values are dropped before the statistics are taken.
    ``stderr`` is the sample standard deviation over ``sqrt(count)``.
    """
    if isinstance(rows, TrialTable):
        metric_names = rows.metric_names
        rows = [{"experiment": r.experiment, "grid_index": r.grid_index,
                 "replicate": r.replicate, **r.params, **r.metrics} for r in rows.records]
    else:
        metric_names = None
    if not rows:
        raise ValueError("cannot summarize an empty table")
    group_by = list(group_by)
    stats = list(stats)
    for key in group_by:
        if key not in rows[0]:
            raise KeyError(f"no column {key!r}")
    bad = set(stats) - set(STATS)
    if bad:
        raise ValueError(f"unknown statistics {sorted(bad)}")
    if metrics is None:
        metrics = metric_names or [k for k, v in rows[0].items()
                                   if k not in group_by and k not in ("experiment", "grid_index", "replicate")
                                   and isinstance(v, (int, float))]
    metrics = list(metrics)
    groups: dict[tuple, list] = {}
    for row in rows:
        groups.setdefault(tuple(row[k] for k in group_by), []).append(row)
    out = []
    for key, members in groups.items():
        summary = dict(zip(group_by, key))
        for metric in metrics:
            vals = np.array([float(m[metric]) for m in members])
            vals = vals[~np.isnan(vals)]
            for stat in stats:
                summary[f"{metric}_{stat}"] = _stat(stat, vals)
        out.append(summary)
    return out


def _stat(stat: str, vals: np.ndarray) -> float:
    n = vals.size
    if stat == "count":
        return n
    if n == 0:
        return math.nan
    if stat == "mean":
        return float(vals.mean())
    if stat == "median":
        return float(np.median(vals))
    if stat == "frac_positive":
        return float(np.mean(vals > 0))
    if stat == "stderr":
        return float(vals.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    raise ValueError(stat)


def summary_csv_text(summary: list[dict]) -> str:
    buf = io.StringIO()
    if summary:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(summary[0]))
        for row in summary:
            w.writerow([_fmt(v) for v in row.values()])
    return buf.getvalue()

import math

import pytest

from modsel.experiments import EXPERIMENTS
from modsel.simlab import (ConfigError, ExperimentConfig, config_from_entries, load_config,
                           parse_config_text, read_table, run_experiment, splitmix64, summarize,
                           summary_csv_text, trial_seed)


class TestSeeds:
    def test_splitmix_reference(self):
        # first output of the reference splitmix64 generator seeded with 0
        assert splitmix64(0) == 0xE220A8397B1DCDAF

    def test_trial_seeds_distinct(self):
        seeds = {trial_seed(42, g, r) for g in range(50) for r in range(200)}
        assert len(seeds) == 50 * 200

    def test_master_seed_matters(self):
        assert trial_seed(1, 0, 0) != trial_seed(2, 0, 0)


class TestConfig:
    def test_parse_grid(self):
        entries = parse_config_text("experiment = aic_type1\n# comment\nn = 10\nn = 20  # inline\nbatch = 5\n")
        cfg = config_from_entries(entries)
        assert cfg.name == "aic_type1"
        assert [pt["n"] for pt in cfg.points()] == [10, 20]
        assert all(pt["batch"] == 5 for pt in cfg.points())

    def test_overrides(self):
        cfg = config_from_entries(parse_config_text("experiment = aic_type1\nreplicates = 3\n"),
                                  {"replicates": 7, "workers": None})
        assert cfg.replicates == 7 and cfg.workers == 1

    @pytest.mark.parametrize("text", ["experiment = nope\n", "experiment = aic_type1\nreplicates = 0\n",
                                      "experiment = aic_type1\nbogus = 1\n", "n = 3\n",
                                      "experiment = aic_type1\njunk line\n",
                                      "experiment = aic_type1\nn = abc\n"])
    def test_invalid(self, text):
        with pytest.raises(ConfigError):
            config_from_entries(parse_config_text(text)).points()

    def test_load_missing(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_config(tmp_path / "missing.cfg")


class TestRun:
    def _cfg(self, tmp_path, workers=1, name="out.csv"):
        return ExperimentConfig("aic_type1", master_seed=9, replicates=3,
                                grid=[{"n": 10, "batch": 50}, {"n": 40, "batch": 50}],
                                output_path=str(tmp_path / name), workers=workers)

    def test_byte_identical_reruns(self, tmp_path):
        run_experiment(self._cfg(tmp_path, name="a.csv"))
        run_experiment(self._cfg(tmp_path, name="b.csv"))
        run_experiment(self._cfg(tmp_path, workers=2, name="c.csv"))
        a, b, c = ((tmp_path / f).read_bytes() for f in ("a.csv", "b.csv", "c.csv"))
        assert a == b == c

    def test_layout(self, tmp_path):
        table = run_experiment(self._cfg(tmp_path))
        lines = (tmp_path / "out.csv").read_text().splitlines()
        assert lines[0] == "experiment,grid_index,replicate,n,batch,rate"
        assert len(lines) == 7 and len(table) == 6
        assert [(r.grid_index, r.replicate) for r in table.records] == [(g, k) for g in (0, 1) for k in range(3)]

    def test_unwritable(self, tmp_path):
        cfg = ExperimentConfig("aic_type1", output_path=str(tmp_path / "no" / "such" / "x.csv"))
        with pytest.raises(OSError):
            run_experiment(cfg)

    @pytest.mark.parametrize("name", sorted(EXPERIMENTS))
    def test_every_experiment_smoke(self, name):
        small = {"p": 20, "r": 4, "k": 2, "n": 20, "m": 200, "batch": 10}
        grid = [{k: v for k, v in small.items() if k in EXPERIMENTS[name].defaults}]
        table = run_experiment(ExperimentConfig(name, replicates=2, grid=grid))
        assert len(table) == 2
        for rec in table.records:
            assert set(rec.metrics) == set(EXPERIMENTS[name].metrics)


class TestSummarize:
    ROWS = [{"g": "a", "x": 1.0}, {"g": "a", "x": 3.0}, {"g": "b", "x": -2.0}, {"g": "b", "x": -4.0}]

    def test_single_record(self):
        out = summarize([{"g": 1, "x": 2.5}], ["g"], ["mean"])
        assert out == [{"g": 1, "x_mean": 2.5}]

    def test_four_rows(self):
        out = summarize(self.ROWS, ["g"], ["mean", "median", "frac_positive", "stderr", "count"])
        assert out[0]["x_mean"] == 2.0 and out[1]["x_mean"] == -3.0
        assert out[1]["x_frac_positive"] == 0.0
        assert out[0]["x_stderr"] == pytest.approx(math.sqrt(2) / math.sqrt(2))
        assert out[0]["x_count"] == 2

    def test_nan_dropped(self):
        out = summarize([{"g": 0, "x": math.nan}, {"g": 0, "x": 4.0}], ["g"], ["mean", "count"])
        assert out[0]["x_mean"] == 4.0 and out[0]["x_count"] == 1

    def test_errors(self):
        with pytest.raises(ValueError):
            summarize([], ["g"])
        with pytest.raises(KeyError):
            summarize(self.ROWS, ["nope"])
        with pytest.raises(ValueError):
            summarize(self.ROWS, ["g"], ["mode"])

    def test_read_back(self, tmp_path):
        cfg = ExperimentConfig("aic_type1", replicates=4, grid=[{"n": 10, "batch": 20}],
                               output_path=str(tmp_path / "t.csv"))
        table = run_experiment(cfg)
        rows = read_table(tmp_path / "t.csv")
        a = summarize(rows, ["n"], ["mean"], metrics=["rate"])
        b = summarize(table, ["n"], ["mean"])
        assert a[0]["rate_mean"] == pytest.approx(b[0]["rate_mean"], rel=1e-15)
        assert summary_csv_text(b).startswith("n,rate_mean\n")

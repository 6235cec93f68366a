import json
from datetime import timedelta

import numpy as np
import pandas as pd
import pytest

from app.core.exceptions import InputFileError
from app.repositories import (
    CalibrationRepository,
    ComparisonRepository,
    ManifestRepository,
    PathsRepository,
    ReturnsRepository,
    TrainingRepository,
)
from app.schemas.calibration import CalibrationResult
from app.schemas.kou import ReturnSample
from app.schemas.manifest import RunManifest
from app.services.comparison import compare
from app.services.neural.lstm import PolicyNetwork
from app.services.training import N_FEATURES, feature_scaling, train

DT = 1.0 / 247.0


class TestReturnsRepository:
    def test_round_trip_is_exact(self, tmp_path, gaussian_sample):
        repo = ReturnsRepository(tmp_path)
        repo.save(gaussian_sample)
        back = repo.load(dt=DT)
        assert np.array_equal(back.values, gaussian_sample.values)

    def test_absolute_name(self, tmp_path, gaussian_sample):
        (path,) = ReturnsRepository(tmp_path / "a").save(gaussian_sample)
        back = ReturnsRepository(tmp_path / "elsewhere").load(path)
        assert len(back) == len(gaussian_sample)

    def test_bad_value_reports_line(self, tmp_path):
        (tmp_path / "returns.csv").write_text("log_return\n0.01\n-0.02\nabc\n0.03\n")
        with pytest.raises(InputFileError) as info:
            ReturnsRepository(tmp_path).load()
        assert info.value.line == 4

    def test_ragged_row_reports_line(self, tmp_path):
        (tmp_path / "returns.csv").write_text("log_return\n0.01\n0.02,0.5\n")
        with pytest.raises(InputFileError) as info:
            ReturnsRepository(tmp_path).load()
        assert info.value.line == 3

    @pytest.mark.parametrize("content", ["", "log_return\n", "other\n0.1\n"])
    def test_empty_or_wrong_header(self, tmp_path, content):
        (tmp_path / "returns.csv").write_text(content)
        with pytest.raises(InputFileError):
            ReturnsRepository(tmp_path).load()

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputFileError):
            ReturnsRepository(tmp_path).load("nope.csv")


class TestPathsRepository:
    def test_round_trip(self, tmp_path, small_paths):
        repo = PathsRepository(tmp_path)
        written = repo.save(small_paths)
        assert [p.name for p in written] == ["paths.csv", "paths.json"]
        back = repo.load()
        assert np.array_equal(back.prices, small_paths.prices)
        assert np.array_equal(back.jump_counts, small_paths.jump_counts)
        assert back.params == small_paths.params
        assert (back.seed, back.dt) == (small_paths.seed, small_paths.dt)

    def test_csv_layout(self, tmp_path, small_paths):
        PathsRepository(tmp_path).save(small_paths)
        frame = pd.read_csv(tmp_path / "paths.csv")
        assert list(frame.columns) == ["day"] + [f"path_{i}" for i in range(6)]
        assert len(frame) == 13
        meta = json.loads((tmp_path / "paths.json").read_text())
        assert meta["params"]["lambda"] == small_paths.params.lam

    def test_bad_header(self, tmp_path, small_paths):
        PathsRepository(tmp_path).save(small_paths)
        frame = pd.read_csv(tmp_path / "paths.csv").rename(columns={"path_0": "p0"})
        frame.to_csv(tmp_path / "paths.csv", index=False)
        with pytest.raises(InputFileError) as info:
            PathsRepository(tmp_path).load()
        assert info.value.line == 1

    def test_non_positive_price(self, tmp_path, small_paths):
        PathsRepository(tmp_path).save(small_paths)
        frame = pd.read_csv(tmp_path / "paths.csv")
        frame.loc[3, "path_2"] = -1.0
        frame.to_csv(tmp_path / "paths.csv", index=False)
        with pytest.raises(InputFileError):
            PathsRepository(tmp_path).load()

    def test_missing_sidecar(self, tmp_path, small_paths):
        PathsRepository(tmp_path).save(small_paths)
        (tmp_path / "paths.json").unlink()
        with pytest.raises(InputFileError):
            PathsRepository(tmp_path).load()


class TestCalibrationRepository:
    def test_writes_and_reads_params(self, tmp_path, ref_params):
        result = CalibrationResult(
            params=ref_params, log_likelihood=-12.5, iterations=3,
            trace=[(0, -20.0, -20.0), (1, -12.5, -12.5), (2, -13.0, -12.5)], converged=True,
        )
        density = pd.DataFrame({"x": [0.0, 1.0], "model_density": [1.0, 2.0], "kde_density": [1.0, 1.5]})
        repo = CalibrationRepository(tmp_path)
        names = [p.name for p in repo.save(result, density)]
        assert names == ["params.json", "trace.csv", "density_report.csv"]
        assert repo.load() == ref_params

        data = json.loads((tmp_path / "params.json").read_text())
        assert data["lambda"] == ref_params.lam and data["converged"] is True
        trace = pd.read_csv(tmp_path / "trace.csv")
        assert list(trace.columns) == ["iteration", "log_likelihood", "best_log_likelihood"]
        assert trace["best_log_likelihood"].is_monotonic_increasing

    def test_malformed_json_reports_line(self, tmp_path):
        (tmp_path / "params.json").write_text('{\n  "mu": 0.1,\n  "sigma": oops\n}')
        with pytest.raises(InputFileError) as info:
            CalibrationRepository(tmp_path).load()
        assert info.value.line == 3

    def test_invalid_params(self, tmp_path):
        (tmp_path / "params.json").write_text(json.dumps({"mu": 0.1, "sigma": -1.0}))
        with pytest.raises(InputFileError):
            CalibrationRepository(tmp_path).load()


class TestTrainingRepositories:
    def test_training_outputs(self, tmp_path, small_paths, tiny_config):
        report = train(small_paths, tiny_config)
        repo = TrainingRepository(tmp_path)
        names = [p.name for p in repo.save(report)]
        assert names == ["utility_trace.csv", "terminal_wealth.csv", "theta.csv", "consumption.csv", "checkpoint.json"]

        trace = pd.read_csv(tmp_path / "utility_trace.csv")
        assert list(trace["epoch"]) == [1, 2]
        assert np.array_equal(trace["expected_utility"].to_numpy(), report.utility_trace)
        theta = pd.read_csv(tmp_path / "theta.csv")
        assert list(theta.columns) == ["day", "mean", "p10", "p90"] and len(theta) == 12
        assert np.all(theta["p10"] <= theta["p90"])

        ckpt = repo.load()
        assert np.array_equal(ckpt.lstm.q, report.checkpoint.lstm.q)
        net = PolicyNetwork.from_checkpoint(ckpt)
        assert net.input_size == N_FEATURES

    def test_zero_epoch_trace_is_header_only(self, tmp_path, small_paths, tiny_config):
        report = train(small_paths, tiny_config.model_copy(update={"epochs": 0}))
        TrainingRepository(tmp_path).save(report)
        assert (tmp_path / "utility_trace.csv").read_text().strip() == "epoch,expected_utility"

    def test_checkpoint_scaling_survives(self, tmp_path, small_paths, tiny_config):
        report = train(small_paths, tiny_config.model_copy(update={"epochs": 0}))
        TrainingRepository(tmp_path).save(report)
        scaling = TrainingRepository(tmp_path).load().scaling
        assert np.array_equal(scaling.shift, feature_scaling(small_paths).shift)

    def test_comparison_outputs(self, tmp_path, small_paths, tiny_config):
        crra = tiny_config.model_copy(update={"utility_mode": "CRRA"})
        report = compare(small_paths, crra, tiny_config)
        repo = ComparisonRepository(tmp_path)
        written = repo.save(report)
        assert all(p.exists() for p in written)
        assert (tmp_path / "crra" / "checkpoint.json").is_file()
        assert (tmp_path / "wdra" / "utility_trace.csv").is_file()

        assert len(pd.read_csv(tmp_path / "terminal_wealth_hist.csv")) == 30
        assert list(pd.read_csv(tmp_path / "utility_traces.csv").columns) == ["epoch", "crra", "wdra"]
        traces = pd.read_csv(tmp_path / "theta_traces.csv")
        assert "mean_crra" in traces.columns and "p90_wdra" in traces.columns
        assert set(repo.load()) == set(report.summary.model_dump())


class TestManifestRepository:
    def test_round_trip(self, tmp_path):
        out = tmp_path / "result.csv"
        out.write_text("x\n1\n")
        manifest = RunManifest(command="simulate", config={"n_paths": 3}, seed=1, outputs=[str(out)])
        repo = ManifestRepository(tmp_path)
        repo.save(manifest)
        back = repo.load()
        assert back.outputs == [str(out)] and back.seed == 1 and back.config == {"n_paths": 3}
        assert back.created_at.utcoffset() == timedelta(0)
        assert back.created_at == manifest.created_at

    def test_refuses_missing_outputs(self, tmp_path):
        manifest = RunManifest(command="simulate", config={}, outputs=[str(tmp_path / "ghost.csv")])
        with pytest.raises(InputFileError):
            ManifestRepository(tmp_path).save(manifest)
        assert not (tmp_path / "manifest.json").exists()


def test_sample_fixture_is_plain(gaussian_sample):
    assert isinstance(gaussian_sample, ReturnSample)

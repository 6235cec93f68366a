import numpy as np
import pytest
from loguru import logger

from app.schemas.training import RiskAversionCoeffs
from app.services.comparison import N_BINS, build_report, compare, final_utility, shared_histogram
from app.services.training import train


@pytest.fixture
def configs(tiny_config):
    crra = tiny_config.model_copy(update={"utility_mode": "CRRA", "rho": 3.0})
    wdra = tiny_config.model_copy(update={"utility_mode": "WDRA"})
    return crra, wdra


class TestSharedHistogram:
    def test_counts_and_edges(self):
        rng = np.random.default_rng(0)
        a, b = rng.normal(0.0, 1.0, 200), rng.normal(3.0, 0.5, 120)
        hist = shared_histogram(a, b)
        assert hist.edges.shape == (N_BINS + 1,)
        assert hist.crra.sum() == 200 and hist.wdra.sum() == 120
        assert hist.edges[0] == min(a.min(), b.min())
        assert hist.edges[-1] == max(a.max(), b.max())

    def test_matrix_samples_are_flattened(self):
        theta = np.random.default_rng(1).uniform(size=(4, 10))
        hist = shared_histogram(theta, theta)
        assert hist.crra.sum() == 40
        np.testing.assert_array_equal(hist.crra, hist.wdra)


class TestCompare:
    def test_report_shapes(self, small_paths, configs):
        report = compare(small_paths, *configs)
        assert report.crra.utility_trace.shape == (2,)
        assert report.wdra.utility_trace.shape == (2,)
        assert report.terminal_wealth_hist.crra.shape == (N_BINS,)
        assert report.theta_hist.wdra.shape == (N_BINS,)
        assert report.theta_traces["crra"].mean.shape == (12,)
        assert report.consumption_traces["wdra"].p90.shape == (12,)
        assert report.summary.crra_final_utility == report.crra.utility_trace[-1]
        assert report.summary.wdra_theta_std == pytest.approx(report.wdra.theta.std())

    def test_constant_wdra_reproduces_crra(self, small_paths, configs):
        crra, _ = configs
        wdra = crra.model_copy(update={"utility_mode": "WDRA", "coeffs": RiskAversionCoeffs.constant(3.0)})
        summary = compare(small_paths, crra, wdra).summary.model_dump()
        for key, value in summary.items():
            if key.startswith("crra_"):
                assert summary["wdra_" + key[5:]] == value

    def test_identical_configs_identical_halves(self, small_paths, configs):
        crra, _ = configs
        report = build_report(train(small_paths, crra), train(small_paths, crra))
        np.testing.assert_array_equal(report.crra.utility_trace, report.wdra.utility_trace)
        np.testing.assert_array_equal(report.theta_hist.crra, report.theta_hist.wdra)
        np.testing.assert_array_equal(report.theta_traces["crra"].p10, report.theta_traces["wdra"].p10)

    def test_final_utility_without_epochs(self, small_paths, configs):
        crra, _ = configs
        report = train(small_paths, crra.model_copy(update={"epochs": 0}))
        assert final_utility(report) == report.initial_utility

    def test_seed_mismatch_warns(self, small_paths, configs):
        crra, wdra = configs
        messages = []
        handler = logger.add(messages.append, level="WARNING")
        try:
            compare(
                small_paths,
                crra.model_copy(update={"epochs": 0}),
                wdra.model_copy(update={"seed": 99, "epochs": 0}),
            )
        finally:
            logger.remove(handler)
        assert any("different seeds" in str(m) for m in messages)

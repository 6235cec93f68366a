import math

import numpy as np
import pytest
from scipy import stats

from app.schemas.kou import KouParams
from app.schemas.simulation import PathSet, SimConfig
from app.services.kou_model import log_return_moments, return_cdf
from app.services.simulation import log_returns, paths_to_returns_sample, simulate

DT = 1.0 / 247.0


def _path_set(prices, params) -> PathSet:
    return PathSet(prices=np.atleast_2d(prices), seed=0, params=params, dt=DT)


class TestSimulate:
    def test_deterministic_dynamics(self):
        params = KouParams(mu=0.08, sigma=0.0, lam=0.0, p=0.5, eta1=2.0, eta2=1.0)
        paths = simulate(params, SimConfig(s0=100.0, n_days=30, n_paths=4, dt=DT, seed=1))
        expected = 100.0 * np.exp(0.08 * DT * np.arange(31))
        for row in paths.prices:
            np.testing.assert_allclose(row, expected, rtol=1e-12)

    def test_shape_and_initial_column(self, small_paths):
        assert small_paths.prices.shape == (6, 13)
        assert np.all(small_paths.prices[:, 0] == 100.0)
        assert small_paths.jump_counts.shape == (6,)

    def test_same_seed_is_bit_identical(self, ref_params):
        config = SimConfig(n_days=50, n_paths=8, dt=DT, seed=42)
        a, b = simulate(ref_params, config), simulate(ref_params, config)
        assert np.array_equal(a.prices, b.prices)
        assert np.array_equal(a.jump_counts, b.jump_counts)

    def test_different_seeds_differ(self, ref_params):
        a = simulate(ref_params, SimConfig(n_days=50, n_paths=2, dt=DT, seed=1))
        b = simulate(ref_params, SimConfig(n_days=50, n_paths=2, dt=DT, seed=2))
        assert not np.array_equal(a.prices, b.prices)

    def test_more_paths_keep_existing_ones(self, ref_params):
        few = simulate(ref_params, SimConfig(n_days=40, n_paths=3, dt=DT, seed=9))
        many = simulate(ref_params, SimConfig(n_days=40, n_paths=10, dt=DT, seed=9))
        assert np.array_equal(many.prices[:3], few.prices)

    def test_threads_do_not_change_result(self, ref_params):
        config = SimConfig(n_days=60, n_paths=12, dt=DT, seed=5)
        serial = simulate(ref_params, config, threads=1)
        parallel = simulate(ref_params, config, threads=4)
        assert np.array_equal(serial.prices, parallel.prices)

    def test_prices_positive(self, ref_params):
        paths = simulate(ref_params, SimConfig(n_days=247, n_paths=50, dt=DT, seed=0))
        assert np.all(paths.prices > 0.0)

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            SimConfig(n_paths=0)
        with pytest.raises(ValueError):
            SimConfig(s0=-1.0)

    def test_one_day_returns_follow_density(self, ref_params):
        # 405 paths x 247 days ~ 1e5 one-day returns
        sample = paths_to_returns_sample(simulate(ref_params, SimConfig(n_days=247, n_paths=405, dt=DT, seed=7)))
        result = stats.kstest(sample.values, lambda x: return_cdf(x, ref_params, DT))
        assert result.statistic < 0.01

    @pytest.mark.slow
    def test_moments_match_analytic(self, ref_params):
        paths = simulate(ref_params, SimConfig(n_days=247, n_paths=10_000, dt=DT, seed=3))
        x = log_returns(paths).ravel()
        n = x.size
        mean, var = log_return_moments(ref_params, DT)
        sample_var = x.var(ddof=1)
        m4 = np.mean((x - x.mean()) ** 4)
        assert abs(x.mean() - mean) < 3.0 * math.sqrt(sample_var / n)
        assert abs(sample_var - var) < 3.0 * math.sqrt((m4 - sample_var**2) / n)

    @pytest.mark.slow
    def test_jump_rate(self, ref_params):
        n_paths = 10_000
        paths = simulate(ref_params, SimConfig(n_days=247, n_paths=n_paths, dt=DT, seed=4))
        horizon = 247 * DT
        rate = paths.jump_counts.sum() / (n_paths * horizon)
        assert abs(rate - ref_params.lam) < 3.0 * math.sqrt(ref_params.lam / (n_paths * horizon))


class TestLogReturns:
    def test_constant_path(self, gbm_params):
        assert np.all(log_returns(_path_set([[100.0] * 5], gbm_params)) == 0.0)

    def test_two_point_path(self, gbm_params):
        out = log_returns(_path_set([[100.0, 110.0]], gbm_params))
        assert out.shape == (1, 1)
        assert out[0, 0] == pytest.approx(0.09531, abs=1e-5)

    def test_reconstructs_prices(self, small_paths):
        r = log_returns(small_paths)
        rebuilt = small_paths.s0 * np.exp(np.cumsum(r, axis=1))
        np.testing.assert_allclose(rebuilt, small_paths.prices[:, 1:], rtol=1e-10)

    def test_sample_flattens_path_by_path(self, small_paths):
        sample = paths_to_returns_sample(small_paths)
        assert len(sample) == 6 * 12
        np.testing.assert_array_equal(sample.values[:12], log_returns(small_paths)[0])
        assert sample.dt == small_paths.dt

import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st
from scipy import integrate, stats

from app.core.exceptions import ApproximationDomainError, ParameterDomainError
from app.schemas.kou import KouParams, ReturnSample
from app.services.kou_model import (
    jump_size_density,
    jump_size_moments,
    log_likelihood,
    log_return_moments,
    return_cdf,
    return_density,
    validate_params,
)

DT = 1.0 / 247.0

valid_params = st.builds(
    KouParams,
    mu=st.floats(-1.0, 1.0),
    sigma=st.floats(0.05, 1.0),
    lam=st.floats(0.0, 20.0),
    p=st.floats(0.01, 0.99),
    eta1=st.floats(1.1, 50.0),
    eta2=st.floats(0.2, 50.0),
    alpha=st.floats(-0.3, 0.3),
)


def _wide_grid(params: KouParams, n: int = 10_000) -> np.ndarray:
    _, var = log_return_moments(params, DT)
    sd = math.sqrt(var)
    mean = (params.mu - 0.5 * params.sigma**2) * DT
    return np.linspace(mean - 20 * sd, mean + 20 * sd, n)


def _mass(params: KouParams, hi: float = math.inf, weight=None) -> float:
    """Quadrature of g (times ``weight``) below ``hi``, split around the narrow central peak."""
    c = (params.mu - 0.5 * params.sigma**2) * DT
    cuts = [c - 150.0, c - 1.0, c - 0.2, c, c + 0.2, c + 1.0, c + 150.0]
    edges = [x for x in cuts if x < hi] + ([hi] if hi < cuts[-1] else [])

    def f(x):
        g = return_density(x, params, DT)
        return g if weight is None else weight(x) * g

    return sum(integrate.quad(f, a, b, limit=400)[0] for a, b in zip(edges[:-1], edges[1:]))


class TestKouParams:
    def test_q_is_derived(self, ref_params):
        assert ref_params.q == pytest.approx(1.0 - ref_params.p)

    def test_lambda_alias(self):
        p = KouParams(**{"mu": 0.0, "sigma": 0.2, "lambda": 3.0, "p": 0.4, "eta1": 2.0, "eta2": 1.0})
        assert p.lam == 3.0
        assert p.model_dump(by_alias=True)["lambda"] == 3.0

    @pytest.mark.parametrize(
        "field,value",
        [("sigma", -0.1), ("lam", -1.0), ("p", 1.5), ("eta1", 1.0), ("eta2", 0.0), ("mu", float("nan"))],
    )
    def test_invalid_fields_rejected(self, ref_params, field, value):
        with pytest.raises(ValueError):
            ref_params.replace(**{field: value})

    def test_vector_round_trip(self, ref_params):
        assert KouParams.from_vector(ref_params.to_vector()) == ref_params

    def test_validate_names_field(self, ref_params):
        bad = ref_params.model_construct(**{**ref_params.model_dump(), "eta1": 0.5})
        with pytest.raises(ParameterDomainError) as info:
            validate_params(bad)
        assert info.value.field == "eta1"


class TestJumpSizeDensity:
    def test_value_at_alpha(self):
        params = KouParams(mu=0.0, sigma=0.2, lam=1.0, p=0.5, eta1=2.0, eta2=3.0, alpha=0.1)
        assert jump_size_density(0.1, params) == pytest.approx(1.0)

    def test_upper_branch(self):
        params = KouParams(mu=0.0, sigma=0.2, lam=1.0, p=1.0, eta1=2.0, eta2=3.0, alpha=0.0)
        assert jump_size_density(1.0, params) == pytest.approx(2.0 * math.exp(-2.0), rel=1e-12)
        assert jump_size_density(-0.5, params) == 0.0

    def test_integrates_to_one(self):
        params = KouParams(mu=0.0, sigma=0.2, lam=1.0, p=0.3, eta1=4.0, eta2=2.5, alpha=0.05)
        lower, _ = integrate.quad(lambda y: jump_size_density(y, params), params.alpha - 50 / params.eta2, params.alpha)
        upper, _ = integrate.quad(lambda y: jump_size_density(y, params), params.alpha, params.alpha + 50 / params.eta1)
        assert lower + upper == pytest.approx(1.0, abs=1e-8)

    def test_moments_match_quadrature(self, ref_params):
        mean, var = jump_size_moments(ref_params)
        a = ref_params.alpha
        pieces = [(a - 60 / ref_params.eta2, a), (a, a + 60 / ref_params.eta1)]

        def moment(k: int) -> float:
            integrand = lambda y: y**k * jump_size_density(y, ref_params)  # noqa: E731
            return sum(integrate.quad(integrand, lo, hi, limit=200)[0] for lo, hi in pieces)

        m1, m2 = moment(1), moment(2)
        assert mean == pytest.approx(m1, rel=1e-6)
        assert var == pytest.approx(m2 - m1**2, rel=1e-6)


class TestReturnDensity:
    def test_gaussian_limit(self):
        params = KouParams(mu=0.05, sigma=0.2, lam=0.0, p=0.5, eta1=2.0, eta2=1.0)
        x = np.linspace(-0.05, 0.05, 101)
        expected = stats.norm.pdf(x, loc=(0.05 - 0.02) * DT, scale=0.2 * math.sqrt(DT))
        np.testing.assert_allclose(return_density(x, params, DT), expected, rtol=0, atol=1e-12)

    def test_integrates_to_one_with_reference_params(self, ref_params):
        assert _mass(ref_params) == pytest.approx(1.0, abs=1e-4)

    def test_peak_dominates_tails(self, ref_params):
        peak = return_density((ref_params.mu - 0.5 * ref_params.sigma**2) * DT, ref_params, DT)
        tails = return_density(np.array([-0.5, 0.5]), ref_params, DT)
        assert np.all(peak >= 1e3 * tails)

    def test_scalar_in_scalar_out(self, ref_params):
        assert isinstance(return_density(0.0, ref_params, DT), float)

    def test_approximation_domain(self, ref_params):
        with pytest.raises(ApproximationDomainError):
            return_density(0.0, ref_params.replace(lam=300.0), DT)

    def test_requires_diffusion(self, ref_params):
        with pytest.raises(ParameterDomainError):
            return_density(0.0, ref_params.replace(sigma=0.0), DT)

    @hyp_settings(max_examples=20, deadline=None)
    @given(valid_params)
    def test_nonnegative_and_normalised(self, params):
        grid = _wide_grid(params)
        g = return_density(grid, params, DT)
        assert np.all(g >= 0.0)
        assert np.all(np.isfinite(g))
        assert _mass(params) == pytest.approx(1.0, abs=1e-4)

    def test_cdf_matches_integrated_density(self, ref_params):
        for x in (-0.05, -0.01, 0.0, 0.02):
            assert return_cdf(x, ref_params, DT) == pytest.approx(_mass(ref_params, hi=x), abs=1e-6)

    def test_cdf_limits(self, ref_params):
        assert return_cdf(-200.0, ref_params, DT) == pytest.approx(0.0, abs=1e-9)
        assert return_cdf(200.0, ref_params, DT) == pytest.approx(1.0, abs=1e-9)


class TestMoments:
    def test_no_jumps(self):
        params = KouParams(mu=0.1, sigma=0.3, lam=0.0, p=0.5, eta1=2.0, eta2=1.0)
        mean, var = log_return_moments(params, DT)
        assert mean == pytest.approx((0.1 - 0.045) * DT)
        assert var == pytest.approx(0.09 * DT)

    def test_degenerate(self):
        params = KouParams(mu=0.1, sigma=0.0, lam=0.0, p=0.5, eta1=2.0, eta2=1.0)
        assert log_return_moments(params, DT) == pytest.approx((0.1 * DT, 0.0))

    def test_match_density_quadrature(self, ref_params):
        mean, var = log_return_moments(ref_params, DT)
        m1 = _mass(ref_params, weight=lambda x: x)
        m2 = _mass(ref_params, weight=lambda x: x * x)
        assert mean == pytest.approx(m1, rel=1e-4, abs=1e-7)
        # the density allows at most one jump per step: a Bernoulli(lambda dt)
        # mixture, whose variance lacks the (lambda dt E[U])^2 of the Poisson sum
        jump_mean, _ = jump_size_moments(ref_params)
        mixture_var = var - (ref_params.lam * DT * jump_mean) ** 2
        assert mixture_var == pytest.approx(m2 - m1**2, rel=1e-4)
        assert var > m2 - m1**2


class TestLogLikelihood:
    def test_single_point(self, ref_params):
        sample = ReturnSample(values=[0.01], dt=DT)
        assert log_likelihood(sample, ref_params) == pytest.approx(math.log(return_density(0.01, ref_params, DT)))

    def test_permutation_invariant(self, ref_params, gaussian_sample):
        reversed_sample = ReturnSample(values=gaussian_sample.values[::-1], dt=DT)
        assert log_likelihood(gaussian_sample, ref_params) == log_likelihood(reversed_sample, ref_params)

    def test_additive_over_concatenation(self, ref_params, gaussian_sample):
        a = ReturnSample(values=gaussian_sample.values[:150], dt=DT)
        b = ReturnSample(values=gaussian_sample.values[150:], dt=DT)
        assert log_likelihood(gaussian_sample, ref_params) == pytest.approx(
            log_likelihood(a, ref_params) + log_likelihood(b, ref_params), rel=1e-12
        )

    def test_zero_density_is_minus_inf(self):
        params = KouParams(mu=0.0, sigma=1e-3, lam=0.0, p=0.5, eta1=2.0, eta2=1.0)
        sample = ReturnSample(values=[0.0, 1e200], dt=DT)
        with np.errstate(over="ignore"):
            assert log_likelihood(sample, params) == -math.inf

    def test_empty_sample(self, ref_params):
        with pytest.raises(ParameterDomainError):
            log_likelihood(ReturnSample(values=[], dt=DT), ref_params)

    def test_true_params_beat_shifted_drift(self, ref_params):
        from app.schemas.simulation import SimConfig
        from app.services.simulation import paths_to_returns_sample, simulate

        wins = 0
        for seed in range(10):
            sample = paths_to_returns_sample(
                simulate(ref_params, SimConfig(n_days=100, n_paths=100, dt=DT, seed=seed))
            )
            shifted = ref_params.replace(mu=ref_params.mu + 0.5)
            wins += log_likelihood(sample, ref_params) >= log_likelihood(sample, shifted)
        assert wins >= 9

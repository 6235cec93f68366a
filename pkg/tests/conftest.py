"""
Shared fixtures.
"""
import os

os.environ.setdefault("LOG_TO_FILE", "false")
os.environ.setdefault("LOG_LEVEL", "WARNING")

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from app.main import main  # noqa: E402
from app.schemas.kou import REFERENCE_PARAMS, KouParams, ReturnSample  # noqa: E402
from app.schemas.simulation import SimConfig  # noqa: E402
from app.schemas.training import TrainConfig  # noqa: E402
from app.services.simulation import simulate  # noqa: E402

DT = 1.0 / 247.0


@pytest.fixture
def ref_params() -> KouParams:
    return REFERENCE_PARAMS


@pytest.fixture
def gbm_params() -> KouParams:
    return KouParams(mu=0.10, sigma=0.25, lam=0.0, p=0.5, eta1=2.0, eta2=1.0, alpha=0.0)


@pytest.fixture
def small_paths(ref_params):
    return simulate(ref_params, SimConfig(s0=100.0, n_days=12, n_paths=6, dt=DT, seed=3))


@pytest.fixture
def gaussian_sample() -> ReturnSample:
    rng = np.random.default_rng(11)
    return ReturnSample(values=rng.normal(0.0002, 0.015, size=400), dt=DT)


@pytest.fixture
def tiny_config() -> TrainConfig:
    return TrainConfig(
        zeta=0.5,
        eta_discount=0.05,
        r=0.03,
        w0=1.0,
        dt=DT,
        batch_size=3,
        learning_rate=1e-2,
        epochs=2,
        hidden_size=4,
        seed=5,
    )


@pytest.fixture
def out_dir(tmp_path):
    return tmp_path / "out"


@pytest.fixture
def cli():
    """Run the command line in-process and return its exit code."""

    def run(*argv) -> int:
        return main([str(a) for a in argv])

    return run

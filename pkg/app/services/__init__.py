"""
Service layer: jump-diffusion model, calibration, simulation, utilities,
training and comparison.
"""
from app.services.calibration import calibrate, density_report, estimate_lambda_init
from app.services.comparison import compare
from app.services.kou_model import log_likelihood, return_density
from app.services.simulation import log_returns, simulate
from app.services.training import objective, simulate_policy, train
from app.services.utility import crra_utility, risk_aversion, wdra_utility, wealth_step

__all__ = [
    "calibrate",
    "compare",
    "crra_utility",
    "density_report",
    "estimate_lambda_init",
    "log_likelihood",
    "log_returns",
    "objective",
    "return_density",
    "risk_aversion",
    "simulate",
    "simulate_policy",
    "train",
    "wdra_utility",
    "wealth_step",
]

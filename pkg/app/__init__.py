"""
WDRA Toolkit - jump-diffusion calibration and simulation with recurrent
consumption-investment policies under wealth-dependent risk aversion.
"""
__version__ = "1.0.0"

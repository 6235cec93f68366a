"""
Command controllers.
"""
from app.cli.commands.calibrate import CalibrateCommand
from app.cli.commands.compare import CompareCommand
from app.cli.commands.simulate import SimulateCommand
from app.cli.commands.train import TrainCommand

__all__ = ["CalibrateCommand", "CompareCommand", "SimulateCommand", "TrainCommand"]

"""
Command-line controller layer.
"""
from app.cli.commands import CalibrateCommand, CompareCommand, SimulateCommand, TrainCommand
from app.cli.router import CommandRouter

command_router = CommandRouter()

command_router.include_command(CalibrateCommand())
command_router.include_command(SimulateCommand())
command_router.include_command(TrainCommand())
command_router.include_command(CompareCommand())

__all__ = ["command_router", "CommandRouter"]

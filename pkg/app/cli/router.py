"""
Command router: registers BaseCommand controllers as argparse sub-commands.
"""
import argparse
from typing import Dict, List

from app.cli.common import add_global_arguments
from app.core.base import BaseCommand


class CommandRouter:
    """Registry of commands, mounted onto a parser by ``install``."""

    def __init__(self):
        self.commands: Dict[str, BaseCommand] = {}

    def include_command(self, command: BaseCommand) -> None:
        if command.name in self.commands:
            raise ValueError(f"command '{command.name}' registered twice")
        self.commands[command.name] = command

    @property
    def names(self) -> List[str]:
        return list(self.commands)

    def install(self, parser: argparse.ArgumentParser) -> None:
        sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
        for command in self.commands.values():
            child = sub.add_parser(command.name, help=command.help, description=command.help)
            add_global_arguments(child)
            command.add_arguments(child)
            child.set_defaults(handler=command)

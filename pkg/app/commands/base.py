import argparse
from dataclasses import dataclass

from app.config import Settings


@dataclass
class CommandContext:
    command: str
    args: argparse.Namespace
    settings: Settings


@dataclass
class CommandResult:
    handled: bool
    output: bytes = b""
    exit_code: int = 0

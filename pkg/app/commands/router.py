from app.commands.alpha import AlphaCommand
from app.commands.base import CommandContext, CommandResult
from app.commands.evaluate import EvalCommand
from app.commands.gen import GenCommand
from app.commands.loss import LossCommand
from app.commands.peaks import PeaksCommand
from app.commands.selftest import SelftestCommand
from app.commands.serve import ServeCommand
from app.commands.viz import ShapeCommand, VizCommand


class CommandRouter:
    def __init__(self) -> None:
        self.commands = [
            GenCommand(),
            PeaksCommand(),
            EvalCommand(),
            AlphaCommand(),
            LossCommand(),
            VizCommand(),
            ShapeCommand(),
            SelftestCommand(),
            ServeCommand(),
        ]

    def route(self, context: CommandContext) -> CommandResult:
        for command in self.commands:
            if command.name == context.command:
                return command.handle(context)
        return CommandResult(handled=False, exit_code=2)

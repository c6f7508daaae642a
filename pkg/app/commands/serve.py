import argparse
import logging

import uvicorn

from app.commands.base import CommandContext, CommandResult

logger = logging.getLogger(__name__)


class ServeCommand:
    name = "serve"
    help = "run the HTTP scoring service"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--host", default="127.0.0.1")
        parser.add_argument("--port", type=int, default=8000)

    def handle(self, context: CommandContext) -> CommandResult:
        args = context.args
        logger.info("starting service host=%s port=%s", args.host, args.port)
        uvicorn.run("app.main:app", host=args.host, port=args.port, log_level=context.settings.log_level.lower())
        return CommandResult(handled=True)

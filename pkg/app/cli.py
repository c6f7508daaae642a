import argparse
import logging
import sys
from pathlib import Path

from app.commands.base import CommandContext
from app.commands.router import CommandRouter
from app.config import Settings, build_settings, configure_logging
from app.errors import CenterKitError

logger = logging.getLogger(__name__)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("run configuration")
    group.add_argument("--config", type=Path, default=None, help="JSON config file")
    group.add_argument("--stride", type=float, default=None)
    group.add_argument("--eta", type=float, default=None)
    group.add_argument("--phi", type=float, default=None)
    group.add_argument("--gt", dest="gt_kind", choices=["gc", "gaussian", "ellipse"], default=None)
    group.add_argument("--sigma", type=float, default=None)
    group.add_argument("--threshold", dest="prob_threshold", type=float, default=None)
    group.add_argument("--min-distance", dest="min_distance", type=float, default=None)
    group.add_argument("--window-radius", dest="window_radius", type=int, default=None)
    group.add_argument("--lambda", dest="match_lambda", type=float, default=None)
    group.add_argument("--mu", dest="match_mu", type=float, default=None)
    group.add_argument("--alpha", type=float, default=None)
    group.add_argument("--gamma", type=float, default=None)
    group.add_argument("--aggregation", choices=["pooled", "macro"], default=None)
    group.add_argument("--band", choices=["small", "medium", "large", "all"], default=None)
    group.add_argument("--threads", type=int, default=None)
    group.add_argument("--log-level", dest="log_level", default=None)
    return common


def build_parser(router: CommandRouter) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="centerkit", description="Center-point heatmap targets, losses and scoring.")
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_options()
    for command in router.commands:
        sub = subparsers.add_parser(command.name, help=command.help, parents=[common])
        command.add_arguments(sub)
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, object]:
    return {name: getattr(args, name) for name in Settings.model_fields if getattr(args, name, None) is not None}


def main(argv: list[str] | None = None) -> int:
    router = CommandRouter()
    args = build_parser(router).parse_args(argv)
    try:
        settings = build_settings(args.config, _overrides(args))
        configure_logging(settings.log_level)
        result = router.route(CommandContext(command=args.command, args=args, settings=settings))
    except CenterKitError as exc:
        logger.info("command failed command=%s exit_code=%s error=%s", args.command, exc.exit_code, exc)
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code
    except Exception:
        logger.exception("command crashed command=%s", args.command)
        sys.stderr.write("error: unexpected failure, see log for details\n")
        return 1

    if not result.handled:
        sys.stderr.write(f"error: unknown command {args.command}\n")
    sys.stdout.buffer.write(result.output)
    sys.stdout.buffer.flush()
    return result.exit_code


if __name__ == "__main__":
    raise SystemExit(main())

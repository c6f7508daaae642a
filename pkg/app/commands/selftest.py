import argparse

from app.commands.base import CommandContext, CommandResult
from app.oracle.selftest import run_selftest


class SelftestCommand:
    name = "selftest"
    help = "run the oracle equivalence suites"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--seed", type=int, default=0)

    def handle(self, context: CommandContext) -> CommandResult:
        cases = run_selftest(context.args.seed)
        lines = [
            f"{'PASS' if case.passed else 'FAIL'} {case.name} instances={case.instances} max_error={case.max_error:.3g}"
            for case in cases
        ]
        passed = sum(case.passed for case in cases)
        lines.append(f"selftest {passed}/{len(cases)} passed")
        return CommandResult(
            handled=True,
            output="".join(f"{line}\n" for line in lines).encode("utf-8"),
            exit_code=0 if passed == len(cases) else 1,
        )

"""
Command-line dispatch.

run(argv) parses one subcommand, validates its RunConfig, runs it and writes
the manifest. Library errors become a one-line ``error reason=... exit=...``
on stderr followed by the human-readable detail.
"""
import argparse
import logging
import sys
import time
import warnings

from src import __version__
from src.commands.bath_commands import BandsCommand, DosCommand
from src.commands.emitter_commands import BoundStateCommand, GiantCommand
from src.commands.entangle_command import EntangleCommand
from src.commands.figure_command import ReproduceFigureCommand
from src.commands.schema_command import SchemaCommand, ValidateConfigCommand
from src.commands.spin_commands import PolarizationCommand, SpinModelCommand, SSHSpectrumCommand
from src.data.config import OVERRIDES, build_config
from src.data.run_state import RunState
from src.data.storage import write_manifest
from src.errors import CONFIG_EXIT, BilatticeError

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def _scalar(text):
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


class CommandManager:
    def __init__(self):
        self.current_command = None
        self.commands = {}
        for cls in (
            BandsCommand,
            DosCommand,
            BoundStateCommand,
            GiantCommand,
            SpinModelCommand,
            SSHSpectrumCommand,
            PolarizationCommand,
            EntangleCommand,
            ReproduceFigureCommand,
            SchemaCommand,
            ValidateConfigCommand,
        ):
            command = cls(self)
            self.commands[command.name] = command

    def build_parser(self):
        parser = argparse.ArgumentParser(
            prog="bilattice", description="Emitters in bilayer square-lattice photonic baths."
        )
        parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
        sub = parser.add_subparsers(dest="command", required=True)
        for name, command in self.commands.items():
            p = sub.add_parser(name, help=command.help, allow_abbrev=False)
            if command.writes_manifest:
                p.add_argument("--config", default=None, metavar="JSON", help="run config file")
                p.add_argument("--out", default=None, help="output directory")
                p.add_argument("--png", action="store_true", help="also write PNG previews")
            p.add_argument("--quiet", action="store_true", help="no progress bars")
            p.add_argument("--log-level", default="INFO", choices=LOG_LEVELS)
            for flag in command.flags:
                p.add_argument(f"--{flag}", dest=flag, type=_scalar, default=None, help=f"overrides {'.'.join(OVERRIDES[flag])}")
            command.add_arguments(p)
        return parser

    def dispatch(self, args):
        """Runs the selected command; returns the list of artifacts written."""
        command = self.commands[args.command]
        self.current_command = command
        command.setup()
        if not command.writes_manifest:
            command.execute(None, args)
            return []

        overrides = {flag: getattr(args, flag) for flag in command.flags}
        config = build_config(command.name, args.config, overrides, out=args.out, target=getattr(args, "target", None))
        state = RunState.get_instance()
        state.set_threads(config.numerics.threads)
        state.show_progress = not args.quiet

        start = time.perf_counter()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            command.execute(config, args)
        for w in caught:
            logger.warning("%s: %s", w.category.__name__, w.message)
            state.record_warning(f"{w.category.__name__}: {w.message}")
        artifacts = list(command.artifacts)
        write_manifest(
            config.out,
            command.name,
            config.canonical(),
            artifacts,
            time.perf_counter() - start,
            extra={"warnings": list(state.warnings_seen)},
        )
        return artifacts

    def cleanup(self):
        if self.current_command:
            self.current_command.cleanup()
            self.current_command = None


def run(argv=None):
    """Entry point; returns the process exit code."""
    manager = CommandManager()
    parser = manager.build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse has already printed usage
        return CONFIG_EXIT if exc.code else 0
    logging.getLogger().setLevel(args.log_level)
    try:
        manager.dispatch(args)
    except BilatticeError as exc:
        print(exc.one_line(), file=sys.stderr)
        print(str(exc), file=sys.stderr)
        logger.debug("details: %s", exc.details)
        return exc.exit_code
    finally:
        manager.cleanup()
    return 0

import logging
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

# Support both `python -m iotsec` and direct `python iotsec/main.py`
try:
    from .commands_setup import CliCommand, DemoHandshake, KeysizeTable, Run, Version, parse_command
    from .config import settings
    from .errors import ConfigError, RegistryFormatError, UnknownCurve
    from .handlers import handle_demo_handshake, handle_keysize_table, handle_run, handle_version
    from .texts import CONFIG_ERROR
except ImportError:
    root = Path(__file__).resolve().parents[1]
    if str(root) not in sys.path:
        sys.path.insert(0, str(root))
    from iotsec.commands_setup import CliCommand, DemoHandshake, KeysizeTable, Run, Version, parse_command  # type: ignore
    from iotsec.config import settings  # type: ignore
    from iotsec.errors import ConfigError, RegistryFormatError, UnknownCurve  # type: ignore
    from iotsec.handlers import handle_demo_handshake, handle_keysize_table, handle_run, handle_version  # type: ignore
    from iotsec.texts import CONFIG_ERROR  # type: ignore


def run_command(command: CliCommand, out: TextIO, err: TextIO) -> int:
    """Dispatch one parsed command. Exit codes: 0 ok, 1 violation, 2 bad input."""
    try:
        if isinstance(command, Run):
            return handle_run(command, out, err)
        if isinstance(command, KeysizeTable):
            return handle_keysize_table(command, out)
        if isinstance(command, DemoHandshake):
            return handle_demo_handshake(command, out)
        if isinstance(command, Version):
            return handle_version(command, out)
    except (ConfigError, RegistryFormatError, UnknownCurve) as exc:
        err.write(CONFIG_ERROR.format(message=exc) + "\n")
        return 2
    raise TypeError(f"unhandled command {command!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, settings.log_level, logging.WARNING),
        format="%(asctime)s %(levelname)s [%(name)s] %(message)s",
    )
    try:
        command = parse_command(argv)
    except SystemExit as exc:
        # argparse already printed usage
        return int(exc.code) if isinstance(exc.code, int) else 2
    return run_command(command, sys.stdout, sys.stderr)


if __name__ == "__main__":
    sys.exit(main())

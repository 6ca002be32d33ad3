from __future__ import annotations

from typing import TextIO

from .. import __version__
from ..commands_setup import Version
from ..texts import PROG


def handle_version(command: Version, out: TextIO) -> int:
    out.write(f"{PROG} {__version__}\n")
    return 0

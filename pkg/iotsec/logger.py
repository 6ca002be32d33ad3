from __future__ import annotations

import json
from enum import Enum
from ipaddress import IPv4Address
from pathlib import Path
from typing import Any, Dict, List, Union


def _render(value: Any) -> Any:
    if isinstance(value, (bytes, bytearray)):
        return bytes(value).hex()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, IPv4Address):
        return str(value)
    raise TypeError(f"cannot log value of type {type(value).__name__}")


class EventLog:
    """
    Append-only simulator event log, rendered as line-delimited JSON.

    Rows carry the simulation epoch, never wall-clock time, so two runs of the
    same scenario and seed produce the same bytes.
    """

    def __init__(self) -> None:
        self.rows: List[Dict[str, Any]] = []

    def append(self, epoch: int, event: str, **fields: Any) -> None:
        row: Dict[str, Any] = {"epoch": epoch, "event": event}
        row.update(fields)
        self.rows.append(row)

    def count(self, event: str) -> int:
        return sum(1 for row in self.rows if row["event"] == event)

    def lines(self) -> List[str]:
        return [json.dumps(row, sort_keys=True, separators=(",", ":"), default=_render) for row in self.rows]

    def write(self, path: Union[str, Path]) -> None:
        text = "".join(line + "\n" for line in self.lines())
        Path(path).write_text(text, encoding="utf-8")

    def __len__(self) -> int:
        return len(self.rows)

from __future__ import annotations

import json
from typing import TextIO

from ..commands_setup import KeysizeTable
from ..keysizes import keysize_rows
from ..texts import KEYSIZE_HEADER, KEYSIZE_ROW


def handle_keysize_table(command: KeysizeTable, out: TextIO) -> int:
    rows = keysize_rows()
    if command.format == "json":
        payload = [
            {
                "security_bits": int(row.level),
                "ecc_bits": row.ecc_bits,
                "rsa_bits": row.rsa_bits,
                "ratio": round(row.ratio, 2),
            }
            for row in rows
        ]
        out.write(json.dumps(payload, indent=2) + "\n")
        return 0

    out.write(KEYSIZE_HEADER + "\n")
    for row in rows:
        out.write(KEYSIZE_ROW.format(level=int(row.level), ecc=row.ecc_bits, rsa=row.rsa_bits, ratio=row.ratio) + "\n")
    return 0

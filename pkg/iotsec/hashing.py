from __future__ import annotations

import hashlib
import hmac

# SHA-256 is the only primitive: challenges, nonces, key schedule, keystream and tags.
DIGEST_SIZE = 32


def digest(*parts: bytes) -> bytes:
    """SHA-256 over the concatenation of ``parts``."""
    h = hashlib.sha256()
    for part in parts:
        h.update(part)
    return h.digest()


def digest_int(*parts: bytes) -> int:
    return int.from_bytes(digest(*parts), "big")


def keyed_hash(key: bytes, *parts: bytes) -> bytes:
    """HMAC-SHA256 of the concatenated parts."""
    mac = hmac.new(key, b"", hashlib.sha256)
    for part in parts:
        mac.update(part)
    return mac.digest()


def same_bytes(a: bytes, b: bytes) -> bool:
    return hmac.compare_digest(a, b)


class RunningHash:
    """Transcript hash that can be snapshotted at any point without being consumed."""

    def __init__(self) -> None:
        self._h = hashlib.sha256()

    def update(self, data: bytes) -> None:
        self._h.update(data)

    def snapshot(self) -> bytes:
        return self._h.copy().digest()

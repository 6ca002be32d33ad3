from __future__ import annotations

from dataclasses import dataclass, field

from ..hashing import digest, keyed_hash
from .messages import COOKIE_SIZE, NONCE_SIZE


@dataclass(frozen=True)
class SessionKeys:
    initiator_write_key: bytes = field(repr=False)
    responder_write_key: bytes = field(repr=False)
    initiator_mac_key: bytes = field(repr=False)
    responder_mac_key: bytes = field(repr=False)
    session_id: bytes = b""


def derive_session_keys(shared_secret: bytes, client_nonce: bytes, server_nonce: bytes) -> SessionKeys:
    if not shared_secret:
        raise ValueError("empty shared secret")
    if len(client_nonce) != NONCE_SIZE or len(server_nonce) != NONCE_SIZE:
        raise ValueError(f"nonces must be {NONCE_SIZE} bytes")
    master = digest(b"\x01", shared_secret, client_nonce, server_nonce)
    return SessionKeys(
        initiator_write_key=digest(master, b"iwk"),
        responder_write_key=digest(master, b"rwk"),
        initiator_mac_key=digest(master, b"imk"),
        responder_mac_key=digest(master, b"rmk"),
        session_id=digest(master, b"sid")[:4],
    )


def compute_cookie(server_secret: bytes, initiator_address: bytes, client_nonce: bytes) -> bytes:
    """Stateless anti-DoS cookie: the responder keeps nothing until it comes back."""
    return keyed_hash(server_secret, initiator_address, client_nonce)[:COOKIE_SIZE]

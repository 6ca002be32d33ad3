"""
Endpoint-to-gateway VPN tunnels carrying private-address packets.

Frame layout (big-endian):

    magic "VT" (2) | version 0x01 (1) | session id (4) | seq (8) | ct_len (2) | ciphertext | tag (32)

Encrypt-then-MAC: the ciphertext is the inner packet XOR a keystream whose
block i is SHA-256(write_key || seq || i), and the tag is HMAC-SHA256 under
the sender MAC key over header || ciphertext.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field
from ipaddress import IPv4Address, IPv4Network
from typing import Dict, Optional, Tuple, Union

from .errors import (
    BadLength,
    BadMagic,
    BadTag,
    BadVersion,
    NoRoute,
    PayloadTooLarge,
    Replay,
    SequenceExhausted,
    WrongSession,
)
from .handshake import Role, SessionKeys
from .hashing import DIGEST_SIZE, digest, keyed_hash, same_bytes
from .replay import ReplayWindow

log = logging.getLogger(__name__)

MAGIC = b"VT"
VERSION = 0x01
TAG_SIZE = 32
MAX_PAYLOAD = 1200
INNER_HEADER_SIZE = 8
MAX_SEQ = (1 << 64) - 1

_HEADER = struct.Struct(">2sB4sQH")
HEADER_SIZE = _HEADER.size


@dataclass(frozen=True)
class InnerPacket:
    src_private: IPv4Address
    dst_private: IPv4Address
    payload: bytes

    def to_bytes(self) -> bytes:
        return self.src_private.packed + self.dst_private.packed + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "InnerPacket":
        if len(data) < INNER_HEADER_SIZE:
            raise BadLength("inner packet shorter than its address header")
        return cls(IPv4Address(data[:4]), IPv4Address(data[4:8]), data[8:])


@dataclass(frozen=True)
class TunnelFrame:
    session_id: bytes
    seq: int
    ciphertext: bytes
    tag: bytes
    magic: bytes = MAGIC
    version: int = VERSION

    def header(self) -> bytes:
        return _HEADER.pack(self.magic, self.version, self.session_id, self.seq, len(self.ciphertext))


@dataclass
class TunnelSession:
    session_id: bytes
    role: Role
    route: Tuple[str, str]
    write_key: bytes = field(repr=False)
    write_mac_key: bytes = field(repr=False)
    peer_key: bytes = field(repr=False)
    peer_mac_key: bytes = field(repr=False)
    send_seq: int = 0
    replay_window: ReplayWindow = field(default_factory=ReplayWindow)

    @property
    def local(self) -> str:
        return self.route[0]

    @property
    def remote(self) -> str:
        return self.route[1]


def establish_tunnel(session_keys: SessionKeys, role: Union[Role, str], route: Tuple[str, str]) -> TunnelSession:
    role = Role(role)
    k = session_keys
    if role is Role.INITIATOR:
        mine = (k.initiator_write_key, k.initiator_mac_key)
        theirs = (k.responder_write_key, k.responder_mac_key)
    else:
        mine = (k.responder_write_key, k.responder_mac_key)
        theirs = (k.initiator_write_key, k.initiator_mac_key)
    return TunnelSession(
        session_id=k.session_id,
        role=role,
        route=route,
        write_key=mine[0],
        write_mac_key=mine[1],
        peer_key=theirs[0],
        peer_mac_key=theirs[1],
    )


def _keystream(key: bytes, seq: int, length: int) -> bytes:
    seq_bytes = seq.to_bytes(8, "big")
    blocks = (length + DIGEST_SIZE - 1) // DIGEST_SIZE
    stream = b"".join(digest(key, seq_bytes, i.to_bytes(4, "big")) for i in range(blocks))
    return stream[:length]


def _xor(data: bytes, stream: bytes) -> bytes:
    return bytes(a ^ b for a, b in zip(data, stream))


def _check_structure(frame: TunnelFrame) -> None:
    if frame.magic != MAGIC:
        raise BadMagic(f"bad magic {frame.magic!r}")
    if frame.version != VERSION:
        raise BadVersion(f"unsupported version {frame.version}")
    if len(frame.session_id) != 4 or len(frame.tag) != TAG_SIZE:
        raise BadLength("session id or tag has the wrong size")
    if not INNER_HEADER_SIZE <= len(frame.ciphertext) <= INNER_HEADER_SIZE + MAX_PAYLOAD:
        raise BadLength(f"ciphertext length {len(frame.ciphertext)} out of range")


def encode_frame(frame: TunnelFrame) -> bytes:
    return frame.header() + frame.ciphertext + frame.tag


def decode_frame(data: bytes) -> TunnelFrame:
    if len(data) < HEADER_SIZE + TAG_SIZE:
        raise BadLength(f"datagram of {len(data)} bytes is shorter than a frame")
    magic, version, session_id, seq, ct_len = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    if version != VERSION:
        raise BadVersion(f"unsupported version {version}")
    if HEADER_SIZE + ct_len + TAG_SIZE != len(data):
        raise BadLength(f"length field {ct_len} disagrees with datagram size {len(data)}")
    frame = TunnelFrame(
        session_id=session_id,
        seq=seq,
        ciphertext=data[HEADER_SIZE : HEADER_SIZE + ct_len],
        tag=data[HEADER_SIZE + ct_len :],
    )
    _check_structure(frame)
    return frame


def is_tunnel_datagram(data: bytes) -> bool:
    return data[:2] == MAGIC


def encapsulate(session: TunnelSession, packet: InnerPacket) -> TunnelFrame:
    if len(packet.payload) > MAX_PAYLOAD:
        raise PayloadTooLarge(f"payload of {len(packet.payload)} bytes exceeds {MAX_PAYLOAD}")
    if session.send_seq > MAX_SEQ:
        raise SequenceExhausted("sequence space exhausted; the session must be replaced")
    seq = session.send_seq
    plaintext = packet.to_bytes()
    ciphertext = _xor(plaintext, _keystream(session.write_key, seq, len(plaintext)))
    header = _HEADER.pack(MAGIC, VERSION, session.session_id, seq, len(ciphertext))
    tag = keyed_hash(session.write_mac_key, header, ciphertext)
    session.send_seq = seq + 1
    return TunnelFrame(session_id=session.session_id, seq=seq, ciphertext=ciphertext, tag=tag)


def decapsulate(session: TunnelSession, frame: TunnelFrame) -> InnerPacket:
    _check_structure(frame)
    if frame.session_id != session.session_id:
        raise WrongSession(f"frame for session {frame.session_id.hex()} on {session.session_id.hex()}")
    expected = keyed_hash(session.peer_mac_key, frame.header(), frame.ciphertext)
    if not same_bytes(expected, frame.tag):
        raise BadTag("frame tag does not verify")
    if not session.replay_window.check(frame.seq):
        raise Replay(f"sequence {frame.seq} already seen or behind the window")
    session.replay_window.mark(frame.seq)
    plaintext = _xor(frame.ciphertext, _keystream(session.peer_key, frame.seq, len(frame.ciphertext)))
    return InnerPacket.from_bytes(plaintext)


# --- routing -----------------------------------------------------------------


@dataclass
class RoutingTable:
    """Private address -> endpoint id, with an optional server mediator for in-plan misses."""

    routes: Dict[IPv4Address, str] = field(default_factory=dict)
    plan: IPv4Network = IPv4Network("10.0.0.0/8")
    mediator: Optional[str] = None

    def add(self, address: Union[str, IPv4Address], endpoint: str) -> None:
        self.routes[IPv4Address(address)] = endpoint


def route_inner(packet: InnerPacket, routing_table: RoutingTable) -> str:
    endpoint = routing_table.routes.get(packet.dst_private)
    if endpoint is not None:
        return endpoint
    if routing_table.mediator is not None and packet.dst_private in routing_table.plan:
        return routing_table.mediator
    raise NoRoute(f"no route to {packet.dst_private}")

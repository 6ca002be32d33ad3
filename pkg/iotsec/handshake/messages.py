"""
Handshake message codec.

Every message is ``type (1 byte) || body length (2 bytes, big-endian) || body``;
a flight is the concatenation of its messages.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum
from typing import Callable, ClassVar, Dict, Iterable, List, Optional, Tuple, Union

from ..errors import AbortReason, MalformedMessage

NONCE_SIZE = 32
COOKIE_SIZE = 16
MAC_SIZE = 32

_HEADER = struct.Struct(">BH")


class MessageType(IntEnum):
    CLIENT_HELLO = 0x01
    HELLO_VERIFY_REQUEST = 0x02
    SERVER_HELLO = 0x03
    CERTIFICATE = 0x04
    KEY_EXCHANGE = 0x05
    CERTIFICATE_VERIFY = 0x06
    FINISHED = 0x07
    ABORT = 0x08


def _exact(body: bytes, size: int, what: str) -> bytes:
    if len(body) != size:
        raise MalformedMessage(f"{what} must be {size} bytes, got {len(body)}")
    return body


@dataclass(frozen=True)
class ClientHello:
    TYPE: ClassVar[MessageType] = MessageType.CLIENT_HELLO
    client_nonce: bytes
    cookie: Optional[bytes] = None

    def to_body(self) -> bytes:
        cookie = self.cookie or b""
        return self.client_nonce + bytes([len(cookie)]) + cookie

    @classmethod
    def from_body(cls, body: bytes) -> "ClientHello":
        if len(body) < NONCE_SIZE + 1:
            raise MalformedMessage("ClientHello too short")
        cookie_len = body[NONCE_SIZE]
        if cookie_len not in (0, COOKIE_SIZE):
            raise MalformedMessage(f"bad cookie length {cookie_len}")
        _exact(body, NONCE_SIZE + 1 + cookie_len, "ClientHello")
        cookie = body[NONCE_SIZE + 1 :] if cookie_len else None
        return cls(client_nonce=body[:NONCE_SIZE], cookie=cookie)


@dataclass(frozen=True)
class HelloVerifyRequest:
    TYPE: ClassVar[MessageType] = MessageType.HELLO_VERIFY_REQUEST
    cookie: bytes

    def to_body(self) -> bytes:
        return self.cookie

    @classmethod
    def from_body(cls, body: bytes) -> "HelloVerifyRequest":
        return cls(cookie=_exact(body, COOKIE_SIZE, "cookie"))


@dataclass(frozen=True)
class ServerHello:
    TYPE: ClassVar[MessageType] = MessageType.SERVER_HELLO
    server_nonce: bytes

    def to_body(self) -> bytes:
        return self.server_nonce

    @classmethod
    def from_body(cls, body: bytes) -> "ServerHello":
        return cls(server_nonce=_exact(body, NONCE_SIZE, "server nonce"))


@dataclass(frozen=True)
class CertificateMsg:
    TYPE: ClassVar[MessageType] = MessageType.CERTIFICATE
    certificate: bytes

    def to_body(self) -> bytes:
        return self.certificate

    @classmethod
    def from_body(cls, body: bytes) -> "CertificateMsg":
        if not body:
            raise MalformedMessage("empty certificate")
        return cls(certificate=body)


@dataclass(frozen=True)
class KeyExchange:
    TYPE: ClassVar[MessageType] = MessageType.KEY_EXCHANGE
    ephemeral_public: bytes
    signature: bytes

    def to_body(self) -> bytes:
        return struct.pack(">H", len(self.ephemeral_public)) + self.ephemeral_public + self.signature

    @classmethod
    def from_body(cls, body: bytes) -> "KeyExchange":
        if len(body) < 2:
            raise MalformedMessage("KeyExchange too short")
        (key_len,) = struct.unpack_from(">H", body)
        if key_len == 0 or len(body) <= 2 + key_len:
            raise MalformedMessage("KeyExchange key length does not fit body")
        return cls(ephemeral_public=body[2 : 2 + key_len], signature=body[2 + key_len :])


@dataclass(frozen=True)
class CertificateVerify:
    TYPE: ClassVar[MessageType] = MessageType.CERTIFICATE_VERIFY
    signature: bytes

    def to_body(self) -> bytes:
        return self.signature

    @classmethod
    def from_body(cls, body: bytes) -> "CertificateVerify":
        if not body:
            raise MalformedMessage("empty CertificateVerify")
        return cls(signature=body)


@dataclass(frozen=True)
class Finished:
    TYPE: ClassVar[MessageType] = MessageType.FINISHED
    verify_mac: bytes

    def to_body(self) -> bytes:
        return self.verify_mac

    @classmethod
    def from_body(cls, body: bytes) -> "Finished":
        return cls(verify_mac=_exact(body, MAC_SIZE, "verify_mac"))


@dataclass(frozen=True)
class Abort:
    TYPE: ClassVar[MessageType] = MessageType.ABORT
    reason: AbortReason

    def to_body(self) -> bytes:
        return bytes([int(self.reason)])

    @classmethod
    def from_body(cls, body: bytes) -> "Abort":
        _exact(body, 1, "Abort")
        try:
            return cls(reason=AbortReason(body[0]))
        except ValueError:
            raise MalformedMessage(f"unknown abort reason {body[0]}")


HandshakeMessage = Union[
    ClientHello,
    HelloVerifyRequest,
    ServerHello,
    CertificateMsg,
    KeyExchange,
    CertificateVerify,
    Finished,
    Abort,
]

_DECODERS: Dict[MessageType, Callable[[bytes], HandshakeMessage]] = {
    cls.TYPE: cls.from_body  # type: ignore[attr-defined]
    for cls in (
        ClientHello,
        HelloVerifyRequest,
        ServerHello,
        CertificateMsg,
        KeyExchange,
        CertificateVerify,
        Finished,
        Abort,
    )
}


def encode_message(message: HandshakeMessage) -> bytes:
    body = message.to_body()
    if len(body) > 0xFFFF:
        raise MalformedMessage("message body exceeds 65535 bytes")
    return _HEADER.pack(int(message.TYPE), len(body)) + body


def _decode_at(data: bytes, pos: int) -> Tuple[HandshakeMessage, int]:
    if len(data) - pos < _HEADER.size:
        raise MalformedMessage("truncated message header")
    tag, length = _HEADER.unpack_from(data, pos)
    start = pos + _HEADER.size
    body = data[start : start + length]
    if len(body) != length:
        raise MalformedMessage("truncated message body")
    try:
        decoder = _DECODERS[MessageType(tag)]
    except ValueError:
        raise MalformedMessage(f"unknown message type 0x{tag:02x}")
    return decoder(body), start + length


def decode_message(data: bytes) -> HandshakeMessage:
    message, end = _decode_at(data, 0)
    if end != len(data):
        raise MalformedMessage(f"{len(data) - end} trailing bytes after message")
    return message


def encode_flight(messages: Iterable[HandshakeMessage]) -> bytes:
    return b"".join(encode_message(m) for m in messages)


def decode_flight(data: bytes) -> List[HandshakeMessage]:
    if not data:
        raise MalformedMessage("empty flight")
    messages: List[HandshakeMessage] = []
    pos = 0
    while pos < len(data):
        message, pos = _decode_at(data, pos)
        messages.append(message)
    return messages


def flight_size(messages: Iterable[HandshakeMessage]) -> int:
    return len(encode_flight(messages))

"""
Exception hierarchy shared by every iotsec module.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Optional


class IotSecError(Exception):
    """Base class for all errors raised by iotsec."""


# --- crypto -----------------------------------------------------------------


class CryptoError(IotSecError):
    pass


class CurveError(CryptoError):
    """Curve parameters fail a structural check (singular curve, base point off curve)."""


class UnknownCurve(CryptoError):
    pass


class InvalidPoint(CryptoError):
    pass


class MalformedEncoding(CryptoError):
    pass


class UnknownLevel(CryptoError):
    pass


# --- registry ---------------------------------------------------------------


class RegistryError(IotSecError):
    pass


class DuplicateUsername(RegistryError):
    pass


class DuplicateId(RegistryError):
    pass


class DuplicateAddress(RegistryError):
    pass


class UnknownGateway(RegistryError):
    pass


class UnknownSubject(RegistryError):
    pass


class AddressOutOfPlan(RegistryError):
    pass


class InvalidIdentifier(RegistryError):
    pass


class RegistryFormatError(RegistryError):
    pass


# --- handshake --------------------------------------------------------------


class AbortReason(IntEnum):
    """1-byte reason codes carried by Abort messages."""

    BAD_COOKIE = 0x01
    BAD_CERTIFICATE = 0x02
    BAD_SIGNATURE = 0x03
    BAD_FINISHED = 0x04
    WRONG_PHASE = 0x05
    MALFORMED_MESSAGE = 0x06
    TIMEOUT = 0x07
    PEER_ABORT = 0x08


class HandshakeError(IotSecError):
    reason: AbortReason = AbortReason.MALFORMED_MESSAGE


class BadCookie(HandshakeError):
    reason = AbortReason.BAD_COOKIE


class BadCertificate(HandshakeError):
    reason = AbortReason.BAD_CERTIFICATE


class BadSignature(HandshakeError):
    reason = AbortReason.BAD_SIGNATURE


class BadFinished(HandshakeError):
    reason = AbortReason.BAD_FINISHED


class WrongPhase(HandshakeError):
    reason = AbortReason.WRONG_PHASE


class MalformedMessage(HandshakeError):
    reason = AbortReason.MALFORMED_MESSAGE


class HandshakeTimeout(HandshakeError):
    reason = AbortReason.TIMEOUT


class PeerAborted(HandshakeError):
    reason = AbortReason.PEER_ABORT


# --- tunnel -----------------------------------------------------------------


class TunnelError(IotSecError):
    pass


class PayloadTooLarge(TunnelError):
    pass


class SequenceExhausted(TunnelError):
    pass


class BadMagic(TunnelError):
    pass


class BadVersion(TunnelError):
    pass


class BadLength(TunnelError):
    pass


class BadTag(TunnelError):
    pass


class Replay(TunnelError):
    pass


class WrongSession(TunnelError):
    pass


class NoRoute(TunnelError):
    pass


# --- simulator --------------------------------------------------------------


class SimulationError(IotSecError):
    pass


class ConfigError(SimulationError):
    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.message = message


class UnknownFrameIndex(SimulationError):
    pass


class NoHandshake(SimulationError):
    pass


def error_name(exc: Optional[BaseException]) -> Optional[str]:
    """Class name used in reports and event-log rows."""
    return type(exc).__name__ if exc is not None else None

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum
from typing import Dict

from .ecc import CurveParams, CurvePoint, KeyPair, decode_point, encode_point
from .errors import CryptoError, MalformedEncoding
from .schnorr import Signature, decode_signature, encode_signature, sign, verify

_TBS_PREFIX = b"IOTSEC-CERT\x01"


class SubjectKind(str, Enum):
    USER = "user"
    GATEWAY = "gateway"
    IOT_DEVICE = "iot_device"
    SERVER = "server"


class CertificateStatus(str, Enum):
    ACTIVE = "active"
    REVOKED = "revoked"
    UNKNOWN = "unknown"


_KIND_CODES: Dict[SubjectKind, int] = {
    SubjectKind.USER: 1,
    SubjectKind.GATEWAY: 2,
    SubjectKind.IOT_DEVICE: 3,
    SubjectKind.SERVER: 4,
}
_KINDS_BY_CODE = {code: kind for kind, code in _KIND_CODES.items()}


@dataclass(frozen=True)
class Certificate:
    subject_id: str
    subject_kind: SubjectKind
    subject_public_key: CurvePoint
    issued_at: int
    signature: Signature


def _tbs(curve: CurveParams, subject_id: str, kind: SubjectKind, public_key: CurvePoint, issued_at: int) -> bytes:
    sid = subject_id.encode("utf-8")
    key = encode_point(curve, public_key)
    return b"".join(
        [
            _TBS_PREFIX,
            struct.pack(">H", len(sid)),
            sid,
            bytes([_KIND_CODES[kind]]),
            struct.pack(">H", len(key)),
            key,
            struct.pack(">Q", issued_at),
        ]
    )


def canonical_encoding(curve: CurveParams, cert: Certificate) -> bytes:
    """The signed portion: every field except the signature."""
    return _tbs(curve, cert.subject_id, cert.subject_kind, cert.subject_public_key, cert.issued_at)


def issue_certificate(
    curve: CurveParams,
    issuer: KeyPair,
    subject_id: str,
    kind: SubjectKind,
    public_key: CurvePoint,
    issued_at: int,
) -> Certificate:
    tbs = _tbs(curve, subject_id, kind, public_key, issued_at)
    return Certificate(
        subject_id=subject_id,
        subject_kind=kind,
        subject_public_key=public_key,
        issued_at=issued_at,
        signature=sign(curve, issuer, tbs),
    )


def self_signed_certificate(
    curve: CurveParams, key: KeyPair, subject_id: str, kind: SubjectKind, issued_at: int = 0
) -> Certificate:
    return issue_certificate(curve, key, subject_id, kind, key.q, issued_at)


def verify_certificate(curve: CurveParams, root_public: CurvePoint, cert: Certificate) -> bool:
    try:
        return verify(curve, root_public, canonical_encoding(curve, cert), cert.signature)
    except CryptoError:
        return False


def encode_certificate(curve: CurveParams, cert: Certificate) -> bytes:
    return canonical_encoding(curve, cert) + encode_signature(curve, cert.signature)


def decode_certificate(curve: CurveParams, data: bytes) -> Certificate:
    try:
        if not data.startswith(_TBS_PREFIX):
            raise MalformedEncoding("certificate prefix missing")
        pos = len(_TBS_PREFIX)
        (sid_len,) = struct.unpack_from(">H", data, pos)
        pos += 2
        sid = data[pos : pos + sid_len]
        if len(sid) != sid_len:
            raise MalformedEncoding("truncated subject id")
        pos += sid_len
        kind = _KINDS_BY_CODE.get(data[pos])
        if kind is None:
            raise MalformedEncoding(f"unknown subject kind {data[pos]}")
        pos += 1
        (key_len,) = struct.unpack_from(">H", data, pos)
        pos += 2
        key = data[pos : pos + key_len]
        if len(key) != key_len:
            raise MalformedEncoding("truncated public key")
        pos += key_len
        (issued_at,) = struct.unpack_from(">Q", data, pos)
        pos += 8
        return Certificate(
            subject_id=sid.decode("utf-8"),
            subject_kind=kind,
            subject_public_key=decode_point(curve, key),
            issued_at=issued_at,
            signature=decode_signature(curve, data[pos:]),
        )
    except (struct.error, IndexError, UnicodeDecodeError) as e:
        raise MalformedEncoding(f"malformed certificate: {e}")

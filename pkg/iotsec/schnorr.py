"""
Deterministic Schnorr signatures over the curves in ``iotsec.curves``.

sign:   k = H("nonce" || d || m) mod (n - 1) + 1, R = kG,
        e = H(enc(R) || enc(Q) || m) mod n, s = k + e*d mod n
verify: sG == R + eQ
"""

from __future__ import annotations

from dataclasses import dataclass

from .ecc import CurveParams, CurvePoint, KeyPair, decode_point, encode_point, point_add, scalar_mul
from .errors import CryptoError, InvalidPoint, MalformedEncoding
from .hashing import digest_int


@dataclass(frozen=True)
class Signature:
    r_point: CurvePoint
    s: int


def _challenge(curve: CurveParams, r_point: CurvePoint, public: CurvePoint, message: bytes) -> int:
    return digest_int(encode_point(curve, r_point), encode_point(curve, public), message) % curve.n


def _nonce(curve: CurveParams, d: int, message: bytes) -> int:
    return digest_int(b"nonce", d.to_bytes(curve.scalar_bytes, "big"), message) % (curve.n - 1) + 1


def sign(curve: CurveParams, key: KeyPair, message: bytes) -> Signature:
    if not message:
        raise ValueError("cannot sign an empty message")
    k = _nonce(curve, key.d, message)
    r_point = scalar_mul(curve, k, curve.g)
    e = _challenge(curve, r_point, key.q, message)
    return Signature(r_point=r_point, s=(k + e * key.d) % curve.n)


def verify(curve: CurveParams, public: CurvePoint, message: bytes, signature: Signature) -> bool:
    if public.is_identity or not curve.contains(public):
        raise InvalidPoint("signer public key is not a valid non-identity point")
    if not message:
        return False
    r_point = signature.r_point
    if r_point.is_identity or not curve.contains(r_point):
        return False
    if not 0 <= signature.s < curve.n:
        return False
    e = _challenge(curve, r_point, public, message)
    lhs = scalar_mul(curve, signature.s, curve.g)
    rhs = point_add(curve, r_point, scalar_mul(curve, e, public))
    return lhs == rhs


def encode_signature(curve: CurveParams, signature: Signature) -> bytes:
    return encode_point(curve, signature.r_point) + signature.s.to_bytes(curve.scalar_bytes, "big")


def decode_signature(curve: CurveParams, data: bytes) -> Signature:
    if not data:
        raise MalformedEncoding("empty signature")
    point_len = 1 if data[0] == 0x00 else curve.point_bytes
    if len(data) != point_len + curve.scalar_bytes:
        raise MalformedEncoding(f"signature of {len(data)} bytes does not fit {curve.name}")
    r_point = decode_point(curve, data[:point_len])
    return Signature(r_point=r_point, s=int.from_bytes(data[point_len:], "big"))


def verify_encoded(curve: CurveParams, public: CurvePoint, message: bytes, data: bytes) -> bool:
    """verify() over wire bytes; undecodable signatures are simply invalid."""
    try:
        signature = decode_signature(curve, data)
    except CryptoError:
        return False
    return verify(curve, public, message, signature)

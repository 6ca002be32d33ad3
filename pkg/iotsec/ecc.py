"""
Short Weierstrass curve arithmetic over prime fields: y^2 = x^3 + ax + b (mod p).

This is protocol-fidelity code, not production cryptography. Nothing here is
constant-time; field inversion is the interpreter's extended-Euclid modular
inverse.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .errors import CurveError, InvalidPoint, MalformedEncoding


@dataclass(frozen=True)
class CurvePoint:
    """Affine point; both coordinates ``None`` is the identity (point at infinity)."""

    x: Optional[int] = None
    y: Optional[int] = None

    @property
    def is_identity(self) -> bool:
        return self.x is None and self.y is None

    def __str__(self) -> str:
        return "O" if self.is_identity else f"({self.x}, {self.y})"


IDENTITY = CurvePoint()


@dataclass(frozen=True)
class CurveParams:
    name: str
    p: int
    a: int
    b: int
    g: CurvePoint
    n: int
    h: int = 1

    def __post_init__(self) -> None:
        if (4 * self.a ** 3 + 27 * self.b ** 2) % self.p == 0:
            raise CurveError(f"curve {self.name} is singular")
        if self.g.is_identity or not self.contains(self.g):
            raise CurveError(f"base point of {self.name} is not on the curve")

    @property
    def field_bytes(self) -> int:
        return (self.p.bit_length() + 7) // 8

    @property
    def scalar_bytes(self) -> int:
        return (self.n.bit_length() + 7) // 8

    @property
    def point_bytes(self) -> int:
        """Length of an uncompressed non-identity encoding."""
        return 1 + 2 * self.field_bytes

    def contains(self, point: CurvePoint) -> bool:
        if point.is_identity:
            return True
        x, y = point.x, point.y
        if x is None or y is None:
            return False
        if not (0 <= x < self.p and 0 <= y < self.p):
            return False
        return (y * y - (x * x * x + self.a * x + self.b)) % self.p == 0

    def check_order(self) -> bool:
        """True when n * g is the identity."""
        return scalar_mul(self, self.n, self.g).is_identity


@dataclass(frozen=True)
class KeyPair:
    d: int = field(repr=False)
    q: CurvePoint


def _inverse(value: int, p: int) -> int:
    return pow(value % p, -1, p)


def _require(curve: CurveParams, point: CurvePoint) -> None:
    if not curve.contains(point):
        raise InvalidPoint(f"{point} is not on curve {curve.name}")


def validate_point(curve: CurveParams, point: CurvePoint) -> bool:
    return curve.contains(point)


def negate(curve: CurveParams, point: CurvePoint) -> CurvePoint:
    _require(curve, point)
    if point.is_identity:
        return IDENTITY
    return CurvePoint(point.x, (-point.y) % curve.p)  # type: ignore[operator]


def _affine_add(curve: CurveParams, p1: CurvePoint, p2: CurvePoint) -> CurvePoint:
    if p1.is_identity:
        return p2
    if p2.is_identity:
        return p1
    p = curve.p
    x1, y1, x2, y2 = p1.x, p1.y, p2.x, p2.y
    if x1 == x2:
        # P + (-P), including the doubling of a point with y = 0
        if (y1 + y2) % p == 0:
            return IDENTITY
        lam = (3 * x1 * x1 + curve.a) * _inverse(2 * y1, p) % p
    else:
        lam = (y2 - y1) * _inverse(x2 - x1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    y3 = (lam * (x1 - x3) - y1) % p
    return CurvePoint(x3, y3)


def point_add(curve: CurveParams, p1: CurvePoint, p2: CurvePoint) -> CurvePoint:
    """Chord-and-tangent group law."""
    _require(curve, p1)
    _require(curve, p2)
    return _affine_add(curve, p1, p2)


# Jacobian coordinates: (X, Y, Z) ~ (X/Z^2, Y/Z^3); Z == 0 is the identity.
_Jacobian = Tuple[int, int, int]
_J_IDENTITY: _Jacobian = (1, 1, 0)


def _j_double(curve: CurveParams, pt: _Jacobian) -> _Jacobian:
    x, y, z = pt
    if z == 0 or y == 0:
        return _J_IDENTITY
    p = curve.p
    yy = y * y % p
    s = 4 * x * yy % p
    z2 = z * z % p
    m = (3 * x * x + curve.a * z2 * z2) % p
    nx = (m * m - 2 * s) % p
    ny = (m * (s - nx) - 8 * yy * yy) % p
    nz = 2 * y * z % p
    return nx, ny, nz


def _j_add(curve: CurveParams, p1: _Jacobian, p2: _Jacobian) -> _Jacobian:
    if p1[2] == 0:
        return p2
    if p2[2] == 0:
        return p1
    p = curve.p
    x1, y1, z1 = p1
    x2, y2, z2 = p2
    z1z1 = z1 * z1 % p
    z2z2 = z2 * z2 % p
    u1 = x1 * z2z2 % p
    u2 = x2 * z1z1 % p
    s1 = y1 * z2 * z2z2 % p
    s2 = y2 * z1 * z1z1 % p
    if u1 == u2:
        if s1 != s2:
            return _J_IDENTITY
        return _j_double(curve, p1)
    h = (u2 - u1) % p
    r = (s2 - s1) % p
    hh = h * h % p
    hhh = h * hh % p
    v = u1 * hh % p
    x3 = (r * r - hhh - 2 * v) % p
    y3 = (r * (v - x3) - s1 * hhh) % p
    z3 = h * z1 * z2 % p
    return x3, y3, z3


def _to_affine(curve: CurveParams, pt: _Jacobian) -> CurvePoint:
    x, y, z = pt
    if z == 0:
        return IDENTITY
    p = curve.p
    zinv = _inverse(z, p)
    zinv2 = zinv * zinv % p
    return CurvePoint(x * zinv2 % p, y * zinv2 * zinv % p)


def scalar_mul(curve: CurveParams, k: int, point: CurvePoint) -> CurvePoint:
    """k-fold sum of ``point`` by left-to-right double-and-add."""
    _require(curve, point)
    if k < 0:
        raise ValueError("scalar must be non-negative")
    if k == 0 or point.is_identity:
        return IDENTITY
    base: _Jacobian = (point.x, point.y, 1)  # type: ignore[assignment]
    acc = _J_IDENTITY
    for bit in bin(k)[2:]:
        acc = _j_double(curve, acc)
        if bit == "1":
            acc = _j_add(curve, acc, base)
    return _to_affine(curve, acc)


def keygen(curve: CurveParams, rng: random.Random) -> KeyPair:
    d = rng.randrange(1, curve.n)
    return KeyPair(d=d, q=scalar_mul(curve, d, curve.g))


def ecdh(curve: CurveParams, own: KeyPair, peer_public: CurvePoint) -> bytes:
    """x-coordinate of d * Q_peer, big-endian, padded to the field width."""
    if peer_public.is_identity or not curve.contains(peer_public):
        raise InvalidPoint("peer public key is not a valid non-identity point")
    shared = scalar_mul(curve, own.d, peer_public)
    if shared.is_identity:
        raise InvalidPoint("shared point is the identity")
    return shared.x.to_bytes(curve.field_bytes, "big")  # type: ignore[union-attr]


def encode_point(curve: CurveParams, point: CurvePoint) -> bytes:
    _require(curve, point)
    if point.is_identity:
        return b"\x00"
    width = curve.field_bytes
    return b"\x04" + point.x.to_bytes(width, "big") + point.y.to_bytes(width, "big")  # type: ignore[union-attr]


def decode_point(curve: CurveParams, data: bytes) -> CurvePoint:
    if data == b"\x00":
        return IDENTITY
    width = curve.field_bytes
    if len(data) != 1 + 2 * width or data[0] != 0x04:
        raise MalformedEncoding(f"bad point encoding of {len(data)} bytes for {curve.name}")
    point = CurvePoint(
        int.from_bytes(data[1 : 1 + width], "big"),
        int.from_bytes(data[1 + width :], "big"),
    )
    _require(curve, point)
    return point

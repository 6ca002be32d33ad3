from __future__ import annotations

from typing import Dict

from .ecc import CurveParams, CurvePoint
from .errors import UnknownCurve

# Bump when a curve entry changes; snapshots and scenarios refer to curves by name.
CURVE_TABLE_VERSION = 1

# Toy curve for exhaustive checks: 19 points, prime order, cofactor 1.
T17 = CurveParams(
    name="T17",
    p=17,
    a=2,
    b=2,
    g=CurvePoint(5, 1),
    n=19,
)

_P256_P = 0xFFFFFFFF00000001000000000000000000000000FFFFFFFFFFFFFFFFFFFFFFFF

P256 = CurveParams(
    name="P256",
    p=_P256_P,
    a=_P256_P - 3,
    b=0x5AC635D8AA3A93E7B3EBBD55769886BC651D06B0CC53B0F63BCE3C3E27D2604B,
    g=CurvePoint(
        0x6B17D1F2E12C4247F8BCE6E563A440F277037D812DEB33A0F4A13945D898C296,
        0x4FE342E2FE1A7F9B8EE7EB4A7C0F9E162BCE33576B315ECECBB6406837BF51F5,
    ),
    n=0xFFFFFFFF00000000FFFFFFFFFFFFFFFFBCE6FAADA7179E84F3B9CAC2FC632551,
)

CURVES: Dict[str, CurveParams] = {
    T17.name: T17,
    P256.name: P256,
}


def get_curve(name: str) -> CurveParams:
    key = name.strip().upper().replace("-", "")
    try:
        return CURVES[key]
    except KeyError:
        raise UnknownCurve(f"unknown curve {name!r}; known: {', '.join(sorted(CURVES))}")

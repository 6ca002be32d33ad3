"""
On-the-wire handshake size, plus what the same exchange would cost if its
key and signature fields were sized for RSA at each security level.

A completed handshake carries four public-key fields (two certificate keys,
two ephemerals) and five signature fields (two certificate signatures, two
KeyExchange signatures, one CertificateVerify). Everything else is overhead
that does not depend on the scheme.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from ..errors import NoHandshake
from ..handshake import KeyExchange, decode_flight
from ..keysizes import Scheme, keysize_rows, public_key_field_bytes, signature_field_bytes
from .network import SimNetwork

KEY_FIELDS = 4
SIGNATURE_FIELDS = 5


@dataclass(frozen=True)
class SchemeEstimate:
    level: int
    ecc_bits: int
    rsa_bits: int
    ecc_total: int
    rsa_total: int


@dataclass(frozen=True)
class HandshakeMeasurement:
    initiator: str
    responder: str
    curve: str
    flights: List[int]
    total: int
    public_key_field: int
    signature_field: int
    overhead: int
    level: Optional[int]
    estimates: List[SchemeEstimate] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _key_exchange(flights: List[bytes]) -> KeyExchange:
    for data in flights:
        for message in decode_flight(data):
            if isinstance(message, KeyExchange):
                return message
    raise NoHandshake("no KeyExchange on the wire")


def measure_handshake_bytes(sim: SimNetwork, pair: Tuple[str, str]) -> HandshakeMeasurement:
    record = sim.handshake_records.get(pair)
    if record is None or record.established_at is None:
        raise NoHandshake(f"no completed handshake between {pair[0]} and {pair[1]}")

    flights = record.distinct_flights()
    sizes = [len(f) for f in flights]
    total = sum(sizes)
    kx = _key_exchange(flights)
    pk_field = len(kx.ephemeral_public)
    sig_field = len(kx.signature)
    overhead = total - KEY_FIELDS * pk_field - SIGNATURE_FIELDS * sig_field

    level = None
    order_bits = sim.curve.n.bit_length()
    estimates = []
    for row in keysize_rows():
        if row.ecc_bits == order_bits:
            level = int(row.level)
        estimates.append(
            SchemeEstimate(
                level=int(row.level),
                ecc_bits=row.ecc_bits,
                rsa_bits=row.rsa_bits,
                ecc_total=overhead
                + KEY_FIELDS * public_key_field_bytes(Scheme.ECC, row.level)
                + SIGNATURE_FIELDS * signature_field_bytes(Scheme.ECC, row.level),
                rsa_total=overhead
                + KEY_FIELDS * public_key_field_bytes(Scheme.RSA, row.level)
                + SIGNATURE_FIELDS * signature_field_bytes(Scheme.RSA, row.level),
            )
        )

    return HandshakeMeasurement(
        initiator=pair[0],
        responder=pair[1],
        curve=sim.curve.name,
        flights=sizes,
        total=total,
        public_key_field=pk_field,
        signature_field=sig_field,
        overhead=overhead,
        level=level,
        estimates=estimates,
    )

"""
Comparable key sizes between RSA and ECC.

Two entries differ from the values usually quoted elsewhere (80 bits -> ECC 160,
256 bits -> RSA 15360); the table keeps them unchanged, see DESIGN.md.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Dict, List, Tuple, Union

from .errors import UnknownLevel


class Scheme(str, Enum):
    ECC = "ECC"
    RSA = "RSA"


class SecurityLevel(IntEnum):
    BITS_80 = 80
    BITS_112 = 112
    BITS_128 = 128
    BITS_192 = 192
    BITS_256 = 256


# security bits -> (ECC key bits, RSA key bits)
KEY_SIZE_TABLE: Dict[SecurityLevel, Tuple[int, int]] = {
    SecurityLevel.BITS_80: (260, 1024),
    SecurityLevel.BITS_112: (224, 2048),
    SecurityLevel.BITS_128: (256, 3072),
    SecurityLevel.BITS_192: (384, 7680),
    SecurityLevel.BITS_256: (521, 15350),
}


@dataclass(frozen=True)
class KeySizeRow:
    level: SecurityLevel
    ecc_bits: int
    rsa_bits: int

    @property
    def ratio(self) -> float:
        return self.rsa_bits / self.ecc_bits


def security_level(bits: Union[int, SecurityLevel]) -> SecurityLevel:
    try:
        return SecurityLevel(int(bits))
    except ValueError:
        raise UnknownLevel(f"no key-size row for {bits} security bits")


def _scheme(scheme: Union[str, Scheme]) -> Scheme:
    try:
        return Scheme(str(scheme.value if isinstance(scheme, Scheme) else scheme).upper())
    except ValueError:
        raise ValueError(f"unknown scheme {scheme!r}")


def key_material_size(scheme: Union[str, Scheme], level: Union[int, SecurityLevel]) -> int:
    ecc_bits, rsa_bits = KEY_SIZE_TABLE[security_level(level)]
    return ecc_bits if _scheme(scheme) is Scheme.ECC else rsa_bits


def keysize_rows() -> List[KeySizeRow]:
    return [KeySizeRow(level, ecc, rsa) for level, (ecc, rsa) in sorted(KEY_SIZE_TABLE.items())]


def _octets(bits: int) -> int:
    return (bits + 7) // 8


def public_key_field_bytes(scheme: Union[str, Scheme], level: Union[int, SecurityLevel]) -> int:
    """Wire size of one public key: uncompressed point for ECC, modulus for RSA."""
    bits = key_material_size(scheme, level)
    if _scheme(scheme) is Scheme.ECC:
        return 1 + 2 * _octets(bits)
    return _octets(bits)


def signature_field_bytes(scheme: Union[str, Scheme], level: Union[int, SecurityLevel]) -> int:
    """Wire size of one signature: Schnorr (R point, s) for ECC, one modulus-size block for RSA."""
    bits = key_material_size(scheme, level)
    if _scheme(scheme) is Scheme.ECC:
        return 1 + 3 * _octets(bits)
    return _octets(bits)

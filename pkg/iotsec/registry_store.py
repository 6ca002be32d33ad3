"""
Registry snapshot file: line-oriented UTF-8, tab-separated, binary fields hex.

    IOTSEC-REGISTRY v1
    meta    curve   <name>
    meta    epoch   <int>
    meta    plan    <cidr>
    root    <private scalar hex>
    server  <id>    <public hex>    <certificate hex>   <status>
    device  <id>    <kind>  <gateway id or empty>   <address>   <public hex>    <certificate hex>   <status>
    user    <name>  <salt hex>  <hash hex>  <mac>   <public hex>    <certificate hex>   <status>

Passwords never appear; only salt and salted hash do.
"""

from __future__ import annotations

import logging
import random
from ipaddress import IPv4Address, IPv4Network
from pathlib import Path
from typing import Dict, List, Optional, Union

from .certificates import decode_certificate, encode_certificate
from .curves import get_curve
from .ecc import CurveParams, KeyPair, decode_point, encode_point, scalar_mul
from .errors import IotSecError, RegistryFormatError
from .registry import (
    DeviceKind,
    DeviceRecord,
    IdentityRegistry,
    MacAddress,
    RecordStatus,
    ServerRecord,
    UserRecord,
)

log = logging.getLogger(__name__)

HEADER = "IOTSEC-REGISTRY v1"


def dump_registry(registry: IdentityRegistry) -> str:
    curve = registry.curve

    def pub(point) -> str:
        return encode_point(curve, point).hex()

    def cert(c) -> str:
        return encode_certificate(curve, c).hex()

    rows: List[List[str]] = [
        ["meta", "curve", curve.name],
        ["meta", "epoch", str(registry.epoch)],
        ["meta", "plan", str(registry.address_plan)],
        ["root", format(registry.root.d, "x")],
    ]
    for s in registry.servers.values():
        rows.append(["server", s.server_id, pub(s.public_key), cert(s.certificate), s.status.value])
    # Insertion order keeps every gateway ahead of the devices behind it
    for d in registry.devices.values():
        rows.append(
            [
                "device",
                d.device_id,
                d.kind.value,
                d.gateway_id or "",
                str(d.private_address),
                pub(d.public_key),
                cert(d.certificate),
                d.status.value,
            ]
        )
    for u in registry.users.values():
        rows.append(
            [
                "user",
                u.username,
                u.password_salt.hex(),
                u.password_hash.hex(),
                str(u.mac),
                pub(u.public_key),
                cert(u.certificate),
                u.status.value,
            ]
        )
    return HEADER + "\n" + "".join("\t".join(row) + "\n" for row in rows)


def parse_registry(text: str, *, rng: Optional[random.Random] = None) -> IdentityRegistry:
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        first = lines[0] if lines else ""
        raise RegistryFormatError(f"unsupported registry header {first!r}")

    meta: Dict[str, str] = {}
    registry: Optional[IdentityRegistry] = None
    curve: Optional[CurveParams] = None

    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split("\t")
        tag = fields[0]
        try:
            if tag == "meta" and len(fields) == 3:
                meta[fields[1]] = fields[2]
            elif tag == "root" and len(fields) == 2:
                curve = get_curve(meta["curve"])
                d = int(fields[1], 16)
                registry = IdentityRegistry(
                    curve,
                    KeyPair(d=d, q=scalar_mul(curve, d, curve.g)),
                    rng=rng,
                    address_plan=IPv4Network(meta.get("plan", "10.0.0.0/8")),
                    epoch=int(meta.get("epoch", "0")),
                )
            elif registry is None or curve is None:
                raise RegistryFormatError("record before root line")
            elif tag == "server" and len(fields) == 5:
                _, sid, pub, cert, status = fields
                registry.servers[sid] = ServerRecord(
                    server_id=sid,
                    public_key=decode_point(curve, bytes.fromhex(pub)),
                    certificate=decode_certificate(curve, bytes.fromhex(cert)),
                    status=RecordStatus(status),
                )
            elif tag == "device" and len(fields) == 8:
                _, did, kind, gw, addr, pub, cert, status = fields
                registry.devices[did] = DeviceRecord(
                    device_id=did,
                    kind=DeviceKind(kind),
                    gateway_id=gw or None,
                    private_address=IPv4Address(addr),
                    public_key=decode_point(curve, bytes.fromhex(pub)),
                    certificate=decode_certificate(curve, bytes.fromhex(cert)),
                    status=RecordStatus(status),
                )
            elif tag == "user" and len(fields) == 8:
                _, name, salt, pw_hash, mac, pub, cert, status = fields
                registry.users[name] = UserRecord(
                    username=name,
                    password_salt=bytes.fromhex(salt),
                    password_hash=bytes.fromhex(pw_hash),
                    mac=MacAddress.parse(mac),
                    public_key=decode_point(curve, bytes.fromhex(pub)),
                    certificate=decode_certificate(curve, bytes.fromhex(cert)),
                    status=RecordStatus(status),
                )
            else:
                raise RegistryFormatError(f"unrecognised record {tag!r} with {len(fields)} fields")
        except (IotSecError, KeyError, ValueError) as e:
            raise RegistryFormatError(f"line {lineno}: {e}")

    if registry is None:
        raise RegistryFormatError("snapshot has no root line")
    return registry


def save_registry(registry: IdentityRegistry, path: Union[str, Path]) -> None:
    Path(path).write_text(dump_registry(registry), encoding="utf-8")
    log.info("registry snapshot written to %s", path)


def load_registry(path: Union[str, Path], *, rng: Optional[random.Random] = None) -> IdentityRegistry:
    return parse_registry(Path(path).read_text(encoding="utf-8"), rng=rng)

"""
Phase-1 registration database owned by the VPN server.

Holds users (username, salted password hash, MAC address) and devices
(gateways and the IoT devices behind them), and issues every certificate
the handshake later accepts. The MAC check is a fail-safe second barrier:
MAC addresses are self-reported and spoofable, so it is defense in depth,
not a cryptographic binding.
"""

from __future__ import annotations

import logging
import random
import re
from dataclasses import dataclass
from enum import Enum
from ipaddress import IPv4Address, IPv4Network
from typing import Dict, Optional, Union

from .certificates import Certificate, CertificateStatus, SubjectKind, issue_certificate
from .ecc import CurveParams, CurvePoint, KeyPair, keygen
from .errors import (
    AddressOutOfPlan,
    DuplicateAddress,
    DuplicateId,
    DuplicateUsername,
    InvalidIdentifier,
    InvalidPoint,
    UnknownGateway,
    UnknownSubject,
)
from .hashing import digest, same_bytes


log = logging.getLogger(__name__)

DEFAULT_ADDRESS_PLAN = IPv4Network("10.0.0.0/8")
SALT_SIZE = 16

_MAC_RE = re.compile(r"^[0-9a-fA-F]{2}([:-][0-9a-fA-F]{2}){5}$")


@dataclass(frozen=True)
class MacAddress:
    octets: bytes

    def __post_init__(self) -> None:
        if len(self.octets) != 6:
            raise ValueError("a MAC address has exactly six octets")

    @classmethod
    def parse(cls, text: str) -> "MacAddress":
        text = text.strip()
        if not _MAC_RE.match(text):
            raise ValueError(f"not a MAC address: {text!r}")
        return cls(bytes(int(part, 16) for part in re.split(r"[:-]", text)))

    def __str__(self) -> str:
        return ":".join(f"{b:02x}" for b in self.octets)


class RecordStatus(str, Enum):
    ACTIVE = "active"
    REVOKED = "revoked"


class Decision(str, Enum):
    ACCEPTED = "accepted"
    BAD_CREDENTIALS = "bad_credentials"
    MAC_MISMATCH = "mac_mismatch"
    REVOKED = "revoked"


class DeviceKind(str, Enum):
    GATEWAY = "gateway"
    IOT_DEVICE = "iot_device"


@dataclass
class UserRecord:
    username: str
    password_salt: bytes
    password_hash: bytes
    mac: MacAddress
    public_key: CurvePoint
    certificate: Certificate
    status: RecordStatus = RecordStatus.ACTIVE


@dataclass
class DeviceRecord:
    device_id: str
    kind: DeviceKind
    gateway_id: Optional[str]
    private_address: IPv4Address
    public_key: CurvePoint
    certificate: Certificate
    status: RecordStatus = RecordStatus.ACTIVE


@dataclass
class ServerRecord:
    server_id: str
    public_key: CurvePoint
    certificate: Certificate
    status: RecordStatus = RecordStatus.ACTIVE


AnyRecord = Union[UserRecord, DeviceRecord, ServerRecord]


def hash_password(salt: bytes, password: str) -> bytes:
    return digest(salt, password.encode("utf-8"))


def _check_identifier(value: str) -> None:
    if not value or any(ch in value for ch in "\t\r\n"):
        raise InvalidIdentifier(f"identifier {value!r} is empty or contains tab/newline")


class IdentityRegistry:
    """Single-owner registry; callers serialize mutations through the server node."""

    def __init__(
        self,
        curve: CurveParams,
        root: KeyPair,
        *,
        rng: Optional[random.Random] = None,
        address_plan: IPv4Network = DEFAULT_ADDRESS_PLAN,
        epoch: int = 0,
    ) -> None:
        self.curve = curve
        self.root = root
        self.address_plan = address_plan
        self.epoch = epoch
        self._rng = rng or random.SystemRandom()
        self.users: Dict[str, UserRecord] = {}
        self.devices: Dict[str, DeviceRecord] = {}
        self.servers: Dict[str, ServerRecord] = {}

    @classmethod
    def create(cls, curve: CurveParams, rng: random.Random, **kwargs) -> "IdentityRegistry":
        return cls(curve, keygen(curve, rng), rng=rng, **kwargs)

    @property
    def root_public(self) -> CurvePoint:
        return self.root.q

    # --- internals ---------------------------------------------------------

    def _issue(self, subject_id: str, kind: SubjectKind, public_key: CurvePoint) -> Certificate:
        self.epoch += 1
        return issue_certificate(self.curve, self.root, subject_id, kind, public_key, self.epoch)

    def _require_key(self, public_key: CurvePoint) -> None:
        if public_key.is_identity or not self.curve.contains(public_key):
            raise InvalidPoint(f"public key is not a valid point on {self.curve.name}")

    def _taken(self, subject_id: str) -> bool:
        return subject_id in self.users or subject_id in self.devices or subject_id in self.servers

    def _record(self, subject_id: str) -> Optional[AnyRecord]:
        return self.users.get(subject_id) or self.devices.get(subject_id) or self.servers.get(subject_id)

    # --- registration ------------------------------------------------------

    def register_user(self, username: str, password: str, mac: MacAddress, public_key: CurvePoint) -> UserRecord:
        _check_identifier(username)
        if self._taken(username):
            raise DuplicateUsername(f"username {username!r} already registered")
        self._require_key(public_key)

        salt = self._rng.getrandbits(8 * SALT_SIZE).to_bytes(SALT_SIZE, "big")
        record = UserRecord(
            username=username,
            password_salt=salt,
            password_hash=hash_password(salt, password),
            mac=mac,
            public_key=public_key,
            certificate=self._issue(username, SubjectKind.USER, public_key),
        )
        self.users[username] = record
        log.info("registered user %s (mac %s)", username, mac)
        return record

    def register_device(
        self,
        device_id: str,
        kind: DeviceKind,
        gateway_id: Optional[str],
        private_address: Union[str, IPv4Address],
        public_key: CurvePoint,
    ) -> DeviceRecord:
        _check_identifier(device_id)
        kind = DeviceKind(kind)
        address = IPv4Address(private_address)
        if self._taken(device_id):
            raise DuplicateId(f"id {device_id!r} already registered")
        if address not in self.address_plan:
            raise AddressOutOfPlan(f"{address} is outside the address plan {self.address_plan}")
        if any(d.private_address == address for d in self.devices.values()):
            raise DuplicateAddress(f"{address} already assigned")
        if kind is DeviceKind.IOT_DEVICE:
            gateway = self.devices.get(gateway_id or "")
            if gateway is None or gateway.kind is not DeviceKind.GATEWAY:
                raise UnknownGateway(f"gateway {gateway_id!r} is not registered")
        else:
            gateway_id = None
        self._require_key(public_key)

        subject_kind = SubjectKind.GATEWAY if kind is DeviceKind.GATEWAY else SubjectKind.IOT_DEVICE
        record = DeviceRecord(
            device_id=device_id,
            kind=kind,
            gateway_id=gateway_id,
            private_address=address,
            public_key=public_key,
            certificate=self._issue(device_id, subject_kind, public_key),
        )
        self.devices[device_id] = record
        log.info("registered %s %s at %s", kind.value, device_id, address)
        return record

    def register_server(self, server_id: str, public_key: CurvePoint) -> ServerRecord:
        _check_identifier(server_id)
        if self._taken(server_id):
            raise DuplicateId(f"id {server_id!r} already registered")
        self._require_key(public_key)
        record = ServerRecord(
            server_id=server_id,
            public_key=public_key,
            certificate=self._issue(server_id, SubjectKind.SERVER, public_key),
        )
        self.servers[server_id] = record
        return record

    # --- checks ------------------------------------------------------------

    def authenticate_credentials(self, username: str, password: str, presented_mac: MacAddress) -> Decision:
        record = self.users.get(username)
        if record is None:
            return Decision.BAD_CREDENTIALS
        if not same_bytes(hash_password(record.password_salt, password), record.password_hash):
            return Decision.BAD_CREDENTIALS
        if record.status is RecordStatus.REVOKED:
            return Decision.REVOKED
        # Fail-safe: valid credentials from an unregistered MAC are still denied
        if presented_mac != record.mac:
            log.warning("credentials for %s presented from unregistered MAC %s", username, presented_mac)
            return Decision.MAC_MISMATCH
        return Decision.ACCEPTED

    def revoke(self, subject_id: str) -> AnyRecord:
        record = self._record(subject_id)
        if record is None:
            raise UnknownSubject(f"no subject {subject_id!r}")
        record.status = RecordStatus.REVOKED
        log.info("revoked %s", subject_id)
        return record

    def lookup_certificate_status(self, subject_id: str) -> CertificateStatus:
        record = self._record(subject_id)
        if record is None:
            return CertificateStatus.UNKNOWN
        if record.status is RecordStatus.REVOKED:
            return CertificateStatus.REVOKED
        return CertificateStatus.ACTIVE

    # --- lookups -----------------------------------------------------------

    def get_user(self, username: str) -> Optional[UserRecord]:
        return self.users.get(username)

    def get_device(self, device_id: str) -> Optional[DeviceRecord]:
        return self.devices.get(device_id)

    def certificate_for(self, subject_id: str) -> Optional[Certificate]:
        record = self._record(subject_id)
        return record.certificate if record is not None else None

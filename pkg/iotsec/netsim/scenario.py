"""
Scenario documents (JSON, ``"schema": 1``) and their validation.

Field-level checks run through pydantic; cross-references (device to
gateway, traffic endpoints, adversary targets) are checked afterwards. Both
report a dotted path such as ``topology.devices[2].gateway``.
"""

from __future__ import annotations

import json
from ipaddress import IPv4Address
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..curves import get_curve
from ..errors import ConfigError, CryptoError
from ..registry import MacAddress
from ..tunnel import MAX_PAYLOAD

SCHEMA_VERSION = 1
SERVER_ADDRESS = IPv4Address("10.0.0.1")
MAX_GATEWAYS = 249
MAX_DEVICES_PER_GATEWAY = 253
MAX_USERS = 254
DEFAULT_ADVERSARY_MAC = "de:ad:be:ef:00:01"
ADVERSARY_ID = "adversary"

Behavior = Literal["report_temperature", "toggle_state", "sink"]
ActionName = Literal["sniff_all", "replay_frame", "inject_frame", "impersonate_user", "self_signed_handshake"]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


def _mac(value: str) -> str:
    MacAddress.parse(value)
    return value


class GatewaySpec(_Model):
    id: str = Field(min_length=1)


class DeviceSpec(_Model):
    id: str = Field(min_length=1)
    gateway: str
    behavior: Behavior = "report_temperature"


class UserSpec(_Model):
    username: str = Field(min_length=1)
    password: str
    mac: str

    @field_validator("mac")
    @classmethod
    def valid_mac(cls, value: str) -> str:
        return _mac(value)


class TopologySpec(_Model):
    server: str = "server"
    gateways: List[GatewaySpec] = Field(default_factory=list)
    devices: List[DeviceSpec] = Field(default_factory=list)
    users: List[UserSpec] = Field(default_factory=list)


class LinkSpec(_Model):
    delay: int = Field(1, ge=1)
    loss_rate: float = Field(0.0, ge=0.0, le=1.0)
    reorder_rate: float = Field(0.0, ge=0.0, le=1.0)
    duplicate_rate: float = Field(0.0, ge=0.0, le=1.0)
    max_reorder_delay: int = Field(3, ge=0)


class RoutingSpec(_Model):
    mode: Literal["mediated", "direct"] = "mediated"
    device_tunnels: bool = False


class HandshakeSpec(_Model):
    timeout: Optional[int] = Field(None, ge=1)
    retransmit_budget: Optional[int] = Field(None, ge=0)


class AdversaryAction(_Model):
    action: ActionName
    epoch: int = Field(0, ge=0)
    index: Optional[int] = Field(None, ge=0)
    data: Optional[str] = None
    target: Optional[str] = None
    username: Optional[str] = None
    password: Optional[str] = None
    mac: Optional[str] = None

    @field_validator("data")
    @classmethod
    def valid_hex(cls, value: Optional[str]) -> Optional[str]:
        if value is not None:
            bytes.fromhex(value)
        return value

    @field_validator("mac")
    @classmethod
    def valid_optional_mac(cls, value: Optional[str]) -> Optional[str]:
        return _mac(value) if value is not None else None

    @model_validator(mode="after")
    def required_arguments(self) -> "AdversaryAction":
        if self.action == "replay_frame" and self.index is None:
            raise ValueError("replay_frame needs 'index'")
        if self.action == "inject_frame" and self.data is None:
            raise ValueError("inject_frame needs 'data' (hex)")
        if self.action == "impersonate_user" and (self.username is None or self.password is None):
            raise ValueError("impersonate_user needs 'username' and 'password'")
        return self


class AdversarySpec(_Model):
    mac: str = DEFAULT_ADVERSARY_MAC
    script: List[AdversaryAction] = Field(default_factory=list)

    @field_validator("mac")
    @classmethod
    def valid_mac(cls, value: str) -> str:
        return _mac(value)


class TrafficItem(_Model):
    sender: str
    receiver: str
    payload: str
    epoch: int = Field(0, ge=0)

    @field_validator("payload")
    @classmethod
    def fits_frame(cls, value: str) -> str:
        if len(value.encode("utf-8")) > MAX_PAYLOAD:
            raise ValueError(f"payload longer than {MAX_PAYLOAD} bytes")
        return value


class RandomTraffic(_Model):
    sender: str
    receiver: str
    count: int = Field(ge=1, le=100_000)
    size: int = Field(64, ge=1, le=MAX_PAYLOAD)
    start_epoch: int = Field(0, ge=0)


class ScenarioConfig(_Model):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    schema_: Literal[1] = Field(alias="schema")
    name: str
    curve: str = "T17"
    seed: Optional[int] = Field(None, ge=0, lt=2**64)
    max_epochs: Optional[int] = Field(None, ge=1)
    topology: TopologySpec
    link: LinkSpec = Field(default_factory=LinkSpec)
    routing: RoutingSpec = Field(default_factory=RoutingSpec)
    handshake: HandshakeSpec = Field(default_factory=HandshakeSpec)
    adversary: Optional[AdversarySpec] = None
    traffic: List[TrafficItem] = Field(default_factory=list)
    random_traffic: Optional[RandomTraffic] = None

    @field_validator("curve")
    @classmethod
    def known_curve(cls, value: str) -> str:
        try:
            return get_curve(value).name
        except CryptoError as e:
            raise ValueError(str(e))


# --- address plan ------------------------------------------------------------


def gateway_address(index: int) -> IPv4Address:
    return IPv4Address(f"10.{index + 1}.0.1")


def device_address(gateway_index: int, position: int) -> IPv4Address:
    return IPv4Address(f"10.{gateway_index + 1}.0.{position + 2}")


def user_address(index: int) -> IPv4Address:
    return IPv4Address(f"10.250.0.{index + 1}")


def address_plan(config: ScenarioConfig) -> Dict[str, IPv4Address]:
    """Private address of every node, in declaration order."""
    topo = config.topology
    plan: Dict[str, IPv4Address] = {topo.server: SERVER_ADDRESS}
    gw_index = {gw.id: i for i, gw in enumerate(topo.gateways)}
    for i, gw in enumerate(topo.gateways):
        plan[gw.id] = gateway_address(i)
    positions: Dict[str, int] = {}
    for dev in topo.devices:
        pos = positions.get(dev.gateway, 0)
        positions[dev.gateway] = pos + 1
        plan[dev.id] = device_address(gw_index[dev.gateway], pos)
    for u, user in enumerate(topo.users):
        plan[user.username] = user_address(u)
    return plan


# --- loading -----------------------------------------------------------------


def _format_loc(loc: Sequence[Union[str, int]]) -> str:
    path = ""
    for part in loc:
        if isinstance(part, int):
            path += f"[{part}]"
        else:
            path += f".{part}" if path else str(part)
    return path or "$"


def _check_references(config: ScenarioConfig) -> None:
    topo = config.topology
    if len(topo.gateways) > MAX_GATEWAYS:
        raise ConfigError("topology.gateways", f"at most {MAX_GATEWAYS} gateways fit the address plan")
    if len(topo.users) > MAX_USERS:
        raise ConfigError("topology.users", f"at most {MAX_USERS} users fit the address plan")

    seen = {topo.server: "topology.server"}

    def claim(node_id: str, path: str) -> None:
        if node_id == ADVERSARY_ID:
            raise ConfigError(path, f"id {ADVERSARY_ID!r} is reserved")
        if node_id in seen:
            raise ConfigError(path, f"id {node_id!r} already used at {seen[node_id]}")
        seen[node_id] = path

    for i, gw in enumerate(topo.gateways):
        claim(gw.id, f"topology.gateways[{i}].id")
    gateways = {gw.id for gw in topo.gateways}
    per_gateway: Dict[str, int] = {}
    for i, dev in enumerate(topo.devices):
        claim(dev.id, f"topology.devices[{i}].id")
        if dev.gateway not in gateways:
            raise ConfigError(f"topology.devices[{i}].gateway", f"unknown gateway {dev.gateway!r}")
        per_gateway[dev.gateway] = per_gateway.get(dev.gateway, 0) + 1
        if per_gateway[dev.gateway] > MAX_DEVICES_PER_GATEWAY:
            raise ConfigError(f"topology.devices[{i}]", f"gateway {dev.gateway!r} holds too many devices")
    for i, user in enumerate(topo.users):
        claim(user.username, f"topology.users[{i}].username")

    for i, item in enumerate(config.traffic):
        for end in ("sender", "receiver"):
            if getattr(item, end) not in seen:
                raise ConfigError(f"traffic[{i}].{end}", f"unknown node {getattr(item, end)!r}")
        if item.sender == item.receiver:
            raise ConfigError(f"traffic[{i}].receiver", "sender and receiver are the same node")
    rt = config.random_traffic
    if rt is not None:
        for end in ("sender", "receiver"):
            if getattr(rt, end) not in seen:
                raise ConfigError(f"random_traffic.{end}", f"unknown node {getattr(rt, end)!r}")
        if rt.sender == rt.receiver:
            raise ConfigError("random_traffic.receiver", "sender and receiver are the same node")
    if config.adversary is not None:
        for i, action in enumerate(config.adversary.script):
            if action.target is not None and action.target not in seen:
                raise ConfigError(f"adversary.script[{i}].target", f"unknown node {action.target!r}")


def parse_scenario(data: Any) -> ScenarioConfig:
    try:
        config = ScenarioConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(_format_loc(first["loc"]), first["msg"])
    _check_references(config)
    return config


def load_scenario(path: Union[str, Path]) -> ScenarioConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError("$", f"cannot read scenario {path}: {e.strerror or e}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("$", f"{path} is not valid JSON: {e.msg} at line {e.lineno}")
    return parse_scenario(data)

import random
from ipaddress import IPv4Address
from typing import Callable, Optional, Tuple

import pytest

from iotsec.curves import P256, T17
from iotsec.ecc import CurveParams, keygen
from iotsec.handshake import HandshakeState, StaticIdentity, TrustAnchor, new_initiator, new_responder
from iotsec.registry import DeviceKind, IdentityRegistry, MacAddress

USER_MAC = MacAddress.parse("02:00:00:aa:00:01")
GATEWAY_ADDRESS = IPv4Address("10.1.0.1")
DEVICE_ADDRESS = IPv4Address("10.1.0.2")
USER_PEER_ADDRESS = b"198.51.0.4"

HandshakePair = Tuple[HandshakeState, HandshakeState, IdentityRegistry]


@pytest.fixture
def t17() -> CurveParams:
    return T17


@pytest.fixture
def p256() -> CurveParams:
    return P256


def build_registry(curve: CurveParams, seed: int = 1) -> IdentityRegistry:
    """Registry with one gateway, one device behind it and one user (password 'hunter2')."""
    rng = random.Random(seed)
    registry = IdentityRegistry.create(curve, rng)
    registry.register_device("gw1", DeviceKind.GATEWAY, None, GATEWAY_ADDRESS, keygen(curve, rng).q)
    registry.register_device("thermo1", DeviceKind.IOT_DEVICE, "gw1", DEVICE_ADDRESS, keygen(curve, rng).q)
    registry.register_user("alice", "hunter2", USER_MAC, keygen(curve, rng).q)
    return registry


def build_pair(
    curve: CurveParams,
    seed: int = 1,
    *,
    initiator_identity: Optional[StaticIdentity] = None,
    retransmit_budget: int = 5,
    timeout: int = 3,
) -> HandshakePair:
    """alice (initiator) and gw1 (responder) with freshly registered static keys."""
    rng = random.Random(seed)
    registry = IdentityRegistry.create(curve, rng)
    gw_key = keygen(curve, rng)
    user_key = keygen(curve, rng)
    gw = registry.register_device("gw1", DeviceKind.GATEWAY, None, GATEWAY_ADDRESS, gw_key.q)
    user = registry.register_user("alice", "hunter2", USER_MAC, user_key.q)
    trust = TrustAnchor(root_public=registry.root_public, status_of=registry.lookup_certificate_status)

    identity = initiator_identity or StaticIdentity(user_key, user.certificate)
    initiator = new_initiator(
        curve,
        identity,
        trust,
        random.Random(seed * 31 + 1),
        expected_peer="gw1",
        retransmit_budget=retransmit_budget,
        timeout=timeout,
    )
    responder = new_responder(
        curve,
        StaticIdentity(gw_key, gw.certificate),
        trust,
        random.Random(seed * 31 + 2),
        cookie_secret=bytes(range(32)),
        peer_address=USER_PEER_ADDRESS,
        retransmit_budget=retransmit_budget,
        timeout=timeout,
    )
    return initiator, responder, registry


@pytest.fixture
def make_pair() -> Callable[..., HandshakePair]:
    return build_pair


@pytest.fixture
def registry_t17() -> IdentityRegistry:
    return build_registry(T17)

from __future__ import annotations

from ipaddress import IPv4Address
from typing import TextIO, Tuple

from ..commands_setup import DemoHandshake
from ..config import settings
from ..curves import get_curve
from ..ecc import CurveParams, keygen
from ..handshake import (
    HandshakeState,
    StaticIdentity,
    TrustAnchor,
    both_established,
    encode_message,
    new_initiator,
    new_responder,
    run_loopback,
)
from ..netsim.rng import derive_bytes, derive_rng
from ..registry import DeviceKind, IdentityRegistry, MacAddress
from ..texts import (
    DEMO_ESTABLISHED,
    DEMO_FAILED,
    DEMO_FLIGHT,
    DEMO_HEADER,
    DEMO_MESSAGE,
    DEMO_TOTAL,
)

DEMO_USER = "alice"
DEMO_GATEWAY = "gw1"
DEMO_USER_MAC = "02:00:00:00:00:01"
DEMO_USER_ADDRESS = IPv4Address("10.250.0.1")
DEMO_GATEWAY_ADDRESS = IPv4Address("10.1.0.1")


def demo_identities(curve: CurveParams, seed: int) -> Tuple[HandshakeState, HandshakeState]:
    """Register one user and one gateway, return a fresh (initiator, responder) pair."""
    registry = IdentityRegistry.create(curve, derive_rng(seed, "demo:registry"))
    user_key = keygen(curve, derive_rng(seed, f"demo:static:{DEMO_USER}"))
    gw_key = keygen(curve, derive_rng(seed, f"demo:static:{DEMO_GATEWAY}"))
    gateway = registry.register_device(DEMO_GATEWAY, DeviceKind.GATEWAY, None, DEMO_GATEWAY_ADDRESS, gw_key.q)
    user = registry.register_user(DEMO_USER, "demo-password", MacAddress.parse(DEMO_USER_MAC), user_key.q)
    trust = TrustAnchor(root_public=registry.root_public, status_of=registry.lookup_certificate_status)

    initiator = new_initiator(
        curve,
        StaticIdentity(user_key, user.certificate),
        trust,
        derive_rng(seed, f"demo:hs:{DEMO_USER}"),
        expected_peer=DEMO_GATEWAY,
    )
    responder = new_responder(
        curve,
        StaticIdentity(gw_key, gateway.certificate),
        trust,
        derive_rng(seed, f"demo:hs:{DEMO_GATEWAY}"),
        cookie_secret=derive_bytes(seed, f"demo:cookie:{DEMO_GATEWAY}", 32),
        peer_address=DEMO_USER_ADDRESS.packed,
    )
    return initiator, responder


def handle_demo_handshake(command: DemoHandshake, out: TextIO) -> int:
    curve = get_curve(command.curve or settings.default_curve)
    initiator, responder = demo_identities(curve, settings.default_seed)
    trace = run_loopback(initiator, responder)

    out.write(DEMO_HEADER.format(curve=curve.name, initiator=DEMO_USER, responder=DEMO_GATEWAY) + "\n")
    for flight in trace.flights:
        messages = flight.messages
        names = " ".join(type(m).__name__ for m in messages)
        out.write(DEMO_FLIGHT.format(index=flight.index + 1, sender=flight.sender, size=len(flight.data), names=names) + "\n")
        if command.verbose:
            for message in messages:
                out.write(DEMO_MESSAGE.format(name=type(message).__name__, size=len(encode_message(message))) + "\n")
    out.write(DEMO_TOTAL.format(total=trace.total_bytes, flights=len(trace.flights)) + "\n")

    if both_established(initiator, responder):
        out.write(DEMO_ESTABLISHED.format(session=initiator.session_keys.session_id.hex()) + "\n")
        return 0
    out.write(
        DEMO_FAILED.format(
            initiator=initiator.failure_reason.name if initiator.failure_reason else initiator.phase.value,
            responder=responder.failure_reason.name if responder.failure_reason else responder.phase.value,
        )
        + "\n"
    )
    return 1

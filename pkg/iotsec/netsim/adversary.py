"""
On-path adversary: sees every link, can replay and inject datagrams, tries
stolen credentials from its own machine, and attempts the handshake with a
certificate it signed itself.
"""

from __future__ import annotations

import logging
from typing import Any, Dict, Iterable

from ..certificates import SubjectKind, self_signed_certificate
from ..ecc import keygen
from ..errors import SimulationError, UnknownFrameIndex
from ..handshake import StaticIdentity
from ..registry import MacAddress
from ..tunnel import is_tunnel_datagram
from .network import (
    ADVERSARY,
    Datagram,
    HandshakeRecord,
    SimNetwork,
    begin_handshake,
    send,
    transmit_datagram,
)
from .report import LoginRecord
from .rng import derive_rng
from .scenario import AdversaryAction

log = logging.getLogger(__name__)

MIN_MATCH = 8


def plaintext_recovered(captured: Iterable[bytes], payloads: Iterable[bytes], window: int = MIN_MATCH) -> int:
    """Number of distinct ``window``-byte substrings of sent payloads that show up in the capture."""
    needles = {p[i : i + window] for p in payloads for i in range(len(p) - window + 1)}
    if not needles:
        return 0
    found = set()
    for data in captured:
        for i in range(len(data) - window + 1):
            chunk = data[i : i + window]
            if chunk in needles:
                found.add(chunk)
    return len(found)


def _sniff_all(sim: SimNetwork, action: AdversaryAction) -> Dict[str, Any]:
    assert sim.adversary is not None
    sim.adversary.sniffing = True
    return {}


def _replay_frame(sim: SimNetwork, action: AdversaryAction) -> Dict[str, Any]:
    adv = sim.adversary
    assert adv is not None and action.index is not None
    if action.index >= len(adv.captured_frames):
        raise UnknownFrameIndex(f"frame {action.index} not captured (have {len(adv.captured_frames)})")
    original = adv.captured_frames[action.index]
    # same bytes, same spoofed source, back onto the original link
    transmit_datagram(sim, Datagram(src=original.src, dst=original.dst, data=original.data, origin=ADVERSARY))
    adv.frames_replayed += 1
    return {"index": action.index, "size": len(original.data)}


def _inject_frame(sim: SimNetwork, action: AdversaryAction) -> Dict[str, Any]:
    adv = sim.adversary
    assert adv is not None and action.data is not None
    target = action.target or sim.config.topology.server
    data = bytes.fromhex(action.data)
    send(sim, adv.node_id, target, data, origin=ADVERSARY)
    if is_tunnel_datagram(data):
        adv.frames_injected += 1
    return {"target": target, "size": len(data)}


def _impersonate_user(sim: SimNetwork, action: AdversaryAction) -> Dict[str, Any]:
    adv = sim.adversary
    assert adv is not None and action.username is not None and action.password is not None
    mac = MacAddress.parse(action.mac) if action.mac else adv.mac
    decision = sim.registry.authenticate_credentials(action.username, action.password, mac)
    sim.logins.append(LoginRecord(actor="adversary", username=action.username, mac=str(mac), decision=decision))
    log.warning("adversary login as %s from %s: %s", action.username, mac, decision.value)
    return {"username": action.username, "mac": str(mac), "decision": decision}


def _self_signed_handshake(sim: SimNetwork, action: AdversaryAction) -> Dict[str, Any]:
    adv = sim.adversary
    assert adv is not None
    target = action.target or sim.config.topology.server
    claimed = action.username or adv.node_id
    attempt = adv.handshakes_attempted
    key = keygen(sim.curve, derive_rng(sim.seed, f"adversary-key:{attempt}"))
    cert = self_signed_certificate(sim.curve, key, claimed, SubjectKind.USER)
    sim.handshake_records[(adv.node_id, target)] = HandshakeRecord(adv.node_id, target, adversarial=True)
    begin_handshake(sim, sim.nodes[adv.node_id], target, StaticIdentity(key, cert))
    adv.handshakes_attempted += 1
    return {"target": target, "claimed": claimed}


_ACTIONS = {
    "sniff_all": _sniff_all,
    "replay_frame": _replay_frame,
    "inject_frame": _inject_frame,
    "impersonate_user": _impersonate_user,
    "self_signed_handshake": _self_signed_handshake,
}


def adversary_step(sim: SimNetwork, action: AdversaryAction) -> Dict[str, Any]:
    if sim.adversary is None:
        raise SimulationError("scenario has no adversary")
    observation = _ACTIONS[action.action](sim, action)
    sim.events.append(sim.epoch, "adversary", action=action.action, **observation)
    return observation


def run_due_actions(sim: SimNetwork) -> None:
    """Execute every scripted action whose epoch has come, in script order."""
    adv = sim.adversary
    if adv is None:
        return
    while not adv.finished and adv.script[adv.next_action].epoch <= sim.epoch:
        action = adv.script[adv.next_action]
        adv.next_action += 1
        try:
            adversary_step(sim, action)
        except SimulationError as exc:
            adv.errors.append(f"{action.action}: {exc}")
            sim.events.append(sim.epoch, "adversary_error", action=action.action, error=type(exc).__name__)
            log.info("adversary %s failed: %s", action.action, exc)


def capture_stats(sim: SimNetwork) -> Dict[str, int]:
    adv = sim.adversary
    if adv is None:
        return {"captured_datagrams": 0, "captured_bytes": 0, "plaintext_recovered": 0}
    captured = [d.data for d in adv.captured]
    return {
        "captured_datagrams": len(captured),
        "captured_bytes": sum(len(d) for d in captured),
        "plaintext_recovered": plaintext_recovered(captured, sim.sent_payloads),
    }

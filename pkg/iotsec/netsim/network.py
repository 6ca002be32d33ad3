"""
Epoch-driven network of a VPN server, home gateways with their device
clusters, remote users and an optional on-path adversary.

Every datagram crosses a lossy link with per-link delay, optional reordering
and duplication. Datagrams starting with the tunnel magic are frames; anything
else is handshake traffic. All randomness comes from seeded sub-streams, so a
(scenario, seed) pair always produces the same event log.
"""

from __future__ import annotations

import heapq
import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from ipaddress import IPv4Address
from typing import Dict, List, Optional, Set, Tuple

from ..config import settings
from ..curves import get_curve
from ..ecc import CurveParams, KeyPair, keygen
from ..errors import ConfigError, NoRoute, RegistryError, TunnelError, WrongSession, error_name
from ..handshake import (
    HandshakeState,
    Phase,
    StaticIdentity,
    TrustAnchor,
    encode_flight,
    new_initiator,
    new_responder,
    on_timeout,
    process_datagram,
    retransmit_due,
    screen_first_flight,
    start_handshake,
)
from ..logger import EventLog
from ..registry import Decision, DeviceKind, IdentityRegistry, MacAddress
from ..state import StateTable
from ..tunnel import (
    InnerPacket,
    RoutingTable,
    decapsulate,
    decode_frame,
    encapsulate,
    encode_frame,
    establish_tunnel,
    is_tunnel_datagram,
    route_inner,
)
from .behaviors import handle_request
from .report import DatagramCounters, FrameCounters, LoginRecord, PayloadCounters
from .rng import derive_bytes, derive_rng
from .scenario import ADVERSARY_ID, AdversaryAction, ScenarioConfig, address_plan

log = logging.getLogger(__name__)

HONEST = "honest"
ADVERSARY = "adversary"


class NodeKind(str, Enum):
    VPN_SERVER = "vpn_server"
    GATEWAY = "gateway"
    IOT_DEVICE = "iot_device"
    USER = "user"
    ADVERSARY = "adversary"


_KIND_OCTET = {
    NodeKind.VPN_SERVER: 0x01,
    NodeKind.GATEWAY: 0x02,
    NodeKind.IOT_DEVICE: 0x03,
    NodeKind.USER: 0x04,
    NodeKind.ADVERSARY: 0x05,
}


@dataclass
class SimNode:
    node_id: str
    kind: NodeKind
    network_address: str
    mac: MacAddress
    private_address: Optional[IPv4Address] = None
    identity: Optional[StaticIdentity] = field(default=None, repr=False)
    cookie_secret: bytes = field(default=b"", repr=False)
    password: Optional[str] = field(default=None, repr=False)
    gateway_id: Optional[str] = None
    behavior: Optional[str] = None
    # devices reachable over the local WSN link (gateways only)
    local_devices: Dict[IPv4Address, str] = field(default_factory=dict)
    routing: RoutingTable = field(default_factory=RoutingTable)


@dataclass(frozen=True)
class Datagram:
    src: str
    dst: str
    data: bytes
    origin: str = HONEST

    @property
    def is_frame(self) -> bool:
        return is_tunnel_datagram(self.data)


@dataclass(frozen=True)
class PlannedPayload:
    index: int
    sender: str
    receiver: str
    payload: bytes
    epoch: int


@dataclass
class HandshakeRecord:
    initiator: str
    responder: str
    datagrams: List[bytes] = field(default_factory=list, repr=False)
    established_at: Optional[int] = None
    adversarial: bool = False

    @property
    def bytes_on_wire(self) -> int:
        return sum(len(d) for d in self.datagrams)

    def distinct_flights(self) -> List[bytes]:
        """First copy of every flight, in send order (retransmissions are byte-identical)."""
        seen: Set[bytes] = set()
        flights = []
        for data in self.datagrams:
            if data not in seen:
                seen.add(data)
                flights.append(data)
        return flights


@dataclass
class AdversaryState:
    node_id: str
    mac: MacAddress
    script: List[AdversaryAction]
    next_action: int = 0
    sniffing: bool = False
    captured: List[Datagram] = field(default_factory=list, repr=False)
    captured_frames: List[Datagram] = field(default_factory=list, repr=False)
    frames_injected: int = 0
    frames_replayed: int = 0
    frames_accepted: int = 0
    handshakes_attempted: int = 0
    handshakes_established: int = 0
    errors: List[str] = field(default_factory=list)

    @property
    def finished(self) -> bool:
        return self.next_action >= len(self.script)


@dataclass
class SimNetwork:
    config: ScenarioConfig
    curve: CurveParams
    seed: int
    registry: IdentityRegistry
    trust: TrustAnchor
    max_epochs: int
    handshake_timeout: int
    retransmit_budget: int
    link_rng: random.Random = field(repr=False)
    nodes: Dict[str, SimNode] = field(default_factory=dict)
    states: StateTable = field(default_factory=StateTable, repr=False)
    events: EventLog = field(default_factory=EventLog, repr=False)
    epoch: int = 0
    epochs_run: int = 0
    started: bool = False
    schedule: List[Tuple[str, str]] = field(default_factory=list)
    handshake_records: Dict[Tuple[str, str], HandshakeRecord] = field(default_factory=dict)
    adversary: Optional[AdversaryState] = None
    pending_traffic: List[PlannedPayload] = field(default_factory=list)
    logins: List[LoginRecord] = field(default_factory=list)

    handshake_datagrams: DatagramCounters = field(default_factory=DatagramCounters)
    frames: FrameCounters = field(default_factory=FrameCounters)
    payloads: PayloadCounters = field(default_factory=PayloadCounters)

    sent_payloads: List[bytes] = field(default_factory=list, repr=False)
    honest_frames: Set[bytes] = field(default_factory=set, repr=False)
    accepted_frames: Set[Tuple[str, bytes, int]] = field(default_factory=set, repr=False)
    replay_accepted: int = 0
    forged_accepted: int = 0

    _queue: List[Tuple[int, int, Datagram]] = field(default_factory=list, repr=False)
    _order: int = 0
    _by_address: Dict[str, str] = field(default_factory=dict, repr=False)
    _planned: Counter = field(default_factory=Counter, repr=False)

    def node_at(self, network_address: str) -> Optional[SimNode]:
        node_id = self._by_address.get(network_address)
        return self.nodes.get(node_id) if node_id is not None else None

    def handshake(self, node_id: str, peer_id: str) -> Optional[HandshakeState]:
        return self.states.get_node_state(node_id).handshakes.get(peer_id)

    def in_flight(self) -> int:
        return len(self._queue)


# --- construction ------------------------------------------------------------


def _infra_mac(kind: NodeKind, index: int) -> MacAddress:
    return MacAddress(bytes([0x02, 0x00, 0x00, _KIND_OCTET[kind], (index >> 8) & 0xFF, index & 0xFF]))


def _add_node(sim: SimNetwork, node: SimNode) -> SimNode:
    sim.nodes[node.node_id] = node
    sim._by_address[node.network_address] = node.node_id
    return node


def _network_address(index: int) -> str:
    return f"198.51.{index // 256}.{index % 256}"


def _identity(sim: SimNetwork, node_id: str) -> Tuple[KeyPair, bytes]:
    key = keygen(sim.curve, derive_rng(sim.seed, f"static:{node_id}"))
    return key, derive_bytes(sim.seed, f"cookie:{node_id}", 32)


def _register(sim: SimNetwork) -> None:
    """Phase 1: every legitimate node gets its registry record and certificate."""
    topo = sim.config.topology
    plan = address_plan(sim.config)
    reg = sim.registry
    index = 0

    def node(node_id: str, kind: NodeKind, mac: MacAddress, **kwargs) -> SimNode:
        nonlocal index
        index += 1
        return _add_node(
            sim,
            SimNode(
                node_id=node_id,
                kind=kind,
                network_address=_network_address(index),
                mac=mac,
                private_address=plan[node_id],
                **kwargs,
            ),
        )

    key, secret = _identity(sim, topo.server)
    server = reg.register_server(topo.server, key.q)
    node(
        topo.server,
        NodeKind.VPN_SERVER,
        _infra_mac(NodeKind.VPN_SERVER, 0),
        identity=StaticIdentity(key, server.certificate),
        cookie_secret=secret,
    )
    for i, gw in enumerate(topo.gateways):
        key, secret = _identity(sim, gw.id)
        record = reg.register_device(gw.id, DeviceKind.GATEWAY, None, plan[gw.id], key.q)
        node(
            gw.id,
            NodeKind.GATEWAY,
            _infra_mac(NodeKind.GATEWAY, i),
            identity=StaticIdentity(key, record.certificate),
            cookie_secret=secret,
        )
    for i, dev in enumerate(topo.devices):
        key, secret = _identity(sim, dev.id)
        record = reg.register_device(dev.id, DeviceKind.IOT_DEVICE, dev.gateway, plan[dev.id], key.q)
        node(
            dev.id,
            NodeKind.IOT_DEVICE,
            _infra_mac(NodeKind.IOT_DEVICE, i),
            identity=StaticIdentity(key, record.certificate),
            cookie_secret=secret,
            gateway_id=dev.gateway,
            behavior=dev.behavior,
        )
        sim.nodes[dev.gateway].local_devices[plan[dev.id]] = dev.id
        sim.states.get_device_state(dev.id, dev.behavior)
    for user in topo.users:
        key, _ = _identity(sim, user.username)
        mac = MacAddress.parse(user.mac)
        record = reg.register_user(user.username, user.password, mac, key.q)
        node(
            user.username,
            NodeKind.USER,
            mac,
            identity=StaticIdentity(key, record.certificate),
            password=user.password,
        )

    if sim.config.adversary is not None:
        # never registered: it holds no certificate from the root
        mac = MacAddress.parse(sim.config.adversary.mac)
        index += 1
        _add_node(
            sim,
            SimNode(node_id=ADVERSARY_ID, kind=NodeKind.ADVERSARY, network_address=_network_address(index), mac=mac),
        )
        script = sorted(sim.config.adversary.script, key=lambda a: a.epoch)
        sim.adversary = AdversaryState(node_id=ADVERSARY_ID, mac=mac, script=script)


def _build_routes(sim: SimNetwork) -> None:
    topo = sim.config.topology
    routing = sim.config.routing
    direct = routing.mode == "direct"
    plan = address_plan(sim.config)
    server = sim.nodes[topo.server]
    users = [sim.nodes[u.username] for u in topo.users]

    for gw in topo.gateways:
        server.routing.add(plan[gw.id], gw.id)
    for dev in topo.devices:
        server.routing.add(plan[dev.id], dev.gateway)
    for user in users:
        server.routing.add(user.private_address, user.node_id)

    for gw in topo.gateways:
        table = sim.nodes[gw.id].routing
        table.mediator = topo.server
        if direct:
            for user in users:
                table.add(user.private_address, user.node_id)

    for user in users:
        table = user.routing
        table.mediator = topo.server
        if direct:
            for gw in topo.gateways:
                table.add(plan[gw.id], gw.id)
            for dev in topo.devices:
                table.add(plan[dev.id], dev.gateway)
        if routing.device_tunnels:
            for dev in topo.devices:
                table.add(plan[dev.id], dev.id)

    for dev in topo.devices:
        table = sim.nodes[dev.id].routing
        table.mediator = dev.gateway
        if routing.device_tunnels:
            for user in users:
                table.add(user.private_address, user.node_id)


def _build_schedule(sim: SimNetwork) -> None:
    topo = sim.config.topology
    pairs = [(gw.id, topo.server) for gw in topo.gateways]
    pairs += [(u.username, topo.server) for u in topo.users]
    if sim.config.routing.mode == "direct":
        pairs += [(u.username, gw.id) for u in topo.users for gw in topo.gateways]
    if sim.config.routing.device_tunnels:
        pairs += [(u.username, dev.id) for u in topo.users for dev in topo.devices]
    sim.schedule = pairs
    for initiator, responder in pairs:
        sim.handshake_records[(initiator, responder)] = HandshakeRecord(initiator, responder)


def _build_traffic(sim: SimNetwork) -> None:
    planned = [
        PlannedPayload(i, item.sender, item.receiver, item.payload.encode("utf-8"), item.epoch)
        for i, item in enumerate(sim.config.traffic)
    ]
    rt = sim.config.random_traffic
    if rt is not None:
        rng = derive_rng(sim.seed, "traffic")
        base = len(planned)
        planned += [
            PlannedPayload(base + k, rt.sender, rt.receiver, rng.getrandbits(8 * rt.size).to_bytes(rt.size, "big"), rt.start_epoch)
            for k in range(rt.count)
        ]
    sim.pending_traffic = sorted(planned, key=lambda p: (p.epoch, p.index))
    sim.payloads.planned = len(planned)


def build_simulation(
    config: ScenarioConfig,
    *,
    seed: Optional[int] = None,
    max_epochs: Optional[int] = None,
) -> SimNetwork:
    if seed is None:
        seed = config.seed if config.seed is not None else settings.default_seed
    curve = get_curve(config.curve)
    registry = IdentityRegistry.create(curve, derive_rng(seed, "registry"))
    sim = SimNetwork(
        config=config,
        curve=curve,
        seed=seed,
        registry=registry,
        trust=TrustAnchor(root_public=registry.root_public, status_of=registry.lookup_certificate_status),
        max_epochs=max_epochs or config.max_epochs or settings.max_epochs,
        handshake_timeout=config.handshake.timeout or settings.handshake_timeout,
        retransmit_budget=(
            config.handshake.retransmit_budget
            if config.handshake.retransmit_budget is not None
            else settings.retransmit_budget
        ),
        link_rng=derive_rng(seed, "link"),
    )
    try:
        _register(sim)
    except RegistryError as e:
        raise ConfigError("topology", str(e))
    _build_routes(sim)
    _build_schedule(sim)
    _build_traffic(sim)
    log.info("built %s: %d nodes on %s, seed %d", config.name, len(sim.nodes), curve.name, seed)
    return sim


# --- link ---------------------------------------------------------------------


def _record_for(sim: SimNetwork, a: str, b: str) -> Optional[HandshakeRecord]:
    return sim.handshake_records.get((a, b)) or sim.handshake_records.get((b, a))


def _enqueue(sim: SimNetwork, datagram: Datagram, deliver_at: int) -> None:
    sim._order += 1
    heapq.heappush(sim._queue, (deliver_at, sim._order, datagram))


def transmit_datagram(sim: SimNetwork, datagram: Datagram) -> None:
    """Put one datagram on the wire: capture, then loss, reordering and duplication."""
    src = sim.node_at(datagram.src)
    dst = sim.node_at(datagram.dst)
    src_id = src.node_id if src else datagram.src
    dst_id = dst.node_id if dst else datagram.dst
    frame = datagram.is_frame
    counters = sim.frames if frame else sim.handshake_datagrams
    counters.sent += 1

    if not frame:
        record = _record_for(sim, src_id, dst_id)
        if record is not None:
            record.datagrams.append(datagram.data)
    adv = sim.adversary
    if adv is not None and adv.sniffing and datagram.origin == HONEST:
        adv.captured.append(datagram)
        if frame:
            adv.captured_frames.append(datagram)

    link = sim.config.link
    rng = sim.link_rng
    sim.events.append(
        sim.epoch,
        "send",
        src=src_id,
        dst=dst_id,
        kind="frame" if frame else "handshake",
        size=len(datagram.data),
        origin=datagram.origin,
    )
    if rng.random() < link.loss_rate:
        counters.dropped += 1
        sim.events.append(sim.epoch, "lost", src=src_id, dst=dst_id)
        return
    delay = link.delay
    if rng.random() < link.reorder_rate:
        delay += rng.randint(1, max(1, link.max_reorder_delay))
    _enqueue(sim, datagram, sim.epoch + delay)
    if rng.random() < link.duplicate_rate:
        counters.sent += 1
        sim.events.append(sim.epoch, "duplicated", src=src_id, dst=dst_id)
        _enqueue(sim, datagram, sim.epoch + delay + 1)


def send(sim: SimNetwork, src_id: str, dst_id: str, data: bytes, *, origin: str = HONEST) -> None:
    datagram = Datagram(
        src=sim.nodes[src_id].network_address,
        dst=sim.nodes[dst_id].network_address,
        data=data,
        origin=origin,
    )
    transmit_datagram(sim, datagram)


# --- handshakes ---------------------------------------------------------------


def _new_responder(sim: SimNetwork, node: SimNode, peer: SimNode) -> HandshakeState:
    assert node.identity is not None
    return new_responder(
        sim.curve,
        node.identity,
        sim.trust,
        derive_rng(sim.seed, f"hs:{peer.node_id}->{node.node_id}"),
        cookie_secret=node.cookie_secret,
        peer_address=peer.network_address.encode("ascii"),
        retransmit_budget=sim.retransmit_budget,
        timeout=sim.handshake_timeout,
    )


def begin_handshake(sim: SimNetwork, initiator: SimNode, responder_id: str, identity: StaticIdentity) -> HandshakeState:
    origin = ADVERSARY if initiator.kind is NodeKind.ADVERSARY else HONEST
    state = new_initiator(
        sim.curve,
        identity,
        sim.trust,
        derive_rng(sim.seed, f"hs:{initiator.node_id}->{responder_id}"),
        expected_peer=responder_id,
        retransmit_budget=sim.retransmit_budget,
        timeout=sim.handshake_timeout,
    )
    sim.states.get_node_state(initiator.node_id).handshakes[responder_id] = state
    hello = start_handshake(state, now=sim.epoch)
    sim.events.append(sim.epoch, "handshake_start", initiator=initiator.node_id, responder=responder_id)
    send(sim, initiator.node_id, responder_id, encode_flight([hello]), origin=origin)
    return state


def _open_tunnel(sim: SimNetwork, node: SimNode, peer_id: str, state: HandshakeState) -> None:
    assert state.session_keys is not None
    session = establish_tunnel(state.session_keys, state.role, (node.node_id, peer_id))
    ns = sim.states.get_node_state(node.node_id)
    ns.tunnels[peer_id] = session
    ns.sessions[session.session_id] = session
    sim.events.append(
        sim.epoch, "tunnel_up", node=node.node_id, peer=peer_id, role=state.role, session=session.session_id
    )
    record = _record_for(sim, node.node_id, peer_id)
    if record is not None and record.established_at is None:
        record.established_at = sim.epoch
    if sim.adversary is not None and ADVERSARY_ID in (node.node_id, peer_id):
        sim.adversary.handshakes_established += 1
        log.warning("adversary handshake established between %s and %s", node.node_id, peer_id)


def _note_failure(sim: SimNetwork, node: SimNode, peer_id: str, state: HandshakeState) -> None:
    reason = state.failure_reason.name if state.failure_reason is not None else None
    sim.events.append(sim.epoch, "handshake_failed", node=node.node_id, peer=peer_id, reason=reason)


def _receive_handshake(sim: SimNetwork, node: SimNode, peer: SimNode, data: bytes) -> None:
    ns = sim.states.get_node_state(node.node_id)
    state = ns.handshakes.get(peer.node_id)
    if state is None:
        if node.kind in (NodeKind.USER, NodeKind.ADVERSARY) or node.identity is None:
            sim.events.append(sim.epoch, "unsolicited", node=node.node_id, peer=peer.node_id)
            return
        admit, reply = screen_first_flight(node.cookie_secret, peer.network_address.encode("ascii"), data)
        if reply:
            send(sim, node.node_id, peer.node_id, encode_flight(reply))
        if not admit:
            if not reply:
                sim.events.append(sim.epoch, "handshake_dropped", node=node.node_id, peer=peer.node_id)
            return
        state = _new_responder(sim, node, peer)
        ns.handshakes[peer.node_id] = state
    before = state.phase
    result = process_datagram(state, data, sim.epoch)
    if result.outbound:
        origin = ADVERSARY if node.kind is NodeKind.ADVERSARY else HONEST
        send(sim, node.node_id, peer.node_id, encode_flight(result.outbound), origin=origin)
    if result.session_keys is not None:
        _open_tunnel(sim, node, peer.node_id, state)
    if state.phase is Phase.FAILED and before is not Phase.FAILED:
        _note_failure(sim, node, peer.node_id, state)


def drive_timeouts(sim: SimNetwork) -> None:
    for node in sim.nodes.values():
        ns = sim.states.get_node_state(node.node_id)
        for peer_id, state in ns.handshakes.items():
            if not retransmit_due(state, sim.epoch):
                continue
            outbound = on_timeout(state, sim.epoch)
            if state.phase is Phase.FAILED:
                _note_failure(sim, node, peer_id, state)
            else:
                sim.events.append(sim.epoch, "retransmit", node=node.node_id, peer=peer_id, count=state.retransmits)
            if outbound:
                origin = ADVERSARY if node.kind is NodeKind.ADVERSARY else HONEST
                send(sim, node.node_id, peer_id, encode_flight(outbound), origin=origin)


def start_handshakes(sim: SimNetwork) -> None:
    """Users log in first (credentials + MAC); gateways go straight to the handshake."""
    allowed: Dict[str, bool] = {}
    for initiator_id, responder_id in sim.schedule:
        node = sim.nodes[initiator_id]
        if node.kind is NodeKind.USER:
            if initiator_id not in allowed:
                decision = sim.registry.authenticate_credentials(initiator_id, node.password or "", node.mac)
                sim.logins.append(LoginRecord(actor="user", username=initiator_id, mac=str(node.mac), decision=decision))
                sim.events.append(sim.epoch, "login", username=initiator_id, decision=decision)
                allowed[initiator_id] = decision is Decision.ACCEPTED
            if not allowed[initiator_id]:
                continue
        assert node.identity is not None
        begin_handshake(sim, node, responder_id, node.identity)
    sim.started = True


def handshakes_settled(sim: SimNetwork) -> bool:
    for initiator_id, responder_id in sim.schedule:
        state = sim.handshake(initiator_id, responder_id)
        if state is not None and state.phase not in (Phase.ESTABLISHED, Phase.FAILED):
            return False
    return True


# --- frames and payloads ------------------------------------------------------


def _block(sim: SimNetwork, node: SimNode, packet: InnerPacket, reason: str) -> None:
    sim.payloads.blocked += 1
    sim.events.append(
        sim.epoch, "payload_blocked", node=node.node_id, dst=packet.dst_private, reason=reason
    )
    log.info("payload at %s for %s blocked: %s", node.node_id, packet.dst_private, reason)


def forward(sim: SimNetwork, node_id: str, packet: InnerPacket) -> None:
    node = sim.nodes[node_id]
    if packet.dst_private == node.private_address:
        _arrive(sim, node, packet)
        return
    local = node.local_devices.get(packet.dst_private)
    if local is not None:
        _arrive(sim, sim.nodes[local], packet)
        return
    try:
        next_hop = route_inner(packet, node.routing)
    except NoRoute:
        _block(sim, node, packet, "NoRoute")
        return
    if node.kind is NodeKind.IOT_DEVICE and next_hop == node.gateway_id:
        # local WSN hop; the gateway terminates the tunnel for its devices
        forward(sim, next_hop, packet)
        return
    session = sim.states.get_node_state(node_id).tunnels.get(next_hop)
    if session is None:
        _block(sim, node, packet, "NoTunnel")
        return
    try:
        frame = encapsulate(session, packet)
    except TunnelError as exc:
        _block(sim, node, packet, error_name(exc) or "TunnelError")
        return
    data = encode_frame(frame)
    sim.honest_frames.add(data)
    send(sim, node_id, next_hop, data)


def _arrive(sim: SimNetwork, node: SimNode, packet: InnerPacket) -> None:
    key = packet.to_bytes()
    planned = sim._planned[key] > 0
    if planned:
        sim._planned[key] -= 1
        sim.payloads.delivered += 1
    else:
        sim.payloads.replies_delivered += 1
    sim.events.append(
        sim.epoch, "payload_delivered", node=node.node_id, src=packet.src_private, size=len(packet.payload)
    )
    if node.kind is not NodeKind.IOT_DEVICE or not planned:
        return
    device = sim.states.get_device_state(node.node_id, node.behavior or "sink")
    reply = handle_request(device, packet.payload)
    if reply is not None:
        sim.payloads.replies_sent += 1
        sim.sent_payloads.append(reply)
        forward(sim, node.node_id, InnerPacket(node.private_address, packet.src_private, reply))


def _receive_frame(sim: SimNetwork, node: SimNode, datagram: Datagram) -> None:
    ns = sim.states.get_node_state(node.node_id)
    try:
        frame = decode_frame(datagram.data)
        session = ns.sessions.get(frame.session_id)
        if session is None:
            raise WrongSession(f"{node.node_id} has no session {frame.session_id.hex()}")
        packet = decapsulate(session, frame)
    except TunnelError as exc:
        reason = error_name(exc) or "TunnelError"
        sim.frames.rejected[reason] = sim.frames.rejected.get(reason, 0) + 1
        sim.events.append(sim.epoch, "frame_rejected", node=node.node_id, reason=reason, origin=datagram.origin)
        log.info("frame at %s rejected: %s", node.node_id, exc)
        return

    sim.frames.delivered += 1
    seen_key = (node.node_id, frame.session_id, frame.seq)
    if seen_key in sim.accepted_frames:
        sim.replay_accepted += 1
    sim.accepted_frames.add(seen_key)
    if datagram.data not in sim.honest_frames:
        sim.forged_accepted += 1
    if datagram.origin == ADVERSARY and sim.adversary is not None:
        sim.adversary.frames_accepted += 1
    sim.events.append(sim.epoch, "frame_accepted", node=node.node_id, peer=session.remote, seq=frame.seq)
    forward(sim, node.node_id, packet)


def deliver(sim: SimNetwork, datagram: Datagram) -> None:
    node = sim.node_at(datagram.dst)
    if node is None:
        counters = sim.frames if datagram.is_frame else sim.handshake_datagrams
        counters.dropped += 1
        return
    if datagram.is_frame:
        _receive_frame(sim, node, datagram)
        return
    sim.handshake_datagrams.delivered += 1
    peer = sim.node_at(datagram.src)
    if peer is None:
        return
    _receive_handshake(sim, node, peer, datagram.data)


def deliver_due(sim: SimNetwork) -> None:
    while sim._queue and sim._queue[0][0] <= sim.epoch:
        _, _, datagram = heapq.heappop(sim._queue)
        deliver(sim, datagram)


def originate(sim: SimNetwork, item: PlannedPayload) -> None:
    sender = sim.nodes[item.sender]
    receiver = sim.nodes[item.receiver]
    packet = InnerPacket(sender.private_address, receiver.private_address, item.payload)
    sim._planned[packet.to_bytes()] += 1
    sim.sent_payloads.append(item.payload)
    sim.events.append(sim.epoch, "payload_sent", sender=item.sender, receiver=item.receiver, size=len(item.payload))
    forward(sim, item.sender, packet)


def drain_in_flight(sim: SimNetwork) -> None:
    """Whatever is still on the wire at the horizon counts as dropped."""
    for _, _, datagram in sim._queue:
        if datagram.is_frame:
            sim.frames.dropped += 1
        else:
            sim.handshake_datagrams.dropped += 1
    if sim._queue:
        sim.events.append(sim.epoch, "horizon", in_flight=len(sim._queue))
    sim._queue.clear()

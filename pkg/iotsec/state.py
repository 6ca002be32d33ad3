from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional

from .handshake import HandshakeState, Phase
from .tunnel import TunnelSession


@dataclass
class DeviceState:
    behavior: str = "report_temperature"  # 'report_temperature' | 'toggle_state' | 'sink'
    on: bool = False
    reading: float = 21.0
    received: int = 0
    last_payload: bytes = b""


@dataclass
class NodeState:
    # Handshakes keyed by peer node id; one per peer at most
    handshakes: Dict[str, HandshakeState] = field(default_factory=dict)
    # Established tunnels keyed by peer node id, and again by session id for inbound frames
    tunnels: Dict[str, TunnelSession] = field(default_factory=dict)
    sessions: Dict[bytes, TunnelSession] = field(default_factory=dict)
    device: Optional[DeviceState] = None

    def busy(self) -> bool:
        return any(h.phase not in (Phase.IDLE, Phase.ESTABLISHED, Phase.FAILED) for h in self.handshakes.values())


class StateTable:
    """Attachment state of every node in one simulation."""

    def __init__(self) -> None:
        self.node_states: Dict[str, NodeState] = {}

    def get_node_state(self, node_id: str) -> NodeState:
        state = self.node_states.get(node_id)
        if state is None:
            state = NodeState()
            self.node_states[node_id] = state
        return state

    def get_device_state(self, node_id: str, behavior: str) -> DeviceState:
        node = self.get_node_state(node_id)
        if node.device is None:
            node.device = DeviceState(behavior=behavior)
        return node.device
